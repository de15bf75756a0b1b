"""SDF (V2000 connection table) reading and writing for ligands."""

from __future__ import annotations

import numpy as np

from .elements import is_known_element, normalize_symbol
from .errors import CountsMismatch, EmptyStructure, MalformedRecord, UnknownElement
from .structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Atom,
    Bond,
    MolecularStructure,
)

_BOND_ORDER_FROM_CODE = {1: BOND_SINGLE, 2: BOND_DOUBLE, 3: BOND_TRIPLE, 4: BOND_AROMATIC}
_CODE_FROM_BOND_ORDER = {v: k for k, v in _BOND_ORDER_FROM_CODE.items()}


def parse_sdf(text: str | bytes) -> MolecularStructure:
    """Parse the first molecule of a V2000 SDF.

    The counts line is authoritative: fewer atom or bond lines than declared
    raises CountsMismatch. 'M  CHG' entries set formal charges.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    lines = text.splitlines()
    if len(lines) < 4:
        raise EmptyStructure("SDF shorter than header + counts line")

    counts = lines[3]
    try:
        n_atoms = int(counts[0:3])
        n_bonds = int(counts[3:6])
    except (ValueError, IndexError) as exc:
        raise MalformedRecord(f"bad counts line: {counts!r}") from exc
    if n_atoms == 0:
        raise EmptyStructure("counts line declares zero atoms")

    body = lines[4:]
    # A premature terminator truncates the declared blocks.
    for stop, line in enumerate(body):
        if line.startswith("$$$$") or line.startswith("M  END"):
            body = body[:stop]
            break
    if len(body) < n_atoms + n_bonds:
        raise CountsMismatch(
            f"declared {n_atoms} atoms / {n_bonds} bonds, "
            f"found {len(body)} block lines"
        )

    atoms = []
    for i in range(n_atoms):
        fields = body[i].split()
        if len(fields) < 4:
            raise MalformedRecord(f"bad atom line: {body[i]!r}")
        try:
            x, y, z = float(fields[0]), float(fields[1]), float(fields[2])
        except ValueError as exc:
            raise MalformedRecord(f"bad atom coordinates: {body[i]!r}") from exc
        symbol = normalize_symbol(fields[3])
        if not is_known_element(symbol):
            raise UnknownElement(f"atom {i + 1}: element {fields[3]!r}")
        atoms.append(
            Atom(serial=i + 1, element=symbol, position=np.array([x, y, z]))
        )

    bonds = []
    for i in range(n_bonds):
        line = body[n_atoms + i]
        try:
            a = int(line[0:3])
            b = int(line[3:6])
            code = int(line[6:9])
        except (ValueError, IndexError) as exc:
            raise MalformedRecord(f"bad bond line: {line!r}") from exc
        if not (1 <= a <= n_atoms and 1 <= b <= n_atoms) or a == b:
            raise MalformedRecord(f"bond references bad atom ids: {line!r}")
        bonds.append(
            Bond(atom_a=a - 1, atom_b=b - 1,
                 order=_BOND_ORDER_FROM_CODE.get(code, BOND_SINGLE))
        )

    # Properties block: only M  CHG is honored.
    charges: dict[int, int] = {}
    for line in lines[4 + n_atoms + n_bonds:]:
        if line.startswith("$$$$"):
            break
        if line.startswith("M  CHG"):
            fields = line.split()
            n = int(fields[2])
            for k in range(n):
                idx = int(fields[3 + 2 * k]) - 1
                charges[idx] = int(fields[4 + 2 * k])
    if charges:
        atoms = [
            Atom(serial=a.serial, element=a.element, position=a.position,
                 formal_charge=charges.get(i, 0))
            for i, a in enumerate(atoms)
        ]

    return MolecularStructure(
        atoms=tuple(atoms), bonds=tuple(bonds), source_format="sdf"
    )


def structure_to_sdf_text(mol: MolecularStructure, title: str = "ligand") -> str:
    """Serialize a ligand as a single-molecule V2000 SDF."""
    if not mol.atoms:
        raise EmptyStructure("cannot write an empty molecule")
    lines = [title, "  compasskit", ""]
    lines.append(
        f"{len(mol.atoms):>3}{len(mol.bonds):>3}  0  0  0  0  0  0  0  0999 V2000"
    )
    for a in mol.atoms:
        x, y, z = a.position
        lines.append(f"{x:>10.4f}{y:>10.4f}{z:>10.4f} {a.element:<3} 0  0  0  0  0  0  0  0  0  0  0  0")
    for b in mol.bonds:
        code = _CODE_FROM_BOND_ORDER.get(b.order, 1)
        lines.append(f"{b.atom_a + 1:>3}{b.atom_b + 1:>3}{code:>3}  0")
    charged = [(i, a.formal_charge) for i, a in enumerate(mol.atoms) if a.formal_charge]
    for start in range(0, len(charged), 8):
        chunk = charged[start:start + 8]
        entry = "".join(f" {i + 1:>3} {q:>3}" for i, q in chunk)
        lines.append(f"M  CHG{len(chunk):>3}{entry}")
    lines.append("M  END")
    lines.append("$$$$")
    return "\n".join(lines) + "\n"
