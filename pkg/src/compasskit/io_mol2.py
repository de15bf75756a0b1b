"""TRIPOS MOL2 reading and writing (carries partial charges)."""

from __future__ import annotations

import numpy as np

from .elements import is_known_element, normalize_symbol
from .errors import EmptyStructure, MalformedRecord, MissingSection, UnknownElement
from .structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Atom,
    Bond,
    MolecularStructure,
)

_ORDER_FROM_MOL2 = {
    "1": BOND_SINGLE,
    "2": BOND_DOUBLE,
    "3": BOND_TRIPLE,
    "ar": BOND_AROMATIC,
    "am": BOND_SINGLE,  # amide bonds are topologically single
    "du": BOND_SINGLE,
    "un": BOND_SINGLE,
}
_MOL2_FROM_ORDER = {
    BOND_SINGLE: "1",
    BOND_DOUBLE: "2",
    BOND_TRIPLE: "3",
    BOND_AROMATIC: "ar",
}


def _sections(text: str) -> dict[str, list[str]]:
    current = None
    out: dict[str, list[str]] = {}
    for line in text.splitlines():
        if line.startswith("@<TRIPOS>"):
            current = line[len("@<TRIPOS>"):].strip().upper()
            out.setdefault(current, [])
            continue
        if current is not None and line.strip():
            out[current].append(line)
    return out


def _element_from_sybyl(atom_type: str, atom_name: str) -> str:
    base = atom_type.split(".")[0]
    symbol = normalize_symbol(base)
    if is_known_element(symbol):
        return symbol
    for ch in atom_name:
        if ch.isalpha() and is_known_element(ch):
            return normalize_symbol(ch)
    raise UnknownElement(f"cannot map SYBYL type {atom_type!r}")


def parse_mol2(text: str | bytes) -> MolecularStructure:
    """Parse a MOL2 file; partial charges come from the 9th ATOM column."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    sections = _sections(text)
    if "ATOM" not in sections:
        raise MissingSection("@<TRIPOS>ATOM section missing")

    atoms = []
    id_to_index: dict[int, int] = {}
    for line in sections["ATOM"]:
        fields = line.split()
        if len(fields) < 6:
            raise MalformedRecord(f"bad ATOM line: {line!r}")
        try:
            atom_id = int(fields[0])
            x, y, z = float(fields[2]), float(fields[3]), float(fields[4])
        except ValueError as exc:
            raise MalformedRecord(f"bad ATOM line: {line!r}") from exc
        charge = None
        if len(fields) >= 9:
            try:
                charge = float(fields[8])
            except ValueError as exc:
                raise MalformedRecord(f"bad charge field: {line!r}") from exc
        element = _element_from_sybyl(fields[5], fields[1])
        id_to_index[atom_id] = len(atoms)
        atoms.append(
            Atom(serial=atom_id, element=element, name=fields[1],
                 position=np.array([x, y, z]), partial_charge=charge)
        )
    if not atoms:
        raise EmptyStructure("ATOM section empty")

    bonds = []
    for line in sections.get("BOND", []):
        fields = line.split()
        if len(fields) < 4:
            raise MalformedRecord(f"bad BOND line: {line!r}")
        try:
            a = id_to_index[int(fields[1])]
            b = id_to_index[int(fields[2])]
        except (ValueError, KeyError) as exc:
            raise MalformedRecord(f"bond references bad atom ids: {line!r}") from exc
        order = _ORDER_FROM_MOL2.get(fields[3].lower(), BOND_SINGLE)
        bonds.append(Bond(atom_a=a, atom_b=b, order=order))

    return MolecularStructure(
        atoms=tuple(atoms), bonds=tuple(bonds), source_format="mol2"
    )


def structure_to_mol2_text(mol: MolecularStructure, name: str = "ligand") -> str:
    """Serialize a ligand as MOL2 with 4-decimal coordinates and charges."""
    if not mol.atoms:
        raise EmptyStructure("cannot write an empty molecule")
    lines = [
        "@<TRIPOS>MOLECULE",
        name,
        f"{len(mol.atoms)} {len(mol.bonds)} 0 0 0",
        "SMALL",
        "USER_CHARGES",
        "@<TRIPOS>ATOM",
    ]
    for i, a in enumerate(mol.atoms):
        x, y, z = a.position
        q = a.partial_charge if a.partial_charge is not None else 0.0
        label = a.name or f"{a.element}{i + 1}"
        lines.append(
            f"{i + 1:>7} {label:<8} {x:>10.4f} {y:>10.4f} {z:>10.4f} "
            f"{a.element:<5} 1 LIG {q:>9.4f}"
        )
    lines.append("@<TRIPOS>BOND")
    for i, b in enumerate(mol.bonds):
        lines.append(
            f"{i + 1:>6} {b.atom_a + 1:>5} {b.atom_b + 1:>5} {_MOL2_FROM_ORDER.get(b.order, '1'):>4}"
        )
    return "\n".join(lines) + "\n"
