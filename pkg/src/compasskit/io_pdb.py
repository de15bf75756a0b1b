"""PDB reading and complex writing (fixed-column format).

Column layout for ATOM/HETATM records (1-based): serial 7-11, name 13-16,
altLoc 17, resName 18-20, chain 22, resSeq 23-26, iCode 27, x/y/z
31-38/39-46/47-54, element 77-78. Only altLoc ' ' or 'A' is kept. Residues
are grouped by (chain, seq, icode, name) so insertion codes never merge.
"""

from __future__ import annotations

import os

import numpy as np

from .elements import is_known_element, normalize_symbol
from .errors import EmptyStructure, IoFailure, MalformedRecord
from .structures import (
    Atom,
    MolecularStructure,
    Residue,
    classify_residue_kind,
)


def _infer_element(raw_name: str, res_name: str) -> str:
    """Element from the atom-name field when columns 77-78 are blank.

    PDB right-justifies two-letter elements into columns 13-14, so a letter
    in column 13 signals a candidate like 'CL'/'ZN'; metals additionally
    require the residue name to agree ('ZN'/'ZN') so a left-shifted 'CA'
    alpha carbon is not read as calcium. Otherwise the first alphabetic
    character is the element ('CA' -> C, '1HB' -> H).
    """
    from .elements import ELEMENT_TABLE

    raw_name = raw_name.ljust(4)
    if raw_name[0].isalpha():
        two = normalize_symbol(raw_name[:2])
        if is_known_element(two):
            if not ELEMENT_TABLE[two].is_metal or two == normalize_symbol(res_name):
                return two
    for ch in raw_name:
        if ch.isalpha():
            if is_known_element(ch):
                return normalize_symbol(ch)
            break
    return ""


def parse_pdb(text: str | bytes) -> MolecularStructure:
    """Parse ATOM/HETATM records into a structure with residues.

    Keeps the first alternate conformer only; waters are retained with kind
    'water'; single-atom ions from the metal list get kind 'metal'.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")

    atoms: list[Atom] = []
    res_keys: list[tuple] = []          # parallel to atoms: residue grouping key
    res_meta: dict[tuple, tuple] = {}   # key -> (name, chain, seq, icode)

    for line in text.splitlines():
        rec = line[:6]
        if rec not in ("ATOM  ", "HETATM"):
            continue
        line = line.rstrip("\n").ljust(80)
        alt = line[16]
        if alt not in (" ", "A"):
            continue
        name_field = line[12:16]
        res_name = line[17:20].strip()
        chain = line[21]
        icode = line[26].strip()
        try:
            serial = int(line[6:11])
            seq = int(line[22:26])
            x = float(line[30:38])
            y = float(line[38:46])
            z = float(line[46:54])
        except ValueError as exc:
            raise MalformedRecord(f"unparsable record: {line[:54]!r}") from exc

        element = normalize_symbol(line[76:78])
        if not element or not is_known_element(element):
            element = _infer_element(name_field, res_name)
        if not element:
            raise MalformedRecord(
                f"cannot determine element for atom {serial} ({name_field.strip()!r})"
            )

        key = (chain, seq, icode, res_name)
        res_meta.setdefault(key, (res_name, chain, seq, icode))
        res_keys.append(key)
        atoms.append(
            Atom(
                serial=serial,
                element=element,
                position=np.array([x, y, z]),
                name=name_field.strip(),
            )
        )

    if not atoms:
        raise EmptyStructure("no ATOM/HETATM records found")

    # Group atoms into residues in first-seen order.
    order: list[tuple] = []
    members: dict[tuple, list[int]] = {}
    for i, key in enumerate(res_keys):
        if key not in members:
            members[key] = []
            order.append(key)
        members[key].append(i)

    residues = []
    atom_res_index = {}
    for ridx, key in enumerate(order):
        name, chain, seq, icode = res_meta[key]
        idxs = members[key]
        kind = classify_residue_kind(name, [atoms[i].element for i in idxs])
        names = {atoms[i].name for i in idxs}
        incomplete = kind == "standard_aa" and not {"N", "CA", "C"} <= names
        residues.append(
            Residue(
                name=name,
                chain=chain,
                seq_id=seq,
                atoms=tuple(idxs),
                kind=kind,
                icode=icode,
                incomplete=incomplete,
            )
        )
        for i in idxs:
            atom_res_index[i] = ridx

    atoms = [
        Atom(
            serial=a.serial,
            element=a.element,
            position=a.position,
            name=a.name,
            residue_index=atom_res_index[i],
        )
        for i, a in enumerate(atoms)
    ]
    return MolecularStructure(
        atoms=tuple(atoms), residues=tuple(residues), source_format="pdb"
    )


def _format_atom_line(record: str, serial: int, name: str, res_name: str,
                      chain: str, seq: int, icode: str, pos, element: str) -> str:
    # Atom names of 1-3 chars start in column 14 unless the element is
    # two letters; 4-char names fill the field.
    if len(name) >= 4:
        name_field = name[:4]
    elif len(element) == 2:
        name_field = f"{name:<4}"[:4]
    else:
        name_field = f" {name:<3}"[:4]
    return (
        f"{record:<6}{serial:>5} {name_field}{'':1}{res_name:>3} {chain:1}"
        f"{seq:>4}{icode:<1}   {pos[0]:8.3f}{pos[1]:8.3f}{pos[2]:8.3f}"
        f"{1.00:6.2f}{0.00:6.2f}          {element.upper():>2}"
    )


def structure_to_pdb_text(protein: MolecularStructure,
                          ligand: MolecularStructure | None = None) -> str:
    """Serialize protein ATOM records, optionally followed by the ligand as
    HETATM records under residue LIG / chain Z."""
    lines = []
    serial = 0
    for i, atom in enumerate(protein.atoms):
        res = protein.residue_of(i)
        serial += 1
        record = "ATOM  " if res is not None and res.kind == "standard_aa" else "HETATM"
        lines.append(
            _format_atom_line(
                record,
                serial,
                atom.name or atom.element,
                res.name if res else "UNK",
                res.chain if res else "A",
                res.seq_id if res else 1,
                res.icode if res else "",
                atom.position,
                atom.element,
            )
        )
    if ligand is not None:
        for atom in ligand.atoms:
            serial += 1
            lines.append(
                _format_atom_line(
                    "HETATM", serial, atom.name or atom.element,
                    "LIG", "Z", 1, "", atom.position, atom.element,
                )
            )
    lines.append("END")
    return "\n".join(lines) + "\n"


def write_complex_pdb(protein: MolecularStructure, ligand: MolecularStructure,
                      path: str | os.PathLike) -> None:
    """Write a single PDB holding the protein and the posed ligand.

    Coordinates are serialized at 8.3 precision, so a re-parse reproduces
    them to 1e-3 Angstrom.
    """
    if not protein.atoms or not ligand.atoms:
        raise EmptyStructure("complex writer needs non-empty protein and ligand")
    text = structure_to_pdb_text(protein, ligand)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
