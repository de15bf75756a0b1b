"""Core molecular data types shared by parsers, perception and scoring.

All types are immutable after construction; derived charge assignments
produce new structures via `with_charges`. Bond and residue atom references
are 0-based indices into `MolecularStructure.atoms` (file serial numbers are
kept on the Atom for provenance and PDB output).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

BOND_SINGLE = "single"
BOND_DOUBLE = "double"
BOND_TRIPLE = "triple"
BOND_AROMATIC = "aromatic"

STANDARD_AA = frozenset(
    "ALA ARG ASN ASP CYS GLN GLU GLY HIS ILE LEU LYS MET PHE PRO SER THR TRP TYR VAL".split()
)
WATER_NAMES = frozenset({"HOH", "WAT", "DOD"})

KIND_STANDARD_AA = "standard_aa"
KIND_METAL = "metal"
KIND_OTHER_HET = "other_het"
KIND_WATER = "water"


@dataclass(frozen=True, eq=False)
class Atom:
    serial: int
    element: str
    position: np.ndarray  # (3,) float64, Angstrom
    name: str = ""
    partial_charge: float | None = None
    formal_charge: int = 0
    residue_index: int | None = None

    @property
    def is_hydrogen(self) -> bool:
        return self.element == "H"


@dataclass(frozen=True)
class Bond:
    atom_a: int
    atom_b: int
    order: str = BOND_SINGLE
    in_ring: bool = False

    def other(self, idx: int) -> int:
        return self.atom_b if idx == self.atom_a else self.atom_a


@dataclass(frozen=True)
class Residue:
    name: str
    chain: str
    seq_id: int
    atoms: tuple[int, ...]
    kind: str = KIND_STANDARD_AA
    icode: str = ""
    incomplete: bool = False  # canonical residue missing backbone N/CA/C

    @property
    def label(self) -> str:
        """Stable residue identifier, e.g. 'A:17:SER'."""
        return f"{self.chain}:{self.seq_id}{self.icode}:{self.name}"


@dataclass(frozen=True, eq=False)
class MolecularStructure:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...] = ()
    residues: tuple[Residue, ...] = ()
    source_format: str = ""

    @cached_property
    def coords(self) -> np.ndarray:
        """(N, 3) coordinate array; treated as read-only."""
        if not self.atoms:
            return np.zeros((0, 3))
        out = np.stack([a.position for a in self.atoms]).astype(float)
        out.flags.writeable = False
        return out

    @cached_property
    def neighbor_map(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {i: [] for i in range(len(self.atoms))}
        for b in self.bonds:
            nbrs[b.atom_a].append(b.atom_b)
            nbrs[b.atom_b].append(b.atom_a)
        return {i: tuple(v) for i, v in nbrs.items()}

    @cached_property
    def bond_lookup(self) -> dict[tuple[int, int], Bond]:
        table = {}
        for b in self.bonds:
            table[(b.atom_a, b.atom_b)] = b
            table[(b.atom_b, b.atom_a)] = b
        return table

    def neighbors(self, idx: int) -> tuple[int, ...]:
        return self.neighbor_map.get(idx, ())

    def bond_between(self, a: int, b: int) -> Bond | None:
        return self.bond_lookup.get((a, b))

    def heavy_indices(self) -> list[int]:
        return [i for i, a in enumerate(self.atoms) if not a.is_hydrogen]

    def total_formal_charge(self) -> int:
        return sum(a.formal_charge for a in self.atoms)

    def with_charges(self, charges) -> "MolecularStructure":
        """New structure with partial charges assigned positionally."""
        if len(charges) != len(self.atoms):
            raise ValueError("charge vector length mismatch")
        new_atoms = tuple(
            replace(a, partial_charge=float(q)) for a, q in zip(self.atoms, charges)
        )
        return replace(self, atoms=new_atoms)

    def with_coords(self, coords: np.ndarray) -> "MolecularStructure":
        """New structure with replaced coordinates (same topology)."""
        if coords.shape != (len(self.atoms), 3):
            raise ValueError("coordinate array shape mismatch")
        new_atoms = tuple(
            replace(a, position=np.array(coords[i], dtype=float))
            for i, a in enumerate(self.atoms)
        )
        return replace(self, atoms=new_atoms)

    def residue_of(self, atom_idx: int) -> Residue | None:
        ridx = self.atoms[atom_idx].residue_index
        return self.residues[ridx] if ridx is not None else None


def classify_residue_kind(name: str, atom_elements: list[str]) -> str:
    """HET-code classification: canonical AA, water, single-atom metal ion, other."""
    from .elements import METAL_SYMBOLS

    if name in STANDARD_AA:
        return KIND_STANDARD_AA
    if name in WATER_NAMES:
        return KIND_WATER
    if len(atom_elements) == 1 and atom_elements[0] in METAL_SYMBOLS:
        return KIND_METAL
    return KIND_OTHER_HET
