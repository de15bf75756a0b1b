"""Chemical perception: rings, pharmacophore typing, rotatable bonds,
main-/side-chain split, and binding-pocket extraction.

Ligand perception works from the bond graph; protein perception works from
residue/atom-name templates since protein files carry no bonds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import EmptyPocket
from .geometry import build_grid, pairs_within
from .structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    KIND_STANDARD_AA,
    KIND_WATER,
    MolecularStructure,
)

MAIN_CHAIN_NAMES = frozenset({"N", "CA", "C", "O", "OXT", "H", "HA"})

PLANARITY_TOLERANCE = 0.3  # Angstrom, max deviation from the LS plane
SP2_CAPABLE_ELEMENTS = frozenset({"C", "N", "O", "S"})

# Aromatic side-chain rings as ordered atom-name cycles.
RESIDUE_RING_TEMPLATES: dict[str, list[list[str]]] = {
    "PHE": [["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]],
    "TYR": [["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]],
    "HIS": [["CG", "ND1", "CE1", "NE2", "CD2"]],
    "TRP": [
        ["CG", "CD1", "NE1", "CE2", "CD2"],
        ["CD2", "CE2", "CZ2", "CH2", "CZ3", "CE3"],
    ],
}

# Protein H-bond donors: (residue, atom) -> heavy neighbors used by the
# hydrogen-free angle fallback. Backbone N is handled separately.
PROTEIN_DONORS: dict[tuple[str, str], tuple[str, ...]] = {
    ("SER", "OG"): ("CB",),
    ("THR", "OG1"): ("CB",),
    ("TYR", "OH"): ("CZ",),
    ("CYS", "SG"): ("CB",),
    ("LYS", "NZ"): ("CE",),
    ("ARG", "NE"): ("CD", "CZ"),
    ("ARG", "NH1"): ("CZ",),
    ("ARG", "NH2"): ("CZ",),
    ("HIS", "ND1"): ("CG", "CE1"),
    ("HIS", "NE2"): ("CD2", "CE1"),
    ("TRP", "NE1"): ("CD1", "CE2"),
    ("ASN", "ND2"): ("CG",),
    ("GLN", "NE2"): ("CD",),
}

PROTEIN_ACCEPTORS: dict[str, tuple[str, ...]] = {
    "*": ("O", "OXT"),
    "SER": ("OG",),
    "THR": ("OG1",),
    "TYR": ("OH",),
    "ASP": ("OD1", "OD2"),
    "GLU": ("OE1", "OE2"),
    "ASN": ("OD1",),
    "GLN": ("OE1",),
    "HIS": ("ND1", "NE2"),
}

# Side-chain atoms bonded only to C/H/S, per residue.
PROTEIN_HYDROPHOBIC: dict[str, tuple[str, ...]] = {
    "ALA": ("CB",),
    "VAL": ("CB", "CG1", "CG2"),
    "LEU": ("CB", "CG", "CD1", "CD2"),
    "ILE": ("CB", "CG1", "CG2", "CD1"),
    "MET": ("CB", "CG", "SD", "CE"),
    "PHE": ("CB", "CG", "CD1", "CD2", "CE1", "CE2", "CZ"),
    "TYR": ("CB", "CG", "CD1", "CD2", "CE1", "CE2"),
    "TRP": ("CB", "CD2", "CE3", "CZ3", "CH2", "CZ2"),
    "LYS": ("CB", "CG", "CD"),
    "ARG": ("CB", "CG"),
    "THR": ("CG2",),
    "GLU": ("CB", "CG"),
    "ASP": ("CB",),
    "ASN": ("CB",),
    "GLN": ("CB", "CG"),
    "CYS": ("CB", "SG"),
    "HIS": ("CB",),
    "PRO": ("CB", "CG"),
}

PROTEIN_CATIONS: dict[str, tuple[str, ...]] = {
    "LYS": ("NZ",),
    "ARG": ("CZ",),
}
PROTEIN_CATIONS_WITH_HIS: dict[str, tuple[str, ...]] = {
    **PROTEIN_CATIONS,
    "HIS": ("ND1", "NE2"),
}
PROTEIN_ANIONS: dict[str, tuple[str, ...]] = {
    "ASP": ("OD1", "OD2"),
    "GLU": ("OE1", "OE2"),
}


@dataclass(frozen=True, eq=False)
class Ring:
    atom_indices: tuple[int, ...]
    is_aromatic: bool
    centroid: np.ndarray
    normal: np.ndarray
    residue_index: int | None = None


@dataclass(frozen=True, eq=False)
class PharmacophoreTags:
    donors: dict[int, tuple[int, ...]] = field(default_factory=dict)  # heavy -> bonded H
    donor_heavy_neighbors: dict[int, tuple[int, ...]] = field(default_factory=dict)
    acceptors: frozenset[int] = frozenset()
    hydrophobics: frozenset[int] = frozenset()
    cations: frozenset[int] = frozenset()
    anions: frozenset[int] = frozenset()
    metals: frozenset[int] = frozenset()


def _ring_frame(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centroid and unit normal of an ordered atom cycle.

    The normal is the normalized sum of consecutive cross products, so
    reversing the cycle order flips its sign.
    """
    centroid = coords.mean(axis=0)
    rel = coords - centroid
    n = np.zeros(3)
    for i in range(len(rel)):
        n += np.cross(rel[i], rel[(i + 1) % len(rel)])
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        # Degenerate (collinear) cycle; pick any perpendicular direction.
        n = np.array([0.0, 0.0, 1.0])
        norm = 1.0
    return centroid, n / norm


def _max_plane_deviation(coords: np.ndarray) -> float:
    centroid = coords.mean(axis=0)
    rel = coords - centroid
    _, _, vt = np.linalg.svd(rel, full_matrices=False)
    normal = vt[-1]
    return float(np.abs(rel @ normal).max())


def _order_cycle(members: set[int], graph: nx.Graph) -> list[int] | None:
    """Order a cycle's node set by walking edges inside the set."""
    start = next(iter(members))
    order = [start]
    seen = {start}
    current = start
    while len(order) < len(members):
        nxt = [n for n in graph.neighbors(current) if n in members and n not in seen]
        if not nxt:
            return None
        current = nxt[0]
        order.append(current)
        seen.add(current)
    if order[0] not in graph.neighbors(order[-1]):
        return None
    return order


def perceive_rings(mol: MolecularStructure) -> list[Ring]:
    """Rings with aromaticity, centroid and plane normal.

    Ligands: smallest set of smallest rings from the bond graph; aromatic if
    every ring bond is aromatic-typed, else if the ring is planar (max
    deviation < 0.3 A) and every member is sp2-capable (C/N/O/S with at most
    three explicit neighbors). Proteins: template rings of PHE/TYR/TRP/HIS,
    aromatic by construction.
    """
    if mol.residues:
        return _protein_rings(mol)
    if not mol.bonds:
        return []

    graph = nx.Graph()
    graph.add_nodes_from(range(len(mol.atoms)))
    graph.add_edges_from((b.atom_a, b.atom_b) for b in mol.bonds)

    rings: list[Ring] = []
    for cycle in nx.minimum_cycle_basis(graph):
        if not 3 <= len(cycle) <= 8:
            continue
        ordered = _order_cycle(set(cycle), graph)
        if ordered is None:
            continue
        coords = mol.coords[ordered]
        bonds = [
            mol.bond_between(ordered[i], ordered[(i + 1) % len(ordered)])
            for i in range(len(ordered))
        ]
        aromatic = all(b is not None and b.order == BOND_AROMATIC for b in bonds)
        if not aromatic:
            planar = _max_plane_deviation(coords) < PLANARITY_TOLERANCE
            sp2_ok = all(
                mol.atoms[i].element in SP2_CAPABLE_ELEMENTS
                and len(mol.neighbors(i)) <= 3
                for i in ordered
            )
            aromatic = planar and sp2_ok
        centroid, normal = _ring_frame(coords)
        rings.append(
            Ring(
                atom_indices=tuple(ordered),
                is_aromatic=aromatic,
                centroid=centroid,
                normal=normal,
            )
        )
    return rings


def _protein_rings(mol: MolecularStructure) -> list[Ring]:
    rings = []
    for ridx, res in enumerate(mol.residues):
        templates = RESIDUE_RING_TEMPLATES.get(res.name)
        if not templates:
            continue
        name_to_idx = {mol.atoms[i].name: i for i in res.atoms}
        for template in templates:
            try:
                idxs = [name_to_idx[n] for n in template]
            except KeyError:
                continue  # incomplete side chain
            coords = mol.coords[idxs]
            centroid, normal = _ring_frame(coords)
            rings.append(
                Ring(
                    atom_indices=tuple(idxs),
                    is_aromatic=True,
                    centroid=centroid,
                    normal=normal,
                    residue_index=ridx,
                )
            )
    return rings


def _ligand_tags(mol: MolecularStructure) -> PharmacophoreTags:
    donors: dict[int, tuple[int, ...]] = {}
    donor_nbrs: dict[int, tuple[int, ...]] = {}
    acceptors = set()
    hydrophobics = set()
    cations = set()
    anions = set()
    metals = set()

    ring_aromatic_atoms = {
        i for ring in perceive_rings(mol) if ring.is_aromatic for i in ring.atom_indices
    }

    for i, atom in enumerate(mol.atoms):
        nbrs = mol.neighbors(i)
        h_nbrs = tuple(j for j in nbrs if mol.atoms[j].is_hydrogen)
        heavy_nbrs = tuple(j for j in nbrs if not mol.atoms[j].is_hydrogen)

        from .elements import element_info

        if element_info(atom.element).is_metal:
            metals.add(i)
            continue

        if atom.element in ("N", "O", "S") and h_nbrs:
            donors[i] = h_nbrs
            donor_nbrs[i] = heavy_nbrs

        if atom.element == "O" and atom.formal_charge <= 0:
            acceptors.add(i)
        elif atom.element == "N" and atom.formal_charge <= 0:
            if not h_nbrs and len(nbrs) <= 3:
                acceptors.add(i)

        if atom.element in ("C", "S") and atom.formal_charge == 0:
            if all(mol.atoms[j].element in ("C", "H", "S") for j in nbrs):
                if not any(mol.atoms[j].formal_charge != 0 for j in nbrs):
                    hydrophobics.add(i)

        if atom.formal_charge > 0:
            cations.add(i)
        if atom.formal_charge < 0:
            anions.add(i)

        # Carboxylate oxygens without explicit formal charges.
        if (
            atom.element == "O"
            and len(nbrs) == 1
            and mol.atoms[nbrs[0]].element == "C"
        ):
            carbon = nbrs[0]
            terminal_os = [
                j
                for j in mol.neighbors(carbon)
                if mol.atoms[j].element == "O" and len(mol.neighbors(j)) == 1
            ]
            if len(terminal_os) == 2:
                anions.add(i)

    # Aromatic N without H is an acceptor even when ring-typed.
    for i in ring_aromatic_atoms:
        atom = mol.atoms[i]
        if atom.element == "N" and not any(
            mol.atoms[j].is_hydrogen for j in mol.neighbors(i)
        ):
            acceptors.add(i)

    return PharmacophoreTags(
        donors=donors,
        donor_heavy_neighbors=donor_nbrs,
        acceptors=frozenset(acceptors),
        hydrophobics=frozenset(hydrophobics),
        cations=frozenset(cations),
        anions=frozenset(anions),
        metals=frozenset(metals),
    )


def _protein_tags(mol: MolecularStructure, his_cation: bool) -> PharmacophoreTags:
    donors: dict[int, tuple[int, ...]] = {}
    donor_nbrs: dict[int, tuple[int, ...]] = {}
    acceptors = set()
    hydrophobics = set()
    cations = set()
    anions = set()
    metals = set()

    cation_table = PROTEIN_CATIONS_WITH_HIS if his_cation else PROTEIN_CATIONS

    for res in mol.residues:
        name_to_idx = {mol.atoms[i].name: i for i in res.atoms}
        if res.kind == "metal":
            metals.update(res.atoms)
            continue
        if res.kind == KIND_WATER:
            if "O" in name_to_idx:
                i = name_to_idx["O"]
                donors[i] = ()
                donor_nbrs[i] = ()
                acceptors.add(i)
            continue
        if res.kind != KIND_STANDARD_AA:
            continue

        # Backbone amide N donates (PRO has no NH).
        if res.name != "PRO" and "N" in name_to_idx:
            i = name_to_idx["N"]
            donors[i] = tuple(
                name_to_idx[h] for h in ("H",) if h in name_to_idx
            )
            donor_nbrs[i] = tuple(
                name_to_idx[x] for x in ("CA",) if x in name_to_idx
            )
        for (rn, an), nbr_names in PROTEIN_DONORS.items():
            if rn == res.name and an in name_to_idx:
                i = name_to_idx[an]
                donors[i] = ()
                donor_nbrs[i] = tuple(
                    name_to_idx[x] for x in nbr_names if x in name_to_idx
                )

        for an in PROTEIN_ACCEPTORS["*"] + PROTEIN_ACCEPTORS.get(res.name, ()):
            if an in name_to_idx:
                acceptors.add(name_to_idx[an])
        for an in PROTEIN_HYDROPHOBIC.get(res.name, ()):
            if an in name_to_idx:
                hydrophobics.add(name_to_idx[an])
        for an in cation_table.get(res.name, ()):
            if an in name_to_idx:
                cations.add(name_to_idx[an])
        for an in PROTEIN_ANIONS.get(res.name, ()):
            if an in name_to_idx:
                anions.add(name_to_idx[an])

    return PharmacophoreTags(
        donors=donors,
        donor_heavy_neighbors=donor_nbrs,
        acceptors=frozenset(acceptors),
        hydrophobics=frozenset(hydrophobics),
        cations=frozenset(cations),
        anions=frozenset(anions),
        metals=frozenset(metals),
    )


def tag_pharmacophores(mol: MolecularStructure, his_cation: bool = False) -> PharmacophoreTags:
    """Donor/acceptor/hydrophobe/charge/metal typing.

    Structures with residues use the protein name templates; bare molecules
    use bond-graph rules. `his_cation` optionally counts histidine ring
    nitrogens as cation centers.
    """
    if mol.residues:
        return _protein_tags(mol, his_cation)
    return _ligand_tags(mol)


def _ring_bond_set(mol: MolecularStructure) -> set[frozenset[int]]:
    """Bonds lying on a cycle (non-bridge edges)."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(mol.atoms)))
    graph.add_edges_from((b.atom_a, b.atom_b) for b in mol.bonds)
    bridges = {frozenset(e) for e in nx.bridges(graph)}
    return {
        frozenset((b.atom_a, b.atom_b))
        for b in mol.bonds
        if frozenset((b.atom_a, b.atom_b)) not in bridges
    }


def _is_amide_cn(mol: MolecularStructure, a: int, b: int) -> bool:
    atom_a, atom_b = mol.atoms[a], mol.atoms[b]
    pairs = []
    if atom_a.element == "C" and atom_b.element == "N":
        pairs.append(a)
    if atom_b.element == "C" and atom_a.element == "N":
        pairs.append(b)
    for carbon in pairs:
        for j in mol.neighbors(carbon):
            bond = mol.bond_between(carbon, j)
            if (
                bond is not None
                and bond.order == BOND_DOUBLE
                and mol.atoms[j].element == "O"
            ):
                return True
    return False


def list_rotatable_bonds(mol: MolecularStructure) -> list[tuple[int, int]]:
    """Rotatable bonds: single, acyclic, both endpoints heavy and
    non-terminal; amide C-N excluded."""
    ring_bonds = _ring_bond_set(mol)
    out = []
    for bond in mol.bonds:
        if bond.order != BOND_SINGLE:
            continue
        a, b = bond.atom_a, bond.atom_b
        if frozenset((a, b)) in ring_bonds:
            continue
        if mol.atoms[a].is_hydrogen or mol.atoms[b].is_hydrogen:
            continue
        heavy_a = [j for j in mol.neighbors(a) if not mol.atoms[j].is_hydrogen and j != b]
        heavy_b = [j for j in mol.neighbors(b) if not mol.atoms[j].is_hydrogen and j != a]
        if not heavy_a or not heavy_b:
            continue
        if _is_amide_cn(mol, a, b):
            continue
        out.append((a, b))
    return out


def count_rotatable_bonds(mol: MolecularStructure) -> int:
    return len(list_rotatable_bonds(mol))


def split_chain_parts(protein: MolecularStructure) -> dict[int, str]:
    """Per-atom main_chain/side_chain label by the backbone name set."""
    labels = {}
    for res in protein.residues:
        for i in res.atoms:
            if res.kind == KIND_STANDARD_AA and protein.atoms[i].name in MAIN_CHAIN_NAMES:
                labels[i] = "main_chain"
            else:
                labels[i] = "side_chain"
    for i in range(len(protein.atoms)):
        labels.setdefault(i, "side_chain")
    return labels


def extract_pocket(protein: MolecularStructure, ligand: MolecularStructure,
                   cutoff: float = 8.0) -> MolecularStructure:
    """Sub-structure of every residue with an atom within `cutoff` of the
    ligand; whole residues are kept. Raises EmptyPocket when nothing is in
    range (a ligand placed off-protein)."""
    if cutoff <= 0:
        raise ValueError("pocket cutoff must be positive")
    if not protein.residues:
        raise EmptyPocket("protein has no residues")

    grid = build_grid(protein.coords, cutoff)
    hit_atoms = {g for g, _, _ in pairs_within(grid, ligand.coords, cutoff)}
    keep = [
        ridx
        for ridx, res in enumerate(protein.residues)
        if any(i in hit_atoms for i in res.atoms)
    ]
    if not keep:
        raise EmptyPocket(f"no residue within {cutoff} A of the ligand")

    from dataclasses import replace

    new_atoms = []
    new_residues = []
    for new_ridx, ridx in enumerate(keep):
        res = protein.residues[ridx]
        member_new = []
        for i in res.atoms:
            member_new.append(len(new_atoms))
            new_atoms.append(replace(protein.atoms[i], residue_index=new_ridx))
        new_residues.append(replace(res, atoms=tuple(member_new)))
    return MolecularStructure(
        atoms=tuple(new_atoms),
        residues=tuple(new_residues),
        source_format=protein.source_format,
    )
