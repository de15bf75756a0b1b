"""Geometric detection of protein-ligand interactions and fingerprints.

Every detector works across the interface only (protein side vs ligand
side), so intra-molecular pairs never appear. Detected records store the
geometry that satisfied the threshold so they can be re-validated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LayoutMismatch
from .geometry import angle, build_grid, pairs_within, ring_pair_geometry
from .perception import PharmacophoreTags, Ring
from .structures import KIND_STANDARD_AA, MolecularStructure

HBOND_MAX_DIST = 3.5      # donor-acceptor heavy-atom distance, Angstrom
HBOND_MIN_ANGLE = 120.0   # D-H...A angle, degrees
HBOND_FALLBACK_ANGLE = 90.0  # X-D...A when the donor hydrogen is absent
HYDROPHOBIC_EXTRA = 2.0   # contact range beyond the radii sum
PI_MIN_DIST = 0.5
PI_MAX_DIST = 5.5
PI_MAX_OFFSET = 2.0
PI_FACE_MAX_ANGLE = 30.0
PI_EDGE_MIN_ANGLE = 60.0
METAL_MAX_DIST = 3.0
SALT_BRIDGE_MAX_DIST = 4.0

KIND_ORDER = (
    "hbond_donor_p",
    "hbond_acceptor_p",
    "hydrophobic",
    "pi_stacking",
    "pi_cation",
    "metal_coordination",
    "salt_bridge",
)


@dataclass(frozen=True)
class Interaction:
    kind: str
    residue_label: str
    protein_atom: int | None
    ligand_atom: int | None
    distance: float
    angle: float | None = None
    detail: str = ""


@dataclass(frozen=True, eq=False)
class InteractionFingerprint:
    bits: np.ndarray          # uint8 0/1 per slot
    layout: tuple[str, ...]   # "residue_label|kind" per slot

    def to_hex(self) -> str:
        return np.packbits(self.bits).tobytes().hex()

    def count(self) -> int:
        return int(self.bits.sum())


def _residue_label(protein: MolecularStructure, atom_idx: int) -> str:
    res = protein.residue_of(atom_idx)
    return res.label if res is not None else f"?:{atom_idx}"


def _scoreable(protein: MolecularStructure, atom_idx: int) -> bool:
    res = protein.residue_of(atom_idx)
    return res is not None and res.kind == KIND_STANDARD_AA


def detect_hbonds(protein: MolecularStructure, ligand: MolecularStructure,
                  protein_tags: PharmacophoreTags, ligand_tags: PharmacophoreTags,
                  max_dist: float = HBOND_MAX_DIST,
                  min_angle: float = HBOND_MIN_ANGLE) -> list[Interaction]:
    """Donor-acceptor pairs across the interface.

    Criterion: d(D,A) <= max_dist and angle(D,H,A) >= min_angle for some
    donor hydrogen; without hydrogen coordinates the fallback requires
    angle(X,D,A) >= 90 deg for every heavy neighbor X of the donor.
    """
    out = []
    for donors, donor_mol, donor_tags, acceptors, acc_mol, kind in (
        (protein_tags.donors, protein, protein_tags, ligand_tags.acceptors, ligand, "hbond_donor_p"),
        (ligand_tags.donors, ligand, ligand_tags, protein_tags.acceptors, protein, "hbond_acceptor_p"),
    ):
        if not donors or not acceptors:
            continue
        acceptor_list = sorted(acceptors)
        acc_pos = acc_mol.coords[acceptor_list]
        for d_idx in sorted(donors):
            d_pos = donor_mol.coords[d_idx]
            dists = np.linalg.norm(acc_pos - d_pos, axis=1)
            for a_slot in np.nonzero(dists <= max_dist)[0]:
                a_idx = acceptor_list[a_slot]
                dist = float(dists[a_slot])
                if dist < 1e-6:
                    continue
                hydrogens = donors[d_idx]
                if hydrogens:
                    best = max(
                        angle(d_pos, donor_mol.coords[h], acc_mol.coords[a_idx])
                        for h in hydrogens
                    )
                    if best < min_angle:
                        continue
                    theta = best
                else:
                    heavy = donor_tags.donor_heavy_neighbors.get(d_idx, ())
                    thetas = [
                        angle(donor_mol.coords[x], d_pos, acc_mol.coords[a_idx])
                        for x in heavy
                    ]
                    if any(t < HBOND_FALLBACK_ANGLE for t in thetas):
                        continue
                    theta = min(thetas) if thetas else 180.0
                if kind == "hbond_donor_p":
                    p_idx, l_idx = d_idx, a_idx
                else:
                    p_idx, l_idx = a_idx, d_idx
                if not _scoreable_or_bare(protein, p_idx):
                    continue
                out.append(
                    Interaction(
                        kind=kind,
                        residue_label=_residue_label(protein, p_idx),
                        protein_atom=p_idx,
                        ligand_atom=l_idx,
                        distance=dist,
                        angle=theta,
                    )
                )
    return out


def _scoreable_or_bare(protein: MolecularStructure, atom_idx: int) -> bool:
    # Waters and unknown HET groups are excluded from interaction scoring.
    res = protein.residue_of(atom_idx)
    if res is None:
        return True
    return res.kind == KIND_STANDARD_AA


def detect_hydrophobic(protein: MolecularStructure, ligand: MolecularStructure,
                       protein_tags: PharmacophoreTags,
                       ligand_tags: PharmacophoreTags) -> list[Interaction]:
    """Hydrophobic atom pairs within (r_m + r_n) + 2.0 Angstrom."""
    from .elements import element_info

    p_idx = sorted(i for i in protein_tags.hydrophobics if _scoreable_or_bare(protein, i))
    l_idx = sorted(ligand_tags.hydrophobics)
    out = []
    if not p_idx or not l_idx:
        return out
    max_thr = max(
        element_info(protein.atoms[i].element).vdw_radius for i in p_idx
    ) + max(element_info(ligand.atoms[j].element).vdw_radius for j in l_idx) + HYDROPHOBIC_EXTRA
    grid = build_grid(protein.coords[p_idx], max_thr)
    for g, q, dist in sorted(pairs_within(grid, ligand.coords[l_idx], max_thr)):
        i = p_idx[g]
        j = l_idx[q]
        d0 = (
            element_info(protein.atoms[i].element).vdw_radius
            + element_info(ligand.atoms[j].element).vdw_radius
        )
        if dist <= d0 + HYDROPHOBIC_EXTRA:
            out.append(
                Interaction(
                    kind="hydrophobic",
                    residue_label=_residue_label(protein, i),
                    protein_atom=i,
                    ligand_atom=j,
                    distance=dist,
                )
            )
    return out


def detect_pi_stacking(protein: MolecularStructure, protein_rings: list[Ring],
                       ligand_rings: list[Ring]) -> list[Interaction]:
    """Aromatic ring pairs: 0.5 <= d <= 5.5, lateral offset <= 2, and folded
    normal angle <= 30 (face-to-face) or in [60, 90] (edge-to-face)."""
    out = []
    for pr in protein_rings:
        if not pr.is_aromatic:
            continue
        for lr in ligand_rings:
            if not lr.is_aromatic:
                continue
            dist, theta, offset = ring_pair_geometry(pr, lr)
            if not (PI_MIN_DIST <= dist <= PI_MAX_DIST) or offset > PI_MAX_OFFSET:
                continue
            if theta <= PI_FACE_MAX_ANGLE:
                orientation = "face_to_face"
            elif PI_EDGE_MIN_ANGLE <= theta <= 90.0:
                orientation = "edge_to_face"
            else:
                continue
            label = (
                protein.residues[pr.residue_index].label
                if pr.residue_index is not None
                else "?"
            )
            out.append(
                Interaction(
                    kind="pi_stacking",
                    residue_label=label,
                    protein_atom=pr.atom_indices[0],
                    ligand_atom=lr.atom_indices[0],
                    distance=dist,
                    angle=theta,
                    detail=orientation,
                )
            )
    return out


def detect_pi_cation(protein: MolecularStructure, ligand: MolecularStructure,
                     protein_rings: list[Ring], ligand_rings: list[Ring],
                     protein_tags: PharmacophoreTags,
                     ligand_tags: PharmacophoreTags) -> list[Interaction]:
    """Ring-center / cation pairs with 0.5 <= d <= 5.5, both directions."""
    out = []
    for ring in protein_rings:
        if not ring.is_aromatic:
            continue
        for c in sorted(ligand_tags.cations):
            d = float(np.linalg.norm(ligand.coords[c] - ring.centroid))
            if PI_MIN_DIST <= d <= PI_MAX_DIST:
                label = (
                    protein.residues[ring.residue_index].label
                    if ring.residue_index is not None
                    else "?"
                )
                out.append(
                    Interaction(
                        kind="pi_cation",
                        residue_label=label,
                        protein_atom=ring.atom_indices[0],
                        ligand_atom=c,
                        distance=d,
                        detail="protein_ring",
                    )
                )
    for ring in ligand_rings:
        if not ring.is_aromatic:
            continue
        for c in sorted(protein_tags.cations):
            if not _scoreable_or_bare(protein, c):
                continue
            d = float(np.linalg.norm(protein.coords[c] - ring.centroid))
            if PI_MIN_DIST <= d <= PI_MAX_DIST:
                out.append(
                    Interaction(
                        kind="pi_cation",
                        residue_label=_residue_label(protein, c),
                        protein_atom=c,
                        ligand_atom=ring.atom_indices[0],
                        distance=d,
                        detail="ligand_ring",
                    )
                )
    return out


def metal_strength(d: float) -> float:
    """Piecewise coordination strength: 1.0 below 2 A, tapering to 0 at 3 A."""
    if d < 2.0:
        return 1.0
    if d <= 3.0:
        return 3.0 - d
    return 0.0


def detect_metal(protein: MolecularStructure, ligand: MolecularStructure,
                 protein_tags: PharmacophoreTags) -> list[Interaction]:
    """Ligand N/O/S atoms coordinating protein metal ions (strength > 0)."""
    out = []
    coordinating = [
        j for j, a in enumerate(ligand.atoms) if a.element in ("N", "O", "S")
    ]
    for m in sorted(protein_tags.metals):
        m_pos = protein.coords[m]
        for j in coordinating:
            d = float(np.linalg.norm(ligand.coords[j] - m_pos))
            if metal_strength(d) > 0.0:
                out.append(
                    Interaction(
                        kind="metal_coordination",
                        residue_label=_residue_label(protein, m),
                        protein_atom=m,
                        ligand_atom=j,
                        distance=d,
                    )
                )
    return out


def detect_salt_bridges(protein: MolecularStructure, ligand: MolecularStructure,
                        protein_tags: PharmacophoreTags,
                        ligand_tags: PharmacophoreTags) -> list[Interaction]:
    """Opposite formal-charge centers within 4.0 Angstrom (fingerprinted but
    carrying no energy term of their own)."""
    out = []
    for p_set, l_set in (
        (protein_tags.cations, ligand_tags.anions),
        (protein_tags.anions, ligand_tags.cations),
    ):
        for i in sorted(p_set):
            if not _scoreable_or_bare(protein, i):
                continue
            for j in sorted(l_set):
                d = float(np.linalg.norm(protein.coords[i] - ligand.coords[j]))
                if d <= SALT_BRIDGE_MAX_DIST:
                    out.append(
                        Interaction(
                            kind="salt_bridge",
                            residue_label=_residue_label(protein, i),
                            protein_atom=i,
                            ligand_atom=j,
                            distance=d,
                        )
                    )
    return out


def detect_all(protein: MolecularStructure, ligand: MolecularStructure,
               protein_tags: PharmacophoreTags, ligand_tags: PharmacophoreTags,
               protein_rings: list[Ring], ligand_rings: list[Ring],
               hbond_max_dist: float = HBOND_MAX_DIST,
               hbond_min_angle: float = HBOND_MIN_ANGLE) -> list[Interaction]:
    out = []
    out += detect_hbonds(protein, ligand, protein_tags, ligand_tags,
                         hbond_max_dist, hbond_min_angle)
    out += detect_hydrophobic(protein, ligand, protein_tags, ligand_tags)
    out += detect_pi_stacking(protein, protein_rings, ligand_rings)
    out += detect_pi_cation(protein, ligand, protein_rings, ligand_rings,
                            protein_tags, ligand_tags)
    out += detect_metal(protein, ligand, protein_tags)
    out += detect_salt_bridges(protein, ligand, protein_tags, ligand_tags)
    return out


def fingerprint(interactions: list[Interaction],
                protein: MolecularStructure) -> InteractionFingerprint:
    """Bit per (residue, interaction kind) slot, residues in protein order."""
    layout = tuple(
        f"{res.label}|{kind}" for res in protein.residues for kind in KIND_ORDER
    )
    slot_index = {label: i for i, label in enumerate(layout)}
    bits = np.zeros(len(layout), dtype=np.uint8)
    for inter in interactions:
        key = f"{inter.residue_label}|{inter.kind}"
        idx = slot_index.get(key)
        if idx is not None:
            bits[idx] = 1
    return InteractionFingerprint(bits=bits, layout=layout)


def tanimoto(a: InteractionFingerprint, b: InteractionFingerprint) -> float:
    """|a AND b| / |a OR b|; 1.0 when both vectors are all-zero."""
    if a.layout != b.layout:
        raise LayoutMismatch("fingerprints have different slot layouts")
    union = int(np.logical_or(a.bits, b.bits).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(a.bits, b.bits).sum())
    return inter / union
