"""Empirical binding-affinity scoring.

Interaction energies are summed per kernel over interface pairs and
bucketed by amino-acid type and main-/side-chain membership of the protein
atom (hydrogen-bond, electrostatic and van der Waals classes), with scalar
hydrophobic, ring-stacking, ring-cation, metal and rotatable-bond terms.
A weight file maps one coefficient to every slot; without one the scorer
runs unfitted (all weights 1, intercept 0) and flags reports accordingly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .elements import element_info
from .errors import MalformedWeightFile, MissingSlot
from .geometry import build_grid, pairs_within
from .interactions import (
    detect_hbonds,
    detect_hydrophobic,
    detect_metal,
    detect_pi_cation,
    detect_pi_stacking,
    metal_strength,
)
from .perception import PharmacophoreTags, Ring, count_rotatable_bonds
from .structures import KIND_STANDARD_AA, STANDARD_AA, MolecularStructure

AA_ORDER = tuple(sorted(STANDARD_AA))
CHAIN_PARTS = ("main", "side")
PAIR_CLASSES = ("hb", "ele", "vdw")
SCALAR_KEYS = ("hydrophobic", "pi_pi", "pi_cation", "metal")

HBOND_REF_DIST = 2.6
HBOND_NORM = 0.58
ELE_MIN_DIST = 0.1   # Coulomb clamp, Angstrom
VDW_MIN_FRACTION = 0.5  # repulsion clamp at d = 0.5 * d0
DEFAULT_INTERFACE_CUTOFF = 10.0


def hbond_kernel(d: float) -> float:
    """Hydrogen-bond strength (1 / (1 + (d/2.6)^6)) / 0.58."""
    return (1.0 / (1.0 + (d / HBOND_REF_DIST) ** 6)) / HBOND_NORM


def hydrophobic_kernel(d: float, d0: float) -> float:
    """Contact strength: 1 inside d0+0.5, linear to 0 at d0+2.0."""
    if d <= d0 + 0.5:
        return 1.0
    if d <= d0 + 2.0:
        return (d0 + 2.0 - d) / 1.5
    return 0.0


def electrostatic_term(q_m: float, q_n: float, d: float) -> float:
    """Coulomb q_m*q_n/d with the distance clamped at 0.1 Angstrom."""
    return q_m * q_n / max(d, ELE_MIN_DIST)


def vdw_kernel(d: float, d0: float) -> float:
    """8-4 potential (d0/d)^8 - 2 (d0/d)^4, repulsion clamped at d = d0/2."""
    d = max(d, VDW_MIN_FRACTION * d0)
    ratio = d0 / d
    r4 = ratio ** 4
    return r4 * r4 - 2.0 * r4


@dataclass
class EnergyComponents:
    """Per-slot energy sums plus the scalar terms."""

    pair_terms: dict[str, float] = field(default_factory=dict)  # "hb_main_ALA" -> value
    hydrophobic: float = 0.0
    pi_pi: float = 0.0
    pi_cation: float = 0.0
    metal: float = 0.0
    n_rot: int = 0

    def slot_items(self) -> list[tuple[str, float]]:
        items = []
        for cls in PAIR_CLASSES:
            for part in CHAIN_PARTS:
                for aa in AA_ORDER:
                    key = f"{cls}_{part}_{aa}"
                    items.append((key, self.pair_terms.get(key, 0.0)))
        items += [
            ("hydrophobic", self.hydrophobic),
            ("pi_pi", self.pi_pi),
            ("pi_cation", self.pi_cation),
            ("metal", self.metal),
        ]
        return items

    def as_dict(self) -> dict[str, float]:
        out = dict(self.slot_items())
        out["n_rot"] = self.n_rot
        return out


def all_slot_keys() -> list[str]:
    keys = [
        f"{cls}_{part}_{aa}"
        for cls in PAIR_CLASSES
        for part in CHAIN_PARTS
        for aa in AA_ORDER
    ]
    keys += list(SCALAR_KEYS)
    keys += ["rot", "intercept"]
    return keys


@dataclass(frozen=True)
class WeightSet:
    weights: dict[str, float]
    intercept: float = 0.0
    is_default: bool = False

    def get(self, key: str) -> float:
        return self.weights[key]


def default_weights() -> WeightSet:
    keys = [k for k in all_slot_keys() if k != "intercept"]
    return WeightSet(weights={k: 1.0 for k in keys}, intercept=0.0, is_default=True)


def load_weights(path: str | os.PathLike | None) -> WeightSet:
    """Read 'key = value' weight lines; every slot must be present.

    A missing path yields the documented unfitted default (all 1.0,
    intercept 0) with the default flag set so reports carry a warning.
    """
    if path is None or not os.path.exists(path):
        return default_weights()
    values: dict[str, float] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise MalformedWeightFile(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            try:
                values[key] = float(value.strip())
            except ValueError as exc:
                raise MalformedWeightFile(
                    f"{path}:{lineno}: bad value {value.strip()!r}"
                ) from exc
    missing = [k for k in all_slot_keys() if k not in values]
    if missing:
        raise MissingSlot(f"{path}: missing slots: {', '.join(missing[:5])}"
                          + ("..." if len(missing) > 5 else ""))
    intercept = values.pop("intercept")
    return WeightSet(weights=values, intercept=intercept, is_default=False)


def serialize_weights(ws: WeightSet) -> str:
    lines = [f"{k} = {v!r}" for k, v in sorted(ws.weights.items())]
    lines.append(f"intercept = {ws.intercept!r}")
    return "\n".join(lines) + "\n"


def _slot(cls: str, protein: MolecularStructure, chain_parts: dict[int, str],
          atom_idx: int) -> str | None:
    res = protein.residue_of(atom_idx)
    if res is None or res.kind != KIND_STANDARD_AA:
        return None
    part = "main" if chain_parts.get(atom_idx) == "main_chain" else "side"
    return f"{cls}_{part}_{res.name}"


def compute_components(protein: MolecularStructure, ligand: MolecularStructure,
                       protein_tags: PharmacophoreTags,
                       ligand_tags: PharmacophoreTags,
                       protein_rings: list[Ring], ligand_rings: list[Ring],
                       chain_parts: dict[int, str],
                       interface_cutoff: float = DEFAULT_INTERFACE_CUTOFF,
                       hbond_max_dist: float = 3.5,
                       hbond_min_angle: float = 120.0) -> EnergyComponents:
    """Sum every kernel over its interface pairs.

    Hydrogen bonds come from the geometric detector; electrostatics and
    van der Waals run over all heavy-atom pairs within the interface
    cutoff; ring and metal terms reuse their detectors. Only canonical
    amino-acid residues feed the per-residue-type buckets.
    """
    comp = EnergyComponents(n_rot=count_rotatable_bonds(ligand))

    def add(key: str | None, value: float) -> None:
        if key is not None:
            comp.pair_terms[key] = comp.pair_terms.get(key, 0.0) + value

    for hb in detect_hbonds(protein, ligand, protein_tags, ligand_tags,
                            hbond_max_dist, hbond_min_angle):
        add(_slot("hb", protein, chain_parts, hb.protein_atom),
            hbond_kernel(hb.distance))

    # Heavy-atom interface pairs for Coulomb and 8-4 terms.
    p_heavy = [
        i for i in protein.heavy_indices()
        if (res := protein.residue_of(i)) is not None and res.kind == KIND_STANDARD_AA
    ]
    l_heavy = ligand.heavy_indices()
    if p_heavy and l_heavy:
        grid = build_grid(protein.coords[p_heavy], interface_cutoff)
        pairs = sorted(pairs_within(grid, ligand.coords[l_heavy], interface_cutoff))
        for g, q, dist in pairs:
            i = p_heavy[g]
            j = l_heavy[q]
            qi = protein.atoms[i].partial_charge or 0.0
            qj = ligand.atoms[j].partial_charge or 0.0
            add(_slot("ele", protein, chain_parts, i),
                electrostatic_term(qi, qj, dist))
            d0 = (
                element_info(protein.atoms[i].element).vdw_radius
                + element_info(ligand.atoms[j].element).vdw_radius
            )
            add(_slot("vdw", protein, chain_parts, i), vdw_kernel(dist, d0))

    for hp in detect_hydrophobic(protein, ligand, protein_tags, ligand_tags):
        d0 = (
            element_info(protein.atoms[hp.protein_atom].element).vdw_radius
            + element_info(ligand.atoms[hp.ligand_atom].element).vdw_radius
        )
        comp.hydrophobic += hydrophobic_kernel(hp.distance, d0)

    comp.pi_pi += float(len(detect_pi_stacking(protein, protein_rings, ligand_rings)))
    comp.pi_cation += float(
        len(detect_pi_cation(protein, ligand, protein_rings, ligand_rings,
                             protein_tags, ligand_tags))
    )
    for m in detect_metal(protein, ligand, protein_tags):
        comp.metal += metal_strength(m.distance)

    return comp


def binding_affinity(components: EnergyComponents, weights: WeightSet) -> float:
    """Weighted sum of all component slots plus rot term and intercept."""
    total = 0.0
    for key, value in components.slot_items():
        total += weights.get(key) * value
    total += weights.get("rot") * components.n_rot
    return total + weights.intercept
