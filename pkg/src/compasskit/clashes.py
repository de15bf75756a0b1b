"""Steric clash counting between protein and ligand heavy atoms."""

from __future__ import annotations

from dataclasses import dataclass

from .elements import element_info
from .geometry import build_grid, pairs_within
from .structures import MolecularStructure

CLASH_TOLERANCE = 0.5  # Angstrom below the radii sum


@dataclass(frozen=True)
class ClashReport:
    count: int
    pairs: tuple[tuple[int, int, float, float], ...]  # (protein, ligand, d, threshold)


def count_clashes(protein: MolecularStructure, ligand: MolecularStructure,
                  tolerance: float = CLASH_TOLERANCE) -> ClashReport:
    """Heavy-atom pairs closer than vdw(p) + vdw(l) - tolerance."""
    p_idx = protein.heavy_indices()
    l_idx = ligand.heavy_indices()
    if not p_idx or not l_idx:
        return ClashReport(count=0, pairs=())

    p_radii = [element_info(protein.atoms[i].element).vdw_radius for i in p_idx]
    l_radii = [element_info(ligand.atoms[j].element).vdw_radius for j in l_idx]
    max_threshold = max(p_radii) + max(l_radii) - tolerance
    if max_threshold <= 0:
        return ClashReport(count=0, pairs=())

    grid = build_grid(protein.coords[p_idx], max_threshold)
    pairs = []
    for g, q, dist in sorted(pairs_within(grid, ligand.coords[l_idx], max_threshold)):
        threshold = p_radii[g] + l_radii[q] - tolerance
        if dist < threshold:
            pairs.append((p_idx[g], l_idx[q], dist, threshold))
    return ClashReport(count=len(pairs), pairs=tuple(pairs))
