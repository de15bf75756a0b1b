"""Spatial primitives: uniform-grid neighbor search, angles, ring geometry.

One grid per structure, sized to the largest cutoff in play, serves every
pairwise detector; queries are read-only so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffExceedsCell, DegenerateGeometry


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    cell: float
    positions: np.ndarray                        # (N, 3) source coordinates
    cells: dict[tuple[int, int, int], np.ndarray]  # cell -> atom index array


def build_grid(positions: np.ndarray, cell: float) -> SpatialGrid:
    """Bucket atoms into cubic cells of edge `cell` (index = floor(pos/cell))."""
    if cell <= 0:
        raise ValueError("cell size must be positive")
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    cells: dict[tuple[int, int, int], list[int]] = {}
    if len(positions):
        idx = np.floor(positions / cell).astype(int)
        for i, key in enumerate(map(tuple, idx)):
            cells.setdefault(key, []).append(i)
    return SpatialGrid(
        cell=cell,
        positions=positions,
        cells={k: np.array(v, dtype=int) for k, v in cells.items()},
    )


def pairs_within(grid: SpatialGrid, query_positions: np.ndarray, cutoff: float,
                 same_set: bool = False) -> list[tuple[int, int, float]]:
    """All (grid_index, query_index, distance) pairs with distance < cutoff.

    With same_set=True the query is the grid's own point set and each
    unordered pair is reported once (grid_index < query_index).
    """
    if cutoff > grid.cell + 1e-12:
        raise CutoffExceedsCell(f"cutoff {cutoff} exceeds cell size {grid.cell}")
    query_positions = np.asarray(query_positions, dtype=float).reshape(-1, 3)
    out: list[tuple[int, int, float]] = []
    if not grid.cells:
        return out
    for qi, pos in enumerate(query_positions):
        cx, cy, cz = np.floor(pos / grid.cell).astype(int)
        candidates = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    hit = grid.cells.get((cx + dx, cy + dy, cz + dz))
                    if hit is not None:
                        candidates.append(hit)
        if not candidates:
            continue
        cand = np.concatenate(candidates)
        if same_set:
            cand = cand[cand < qi]
            if not len(cand):
                continue
        d = np.linalg.norm(grid.positions[cand] - pos, axis=1)
        keep = d < cutoff
        out.extend(
            (int(g), qi, float(dist)) for g, dist in zip(cand[keep], d[keep])
        )
    return out


def angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Angle at vertex b in degrees, in [0, 180]."""
    u = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    v = np.asarray(c, dtype=float) - np.asarray(b, dtype=float)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu < 1e-12 or nv < 1e-12:
        raise DegenerateGeometry("zero-length arm at angle vertex")
    cosv = float(np.dot(u, v) / (nu * nv))
    cosv = max(-1.0, min(1.0, cosv))
    return math.degrees(math.acos(cosv))


def ring_pair_geometry(ring_a, ring_b) -> tuple[float, float, float]:
    """(center distance, normal angle folded to [0, 90] deg, lateral offset).

    The offset is the smaller of the two in-plane displacements of one ring
    center projected onto the other ring's plane; plane normals are
    sign-ambiguous so the angle is folded.
    """
    ca = np.asarray(ring_a.centroid, dtype=float)
    cb = np.asarray(ring_b.centroid, dtype=float)
    na = np.asarray(ring_a.normal, dtype=float)
    nb = np.asarray(ring_b.normal, dtype=float)
    delta = cb - ca
    dist = float(np.linalg.norm(delta))

    cosang = abs(float(np.dot(na, nb)))
    cosang = min(1.0, cosang)
    normal_angle = math.degrees(math.acos(cosang))

    perp_a = float(np.dot(delta, na))
    perp_b = float(np.dot(delta, nb))
    lateral_a = math.sqrt(max(0.0, dist * dist - perp_a * perp_a))
    lateral_b = math.sqrt(max(0.0, dist * dist - perp_b * perp_b))
    return dist, normal_angle, min(lateral_a, lateral_b)
