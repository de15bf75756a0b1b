"""Ligand strain: pose energy minus torsion-relaxed energy.

Relaxation moves only the torsion angles of rotatable bonds (bond lengths
and angles stay rigid), which captures the conformational part of strain.
Gradient descent with a backtracking line search keeps the energy
non-increasing, so strain is never negative beyond round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forcefield import ForceFieldModel, build_force_field, energy_and_gradient
from .structures import MolecularStructure

GRAD_TOL = 1e-4        # kcal/mol per degree, infinity norm
MAX_ITERATIONS = 200
SCAN_STEP_DEG = 30.0   # coarse per-torsion pre-scan resolution


@dataclass(frozen=True)
class TorsionAxis:
    bond: tuple[int, int]          # (j, k); rotation axis j -> k
    moving: tuple[int, ...]        # atoms on the k side (excluding j, k)


@dataclass(frozen=True)
class StrainResult:
    e_pose: float
    e_relaxed: float
    strain: float
    iterations: int
    converged: bool


def torsion_axes(mol: MolecularStructure, ff: ForceFieldModel) -> list[TorsionAxis]:
    """One axis per rotatable bond with the atom set that rotates."""
    axes = []
    for j, k in ff.rotatable:
        moving = _component_side(mol, j, k)
        if moving:
            axes.append(TorsionAxis(bond=(j, k), moving=tuple(sorted(moving))))
    return axes


def _component_side(mol: MolecularStructure, j: int, k: int) -> set[int]:
    """Atoms reachable from k without crossing the j-k bond."""
    seen = {j, k}
    stack = [k]
    while stack:
        cur = stack.pop()
        for nxt in mol.neighbors(cur):
            if nxt == j and cur == k:
                continue
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    seen.discard(j)
    seen.discard(k)
    return seen


def _rotate(coords: np.ndarray, axis: TorsionAxis, delta_rad: float) -> np.ndarray:
    """Rodrigues rotation of the moving set about the bond axis."""
    j, k = axis.bond
    origin = coords[j]
    direction = coords[k] - origin
    norm = np.linalg.norm(direction)
    if norm < 1e-12:
        return coords
    u = direction / norm
    cos_a = math.cos(delta_rad)
    sin_a = math.sin(delta_rad)
    out = coords.copy()
    idx = list(axis.moving)
    rel = coords[idx] - origin
    out[idx] = (
        origin
        + rel * cos_a
        + np.cross(u, rel) * sin_a
        + np.outer(rel @ u, u) * (1.0 - cos_a)
    )
    return out


def _apply_angles(coords: np.ndarray, axes: list[TorsionAxis],
                  deltas_deg: np.ndarray) -> np.ndarray:
    out = coords
    for axis, delta in zip(axes, deltas_deg):
        if delta != 0.0:
            out = _rotate(out, axis, math.radians(float(delta)))
    return out


def _torsion_gradient_deg(ff: ForceFieldModel, coords: np.ndarray,
                          axes: list[TorsionAxis]) -> tuple[float, np.ndarray]:
    """Energy and dE/d(angle in degrees) per axis via the rigid-rotation
    chain rule: dE/dphi = sum over moving atoms of g . (u x r)."""
    e, g = energy_and_gradient(ff, coords)
    out = np.zeros(len(axes))
    for t, axis in enumerate(axes):
        j, k = axis.bond
        direction = coords[k] - coords[j]
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            continue
        u = direction / norm
        idx = list(axis.moving)
        rel = coords[idx] - coords[j]
        velocity = np.cross(u, rel)          # d(position)/d(phi in rad)
        out[t] = float(np.sum(g[idx] * velocity)) * math.pi / 180.0
    return e, out


def _coordinate_scan(ff: ForceFieldModel, coords: np.ndarray,
                     axes: list[TorsionAxis], e0: float,
                     max_sweeps: int = 4) -> tuple[np.ndarray, float]:
    """Coordinate-wise coarse torsion scan; accepts only improvements.

    Hops between torsional wells (which plain gradient descent cannot do,
    and which a start on a torsional maximum requires) before the gradient
    refinement; 30-degree resolution per axis, swept until stable.
    """
    n_steps = int(round(360.0 / SCAN_STEP_DEG))
    for _ in range(max_sweeps):
        improved = False
        for axis in axes:
            best_delta = 0.0
            best_e = e0
            for step in range(1, n_steps):
                delta = step * SCAN_STEP_DEG
                trial = _rotate(coords, axis, math.radians(delta))
                e_trial, _ = energy_and_gradient(ff, trial)
                if e_trial < best_e - 1e-9:
                    best_e, best_delta = e_trial, delta
            if best_delta:
                coords = _rotate(coords, axis, math.radians(best_delta))
                e0 = best_e
                improved = True
        if not improved:
            break
    return coords, e0


def relax(ff: ForceFieldModel, mol: MolecularStructure, coords: np.ndarray,
          max_iter: int = MAX_ITERATIONS, tol: float = GRAD_TOL
          ) -> tuple[np.ndarray, float, int, bool]:
    """Minimize over rotatable-bond torsions from the given pose.

    A coarse per-torsion scan locates the well, then gradient descent with
    a backtracking line search refines until the infinity-norm gradient
    falls below `tol` (kcal/mol/deg) or `max_iter` runs out. Returns
    (coords, energy, iterations, converged); accepted steps never increase
    the energy.
    """
    coords = np.array(coords, dtype=float)
    axes = torsion_axes(mol, ff)
    e, _ = energy_and_gradient(ff, coords)
    if not axes or max_iter < 1:
        return coords, e, 0, True

    coords, e = _coordinate_scan(ff, coords, axes, e)

    step = 1.0  # degrees per unit gradient, adapted by the line search
    for iteration in range(max_iter):
        e, grad = _torsion_gradient_deg(ff, coords, axes)
        gmax = float(np.abs(grad).max())
        if gmax < tol:
            return coords, e, iteration, True
        direction = -grad
        alpha = step
        improved = False
        for _ in range(40):
            trial = _apply_angles(coords, axes, direction * alpha)
            e_trial, _ = energy_and_gradient(ff, trial)
            if e_trial < e - 1e-12 * max(1.0, abs(e)):
                coords, e = trial, e_trial
                step = min(alpha * 2.0, 30.0 / max(gmax, 1e-9))
                improved = True
                break
            alpha *= 0.5
        if not improved:
            return coords, e, iteration + 1, True  # no descent representable
    e, grad = _torsion_gradient_deg(ff, coords, axes)
    return coords, e, max_iter, bool(np.abs(grad).max() < tol)


def strain_energy(ligand: MolecularStructure,
                  max_iter: int = MAX_ITERATIONS, tol: float = GRAD_TOL) -> StrainResult:
    """Internal-energy difference between the pose and its relaxed form."""
    ff = build_force_field(ligand)
    coords = np.array(ligand.coords, dtype=float)
    e_pose, _ = energy_and_gradient(ff, coords)
    _, e_relaxed, iterations, converged = relax(ff, ligand, coords, max_iter, tol)
    return StrainResult(
        e_pose=e_pose,
        e_relaxed=e_relaxed,
        strain=e_pose - e_relaxed,
        iterations=iterations,
        converged=converged,
    )
