"""Ligand internal energy: a documented subset of the universal force field.

Terms: harmonic bonds (natural lengths with bond-order and
electronegativity corrections), harmonic angles, cosine torsions on
rotatable bonds, and 12-6 nonbonded pairs with 1-2/1-3 exclusions and
scaled 1-4 contacts. Energies in kcal/mol, lengths in Angstrom, angles in
radians internally. Analytic gradients are provided for every term.
"""

from __future__ import annotations

import importlib.resources
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import MissingParameters
from .perception import list_rotatable_bonds
from .structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    MolecularStructure,
)

BOND_FORCE_SCALE = 664.12     # kcal/mol, force-constant prefactor
BOND_ORDER_LAMBDA = 0.1332    # bond-order correction strength
SP2_TORSION_V = 1.0           # sp2-sp3 barrier, kcal/mol
SCALE_14 = 0.5
_U_SP2_BY_PERIOD = {1: 0.0, 2: 2.0, 3: 1.25, 4: 0.7, 5: 0.2, 6: 0.1}

_BOND_ORDER_VALUE = {
    BOND_SINGLE: 1.0,
    BOND_AROMATIC: 1.5,
    BOND_DOUBLE: 2.0,
    BOND_TRIPLE: 3.0,
}


@dataclass(frozen=True)
class AtomTypeParams:
    name: str
    r1: float
    theta0: float  # degrees
    x1: float
    d1: float
    zstar: float
    v_sp3: float
    chi: float
    period: int


@lru_cache(maxsize=1)
def _load_params() -> dict[str, AtomTypeParams]:
    text = (
        importlib.resources.files("compasskit.data")
        .joinpath("uff_params.dat")
        .read_text()
    )
    table = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        table[f[0]] = AtomTypeParams(
            name=f[0], r1=float(f[1]), theta0=float(f[2]), x1=float(f[3]),
            d1=float(f[4]), zstar=float(f[5]), v_sp3=float(f[6]),
            chi=float(f[7]), period=int(f[8]),
        )
    return table


def assign_atom_type(mol: MolecularStructure, idx: int) -> str:
    element = mol.atoms[idx].element
    if element == "H":
        return "H_"
    if element in ("F", "Cl", "Br", "I", "P"):
        return {"F": "F_", "Cl": "Cl", "Br": "Br", "I": "I_", "P": "P_3"}[element]
    if element not in ("C", "N", "O", "S"):
        raise MissingParameters(f"no force-field type for element {element}")
    orders = [mol.bond_between(idx, j).order for j in mol.neighbors(idx)]
    if BOND_AROMATIC in orders:
        return f"{element}_R"
    if BOND_TRIPLE in orders or orders.count(BOND_DOUBLE) >= 2:
        return f"{element}_1" if element in ("C", "N", "O") else "S_2"
    if BOND_DOUBLE in orders:
        return f"{element}_2"
    return f"{element}_3"


def _hybrid_of(type_name: str) -> str:
    suffix = type_name.split("_")[-1] if "_" in type_name else ""
    if suffix == "3":
        return "sp3"
    if suffix in ("2", "R"):
        return "sp2"
    if suffix == "1":
        return "sp"
    return "other"  # halogens, hydrogen


def natural_bond_length(pi: AtomTypeParams, pj: AtomTypeParams, order: str) -> float:
    """r_i + r_j with bond-order shortening and electronegativity correction."""
    n = _BOND_ORDER_VALUE[order]
    r_sum = pi.r1 + pj.r1
    r_bo = -BOND_ORDER_LAMBDA * r_sum * math.log(n)
    num = pi.r1 * pj.r1 * (math.sqrt(pi.chi) - math.sqrt(pj.chi)) ** 2
    den = pi.chi * pi.r1 + pj.chi * pj.r1
    r_en = num / den
    return r_sum + r_bo - r_en


@dataclass(frozen=True, eq=False)
class ForceFieldModel:
    n_atoms: int
    bond_terms: tuple[tuple[int, int, float, float], ...]           # i, j, r0, k
    angle_terms: tuple[tuple[int, int, int, float, float], ...]     # i, j, k, theta0(rad), k
    torsion_terms: tuple[tuple[int, int, int, int, float, float, float], ...]
    # (i, j, k, l, V_eff, n, cos_n_phi0)
    nonbonded: tuple[tuple[int, int, float, float, float], ...]     # i, j, x_ij, d_ij, scale
    rotatable: tuple[tuple[int, int], ...]

    @property
    def _arrays(self):
        cached = getattr(self, "_array_cache", None)
        if cached is None:
            cached = {
                "bond_idx": np.array([t[:2] for t in self.bond_terms], dtype=int).reshape(-1, 2),
                "bond_r0": np.array([t[2] for t in self.bond_terms]),
                "bond_k": np.array([t[3] for t in self.bond_terms]),
                "angle_idx": np.array([t[:3] for t in self.angle_terms], dtype=int).reshape(-1, 3),
                "angle_theta0": np.array([t[3] for t in self.angle_terms]),
                "angle_k": np.array([t[4] for t in self.angle_terms]),
                "tors_idx": np.array([t[:4] for t in self.torsion_terms], dtype=int).reshape(-1, 4),
                "tors_v": np.array([t[4] for t in self.torsion_terms]),
                "tors_n": np.array([t[5] for t in self.torsion_terms]),
                "tors_cos0": np.array([t[6] for t in self.torsion_terms]),
                "nb_idx": np.array([t[:2] for t in self.nonbonded], dtype=int).reshape(-1, 2),
                "nb_x": np.array([t[2] for t in self.nonbonded]),
                "nb_d": np.array([t[3] for t in self.nonbonded]),
                "nb_scale": np.array([t[4] for t in self.nonbonded]),
            }
            object.__setattr__(self, "_array_cache", cached)
        return cached


def build_force_field(mol: MolecularStructure) -> ForceFieldModel:
    """Parameterize a ligand from its bond graph and element types."""
    table = _load_params()
    types = []
    for i in range(len(mol.atoms)):
        name = assign_atom_type(mol, i)
        if name not in table:
            raise MissingParameters(f"atom type {name} missing from table")
        types.append(table[name])

    bond_terms = []
    for b in mol.bonds:
        pi, pj = types[b.atom_a], types[b.atom_b]
        r0 = natural_bond_length(pi, pj, b.order)
        k = BOND_FORCE_SCALE * pi.zstar * pj.zstar / r0 ** 3
        bond_terms.append((b.atom_a, b.atom_b, r0, k))

    angle_terms = []
    for j in range(len(mol.atoms)):
        nbrs = sorted(mol.neighbors(j))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                i, k = nbrs[a], nbrs[b]
                pj = types[j]
                theta0 = math.radians(pj.theta0)
                r_ij = natural_bond_length(types[i], pj, mol.bond_between(i, j).order)
                r_jk = natural_bond_length(pj, types[k], mol.bond_between(j, k).order)
                cos0 = math.cos(theta0)
                r_ik2 = r_ij ** 2 + r_jk ** 2 - 2.0 * r_ij * r_jk * cos0
                r_ik = math.sqrt(r_ik2)
                k_theta = (
                    BOND_FORCE_SCALE * types[i].zstar * types[k].zstar / r_ik ** 5
                    * (3.0 * r_ij * r_jk * (1.0 - cos0 ** 2) - r_ik2 * cos0)
                )
                angle_terms.append((i, j, k, theta0, k_theta))

    rotatable = tuple(list_rotatable_bonds(mol))
    torsion_terms = []
    for (j, k) in rotatable:
        quads = []
        for i in mol.neighbors(j):
            if i == k:
                continue
            for l in mol.neighbors(k):
                if l == j or l == i:
                    continue
                quads.append((i, j, k, l))
        if not quads:
            continue
        hj, hk = _hybrid_of(types[j].name), _hybrid_of(types[k].name)
        if hj == "sp" or hk == "sp":
            continue
        if hj == "sp3" and hk == "sp3":
            v = math.sqrt(types[j].v_sp3 * types[k].v_sp3)
            n, phi0 = 3.0, math.pi
        elif hj == "sp2" and hk == "sp2":
            uj = _U_SP2_BY_PERIOD[types[j].period]
            uk = _U_SP2_BY_PERIOD[types[k].period]
            v = 5.0 * math.sqrt(uj * uk)  # single bond between sp2 centers
            n, phi0 = 2.0, math.pi
        else:
            v = SP2_TORSION_V
            n, phi0 = 6.0, 0.0
        v_eff = v / len(quads)
        cos_n_phi0 = math.cos(n * phi0)
        for (i, j2, k2, l) in quads:
            torsion_terms.append((i, j2, k2, l, v_eff, n, cos_n_phi0))

    # Nonbonded pairs with topological exclusions.
    nbr = mol.neighbor_map
    excl12 = {frozenset((b.atom_a, b.atom_b)) for b in mol.bonds}
    excl13 = set()
    pairs14 = set()
    for j in range(len(mol.atoms)):
        for a in nbr[j]:
            for b in nbr[j]:
                if a < b:
                    excl13.add(frozenset((a, b)))
    for b in mol.bonds:
        for i in nbr[b.atom_a]:
            if i == b.atom_b:
                continue
            for l in nbr[b.atom_b]:
                if l == b.atom_a or l == i:
                    continue
                pairs14.add(frozenset((i, l)))
    nonbonded = []
    n = len(mol.atoms)
    for i in range(n):
        for j in range(i + 1, n):
            key = frozenset((i, j))
            if key in excl12 or key in excl13:
                continue
            scale = SCALE_14 if key in pairs14 else 1.0
            x_ij = math.sqrt(types[i].x1 * types[j].x1)
            d_ij = math.sqrt(types[i].d1 * types[j].d1)
            nonbonded.append((i, j, x_ij, d_ij, scale))

    return ForceFieldModel(
        n_atoms=n,
        bond_terms=tuple(bond_terms),
        angle_terms=tuple(angle_terms),
        torsion_terms=tuple(torsion_terms),
        nonbonded=tuple(nonbonded),
        rotatable=rotatable,
    )


def energy(ff: ForceFieldModel, coords: np.ndarray) -> float:
    return energy_and_gradient(ff, coords)[0]


def energy_and_gradient(ff: ForceFieldModel, coords: np.ndarray) -> tuple[float, np.ndarray]:
    """Total energy and its analytic Cartesian gradient (kcal/mol, per A)."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (ff.n_atoms, 3):
        raise ValueError("coordinate array shape mismatch")
    arr = ff._arrays
    e = 0.0
    g = np.zeros_like(coords)

    if len(arr["bond_idx"]):
        i, j = arr["bond_idx"][:, 0], arr["bond_idx"][:, 1]
        vec = coords[i] - coords[j]
        r = np.linalg.norm(vec, axis=1)
        safe = np.maximum(r, 1e-12)
        diff = r - arr["bond_r0"]
        e += float(np.sum(0.5 * arr["bond_k"] * diff * diff))
        f = (arr["bond_k"] * diff / safe)[:, None] * vec
        np.add.at(g, i, f)
        np.add.at(g, j, -f)

    if len(arr["angle_idx"]):
        i, j, k = (arr["angle_idx"][:, c] for c in range(3))
        u = coords[i] - coords[j]
        v = coords[k] - coords[j]
        nu = np.maximum(np.linalg.norm(u, axis=1), 1e-12)
        nv = np.maximum(np.linalg.norm(v, axis=1), 1e-12)
        uh = u / nu[:, None]
        vh = v / nv[:, None]
        cos_t = np.clip(np.sum(uh * vh, axis=1), -1.0, 1.0)
        theta = np.arccos(cos_t)
        sin_t = np.sqrt(np.maximum(1e-12, 1.0 - cos_t * cos_t))
        diff = theta - arr["angle_theta0"]
        e += float(np.sum(0.5 * arr["angle_k"] * diff * diff))
        deda = (arr["angle_k"] * diff)[:, None]
        di = (cos_t[:, None] * uh - vh) / (nu * sin_t)[:, None]
        dk = (cos_t[:, None] * vh - uh) / (nv * sin_t)[:, None]
        np.add.at(g, i, deda * di)
        np.add.at(g, k, deda * dk)
        np.add.at(g, j, -deda * (di + dk))

    if len(arr["tors_idx"]):
        i, j, k, l = (arr["tors_idx"][:, c] for c in range(4))
        b1 = coords[j] - coords[i]
        b2 = coords[k] - coords[j]
        b3 = coords[l] - coords[k]
        n1 = np.cross(b1, b2)
        n2 = np.cross(b2, b3)
        n1_sq = np.sum(n1 * n1, axis=1)
        n2_sq = np.sum(n2 * n2, axis=1)
        b2_len = np.linalg.norm(b2, axis=1)
        ok = (n1_sq > 1e-18) & (n2_sq > 1e-18) & (b2_len > 1e-12)
        n1_sq = np.where(ok, n1_sq, 1.0)
        n2_sq = np.where(ok, n2_sq, 1.0)
        b2_safe = np.where(ok, b2_len, 1.0)
        phi = np.arctan2(
            np.sum(np.cross(n1, n2) * b2, axis=1) / b2_safe,
            np.sum(n1 * n2, axis=1),
        )
        n_per = arr["tors_n"]
        v_eff = np.where(ok, arr["tors_v"], 0.0)
        e += float(np.sum(0.5 * v_eff * (1.0 - arr["tors_cos0"] * np.cos(n_per * phi))))
        dedphi = 0.5 * v_eff * arr["tors_cos0"] * n_per * np.sin(n_per * phi)
        gi = -(b2_safe / n1_sq)[:, None] * n1
        gl = (b2_safe / n2_sq)[:, None] * n2
        t12 = np.sum(b1 * b2, axis=1) / (b2_safe * b2_safe)
        t32 = np.sum(b3 * b2, axis=1) / (b2_safe * b2_safe)
        gj = -(1.0 + t12)[:, None] * gi + t32[:, None] * gl
        gk = -(1.0 + t32)[:, None] * gl + t12[:, None] * gi
        w = dedphi[:, None]
        np.add.at(g, i, w * gi)
        np.add.at(g, j, w * gj)
        np.add.at(g, k, w * gk)
        np.add.at(g, l, w * gl)

    if len(arr["nb_idx"]):
        i, j = arr["nb_idx"][:, 0], arr["nb_idx"][:, 1]
        vec = coords[i] - coords[j]
        r = np.maximum(np.linalg.norm(vec, axis=1), 1e-12)
        ratio6 = (arr["nb_x"] / r) ** 6
        e += float(np.sum(arr["nb_scale"] * arr["nb_d"] * (ratio6 * ratio6 - 2.0 * ratio6)))
        dedr = arr["nb_scale"] * arr["nb_d"] * 12.0 * (ratio6 - ratio6 * ratio6) / r
        f = (dedr / r)[:, None] * vec
        np.add.at(g, i, f)
        np.add.at(g, j, -f)

    return e, g


def _dihedral_and_gradient(coords: np.ndarray, i: int, j: int, k: int, l: int):
    """Dihedral angle (rad) and d(phi)/d(r) for the four atoms."""
    b1 = coords[j] - coords[i]
    b2 = coords[k] - coords[j]
    b3 = coords[l] - coords[k]
    n1 = np.cross(b1, b2)
    n2 = np.cross(b2, b3)
    n1_sq = float(np.dot(n1, n1))
    n2_sq = float(np.dot(n2, n2))
    b2_len = float(np.linalg.norm(b2))
    if n1_sq < 1e-18 or n2_sq < 1e-18 or b2_len < 1e-12:
        return None, None
    phi = math.atan2(float(np.dot(np.cross(n1, n2), b2)) / b2_len,
                     float(np.dot(n1, n2)))
    gi = -b2_len / n1_sq * n1
    gl = b2_len / n2_sq * n2
    dot12 = float(np.dot(b1, b2)) / (b2_len * b2_len)
    dot32 = float(np.dot(b3, b2)) / (b2_len * b2_len)
    gj = -(1.0 + dot12) * gi + dot32 * gl
    gk = -(1.0 + dot32) * gl + dot12 * gi
    return phi, (gi, gj, gk, gl)


def dihedral(coords: np.ndarray, i: int, j: int, k: int, l: int) -> float:
    """Signed dihedral angle in radians."""
    phi, _ = _dihedral_and_gradient(np.asarray(coords, dtype=float), i, j, k, l)
    if phi is None:
        raise ValueError("degenerate dihedral")
    return phi
