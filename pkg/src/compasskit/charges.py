"""Partial charge assignment.

Ligands get charges from an iterative electronegativity-equalization
procedure over the bond graph (8 iterations, transfer damped by
0.5**iteration); charge is conserved exactly, so the total equals the sum
of formal charges. Proteins get per-residue template charges from a shipped
data table because protein files carry no bonds.
"""

from __future__ import annotations

import importlib.resources
from functools import lru_cache

import numpy as np

from .errors import MissingParameters
from .structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_TRIPLE,
    KIND_STANDARD_AA,
    MolecularStructure,
)

N_ITERATIONS = 8

# Electronegativity polynomial chi(q) = a + b q + c q^2 per (element, hybrid).
# Classic partial-equalization coefficients; P is an extension value.
_EN_PARAMS: dict[tuple[str, str], tuple[float, float, float]] = {
    ("H", "*"): (7.17, 6.24, -0.56),
    ("C", "sp3"): (7.98, 9.18, 1.88),
    ("C", "sp2"): (8.79, 9.32, 1.51),
    ("C", "sp"): (10.39, 9.45, 0.73),
    ("N", "sp3"): (11.54, 10.82, 1.36),
    ("N", "sp2"): (12.87, 11.15, 0.85),
    ("N", "sp"): (15.68, 11.70, -0.27),
    ("O", "sp3"): (14.18, 12.92, 1.39),
    ("O", "sp2"): (17.07, 13.79, 0.47),
    ("F", "*"): (14.66, 13.85, 2.31),
    ("Cl", "*"): (11.00, 9.69, 1.35),
    ("Br", "*"): (10.08, 8.47, 1.16),
    ("I", "*"): (9.90, 7.96, 0.96),
    ("S", "*"): (10.14, 9.13, 1.38),
    ("P", "*"): (8.90, 8.24, 0.96),
}
_H_CATION_EN = 20.02


def _hybridization(mol: MolecularStructure, idx: int) -> str:
    orders = [
        mol.bond_between(idx, j).order for j in mol.neighbors(idx)
    ]
    if BOND_TRIPLE in orders:
        return "sp"
    if orders.count(BOND_DOUBLE) >= 2:
        return "sp"
    if BOND_DOUBLE in orders or BOND_AROMATIC in orders:
        return "sp2"
    return "sp3"


def _en_params(mol: MolecularStructure, idx: int) -> tuple[float, float, float]:
    element = mol.atoms[idx].element
    key = (element, "*")
    if key in _EN_PARAMS:
        return _EN_PARAMS[key]
    key = (element, _hybridization(mol, idx))
    if key in _EN_PARAMS:
        return _EN_PARAMS[key]
    raise MissingParameters(f"no electronegativity parameters for {element}")


def assign_gasteiger_charges(mol: MolecularStructure) -> MolecularStructure:
    """Charge a molecule; dispatches to the template table for proteins."""
    if mol.residues:
        return assign_template_charges(mol)
    if not mol.atoms:
        return mol

    params = [_en_params(mol, i) for i in range(len(mol.atoms))]
    cation_en = [
        _H_CATION_EN if mol.atoms[i].element == "H" else sum(params[i])
        for i in range(len(mol.atoms))
    ]
    q = np.array([float(a.formal_charge) for a in mol.atoms])

    for k in range(1, N_ITERATIONS + 1):
        damping = 0.5 ** k
        chi = np.array([a + b * qi + c * qi * qi for (a, b, c), qi in zip(params, q)])
        transfer = np.zeros_like(q)
        for bond in mol.bonds:
            i, j = bond.atom_a, bond.atom_b
            if chi[i] == chi[j]:
                continue
            lo, hi = (i, j) if chi[i] < chi[j] else (j, i)
            dq = (chi[hi] - chi[lo]) / cation_en[lo] * damping
            transfer[lo] += dq
            transfer[hi] -= dq
        q += transfer

    return mol.with_charges(q)


@lru_cache(maxsize=1)
def _load_residue_templates() -> tuple[dict[tuple[str, str], float], dict[tuple[str, str], int]]:
    charges: dict[tuple[str, str], float] = {}
    formals: dict[tuple[str, str], int] = {}
    data = (
        importlib.resources.files("compasskit.data")
        .joinpath("residue_charges.dat")
        .read_text()
    )
    for line in data.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        res, atom, charge = fields[0], fields[1], float(fields[2])
        charges[(res, atom)] = charge
        if len(fields) >= 4:
            formals[(res, atom)] = int(fields[3])
    return charges, formals


def assign_template_charges(protein: MolecularStructure) -> MolecularStructure:
    """Protein charges from the residue template table.

    Atoms without a table entry get 0.0; charged groups also receive the
    table's formal charge marker so the molecular totals stay consistent.
    """
    from dataclasses import replace

    table, formals = _load_residue_templates()
    new_atoms = list(protein.atoms)
    for res in protein.residues:
        if res.kind != KIND_STANDARD_AA:
            for i in res.atoms:
                new_atoms[i] = replace(new_atoms[i], partial_charge=0.0)
            continue
        for i in res.atoms:
            name = protein.atoms[i].name
            key = (res.name, name)
            charge = table.get(key, table.get(("*", name), 0.0))
            formal = formals.get(key, 0)
            new_atoms[i] = replace(
                new_atoms[i], partial_charge=charge, formal_charge=formal
            )
    return replace(protein, atoms=tuple(new_atoms))
