"""Shared fixtures: programmatic molecule builders and fixture paths."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from compasskit.structures import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    Atom,
    Bond,
    MolecularStructure,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def site_pdb_path() -> Path:
    return FIXTURES / "site.pdb"


@pytest.fixture
def probe_sdf_path() -> Path:
    return FIXTURES / "probe.sdf"


@pytest.fixture
def probe_mol2_path() -> Path:
    return FIXTURES / "probe.mol2"


@pytest.fixture
def benzene_sdf_path() -> Path:
    return FIXTURES / "benzene.sdf"


def make_mol(atoms, bonds, fmt="sdf") -> MolecularStructure:
    """atoms: list of (element, (x, y, z), formal); bonds: (i, j, order)."""
    built = []
    for serial, spec in enumerate(atoms, 1):
        element, pos = spec[0], spec[1]
        formal = spec[2] if len(spec) > 2 else 0
        built.append(
            Atom(serial=serial, element=element, position=np.array(pos, dtype=float),
                 formal_charge=formal)
        )
    return MolecularStructure(
        atoms=tuple(built),
        bonds=tuple(Bond(atom_a=i, atom_b=j, order=o) for i, j, o in bonds),
        source_format=fmt,
    )


def _unit(v):
    return v / np.linalg.norm(v)


def zmat_place(a, b, c, bond, angle_deg, dihedral_deg):
    """Place atom D with |D-a| = bond, angle(D,a,b) = angle,
    dihedral(D,a,b,c) = dihedral (NeRF construction)."""
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    theta = math.radians(angle_deg)
    phi = math.radians(dihedral_deg)
    u = _unit(a - b)
    n = _unit(np.cross(b - c, a - b))
    m = np.cross(n, u)
    d_local = (
        -u * math.cos(theta)
        + m * math.sin(theta) * math.cos(phi)
        + n * math.sin(theta) * math.sin(phi)
    )
    return a + bond * d_local


def build_butane(central_dihedral_deg: float) -> MolecularStructure:
    """n-butane with explicit hydrogens at the requested C1-C2-C3-C4 torsion."""
    cc, ch = 1.526, 1.090
    ccc, hcc = 111.1, 109.5
    c2 = np.array([0.0, 0.0, 0.0])
    c3 = np.array([cc, 0.0, 0.0])
    c1 = c2 + cc * np.array([math.cos(math.radians(ccc)),
                             math.sin(math.radians(ccc)), 0.0])
    c4 = zmat_place(c3, c2, c1, cc, ccc, central_dihedral_deg)
    atoms = [("C", c1), ("C", c2), ("C", c3), ("C", c4)]
    bonds = [(0, 1, BOND_SINGLE), (1, 2, BOND_SINGLE), (2, 3, BOND_SINGLE)]
    # Methyl hydrogens staggered about each terminal C-C bond.
    for tip_idx, root_idx, ref_idx in ((0, 1, 2), (3, 2, 1)):
        for k in range(3):
            h = zmat_place(atoms[tip_idx][1], atoms[root_idx][1],
                           atoms[ref_idx][1], ch, hcc, 60.0 + 120.0 * k)
            bonds.append((tip_idx, len(atoms), BOND_SINGLE))
            atoms.append(("H", h))
    # Methylene hydrogens.
    for mid_idx, left_idx, right_idx in ((1, 0, 2), (2, 3, 1)):
        for phi in (120.0, -120.0):
            h = zmat_place(atoms[mid_idx][1], atoms[left_idx][1],
                           atoms[right_idx][1], ch, hcc, phi)
            bonds.append((mid_idx, len(atoms), BOND_SINGLE))
            atoms.append(("H", h))
    return make_mol(atoms, bonds)


def build_benzene_kekule() -> MolecularStructure:
    """Benzene with alternating single/double bonds (tests the planarity
    fallback instead of file aromatic flags)."""
    atoms = []
    bonds = []
    for i in range(6):
        theta = math.radians(60.0 * i)
        atoms.append(("C", (1.40 * math.cos(theta), 1.40 * math.sin(theta), 0.0)))
    for i in range(6):
        theta = math.radians(60.0 * i)
        atoms.append(("H", (2.49 * math.cos(theta), 2.49 * math.sin(theta), 0.0)))
        bonds.append((i, i + 6, BOND_SINGLE))
    for i in range(6):
        order = BOND_DOUBLE if i % 2 == 0 else BOND_SINGLE
        bonds.append((i, (i + 1) % 6, order))
    return make_mol(atoms, bonds)


def build_benzene_aromatic() -> MolecularStructure:
    mol = build_benzene_kekule()
    bonds = tuple(
        Bond(b.atom_a, b.atom_b, BOND_AROMATIC)
        if not mol.atoms[b.atom_a].is_hydrogen and not mol.atoms[b.atom_b].is_hydrogen
        else b
        for b in mol.bonds
    )
    return MolecularStructure(atoms=mol.atoms, bonds=bonds, source_format="sdf")


def build_cyclohexane_chair() -> MolecularStructure:
    """Chair ring with explicit hydrogens; C-C 1.526, ring pucker from
    tetrahedral-like angles."""
    cc, ch = 1.526, 1.090
    # Alternating-height ring: radius and height solve the bond constraints.
    theta = math.radians(111.4)
    rho = math.sqrt((cc ** 2 * (1.0 - math.cos(theta))) * 2.0 / 3.0)
    h = math.sqrt(max(0.0, (cc ** 2 - rho ** 2) / 4.0))
    atoms = []
    bonds = []
    for i in range(6):
        ang = math.radians(60.0 * i)
        atoms.append(("C", (rho * math.cos(ang), rho * math.sin(ang),
                            h if i % 2 == 0 else -h)))
    for i in range(6):
        bonds.append((i, (i + 1) % 6, BOND_SINGLE))
    for i in range(6):
        # Axial and equatorial hydrogens, constructed from ring neighbors.
        left = atoms[(i - 1) % 6][1]
        right = atoms[(i + 1) % 6][1]
        for phi in (119.0, -119.0):
            hpos = zmat_place(atoms[i][1], left, right, ch, 109.5, phi)
            bonds.append((i, len(atoms), BOND_SINGLE))
            atoms.append(("H", hpos))
    return make_mol(atoms, bonds)


def build_methane() -> MolecularStructure:
    c = np.zeros(3)
    t = 1.09 / math.sqrt(3.0)
    hs = [(t, t, t), (t, -t, -t), (-t, t, -t), (-t, -t, t)]
    atoms = [("C", c)] + [("H", h) for h in hs]
    bonds = [(0, i, BOND_SINGLE) for i in range(1, 5)]
    return make_mol(atoms, bonds)


def build_ethane() -> MolecularStructure:
    c1 = np.array([0.0, 0.0, 0.0])
    c2 = np.array([1.526, 0.0, 0.0])
    atoms = [("C", c1), ("C", c2)]
    bonds = [(0, 1, BOND_SINGLE)]
    ref = np.array([0.0, 1.0, 0.0])
    for root_idx, other_idx in ((0, 1), (1, 0)):
        for k in range(3):
            h = zmat_place(atoms[root_idx][1], atoms[other_idx][1],
                           atoms[root_idx][1] + ref, 1.09, 109.5, 120.0 * k + 30.0)
            bonds.append((root_idx, len(atoms), BOND_SINGLE))
            atoms.append(("H", h))
    return make_mol(atoms, bonds)


def build_acetate() -> MolecularStructure:
    """CH3-COO(-): formal -1 on one carboxylate oxygen."""
    atoms = [
        ("C", (0.0, 0.0, 0.0)),            # methyl C
        ("C", (1.52, 0.0, 0.0)),           # carboxyl C
        ("O", (2.15, 1.06, 0.0)),          # =O
        ("O", (2.15, -1.06, 0.0), -1),     # -O(-)
        ("H", (-0.4, 0.52, 0.85)),
        ("H", (-0.4, 0.52, -0.85)),
        ("H", (-0.4, -1.03, 0.0)),
    ]
    bonds = [
        (0, 1, BOND_SINGLE), (1, 2, BOND_DOUBLE), (1, 3, BOND_SINGLE),
        (0, 4, BOND_SINGLE), (0, 5, BOND_SINGLE), (0, 6, BOND_SINGLE),
    ]
    return make_mol(atoms, bonds)


def build_formaldehyde() -> MolecularStructure:
    atoms = [
        ("C", (0.0, 0.0, 0.0)),
        ("O", (1.21, 0.0, 0.0)),
        ("H", (-0.55, 0.94, 0.0)),
        ("H", (-0.55, -0.94, 0.0)),
    ]
    bonds = [(0, 1, BOND_DOUBLE), (0, 2, BOND_SINGLE), (0, 3, BOND_SINGLE)]
    return make_mol(atoms, bonds)


def build_water() -> MolecularStructure:
    atoms = [
        ("O", (0.0, 0.0, 0.0)),
        ("H", (0.96, 0.0, 0.0)),
        ("H", (-0.24, 0.93, 0.0)),
    ]
    bonds = [(0, 1, BOND_SINGLE), (0, 2, BOND_SINGLE)]
    return make_mol(atoms, bonds)


AUDIT_SHIFTS = [
    (0.0, 0.0, 0.0),
    (0.3, 0.0, 0.0),
    (-0.3, 0.0, 0.0),
    (0.0, 0.3, 0.0),
    (0.0, -0.3, 0.0),
    (0.0, 0.0, 0.4),
    (0.2, 0.2, 0.0),
    (-0.2, 0.2, 0.2),
]


def build_audit_dataset(root: Path, with_outlier=True, with_corrupt=True) -> int:
    """Write pair subfolders: benzene poses stacked over the fixture site.

    Returns the number of pairs written. Pair 'pair_outlier' is smashed into
    the protein ring plane (huge positive affinity, many clashes) so the <20
    filter drops exactly it; 'pair_corrupt' has an unparsable ligand.
    """
    from compasskit.io_sdf import parse_sdf, structure_to_sdf_text

    protein_text = (FIXTURES / "site.pdb").read_text()
    benzene = parse_sdf((FIXTURES / "benzene.sdf").read_bytes())
    stacked = benzene.with_coords(benzene.coords + np.array([0.5, 0.0, 3.5]))

    n = 0
    for i, shift in enumerate(AUDIT_SHIFTS):
        pair = root / f"pair{i:02d}"
        pair.mkdir(parents=True)
        (pair / "protein.pdb").write_text(protein_text)
        posed = stacked.with_coords(stacked.coords + np.array(shift))
        (pair / "ligand.sdf").write_text(structure_to_sdf_text(posed))
        n += 1
    if with_outlier:
        pair = root / "pair_outlier"
        pair.mkdir(parents=True)
        (pair / "protein.pdb").write_text(protein_text)
        smashed = stacked.with_coords(stacked.coords + np.array([0.0, 0.0, -3.3]))
        (pair / "ligand.sdf").write_text(structure_to_sdf_text(smashed))
        n += 1
    if with_corrupt:
        pair = root / "pair_corrupt"
        pair.mkdir(parents=True)
        (pair / "protein.pdb").write_text(protein_text)
        (pair / "ligand.sdf").write_text("this is not a connection table\n")
        n += 1
    return n


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation matrix via QR of a Gaussian matrix."""
    m = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(m)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def transform_structure(mol: MolecularStructure, rotation: np.ndarray,
                        translation: np.ndarray) -> MolecularStructure:
    coords = mol.coords @ rotation.T + translation
    return mol.with_coords(coords)
