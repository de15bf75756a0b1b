"""Interaction detectors, fingerprints, Tanimoto similarity."""

import numpy as np
import pytest

from compasskit.errors import LayoutMismatch
from compasskit.interactions import (
    InteractionFingerprint,
    detect_all,
    detect_hbonds,
    detect_hydrophobic,
    detect_metal,
    detect_pi_cation,
    detect_pi_stacking,
    fingerprint,
    metal_strength,
    tanimoto,
)
from compasskit.io_pdb import parse_pdb
from compasskit.io_sdf import parse_sdf
from compasskit.perception import perceive_rings, tag_pharmacophores

from conftest import random_rotation, transform_structure


@pytest.fixture
def complex_parts(site_pdb_path, probe_sdf_path):
    protein = parse_pdb(site_pdb_path.read_bytes())
    ligand = parse_sdf(probe_sdf_path.read_bytes())
    return {
        "protein": protein,
        "ligand": ligand,
        "p_tags": tag_pharmacophores(protein),
        "l_tags": tag_pharmacophores(ligand),
        "p_rings": perceive_rings(protein),
        "l_rings": perceive_rings(ligand),
    }


def _kinds(interactions):
    return {it.kind for it in interactions}


class TestHbonds:
    def test_fixture_hbonds(self, complex_parts):
        hbonds = detect_hbonds(
            complex_parts["protein"], complex_parts["ligand"],
            complex_parts["p_tags"], complex_parts["l_tags"],
        )
        pairs = {(it.kind, it.residue_label) for it in hbonds}
        # SER OG donates to the probe hydroxyl and accepts from it;
        # the ammonium donates to ASP OD1.
        assert ("hbond_donor_p", "A:1:SER") in pairs
        assert ("hbond_acceptor_p", "A:1:SER") in pairs
        assert ("hbond_acceptor_p", "A:4:ASP") in pairs

    def test_distance_threshold(self, complex_parts):
        # 3.6 A is beyond the 3.5 A limit: shift the ligand down by 0.8 A
        # (hydroxyl pair sits at 2.8 A).
        ligand = complex_parts["ligand"]
        shifted = ligand.with_coords(ligand.coords + np.array([0.0, 0.0, 0.81]))
        hbonds = detect_hbonds(
            complex_parts["protein"], shifted,
            complex_parts["p_tags"], tag_pharmacophores(shifted),
        )
        assert not any(it.residue_label == "A:1:SER" for it in hbonds)

    def test_angle_threshold(self):
        # Donor-H pointing away from the acceptor: angle(D,H,A) = 100 deg.
        protein = parse_pdb(
            "ATOM      1  OG  SER A   1       0.000   0.000   0.000  1.00  0.00           O\n"
            "ATOM      2  CB  SER A   1       0.000  -1.400   0.300  1.00  0.00           C"
        )
        import math

        from conftest import make_mol

        d = 2.9
        for theta_deg, expected in ((180.0, True), (100.0, False)):
            # Ligand donor O with one H; acceptor is protein OG.
            # Place H so angle(D, H, OG) equals theta.
            dpos = np.array([0.0, 0.0, d])
            t = math.radians(180.0 - theta_deg)
            hpos = dpos + 0.97 * np.array([math.sin(t), 0.0, -math.cos(t)])
            ligand = make_mol(
                [("O", tuple(dpos)), ("H", tuple(hpos))], [(0, 1, "single")]
            )
            hbonds = detect_hbonds(
                protein, ligand, tag_pharmacophores(protein), tag_pharmacophores(ligand)
            )
            assert bool(hbonds) is expected, theta_deg


class TestHydrophobic:
    def test_two_carbons_at_three_angstrom(self, complex_parts):
        contacts = detect_hydrophobic(
            complex_parts["protein"], complex_parts["ligand"],
            complex_parts["p_tags"], complex_parts["l_tags"],
        )
        assert any(it.residue_label == "A:5:ALA" for it in contacts)
        for it in contacts:
            assert it.distance <= 3.4 + 2.0 + 0.01

    def test_beyond_range_not_detected(self, complex_parts):
        ligand = complex_parts["ligand"]
        far = ligand.with_coords(ligand.coords + np.array([0.0, 0.0, 40.0]))
        contacts = detect_hydrophobic(
            complex_parts["protein"], far,
            complex_parts["p_tags"], tag_pharmacophores(far),
        )
        assert contacts == []

    def test_oxygen_not_hydrophobic(self, complex_parts):
        l_tags = complex_parts["l_tags"]
        oxygens = [
            i for i, a in enumerate(complex_parts["ligand"].atoms) if a.element == "O"
        ]
        assert not any(i in l_tags.hydrophobics for i in oxygens)


class TestPiStacking:
    def test_face_to_face_on_fixture(self, complex_parts):
        stacks = detect_pi_stacking(
            complex_parts["protein"], complex_parts["p_rings"], complex_parts["l_rings"]
        )
        assert len(stacks) == 1
        assert stacks[0].detail == "face_to_face"
        assert stacks[0].distance == pytest.approx(np.sqrt(0.5**2 + 3.5**2), abs=1e-6)

    def test_edge_to_face(self, complex_parts):
        # Rotate the ligand ring 85 deg about x through its centroid, keeping
        # the center at distance 5.0 and offset 1.0 from the protein ring.
        import math

        ligand = complex_parts["ligand"]
        center = np.array([1.0, 0.0, np.sqrt(24.0)])  # d = 5.0, lateral = 1.0
        theta = math.radians(85.0)
        rot = np.array(
            [[1, 0, 0],
             [0, math.cos(theta), -math.sin(theta)],
             [0, math.sin(theta), math.cos(theta)]]
        )
        ring_atoms = complex_parts["l_rings"][0].atom_indices
        old_center = complex_parts["l_rings"][0].centroid
        coords = ligand.coords.copy()
        coords = (coords - old_center) @ rot.T + center
        tilted = ligand.with_coords(coords)
        stacks = detect_pi_stacking(
            complex_parts["protein"], complex_parts["p_rings"], perceive_rings(tilted)
        )
        assert len(stacks) == 1
        assert stacks[0].detail == "edge_to_face"

    def test_gap_angle_rejected(self, complex_parts):
        import math

        ligand = complex_parts["ligand"]
        old_center = complex_parts["l_rings"][0].centroid
        theta = math.radians(45.0)
        rot = np.array(
            [[1, 0, 0],
             [0, math.cos(theta), -math.sin(theta)],
             [0, math.sin(theta), math.cos(theta)]]
        )
        coords = (ligand.coords - old_center) @ rot.T + np.array([0.5, 0.0, 3.5])
        tilted = ligand.with_coords(coords)
        stacks = detect_pi_stacking(
            complex_parts["protein"], complex_parts["p_rings"], perceive_rings(tilted)
        )
        assert stacks == []


class TestPiCation:
    def test_fixture_detection(self, complex_parts):
        hits = detect_pi_cation(
            complex_parts["protein"], complex_parts["ligand"],
            complex_parts["p_rings"], complex_parts["l_rings"],
            complex_parts["p_tags"], complex_parts["l_tags"],
        )
        assert any(
            it.residue_label == "A:3:LYS" and it.detail == "ligand_ring" for it in hits
        )
        for it in hits:
            assert 0.5 <= it.distance <= 5.5

    def test_indicator_bounds(self, complex_parts):
        protein = complex_parts["protein"]
        p_rings = complex_parts["p_rings"]
        from conftest import make_mol

        for d, expected in ((3.0, 1), (6.0, 0), (0.2, 0)):
            cation = make_mol([("N", (0.0, 0.0, d), 1)], [])
            hits = detect_pi_cation(
                protein, cation, p_rings, [], complex_parts["p_tags"],
                tag_pharmacophores(cation),
            )
            assert len(hits) == expected, d


class TestMetal:
    def test_strength_function(self):
        assert metal_strength(1.5) == 1.0
        assert metal_strength(2.5) == pytest.approx(0.5)
        assert metal_strength(3.5) == 0.0

    def test_fixture_zinc(self, complex_parts):
        hits = detect_metal(
            complex_parts["protein"], complex_parts["ligand"], complex_parts["p_tags"]
        )
        assert len(hits) == 1
        assert hits[0].distance == pytest.approx(1.90, abs=1e-6)


class TestRigidMotionInvariance:
    def test_detections_invariant(self, complex_parts):
        protein = complex_parts["protein"]
        ligand = complex_parts["ligand"]
        base = detect_all(
            protein, ligand, complex_parts["p_tags"], complex_parts["l_tags"],
            complex_parts["p_rings"], complex_parts["l_rings"],
        )
        rng = np.random.default_rng(42)
        for _ in range(3):
            rot = random_rotation(rng)
            shift = rng.normal(size=3) * 20.0
            p2 = transform_structure(protein, rot, shift)
            l2 = transform_structure(ligand, rot, shift)
            moved = detect_all(
                p2, l2, tag_pharmacophores(p2), tag_pharmacophores(l2),
                perceive_rings(p2), perceive_rings(l2),
            )
            assert len(moved) == len(base)
            for a, b in zip(
                sorted(base, key=lambda x: (x.kind, x.residue_label, x.distance)),
                sorted(moved, key=lambda x: (x.kind, x.residue_label, x.distance)),
            ):
                assert a.kind == b.kind
                assert a.residue_label == b.residue_label
                assert a.distance == pytest.approx(b.distance, abs=1e-9)


class TestSelfValidation:
    def test_stored_geometry_satisfies_thresholds(self, complex_parts):
        """Every detection re-validates against its own kind's limits."""
        from compasskit.elements import element_info

        protein = complex_parts["protein"]
        ligand = complex_parts["ligand"]
        for it in detect_all(
            protein, ligand, complex_parts["p_tags"], complex_parts["l_tags"],
            complex_parts["p_rings"], complex_parts["l_rings"],
        ):
            assert it.distance > 0
            if it.kind in ("hbond_donor_p", "hbond_acceptor_p"):
                assert it.distance <= 3.5
                assert it.angle is None or it.angle >= 90.0
            elif it.kind == "hydrophobic":
                d0 = (
                    element_info(protein.atoms[it.protein_atom].element).vdw_radius
                    + element_info(ligand.atoms[it.ligand_atom].element).vdw_radius
                )
                assert it.distance <= d0 + 2.0
            elif it.kind in ("pi_stacking", "pi_cation"):
                assert 0.5 <= it.distance <= 5.5
            elif it.kind == "metal_coordination":
                assert metal_strength(it.distance) > 0
            elif it.kind == "salt_bridge":
                assert it.distance <= 4.0


class TestFingerprint:
    def test_no_interactions_all_zero(self, complex_parts):
        fp = fingerprint([], complex_parts["protein"])
        assert fp.count() == 0

    def test_one_bit_per_residue_kind(self, complex_parts):
        inter = detect_hbonds(
            complex_parts["protein"], complex_parts["ligand"],
            complex_parts["p_tags"], complex_parts["l_tags"],
        )
        ser_only = [it for it in inter if it.residue_label == "A:1:SER"
                    and it.kind == "hbond_donor_p"]
        fp = fingerprint(ser_only, complex_parts["protein"])
        assert fp.count() == 1
        # Duplicates set the same bit.
        fp2 = fingerprint(ser_only * 2, complex_parts["protein"])
        assert fp2.count() == 1
        assert fp.to_hex() == fp2.to_hex()

    def test_layout_deterministic(self, complex_parts):
        fp1 = fingerprint([], complex_parts["protein"])
        fp2 = fingerprint([], complex_parts["protein"])
        assert fp1.layout == fp2.layout
        assert len(fp1.layout) == len(complex_parts["protein"].residues) * 7


class TestTanimoto:
    def _fp(self, bits):
        arr = np.array(bits, dtype=np.uint8)
        layout = tuple(f"slot{i}" for i in range(len(bits)))
        return InteractionFingerprint(bits=arr, layout=layout)

    def test_identical_nonzero(self):
        fp = self._fp([1, 1, 0, 0])
        assert tanimoto(fp, fp) == 1.0

    def test_disjoint(self):
        assert tanimoto(self._fp([1, 1, 0, 0]), self._fp([0, 0, 1, 1])) == 0.0

    def test_enumerated_third(self):
        assert tanimoto(self._fp([1, 1, 0, 0]), self._fp([1, 0, 1, 0])) == pytest.approx(1 / 3)

    def test_both_zero_convention(self):
        assert tanimoto(self._fp([0, 0]), self._fp([0, 0])) == 1.0

    def test_layout_mismatch(self):
        a = self._fp([1, 0])
        b = InteractionFingerprint(
            bits=np.array([1, 0], dtype=np.uint8), layout=("x", "y")
        )
        with pytest.raises(LayoutMismatch):
            tanimoto(a, b)

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            a = self._fp(rng.integers(0, 2, size=16))
            b = self._fp(rng.integers(0, 2, size=16))
            t_ab = tanimoto(a, b)
            assert t_ab == tanimoto(b, a)
            assert 0.0 <= t_ab <= 1.0
