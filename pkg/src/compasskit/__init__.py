"""Protein-ligand pose assessment toolkit.

Computes the physico-chemical and bioactivity triple of a docked pose
(empirical binding affinity, ligand strain energy, steric clash count)
plus interaction fingerprints, exposes the log-normalized LAN-MSE /
Compass Score functions, and drives dataset audits and recursive
redocking over pluggable docking backends.
"""

__version__ = "0.1.0"

from .aa_score import (
    EnergyComponents,
    WeightSet,
    binding_affinity,
    compute_components,
    electrostatic_term,
    hbond_kernel,
    hydrophobic_kernel,
    load_weights,
    vdw_kernel,
)
from .clashes import ClashReport, count_clashes
from .compass import (
    FavorabilityThresholds,
    LanMseParams,
    PcbTriple,
    classify_favorability,
    combined_loss,
    compass_component,
    compass_total,
    lan_mse,
)
from .elements import ElementInfo, element_info
from .geometry import SpatialGrid, angle, build_grid, pairs_within, ring_pair_geometry
from .interactions import (
    Interaction,
    InteractionFingerprint,
    detect_all,
    fingerprint,
    tanimoto,
)
from .io_mol2 import parse_mol2, structure_to_mol2_text
from .io_pdb import parse_pdb, structure_to_pdb_text, write_complex_pdb
from .io_sdf import parse_sdf, structure_to_sdf_text
from .perception import (
    PharmacophoreTags,
    Ring,
    count_rotatable_bonds,
    extract_pocket,
    perceive_rings,
    split_chain_parts,
    tag_pharmacophores,
)
from .charges import assign_gasteiger_charges
from .pipeline import (
    AssessmentReport,
    AuditSummary,
    CommandBackend,
    Config,
    MockBackend,
    RedockResult,
    assess_pair,
    assess_structures,
    audit_dataset,
    recursive_redock,
)
from .forcefield import ForceFieldModel, build_force_field, energy, energy_and_gradient
from .strain import StrainResult, relax, strain_energy
from .structures import Atom, Bond, MolecularStructure, Residue

__all__ = [name for name in dir() if not name.startswith("_")]
