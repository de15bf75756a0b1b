"""End-to-end pose assessment, dataset audit, and recursive redocking.

`assess_pair` is a pure function of the input bytes and the configuration:
the same files and config always produce an identical report. The audit
runs pairs through a process pool with per-pair failure isolation, and the
redock driver loops a pluggable docking backend until the pose is
favorable, hopeless, or the iteration budget is spent.
"""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Protocol

import numpy as np

from . import aa_score
from .charges import assign_gasteiger_charges, assign_template_charges
from .clashes import count_clashes
from .compass import FavorabilityThresholds, LanMseParams, PcbTriple, classify_favorability
from .errors import BackendFailure, CompassError, EmptyDataset, StageFailure
from .interactions import detect_all, fingerprint
from .io_mol2 import parse_mol2
from .io_pdb import parse_pdb, structure_to_pdb_text
from .io_sdf import parse_sdf, structure_to_sdf_text
from .perception import (
    extract_pocket,
    perceive_rings,
    split_chain_parts,
    tag_pharmacophores,
)
from .strain import strain_energy
from .structures import MolecularStructure

REPORT_SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class Config:
    weights_path: str | None = None
    pocket_cutoff: float = 8.0
    interface_cutoff: float = 10.0
    hbond_max_dist: float = 3.5
    hbond_min_angle: float = 120.0
    clash_tolerance: float = 0.5
    his_cation: bool = False
    max_affinity: float = 0.0
    max_strain: float = 5.0
    max_clashes: float = 5.0
    buffer_low: float = 1.1
    buffer_high: float = 1.0
    epsilon: float = 1e-5
    hard_max_affinity: float = 100.0
    hard_max_strain: float = 50.0
    hard_max_clashes: float = 100.0
    n_max: int = 5
    base_seed: int = 0
    relax_max_iter: int = 200
    relax_tol: float = 1e-4
    filter_limit: float = 20.0
    jobs: int = 1

    def validate(self) -> "Config":
        """Check field invariants; raises InvalidConfig before any work."""
        from .errors import InvalidConfig

        checks = [
            (self.pocket_cutoff > 0, "pocket_cutoff must be positive"),
            (self.interface_cutoff > 0, "interface_cutoff must be positive"),
            (self.hbond_max_dist > 0, "hbond_max_dist must be positive"),
            (0 < self.hbond_min_angle <= 180, "hbond_min_angle must be in (0, 180]"),
            (self.buffer_low > 1.0 >= self.buffer_high > 0,
             "buffers must satisfy buffer_low > 1.0 >= buffer_high > 0"),
            (self.epsilon > 0, "epsilon must be positive"),
            (self.n_max >= 1, "n_max must be >= 1"),
            (self.jobs >= 1, "jobs must be >= 1"),
            (self.relax_max_iter >= 1, "relax_max_iter must be >= 1"),
            (self.relax_tol > 0, "relax_tol must be positive"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidConfig(message)
        return self

    @classmethod
    def from_file(cls, path: str | os.PathLike, **overrides) -> "Config":
        """Config from a JSON file of field overrides; kwargs win over the
        file, the file wins over defaults. Unknown keys are rejected."""
        from .errors import InvalidConfig

        try:
            payload = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
        if not isinstance(payload, dict):
            raise InvalidConfig(f"config {path} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {', '.join(unknown)}")
        payload.update(overrides)
        return cls(**payload).validate()

    def thresholds(self) -> FavorabilityThresholds:
        return FavorabilityThresholds(
            max_affinity=self.max_affinity,
            max_strain=self.max_strain,
            max_clashes=self.max_clashes,
        )

    def lan_mse_params(self) -> LanMseParams:
        return LanMseParams(
            buffer_low=self.buffer_low,
            buffer_high=self.buffer_high,
            epsilon=self.epsilon,
        )

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class AssessmentReport:
    pcb: PcbTriple
    verdict: str
    interactions: tuple[dict, ...]
    fingerprint_hex: str
    fingerprint_layout: tuple[str, ...]
    components: dict[str, float]
    binding_affinity_raw: float
    strain_raw: float
    strain_converged: bool
    warnings: tuple[str, ...]
    provenance: dict[str, str]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "pcb": {
                "binding_affinity": self.pcb.binding_affinity,
                "strain_energy": self.pcb.strain_energy,
                "clash_count": int(self.pcb.clash_count),
            },
            "verdict": self.verdict,
            "interactions": list(self.interactions),
            "fingerprint": {
                "hex": self.fingerprint_hex,
                "layout": list(self.fingerprint_layout),
            },
            "components": self.components,
            "details": {
                "binding_affinity_raw": self.binding_affinity_raw,
                "strain_raw": self.strain_raw,
                "strain_converged": self.strain_converged,
            },
            "warnings": list(self.warnings),
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def load_ligand_file(path: str | os.PathLike) -> MolecularStructure:
    text = Path(path).read_bytes()
    suffix = Path(path).suffix.lower()
    if suffix == ".mol2":
        return parse_mol2(text)
    return parse_sdf(text)


def _stage(name: str):
    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, Exception):
                raise StageFailure(name, exc) from exc
            return False

    return _StageContext()


def assess_structures(protein: MolecularStructure, ligand: MolecularStructure,
                      config: Config = Config(),
                      provenance: dict[str, str] | None = None) -> AssessmentReport:
    """Run perception, interactions, affinity, clashes and strain on parsed
    structures. Deterministic given (structures, config)."""
    warnings: list[str] = []

    with _stage("pocket"):
        pocket = extract_pocket(protein, ligand, config.pocket_cutoff)

    with _stage("perception"):
        pocket = assign_template_charges(pocket)
        if any(a.partial_charge is None for a in ligand.atoms):
            ligand = assign_gasteiger_charges(ligand)
        protein_tags = tag_pharmacophores(pocket, his_cation=config.his_cation)
        ligand_tags = tag_pharmacophores(ligand, his_cation=config.his_cation)
        protein_rings = perceive_rings(pocket)
        ligand_rings = perceive_rings(ligand)
        chain_parts = split_chain_parts(pocket)

    with _stage("interactions"):
        interactions = detect_all(
            pocket, ligand, protein_tags, ligand_tags, protein_rings, ligand_rings,
            config.hbond_max_dist, config.hbond_min_angle,
        )
        fp = fingerprint(interactions, protein)

    with _stage("affinity"):
        weights = aa_score.load_weights(config.weights_path)
        if weights.is_default:
            warnings.append("unfitted_weights")
        components = aa_score.compute_components(
            pocket, ligand, protein_tags, ligand_tags, protein_rings, ligand_rings,
            chain_parts, config.interface_cutoff,
            config.hbond_max_dist, config.hbond_min_angle,
        )
        affinity = aa_score.binding_affinity(components, weights)

    with _stage("clashes"):
        clash_report = count_clashes(protein, ligand, config.clash_tolerance)

    with _stage("strain"):
        strain = strain_energy(ligand, config.relax_max_iter, config.relax_tol)
        if not strain.converged:
            warnings.append("relaxation_not_converged")
        strain_value = strain.strain
        if strain_value < 0.0:
            warnings.append("negative_strain_clamped")
            strain_value = 0.0

    triple = PcbTriple(
        binding_affinity=affinity,
        strain_energy=strain_value,
        clash_count=clash_report.count,
    )
    verdict = classify_favorability(triple, config.thresholds())

    interaction_dicts = tuple(
        {
            "kind": it.kind,
            "residue": it.residue_label,
            "protein_atom": it.protein_atom,
            "ligand_atom": it.ligand_atom,
            "distance": round(it.distance, 6),
            "angle": round(it.angle, 6) if it.angle is not None else None,
            "detail": it.detail,
        }
        for it in interactions
    )

    prov = dict(provenance or {})
    prov["config_sha256"] = config.digest()

    return AssessmentReport(
        pcb=triple,
        verdict=verdict,
        interactions=interaction_dicts,
        fingerprint_hex=fp.to_hex(),
        fingerprint_layout=fp.layout,
        components=components.as_dict(),
        binding_affinity_raw=affinity,
        strain_raw=strain.strain,
        strain_converged=strain.converged,
        warnings=tuple(warnings),
        provenance=prov,
    )


def assess_pair(protein_path: str | os.PathLike, ligand_path: str | os.PathLike,
                config: Config = Config()) -> AssessmentReport:
    """Parse the pair files and assess them; errors carry the stage name."""
    with _stage("parse_protein"):
        protein = parse_pdb(Path(protein_path).read_bytes())
    with _stage("parse_ligand"):
        ligand = load_ligand_file(ligand_path)
    provenance = {
        "protein": str(protein_path),
        "ligand": str(ligand_path),
    }
    return assess_structures(protein, ligand, config, provenance)


# --- dataset audit ---

@dataclass(frozen=True)
class AuditSummary:
    n_total: int
    n_scored: int
    n_filtered: int
    features: dict[str, dict]
    favorability_rate: float
    failures: tuple[dict, ...]
    triples: tuple[tuple[str, float, float, int, bool], ...]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "n_total": self.n_total,
            "n_scored": self.n_scored,
            "n_filtered": self.n_filtered,
            "features": self.features,
            "favorability_rate": self.favorability_rate,
            "failures": list(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        lines = ["pair_id,affinity,strain,clashes,favorable"]
        for pair_id, aff, strain, clashes, fav in self.triples:
            lines.append(f"{pair_id},{aff!r},{strain!r},{clashes},{str(fav).lower()}")
        return "\n".join(lines) + "\n"


def discover_pairs(root_dir: str | os.PathLike) -> list[tuple[str, Path, Path]]:
    root = Path(root_dir)
    pairs = []
    if root.is_dir():
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            protein = sub / "protein.pdb"
            ligand = None
            for candidate in ("ligand.sdf", "ligand.mol2"):
                if (sub / candidate).exists():
                    ligand = sub / candidate
                    break
            if protein.exists() and ligand is not None:
                pairs.append((sub.name, protein, ligand))
    if not pairs:
        raise EmptyDataset(f"no pair subfolders under {root_dir}")
    return pairs


def _audit_one(args: tuple[str, str, str, Config]) -> tuple[str, dict]:
    pair_id, protein_path, ligand_path, config = args
    try:
        report = assess_pair(protein_path, ligand_path, config)
    except StageFailure as exc:
        return pair_id, {"error": str(exc.cause), "stage": exc.stage}
    except CompassError as exc:
        return pair_id, {"error": str(exc), "stage": "unknown"}
    return pair_id, {
        "affinity": report.pcb.binding_affinity,
        "strain": report.pcb.strain_energy,
        "clashes": int(report.pcb.clash_count),
        "favorable": report.verdict == "favorable",
    }


def _feature_stats(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    if not len(arr):
        return {"mean": None, "std": None, "histogram": []}
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(arr, bins=50, range=(lo, hi))
    histogram = [
        [float(edges[i]), float(edges[i + 1]), int(counts[i])]
        for i in range(len(counts))
    ]
    return {"mean": mean, "std": std, "histogram": histogram}


def audit_dataset(root_dir: str | os.PathLike, config: Config = Config(),
                  progress=None) -> AuditSummary:
    """Assess every pair under `root_dir` with per-pair failure isolation.

    Pairs whose three features are all below the outlier limit (default 20)
    enter the distribution statistics; failures are logged, never fatal.
    """
    pairs = discover_pairs(root_dir)
    tasks = [(pid, str(pp), str(lp), config) for pid, pp, lp in pairs]

    results: dict[str, dict] = {}
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for pair_id, outcome in pool.map(_audit_one, tasks):
                results[pair_id] = outcome
                if progress:
                    progress(pair_id)
    else:
        for task in tasks:
            pair_id, outcome = _audit_one(task)
            results[pair_id] = outcome
            if progress:
                progress(pair_id)

    failures = []
    triples = []
    for pair_id in sorted(results):
        outcome = results[pair_id]
        if "error" in outcome:
            failures.append({"pair": pair_id, **outcome})
        else:
            triples.append(
                (pair_id, outcome["affinity"], outcome["strain"],
                 outcome["clashes"], outcome["favorable"])
            )

    limit = config.filter_limit
    kept = [
        t for t in triples
        if t[1] < limit and t[2] < limit and t[3] < limit
    ]
    features = {
        "binding_affinity": _feature_stats([t[1] for t in kept]),
        "strain_energy": _feature_stats([t[2] for t in kept]),
        "clash_count": _feature_stats([float(t[3]) for t in kept]),
    }
    n_scored = len(triples)
    favorable = sum(1 for t in triples if t[4])
    return AuditSummary(
        n_total=len(pairs),
        n_scored=n_scored,
        n_filtered=len(kept),
        features=features,
        favorability_rate=(favorable / n_scored) if n_scored else 0.0,
        failures=tuple(failures),
        triples=tuple(triples),
    )


# --- recursive redocking ---

class DockingBackend(Protocol):
    def dock(self, protein: MolecularStructure, ligand: MolecularStructure,
             seed: int) -> MolecularStructure:
        """Return a newly posed ligand with identical atom count/order."""
        ...


class MockBackend:
    """Scripted backend for tests: replays a list of coordinate arrays."""

    def __init__(self, poses: list[np.ndarray]):
        self.poses = [np.asarray(p, dtype=float) for p in poses]
        self.calls = 0

    def dock(self, protein, ligand, seed):
        if self.calls >= len(self.poses):
            raise BackendFailure("mock backend exhausted its scripted poses")
        coords = self.poses[self.calls]
        self.calls += 1
        return ligand.with_coords(coords)


class CommandBackend:
    """External docking executable speaking JSON over stdin/stdout.

    Request: {"protein_pdb": str, "ligand_sdf": str, "seed": int}
    Response: {"ligand_sdf_posed": str}
    """

    def __init__(self, command: str, timeout: float = 300.0):
        self.command = command
        self.timeout = timeout

    def dock(self, protein, ligand, seed):
        request = json.dumps(
            {
                "protein_pdb": structure_to_pdb_text(protein),
                "ligand_sdf": structure_to_sdf_text(ligand),
                "seed": seed,
            }
        )
        try:
            proc = subprocess.run(
                [self.command],
                input=request.encode(),
                capture_output=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise BackendFailure(f"backend invocation failed: {exc}") from exc
        if proc.returncode != 0:
            raise BackendFailure(
                f"backend exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:500]}"
            )
        try:
            response = json.loads(proc.stdout.decode())
            posed = parse_sdf(response["ligand_sdf_posed"])
        except (ValueError, KeyError, CompassError) as exc:
            raise BackendFailure(f"bad backend response: {exc}") from exc
        if len(posed.atoms) != len(ligand.atoms) or any(
            a.element != b.element for a, b in zip(posed.atoms, ligand.atoms)
        ):
            raise BackendFailure("backend changed the ligand topology")
        return ligand.with_coords(posed.coords)


@dataclass(frozen=True)
class RedockResult:
    pose: MolecularStructure
    verdict: str  # favorable | hard_fail | exhausted
    trace: tuple[dict, ...]


def _hard_fail(triple: PcbTriple, config: Config) -> bool:
    return (
        triple.binding_affinity > config.hard_max_affinity
        or triple.strain_energy > config.hard_max_strain
        or triple.clash_count > config.hard_max_clashes
    )


def recursive_redock(protein: MolecularStructure, ligand: MolecularStructure,
                     backend: DockingBackend, config: Config = Config(),
                     n_max: int | None = None, assess=None) -> RedockResult:
    """Assess-and-refine loop over the docking backend.

    Per iteration exactly one branch fires: return the pose when favorable,
    stop with 'hard_fail' when a feature exceeds its hard limit, stop with
    'exhausted' when the iteration budget is spent, otherwise request the
    next pose (seed = base_seed + iteration) and continue. `assess`
    substitutes the pose assessor (tests script it; default is the full
    pipeline).
    """
    assess = assess or assess_structures
    budget = n_max if n_max is not None else config.n_max
    if budget < 1:
        raise ValueError("n_max must be >= 1")
    trace: list[dict] = []
    pose = ligand
    for iteration in range(budget):
        report = assess(protein, pose, config)
        triple = report.pcb
        entry = {
            "iteration": iteration,
            "pcb": {
                "binding_affinity": triple.binding_affinity,
                "strain_energy": triple.strain_energy,
                "clash_count": int(triple.clash_count),
            },
        }
        if report.verdict == "favorable":
            entry["decision"] = "favorable"
            trace.append(entry)
            return RedockResult(pose=pose, verdict="favorable", trace=tuple(trace))
        if _hard_fail(triple, config):
            entry["decision"] = "hard_fail"
            trace.append(entry)
            return RedockResult(pose=pose, verdict="hard_fail", trace=tuple(trace))
        if iteration == budget - 1:
            entry["decision"] = "exhausted"
            trace.append(entry)
            return RedockResult(pose=pose, verdict="exhausted", trace=tuple(trace))
        entry["decision"] = "refine"
        trace.append(entry)
        try:
            pose = backend.dock(protein, pose, config.base_seed + iteration)
        except BackendFailure as exc:
            raise BackendFailure(str(exc), iteration=iteration) from exc
    raise AssertionError("unreachable")
