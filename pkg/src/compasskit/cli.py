"""Command-line interface.

Subcommands: assess (single pair report), audit (dataset statistics),
score (LAN-MSE / Compass Score arithmetic), redock (backend refinement
loop). Exit codes: 0 success, 1 usage error, 2 parse/score failure,
3 backend failure. COMPASS_WEIGHTS serves as the weights-path fallback;
flags override the environment, which overrides the built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .compass import (
    PcbTriple,
    classify_favorability,
    compass_components,
    lan_mse,
)
from .errors import BackendFailure, CompassError, InvalidConfig, LengthMismatch
from .io_pdb import parse_pdb, write_complex_pdb
from .pipeline import (
    CommandBackend,
    Config,
    assess_pair,
    audit_dataset,
    load_ligand_file,
    recursive_redock,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_BACKEND = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _weights_path(flag_value: str | None) -> str | None:
    return flag_value or os.environ.get("COMPASS_WEIGHTS") or None


def _config_from_args(args) -> Config:
    kwargs = {}
    if getattr(args, "weights", None) or os.environ.get("COMPASS_WEIGHTS"):
        kwargs["weights_path"] = _weights_path(getattr(args, "weights", None))
    for flag, key in (
        ("pocket_cutoff", "pocket_cutoff"),
        ("jobs", "jobs"),
        ("seed", "base_seed"),
        ("max_iter", "n_max"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[key] = value
    if getattr(args, "his_cation", False):
        kwargs["his_cation"] = True
    config_path = getattr(args, "config", None)
    if config_path:
        return Config.from_file(config_path, **kwargs)
    return Config(**kwargs).validate()


def _parse_values(raw: str) -> list[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise SystemExit(EXIT_USAGE) from None


def build_parser() -> _Parser:
    parser = _Parser(prog="compasskit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"compasskit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_assess = sub.add_parser("assess", help="assess one protein-ligand pair")
    p_assess.add_argument("--protein", required=True)
    p_assess.add_argument("--ligand", required=True)
    p_assess.add_argument("--weights")
    p_assess.add_argument("--config", help="JSON file of config-field overrides")
    p_assess.add_argument("--pocket-cutoff", dest="pocket_cutoff", type=float)
    p_assess.add_argument("--his-cation", dest="his_cation", action="store_true")
    p_assess.add_argument("--format", choices=("json", "text"), default="json")

    p_audit = sub.add_parser("audit", help="audit a dataset directory")
    p_audit.add_argument("--dir", required=True)
    p_audit.add_argument("--jobs", type=int)
    p_audit.add_argument("--out", help="summary JSON path (default stdout)")
    p_audit.add_argument("--csv", help="raw-triples CSV path")
    p_audit.add_argument("--weights")
    p_audit.add_argument("--config", help="JSON file of config-field overrides")

    p_score = sub.add_parser("score", help="LAN-MSE / Compass Score values")
    p_score.add_argument("--pred", required=True, help="comma-separated values")
    p_score.add_argument("--truth", required=True, help="comma-separated values")
    p_score.add_argument(
        "--feature",
        choices=("affinity", "strain", "clash", "total", "auto"),
        default="auto",
    )
    p_score.add_argument("--config", help="JSON file of config-field overrides")
    p_score.add_argument("--format", choices=("json", "text"), default="text")

    p_redock = sub.add_parser("redock", help="recursive redocking loop")
    p_redock.add_argument("--protein", required=True)
    p_redock.add_argument("--ligand", required=True)
    p_redock.add_argument("--backend", required=True, help="cmd:/path/to/executable")
    p_redock.add_argument("--max-iter", dest="max_iter", type=int)
    p_redock.add_argument("--seed", type=int)
    p_redock.add_argument("--weights")
    p_redock.add_argument("--config", help="JSON file of config-field overrides")
    p_redock.add_argument("--out", default="redock_complex.pdb")
    p_redock.add_argument("--trace", help="trace JSON path (default stdout)")

    return parser


def cmd_assess(args) -> int:
    config = _config_from_args(args)
    report = assess_pair(args.protein, args.ligand, config)
    if args.format == "json":
        print(report.to_json())
    else:
        print(f"binding_affinity: {report.pcb.binding_affinity:.4f} kcal/mol")
        print(f"strain_energy:    {report.pcb.strain_energy:.4f} kcal/mol")
        print(f"clash_count:      {int(report.pcb.clash_count)}")
        print(f"verdict:          {report.verdict}")
        print(f"interactions:     {len(report.interactions)}")
        for warning in report.warnings:
            print(f"warning:          {warning}")
    return EXIT_OK


def cmd_audit(args) -> int:
    config = _config_from_args(args)
    summary = audit_dataset(
        args.dir, config, progress=lambda pid: print(pid, file=sys.stderr)
    )
    text = summary.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(summary.to_csv())
    return EXIT_OK


def cmd_score(args) -> int:
    config = _config_from_args(args)
    pred = _parse_values(args.pred)
    truth = _parse_values(args.truth)
    feature = args.feature
    if feature == "auto":
        feature = "total" if len(pred) == 3 and len(truth) == 3 else "affinity"
    params = config.lan_mse_params()
    thresholds = config.thresholds()
    try:
        if feature == "total":
            if len(pred) != 3 or len(truth) != 3:
                print("error: --feature total needs exactly 3 values per side",
                      file=sys.stderr)
                return EXIT_USAGE
            pred_t = PcbTriple(*pred)
            truth_t = PcbTriple(*truth)
            parts = compass_components(pred_t, truth_t, params)
            payload = {
                "components": {
                    "affinity": parts["affinity"],
                    "strain": parts["strain"],
                    "clash": parts["clash"],
                },
                "total": parts["total"],
                "pred_favorable": classify_favorability(pred_t, thresholds) == "favorable",
                "truth_favorable": classify_favorability(truth_t, thresholds) == "favorable",
            }
            if args.format == "json":
                print(json.dumps(payload, sort_keys=True, indent=2))
            else:
                for key, value in parts.items():
                    print(f"{key}: {value!r}")
        else:
            value = lan_mse(pred, truth, params)
            if args.format == "json":
                print(json.dumps({"feature": feature, "lan_mse": value},
                                 sort_keys=True, indent=2))
            else:
                print(f"lan_mse[{feature}]: {value!r}")
    except LengthMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_redock(args) -> int:
    config = _config_from_args(args)
    backend_spec = args.backend
    if backend_spec.startswith("cmd:"):
        backend = CommandBackend(backend_spec[len("cmd:"):])
    else:
        print(f"error: unknown backend {backend_spec!r} (use cmd:PATH)",
              file=sys.stderr)
        return EXIT_USAGE
    from pathlib import Path

    protein = parse_pdb(Path(args.protein).read_bytes())
    ligand = load_ligand_file(args.ligand)
    result = recursive_redock(protein, ligand, backend, config)
    write_complex_pdb(protein, result.pose, args.out)
    trace_json = json.dumps(
        {"verdict": result.verdict, "trace": list(result.trace)},
        sort_keys=True, indent=2,
    )
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace_json + "\n")
    else:
        print(trace_json)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "assess": cmd_assess,
        "audit": cmd_audit,
        "score": cmd_score,
        "redock": cmd_redock,
    }
    try:
        return handlers[args.command](args)
    except BackendFailure as exc:
        print(f"error: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CompassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
