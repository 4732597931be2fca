"""``phasekit`` batch command line.

Exit status: 0 on success with every asserted invariant passing, 1 when an
invariant fails, 2 for configuration errors, 3 for I/O errors.  On failure a
JSON list of problems is printed to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .persistence import ConfigError, ConfigValidationError, OutputError, ResultWriter, load_config, resolve_output_dir
from .pipeline import run_command
from .schrodinger import EigenSolverError

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def bundled_config(name: str = "ho") -> Path:
    return Path(str(resources.files("phasekit") / "data" / f"{name}.toml"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, doc in [
        ("state", "sample the configured state in x and p"),
        ("phase-space", "phase-space density, marginals and ensemble averages"),
        ("moments", "moment table along the internal, separable and phase-space routes"),
        ("eigensolve", "lowest eigenpairs of the finite-difference Hamiltonian"),
        ("kernel", "Wigner-Moyal kernel by both routes"),
        ("constants", "vacuum-string relation scans"),
        ("verify", "run the whole invariant catalogue"),
    ]:
        p = sub.add_parser(name, help=doc, description=doc)
        p.add_argument("-c", "--config", type=Path, default=None,
                       help="TOML config (default: the bundled harmonic-oscillator config)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key by dotted path, e.g. grid.n=1024")
        p.add_argument("-o", "--output-dir", default=None, help="output directory (beats $PHASEKIT_OUTPUT_DIR)")
        if name == "moments":
            p.add_argument("--n", type=int, default=None, help="power of x")
            p.add_argument("--m", type=int, default=None, help="power of p")
            p.add_argument("--path", choices=["internal", "separable", "phase_space"], action="append",
                           default=None, help="restrict to these routes")
        elif name == "eigensolve":
            p.add_argument("-k", type=int, default=None, help="number of eigenpairs")
        elif name == "kernel":
            p.add_argument("--delta", type=float, action="append", default=None, help="displacement (repeatable)")
        elif name == "phase-space":
            p.add_argument("--plot", action="store_true", help="also write gnuplot heatmap data")
    return parser


def _flag_overrides(args) -> list[str]:
    extra = []
    if args.command == "moments":
        if (args.n is None) != (args.m is None):
            raise ConfigValidationError("--n and --m must be given together", "outputs.moments")
        if args.n is not None:
            extra.append(f"outputs.moments=[[{args.n}, {args.m}]]")
        if args.path:
            extra.append("outputs.moment_paths=" + json.dumps(args.path))
    elif args.command == "eigensolve" and args.k is not None:
        extra.append(f"outputs.spectrum={args.k}")
    elif args.command == "kernel" and args.delta:
        extra.append("outputs.kernel=" + json.dumps(args.delta))
    elif args.command == "phase-space" and args.plot:
        extra.append("outputs.plot=true")
    return extra


def _fail(kind: str, message: str, code: int, problems=None) -> int:
    payload = problems if problems is not None else [{"kind": kind, "message": message}]
    print(json.dumps(payload, indent=2), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = args.config or bundled_config()
        config = load_config(path, list(args.overrides) + _flag_overrides(args))
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)

    out_dir = resolve_output_dir(config, args.output_dir)
    try:
        writer = ResultWriter(out_dir, args.command)
        run_command(args.command, config, writer)
        manifest = writer.finish()
    except OutputError as exc:
        return _fail("io", str(exc), EXIT_IO)
    except OSError as exc:
        return _fail("io", f"{exc}", EXIT_IO)
    except EigenSolverError as exc:
        return _fail("computation", str(exc), EXIT_INVARIANT)
    except ValueError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)

    failures = manifest.failures()
    for c in manifest.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: {c.value:.3e} (tol {c.tolerance:.1e})")
    print(f"wrote {len(manifest.outputs)} file(s) to {out_dir}")
    if failures:
        problems = [{"kind": "invariant", "check": c.name, "value": c.value, "tolerance": c.tolerance,
                     "detail": c.detail} for c in failures]
        return _fail("invariant", "", EXIT_INVARIANT, problems)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
