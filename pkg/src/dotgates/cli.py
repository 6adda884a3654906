"""Command-line driver: solve | spectra | gate | sweep.

Exit codes: 0 success, 2 configuration error, 3 physics-stage error,
4 commensurability failure (the run itself completes).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import default_config_yaml, load_config
from .errors import CommensurabilityError, ConfigError, DotGatesError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_COMMENSURABILITY = 4

log = logging.getLogger("dotgates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dotgates",
        description="Exciton/biexciton spectra of a quantum dot and "
                    "optically driven conditional gates.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase log verbosity (-v, -vv)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("-c", "--config", required=True, help="YAML config path")
        p.add_argument("--out-dir", default=None,
                       help="override output.directory")
        p.add_argument("--cache-dir", default=None,
                       help="override output.cache_directory")
        p.add_argument("--no-figures", action="store_true",
                       help="skip matplotlib rendering")

    add_common(sub.add_parser("solve", help="single-particle basis, Coulomb "
                                            "tensors and many-body spectrum"))
    add_common(sub.add_parser("spectra", help="conditioned absorption spectra "
                                              "(needs solve artifacts)"))
    add_common(sub.add_parser("gate", help="pulse scenarios and gate reports "
                                           "(needs solve artifacts)"))
    add_common(sub.add_parser("sweep", help="pulse-duration selectivity sweep "
                                            "(needs solve artifacts)"))
    init = sub.add_parser("init", help="print a default config file")
    init.add_argument("-o", "--output", default=None, help="write to file")
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == "init":
        text = default_config_yaml()
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    try:
        cfg = load_config(args.config)
        if args.out_dir:
            cfg.output_directory = args.out_dir
        if args.cache_dir:
            cfg.cache_directory = args.cache_dir
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG

    from . import pipeline

    render = not args.no_figures
    try:
        if args.command == "solve":
            artifacts = pipeline.run_solve(cfg)
            print(f"delta = {artifacts.spectrum.delta:.4f} meV")
        elif args.command == "spectra":
            result = pipeline.run_spectra(cfg, render=render)
            for row in result["conditional_rows"]:
                print(f"{row.transition} at {row.frequency_rel:+8.3f} meV "
                      f"active iff q{row.qubit}={row.active_value} "
                      f"(contrast {row.contrast:.2e})")
        elif args.command == "gate":
            results = pipeline.run_gate(cfg, render=render)
            failed = results.pop("commensurability_failed")
            for name, res in results.items():
                if "report" in res:
                    rep = res["report"]
                    print(f"{name}: fidelity={rep.fidelity:.6f} "
                          f"leakage={rep.max_leakage:.2e} "
                          f"readout={rep.readout_time:.3f} ps "
                          f"ok={rep.commensurability_ok}")
                elif "error" in res:
                    print(f"{name}: commensurability failure: {res['error']}")
                else:
                    print(f"{name}: trajectories written")
            if failed:
                return EXIT_COMMENSURABILITY
        elif args.command == "sweep":
            rows = pipeline.run_sweep(cfg, render=render)
            for r in rows:
                print(f"tau={r['tau_ps']:.3g} ps: leakage={r['max_leakage']:.3e} "
                      f"off-resonant change={r['offres_final_change']:.3e}")
    except CommensurabilityError as exc:
        log.error("commensurability failure: %s", exc)
        return EXIT_COMMENSURABILITY
    except DotGatesError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
