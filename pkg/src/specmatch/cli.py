"""Command-line entry point: ``specmatch {distill,verify,bench,gen-data}``.

Exit codes: 0 success, 1 validation error, 2 runtime or numerical error,
3 property-suite failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as bench_mod
from . import reports
from . import verify as verify_mod
from .config import ExperimentConfig, ensure_out_dir, parse_config
from .distill import run_distillation
from .errors import SpecMatchError, ValidationError
from .features import FeatureSet
from .longtail import generate_mixture_dataset, normalize_features
from .spectral import empirical_cf

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_PROPERTY = 0, 1, 2, 3

# which dotted key --bank-size sets for each subcommand
_BANK_KEY = {
    "distill": "distill.bank_size",
    "verify": "verify.bank_size",
    "bench": "bench.bank_size",
    "gen-data": "distill.bank_size",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="specmatch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in [
        ("distill", "generate, normalize, distill and evaluate a long-tailed toy problem"),
        ("verify", "run the numerical property suite"),
        ("bench", "time SDD against Gram MMD over growing N"),
        ("gen-data", "write the generated long-tailed dataset"),
    ]:
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--seed", help="master seed (u64)")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--bank-size", help="frequency bank size L")
        sp.add_argument("--freeze-bank", action="store_true", help="reuse one training bank")
        if name == "distill":
            sp.add_argument("--diagnostics", action="store_true",
                            help="also write per-class and per-frequency diagnostics")
    return p


def _split_extra(extra):
    """``--key value`` / ``--key=value`` pairs for dotted keys and short aliases."""
    pairs = []
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ValidationError(f"unexpected argument {tok!r}")
        name = tok[2:]
        if "=" in name:
            name, value = name.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ValidationError(f"flag {tok} needs a value")
            i += 1
            value = extra[i]
        pairs.append((name, value))
        i += 1
    return pairs


def load_config(args, extra) -> ExperimentConfig:
    pairs = _split_extra(extra)
    if args.seed is not None:
        pairs.append(("seed", args.seed))
    if args.out is not None:
        pairs.append(("out", args.out))
    if args.bank_size is not None:
        pairs.append((_BANK_KEY[args.command], args.bank_size))
    if args.freeze_bank:
        pairs.append(("distill.freeze_bank", "true"))
    return parse_config(args.config, pairs)


def cmd_distill(cfg: ExperimentConfig, diagnostics: bool = False, echo=print) -> int:
    out = ensure_out_dir(cfg.out)
    raw = generate_mixture_dataset(cfg.data, cfg.seed)
    real, _, _ = normalize_features(raw, raw)
    result = run_distillation(real, cfg.distill)
    reports.write_trace(out / "trace.csv", result)
    reports.write_final_report(out / "final_report.csv", real.class_counts, result, cfg.distill.ipc)
    result.synthetic.save(out / "synthetic.csv")
    if diagnostics:
        from .distill import verification_bank

        vbank = verification_bank(cfg.distill, real.dim)
        reports.write_per_class(out / "per_class.csv", real.class_counts, result.alphas,
                                result.per_class_final)
        phi_T = empirical_cf(real.features, vbank)
        phi_S = empirical_cf(result.synthetic.features, vbank)
        reports.write_per_frequency(out / "per_frequency.csv", phi_T, phi_S)
    first, last = result.objective_trace[0], result.objective_trace[-1]
    echo(f"objective {first:.6g} -> {last:.6g} over {cfg.distill.iterations} iterations; wrote {out}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, echo=print) -> int:
    results = verify_mod.run_suite(cfg.seed, **cfg.verify)
    echo(verify_mod.format_table(results))
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            print(f"FAILED {r.name}: measured {r.measured:.6g}, tolerated {r.tolerance:.6g}",
                  file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_bench(cfg: ExperimentConfig, echo=print) -> int:
    out = ensure_out_dir(cfg.out)
    rows = bench_mod.run_bench(seed=cfg.seed, gamma=cfg.kernel.gamma, **cfg.bench)
    reports.write_bench(out / "bench.csv", rows)
    for m in ("sdd", "mmd_gram"):
        echo(f"{m}: seconds(N={max(cfg.bench['sizes'])}) / seconds(N={min(cfg.bench['sizes'])}) "
             f"= {bench_mod.total_ratio(rows, m):.3g}")
    return EXIT_OK


def cmd_gen_data(cfg: ExperimentConfig, echo=print) -> int:
    out = ensure_out_dir(cfg.out)
    data: FeatureSet = generate_mixture_dataset(cfg.data, cfg.seed)
    data.save(out / "real.csv")
    data.save(out / "real.sdmx")
    echo(f"class counts {np.asarray(data.class_counts).tolist()}; wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, extra = build_parser().parse_known_args(argv)
        cfg = load_config(args, extra)
        if args.command == "distill":
            return cmd_distill(cfg, args.diagnostics)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        return cmd_gen_data(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SpecMatchError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
