"""Flat ``section.key=value`` experiment configuration.

Lines are ``key=value``; blank lines and ``#`` comments are ignored.
Later sources win: defaults, then the config file, then command-line flags.

``data.means`` lists component means per class: classes separated by ``|``,
components by ``;``, coordinates by ``,``. ``data.weights`` uses the same
``|`` / ``,`` nesting for mixture weights.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .distill import DistillConfig, InitStrategy
from .errors import ValidationError
from .kernels import KernelSpec
from .longtail import LongTailSpec
from .spectral import AlphaMode, AlphaPolicy


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    return int(text.strip())


def _float(text: str) -> float:
    return float(text.strip())


def _str(text: str) -> str:
    return text.strip()


def _sizes(text: str) -> tuple[int, ...]:
    vals = tuple(int(v) for v in text.split(",") if v.strip())
    if not vals:
        raise ValueError("empty size list")
    return vals


def _means(text: str):
    classes = []
    for chunk in text.split("|"):
        comps = [[float(v) for v in comp.split(",")] for comp in chunk.split(";") if comp.strip()]
        classes.append(comps)
    return classes


def _weights(text: str):
    return [[float(v) for v in chunk.split(",")] for chunk in text.split("|")]


# key -> (parser, default); None default means "derived elsewhere"
KEYS = {
    "kernel.kind": (_str, "rbf"),
    "kernel.gamma": (_float, 2.0),
    "kernel.degree": (_int, 2),
    "kernel.offset": (_float, 1.0),
    "kernel.slope": (_float, 1.0),
    "kernel.omega": (_float, 1.0),
    "data.classes": (_int, 5),
    "data.base": (_int, 200),
    "data.beta": (_float, 100.0),
    "data.dim": (_int, 2),
    "data.scale": (_float, 0.5),
    "data.means": (_means, None),
    "data.weights": (_weights, None),
    "distill.ipc": (_int, 10),
    "distill.iterations": (_int, 2000),
    "distill.lr": (_float, 2.0),
    "distill.bank_size": (_int, 1024),
    "distill.alpha_head": (_float, 0.8),
    "distill.alpha_tail": (_float, 0.2),
    "distill.alpha_mode": (_str, "two_point"),
    "distill.clamp_lo": (_float, 0.05),
    "distill.clamp_hi": (_float, 0.95),
    "distill.freeze_bank": (_bool, False),
    "distill.init": (_str, "class_mean_jitter"),
    "distill.jitter": (_float, 0.1),
    "distill.verify_bank_size": (_int, 50000),
    "distill.verify_every": (_int, 100),
    "verify.bank_size": (_int, 50000),
    "verify.pairs": (_int, 20),
    "verify.samples": (_int, 200),
    "verify.cf_pairs": (_int, 1000),
    "verify.sandwich_pairs": (_int, 100),
    "verify.cumulant_samples": (_int, 10000),
    "verify.grad_instances": (_int, 50),
    "bench.dim": (_int, 16),
    "bench.bank_size": (_int, 1024),
    "bench.sizes": (_sizes, (512, 1024, 2048, 4096)),
    "bench.repeats": (_int, 3),
    "run.seed": (_int, 0),
    "run.out": (_str, "out"),
}

# short flags accepted in addition to dotted keys
FLAG_ALIASES = {
    "seed": "run.seed",
    "out": "run.out",
    "beta": "data.beta",
    "classes": "data.classes",
    "base": "data.base",
    "ipc": "distill.ipc",
    "iterations": "distill.iterations",
    "lr": "distill.lr",
    "gamma": "kernel.gamma",
    "alpha-head": "distill.alpha_head",
    "alpha-tail": "distill.alpha_tail",
}


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: KernelSpec = field(default_factory=KernelSpec)
    data: LongTailSpec = field(default_factory=LongTailSpec)
    distill: DistillConfig = field(default_factory=DistillConfig)
    out: Path = Path("out")
    seed: int = 0
    verify: dict = field(default_factory=dict)
    bench: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse config text into typed values keyed by dotted name."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValidationError(f"{source}:{lineno}: expected key=value, got {line!r}")
        out[key] = _convert(key, value, f"{source}:{lineno}")
    return out


def _convert(key: str, value: str, where: str):
    if key not in KEYS:
        raise ValidationError(f"{where}: unknown key {key!r}")
    parser = KEYS[key][0]
    try:
        return parser(value)
    except ValueError as exc:
        raise ValidationError(f"{where}: bad value {value.strip()!r} for {key} ({exc})") from None


def parse_overrides(pairs) -> dict:
    """Typed values from ``(key, value)`` flag pairs; short aliases allowed."""
    out = {}
    for name, value in pairs:
        key = FLAG_ALIASES.get(name, name)
        out[key] = _convert(key, value, f"flag --{name}")
    return out


def build_config(values: dict) -> ExperimentConfig:
    v = {k: d for k, (_, d) in KEYS.items()}
    v.update(values)
    kernel = KernelSpec.from_config({
        k: str(v[k]) for k in KEYS if k.startswith("kernel.")
    })
    data = LongTailSpec(
        num_classes=v["data.classes"],
        base_count=v["data.base"],
        beta=v["data.beta"],
        dim=v["data.dim"],
        scale=v["data.scale"],
        means=v["data.means"],
        weights=v["data.weights"],
    )
    if not data.scale > 0:
        raise ValidationError(f"data.scale must be positive, got {data.scale}")
    try:
        mode = AlphaMode(v["distill.alpha_mode"].lower().replace("-", "_"))
        init = InitStrategy(v["distill.init"].lower().replace("-", "_"))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    policy = AlphaPolicy(v["distill.alpha_head"], v["distill.alpha_tail"], mode,
                         (v["distill.clamp_lo"], v["distill.clamp_hi"]))
    if v["distill.iterations"] < 1:
        raise ValidationError("distill.iterations must be >= 1")
    distill = DistillConfig(
        ipc=v["distill.ipc"],
        iterations=v["distill.iterations"],
        learning_rate=v["distill.lr"],
        kernel=kernel,
        bank_size=v["distill.bank_size"],
        policy=policy,
        master_seed=v["run.seed"],
        freeze_bank=v["distill.freeze_bank"],
        init=init,
        jitter=v["distill.jitter"],
        verify_bank_size=v["distill.verify_bank_size"],
        verify_every=v["distill.verify_every"],
    )
    for k in ("verify.bank_size", "verify.pairs", "verify.samples", "verify.cf_pairs",
              "verify.sandwich_pairs", "verify.cumulant_samples", "verify.grad_instances",
              "bench.dim", "bench.bank_size", "bench.repeats"):
        if v[k] < 1:
            raise ValidationError(f"{k} must be >= 1")
    if any(n < 2 for n in v["bench.sizes"]):
        raise ValidationError("bench.sizes entries must be >= 2")
    verify = {k.split(".", 1)[1]: v[k] for k in KEYS if k.startswith("verify.")}
    bench = {k.split(".", 1)[1]: v[k] for k in KEYS if k.startswith("bench.")}
    return ExperimentConfig(kernel, data, distill, Path(v["run.out"]), v["run.seed"], verify, bench, v)


def parse_config(path=None, overrides=None) -> ExperimentConfig:
    """Defaults, then the file at ``path`` (if any), then flag ``overrides``.

    ``overrides`` is a dict or an iterable of ``(name, value)`` string pairs.
    """
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read config {p}: {exc.strerror}") from None
        values.update(parse_text(text, str(p)))
    if overrides:
        pairs = overrides.items() if isinstance(overrides, dict) else overrides
        values.update(parse_overrides(pairs))
    return build_config(values)


def ensure_out_dir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create output directory {p}: {exc.strerror}") from None
    if not os.access(p, os.W_OK | os.X_OK):
        raise ValidationError(f"output directory {p} is not writable")
    return p
