"""CSV writers for traces, reports, diagnostics and benchmarks.

Comma separated, ``\\n`` line endings, floats with 17 significant digits.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .features import fmt_float
from .spectral import EmpiricalCF, amp_phase_decompose, sq_diff_terms


def _cell(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return fmt_float(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_trace(path, result) -> Path:
    C = len(result.per_class_final)
    header = ["iteration", "objective"] + [f"per_class_{c}" for c in range(C)]
    rows = (
        [it, obj, *pc]
        for it, obj, pc in zip(result.trace_iterations, result.objective_trace, result.trace_per_class)
    )
    return write_csv(path, header, rows)


def write_final_report(path, real_counts, result, ipc: int) -> Path:
    header = ["class", "count_real", "ipc", "alpha", "d_c", "diversity", "realism"]
    rows = (
        [c, int(real_counts[c]), ipc, result.alphas[c], result.per_class_final[c],
         result.diversity[c], result.realism[c]]
        for c in range(len(real_counts))
    )
    return write_csv(path, header, rows)


def write_per_frequency(path, phi_T: EmpiricalCF, phi_S: EmpiricalCF) -> Path:
    amp, cross = amp_phase_decompose(phi_T, phi_S)
    sq = sq_diff_terms(phi_T, phi_S)
    rows = ([i, a, x, s] for i, (a, x, s) in enumerate(zip(amp, cross, sq)))
    return write_csv(path, ["freq_index", "amp_term", "cross_term", "sq_diff"], rows)


def write_per_class(path, counts, alphas, d_c) -> Path:
    rows = ([c, int(counts[c]), alphas[c], d_c[c]] for c in range(len(counts)))
    return write_csv(path, ["class", "count", "alpha", "d_c"], rows)


def write_bench(path, rows) -> Path:
    """``rows`` are ``(method, N, seconds, ratio_vs_prev)``; ratio ``None`` for the first size."""
    out = ([m, n, s, "" if r is None else r] for m, n, s, r in rows)
    return write_csv(path, ["method", "N", "seconds", "ratio_vs_prev"], out)
