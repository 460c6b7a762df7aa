"""Seeded parameter sweeps comparing the G-IDNC and LG-IDNC graphs.

Every iteration of a sweep point draws its per-user erasure probabilities
and runs its episode from one random stream keyed by
``(root_seed, point_index, iteration)``.  Both graph modes replay the same
key, so they see identical channel draws and the comparison is paired.

Delays are reported per user: episode total divided by ``M``.
"""

from __future__ import annotations

import csv
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import draw_user_probabilities, episode_rng
from .engine import EpisodeConfig, run_episode
from .graph import GraphMode

P_RANGE = (0.0, 0.8)
DEFAULT_HALFWIDTH = 0.1
DEFAULT_ITERATIONS = 300
Q_RULES = {"half": 0.5, "equal": 1.0, "double": 2.0, "threeHalves": 1.5}
CSV_HEADER = ["mode", "M", "N", "P", "Q", "iterations", "mean_delay_per_user", "stderr", "truncated"]
NORMALIZATION = "mean decoding delay per user = episode total delay / M; truncated episodes excluded"


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class SweepSpec:
    axis: str
    values: list
    M: int | None = None
    N: int | None = None
    P: float | None = None
    qrule: str | float = "equal"
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    modes: tuple[GraphMode, ...] = (GraphMode.GIDNC, GraphMode.LGIDNC)
    halfwidth: float = DEFAULT_HALFWIDTH
    round_cap: int | None = None
    feedback_on_decode: bool = False
    trace: bool = False

    def q_for(self, P: float) -> float:
        if isinstance(self.qrule, str):
            return Q_RULES[self.qrule] * P
        return float(self.qrule)

    def points(self) -> list[tuple[int, int, float, float]]:
        out = []
        for v in self.values:
            M = int(v) if self.axis == "M" else self.M
            N = int(v) if self.axis == "N" else self.N
            P = float(v) if self.axis == "P" else self.P
            out.append((M, N, P, self.q_for(P)))
        return out

    def problems(self) -> list[str]:
        errs = []
        if self.iterations < 1:
            errs.append("iterations must be a positive integer")
        for M, N, P, Q in self.points():
            for name, x in (("P", P), ("Q", Q)):
                if not P_RANGE[0] < x < P_RANGE[1]:
                    errs.append(f"{name}={x:g} outside (0, 0.8)")
                elif x - self.halfwidth < 0 or x + self.halfwidth >= 1:
                    errs.append(f"{name}={x:g} with halfwidth {self.halfwidth:g} leaves [0, 1)")
            if M is not None and M < 1:
                errs.append(f"M={M} must be positive")
            if N is not None and N < 1:
                errs.append(f"N={N} must be positive")
        return errs


@dataclass
class SweepRow:
    mode: GraphMode
    M: int
    N: int
    P: float
    Q: float
    iterations: int
    mean_delay_per_user: float
    stderr: float
    truncated: int


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    # (mode, point index) -> per-iteration per-user delay, NaN where truncated
    samples: dict[tuple[GraphMode, int], np.ndarray] = field(default_factory=dict)

    def paired_difference(self, point: int) -> np.ndarray:
        """G-IDNC minus LG-IDNC delay per iteration, truncated pairs dropped."""
        d = self.samples[(GraphMode.GIDNC, point)] - self.samples[(GraphMode.LGIDNC, point)]
        return d[~np.isnan(d)]

    def relative_gain(self, point: int) -> float:
        g = self.samples[(GraphMode.GIDNC, point)]
        lg = self.samples[(GraphMode.LGIDNC, point)]
        ok = ~(np.isnan(g) | np.isnan(lg))
        return float(1.0 - lg[ok].mean() / g[ok].mean())


_RANGE = re.compile(r"^(\S+)\s*\.\.\s*(\S+)\s+step\s+(\S+)$")


def _parse_values(raw: str, axis: str) -> list:
    conv = int if axis in ("M", "N") else float
    m = _RANGE.match(raw)
    if m:
        start, stop, step = (conv(x) for x in m.groups())
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [conv(round(start + k * step, 10)) for k in range(n)]
    return [conv(x) for x in raw.split(",") if x.strip()]


def parse_config(text: str) -> SweepSpec:
    """Parse a ``key = value`` sweep description; ``#`` starts a comment.

    All problems are collected and raised together as a :class:`ConfigError`.
    """
    raw: dict[str, tuple[int, str]] = {}
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key = value")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (lineno, value)

    kw: dict = {}

    def take(key, conv, required=False):
        if key not in raw:
            if required:
                errors.append(f"missing required field {key!r}")
            return
        lineno, value = raw.pop(key)
        try:
            kw[key] = conv(value)
        except (ValueError, KeyError) as exc:
            errors.append(f"line {lineno}: bad {key} {value!r} ({exc})")

    def axis(v):
        if v not in ("M", "N", "P"):
            raise ValueError("axis must be M, N or P")
        return v

    def qrule(v):
        if v in Q_RULES:
            return v
        try:
            return float(v)
        except ValueError:
            raise ValueError(f"unknown Q rule; use one of {sorted(Q_RULES)} or a number") from None

    def modes(v):
        return tuple(GraphMode(m.strip().upper()) for m in v.split(","))

    def feedback(v):
        if v not in ("reception", "decode"):
            raise ValueError("feedback must be 'reception' or 'decode'")
        return v == "decode"

    take("axis", axis, required=True)
    take("qrule", qrule, required=True)
    take("iterations", int, required=True)
    take("M", int)
    take("N", int)
    take("P", float)
    take("seed", int)
    take("modes", modes)
    take("halfwidth", float)
    take("round_cap", int)
    take("feedback", feedback)
    if "feedback" in kw:
        kw["feedback_on_decode"] = kw.pop("feedback")
    if "values" in raw and "axis" in kw:
        lineno, value = raw.pop("values")
        try:
            kw["values"] = _parse_values(value, kw["axis"])
        except ValueError as exc:
            errors.append(f"line {lineno}: bad values {value!r} ({exc})")
    elif "values" not in raw:
        errors.append("missing required field 'values'")
    else:
        raw.pop("values")
    for key, (lineno, _) in raw.items():
        errors.append(f"line {lineno}: unknown key {key!r}")

    if "axis" in kw:
        for fixed in ("M", "N", "P"):
            if fixed != kw["axis"] and fixed not in kw:
                errors.append(f"missing required field {fixed!r} (not the sweep axis)")
    if errors:
        raise ConfigError(errors)
    spec = SweepSpec(**kw)
    if not spec.values:
        errors.append("values is empty")
    errors += spec.problems()
    if errors:
        raise ConfigError(errors)
    return spec


def _run_point(task) -> tuple[np.ndarray, int]:
    spec, index, point, mode = task
    M, N, P, Q = point
    delays = np.full(spec.iterations, np.nan)
    truncated = 0
    for it in range(spec.iterations):
        rng = episode_rng(spec.seed, index, it)
        params = draw_user_probabilities(P, Q, spec.halfwidth, M, rng)
        cfg = EpisodeConfig(
            M, N, params, mode, round_cap=spec.round_cap,
            feedback_on_decode=spec.feedback_on_decode, trace=spec.trace,
        )
        res = run_episode(cfg, rng)
        if res.truncated:
            truncated += 1
        else:
            delays[it] = res.ledger.total / M
    return delays, truncated


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    modes = [m for m in GraphMode if m in spec.modes]
    points = spec.points()
    tasks = [(spec, idx, pt, mode) for mode in modes for idx, pt in enumerate(points)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_point, tasks))
    else:
        outputs = [_run_point(t) for t in tasks]

    result = SweepResult()
    for (_, idx, (M, N, P, Q), mode), (delays, truncated) in zip(tasks, outputs):
        kept = delays[~np.isnan(delays)]
        mean = float(kept.mean()) if kept.size else float("nan")
        se = float(kept.std(ddof=1) / math.sqrt(kept.size)) if kept.size > 1 else 0.0
        result.samples[(mode, idx)] = delays
        result.rows.append(SweepRow(mode, M, N, P, Q, spec.iterations, mean, se, truncated))
    return result


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(result: SweepResult, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in result.rows:
                w.writerow([
                    r.mode.value, r.M, r.N, _fmt(r.P), _fmt(r.Q), r.iterations,
                    _fmt(r.mean_delay_per_user), _fmt(r.stderr), r.truncated,
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
