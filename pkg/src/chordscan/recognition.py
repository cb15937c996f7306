"""Dictionary-based shape recognition in the perimeter-area plane.

Each dictionary entry is a reference (P, A) point with a replicate-calibrated
noise model: standard deviations scaling as sigma0/sqrt(N) plus a correlation.
Classification is a bivariate-Gaussian likelihood with a uniform prior; the
exploration stops once the top posterior clears a threshold.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import estimators
from .estimators import EstimateReport
from .explore import LineStream, explore
from .geometry import Shape, exact_area, exact_perimeter
from .sampling import ArenaCircle, SamplerConfig

DEFAULT_THRESHOLD = 0.95
# The sigma0/sqrt(N) noise model is a central-limit approximation; confidence
# claims below this many lines would trust Gaussian tails that do not exist
# yet, so stopping decisions only begin here (unless threshold == 0, which
# claims no confidence at all).
DEFAULT_WARMUP = 30
_CORR_CLAMP = 0.999


@dataclass(frozen=True)
class DictEntry:
    name: str
    p_ref: float
    a_ref: float
    sigma0_a: float
    sigma0_p: float
    corr: float = 0.0

    def __post_init__(self):
        if self.p_ref <= 0 or self.a_ref <= 0:
            raise ValueError("reference perimeter/area must be positive")
        if self.sigma0_a <= 0 or self.sigma0_p <= 0:
            raise ValueError("noise prefactors must be positive")
        if not -1.0 < self.corr < 1.0:
            raise ValueError("correlation must be in (-1, 1)")


@dataclass(frozen=True)
class Posterior:
    probs: dict[str, float]
    top: str
    top_prob: float


@dataclass(frozen=True)
class Ellipse:
    center_p: float
    center_a: float
    semi_major: float
    semi_minor: float
    angle: float  # radians of the major axis from the +P direction
    level: float
    mahal_sq: float

    def contains(self, p: float, a: float, entry: DictEntry, n: int) -> bool:
        sp = entry.sigma0_p / math.sqrt(n)
        sa = entry.sigma0_a / math.sqrt(n)
        rho = entry.corr
        dp = (p - entry.p_ref) / sp
        da = (a - entry.a_ref) / sa
        z = (dp * dp - 2.0 * rho * dp * da + da * da) / (1.0 - rho * rho)
        return z <= self.mahal_sq


def calibrate(
    shape: Shape,
    m_lines: int,
    replicates: int,
    config: SamplerConfig | None = None,
    *,
    name: str | None = None,
    arena: ArenaCircle | None = None,
) -> DictEntry:
    """Reference values from the exact oracles, noise from replicate spread.

    Replicate r explores m_lines with substream (seed, r); the spread of the
    (area, perimeter) cloud scaled by sqrt(m_lines) gives the prefactors.
    """
    config = config or SamplerConfig()
    if replicates < 2:
        raise ValueError("calibration needs at least 2 replicates")
    if m_lines < 1:
        raise ValueError("calibration needs at least 1 line per replicate")
    a_vals = np.empty(replicates)
    p_vals = np.empty(replicates)
    for rep in range(replicates):
        rng = np.random.default_rng([config.seed, rep])
        acc = explore(shape, m_lines, config, arena=arena, rng=rng)
        a_vals[rep] = estimators.estimate_area(acc)
        p_vals[rep] = estimators.estimate_perimeter(acc)
    corr = float(np.corrcoef(p_vals, a_vals)[0, 1])
    if not math.isfinite(corr):
        corr = 0.0
    corr = max(-_CORR_CLAMP, min(_CORR_CLAMP, corr))
    root_m = math.sqrt(m_lines)
    return DictEntry(
        name=name or shape.name or "shape",
        p_ref=exact_perimeter(shape),
        a_ref=exact_area(shape),
        sigma0_a=float(np.std(a_vals, ddof=1)) * root_m,
        sigma0_p=float(np.std(p_vals, ddof=1)) * root_m,
        corr=corr,
    )


def _log_likelihoods(
    p_hat: np.ndarray,
    a_hat: np.ndarray,
    n: np.ndarray,
    entries: list[DictEntry],
    shared_sigma: tuple[float, float] | None = None,
) -> np.ndarray:
    """Log-density of each observation (rows) under each entry (columns)."""
    p_hat = np.atleast_1d(np.asarray(p_hat, dtype=float))[:, None]
    a_hat = np.atleast_1d(np.asarray(a_hat, dtype=float))[:, None]
    n = np.atleast_1d(np.asarray(n, dtype=float))[:, None]
    pr = np.array([e.p_ref for e in entries])[None, :]
    ar = np.array([e.a_ref for e in entries])[None, :]
    if shared_sigma is None:
        sp = np.array([e.sigma0_p for e in entries])[None, :] / np.sqrt(n)
        sa = np.array([e.sigma0_a for e in entries])[None, :] / np.sqrt(n)
        rho = np.array([e.corr for e in entries])[None, :]
    else:
        sp = np.full((1, len(entries)), shared_sigma[0])
        sa = np.full((1, len(entries)), shared_sigma[1])
        rho = np.zeros((1, len(entries)))
    dp = (p_hat - pr) / sp
    da = (a_hat - ar) / sa
    omr = 1.0 - rho * rho
    z = (dp * dp - 2.0 * rho * dp * da + da * da) / omr
    return -np.log(2.0 * math.pi * sp * sa * np.sqrt(omr)) - 0.5 * z


def _posterior_from_loglik(loglik: np.ndarray, entries: list[DictEntry]) -> Posterior:
    shifted = loglik - loglik.max()
    w = np.exp(shifted)
    probs = w / w.sum()
    top = int(np.argmax(probs))
    return Posterior(
        probs={e.name: float(pv) for e, pv in zip(entries, probs)},
        top=entries[top].name,
        top_prob=float(probs[top]),
    )


def classify(
    report: EstimateReport, entries: list[DictEntry], noise: str = "auto"
) -> Posterior:
    """Posterior over dictionary entries for one estimate report.

    noise="auto" uses the report's own batch stderrs when they are finite and
    positive, otherwise each entry's calibrated sigma0/sqrt(N); "report" and
    "dictionary" force one side.
    """
    if not entries:
        raise ValueError("dictionary is empty")
    own = (
        math.isfinite(report.stderr_p)
        and math.isfinite(report.stderr_a)
        and report.stderr_p > 0.0
        and report.stderr_a > 0.0
    )
    if noise == "report" or (noise == "auto" and own):
        if not own:
            raise ValueError("report carries no usable stderrs")
        shared = (report.stderr_p, report.stderr_a)
    elif noise in ("dictionary", "auto"):
        shared = None
    else:
        raise ValueError(f"unknown noise mode {noise!r}")
    loglik = _log_likelihoods(
        report.perim_hat, report.area_hat, report.n_lines, entries, shared_sigma=shared
    )[0]
    return _posterior_from_loglik(loglik, entries)


def should_stop(post: Posterior, threshold: float = DEFAULT_THRESHOLD) -> bool:
    return post.top_prob >= threshold


def confidence_ellipse(entry: DictEntry, n: int, level: float) -> Ellipse:
    """Level-set ellipse of the entry's Gaussian at n lines (2-dof chi-square)."""
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must be in (0, 1)")
    if n <= 0:
        raise ValueError("n must be positive")
    r2 = float(stats.chi2.ppf(level, df=2))
    sp = entry.sigma0_p / math.sqrt(n)
    sa = entry.sigma0_a / math.sqrt(n)
    cov = np.array(
        [
            [sp * sp, entry.corr * sp * sa],
            [entry.corr * sp * sa, sa * sa],
        ]
    )
    vals, vecs = np.linalg.eigh(cov)  # ascending
    major = math.sqrt(vals[1] * r2)
    minor = math.sqrt(max(vals[0], 0.0) * r2)
    angle = math.atan2(vecs[1, 1], vecs[0, 1])
    return Ellipse(entry.p_ref, entry.a_ref, major, minor, angle, level, r2)


@dataclass
class LandscapeGrid:
    """Winning entry (or None) above threshold at each (P, A) grid cell."""

    p_axis: np.ndarray
    a_axis: np.ndarray
    labels: list[list[str | None]]  # [i_p][i_a]
    n_lines: int
    threshold: float


def landscape(
    entries: list[DictEntry],
    n_lines: int,
    p_axis: np.ndarray | None = None,
    a_axis: np.ndarray | None = None,
    resolution: int = 60,
    threshold: float = DEFAULT_THRESHOLD,
) -> LandscapeGrid:
    """Classify a synthetic estimate at every grid point with N-scaled noise."""
    if not entries:
        raise ValueError("dictionary is empty")
    if p_axis is None or a_axis is None:
        pr = np.array([e.p_ref for e in entries])
        ar = np.array([e.a_ref for e in entries])
        pad_p = 0.25 * (pr.max() - pr.min() + 1.0)
        pad_a = 0.25 * (ar.max() - ar.min() + 1.0)
        if p_axis is None:
            p_axis = np.linspace(max(pr.min() - pad_p, 1e-9), pr.max() + pad_p, resolution)
        if a_axis is None:
            a_axis = np.linspace(max(ar.min() - pad_a, 1e-9), ar.max() + pad_a, resolution)
    pg, ag = np.meshgrid(p_axis, a_axis, indexing="ij")
    loglik = _log_likelihoods(
        pg.ravel(), ag.ravel(), np.full(pg.size, n_lines), entries
    )
    shifted = loglik - loglik.max(axis=1, keepdims=True)
    w = np.exp(shifted)
    probs = w / w.sum(axis=1, keepdims=True)
    top = np.argmax(probs, axis=1)
    top_prob = probs[np.arange(probs.shape[0]), top]
    names = [e.name for e in entries]
    flat = [
        names[t] if q >= threshold else None for t, q in zip(top, top_prob)
    ]
    labels = [
        list(flat[i * len(a_axis) : (i + 1) * len(a_axis)]) for i in range(len(p_axis))
    ]
    return LandscapeGrid(np.asarray(p_axis), np.asarray(a_axis), labels, n_lines, threshold)


@dataclass(frozen=True)
class StopResult:
    label: str | None
    n_stop: int
    censored: bool
    area_hat: float
    perim_hat: float
    top_prob: float


def explore_until_stop(
    shape: Shape,
    entries: list[DictEntry],
    config: SamplerConfig | None = None,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    n_max: int = 100_000,
    warm_up: int = DEFAULT_WARMUP,
    confirm: int = 1,
    arena: ArenaCircle | None = None,
    chunk: int = 256,
) -> StopResult:
    """Explore line by line until the posterior top clears the threshold.

    Classification uses the dictionary's calibrated noise at each prefix N,
    checked after every line (evaluated in vectorized chunks). Confidence
    stopping starts at warm_up lines; threshold == 0 instead stops at the
    first prefix with a defined estimate. With confirm > 1 the same top label
    must clear the threshold on that many consecutive lines, which counters
    the multiple-comparison inflation of checking after every line.
    """
    if not entries:
        raise ValueError("dictionary is empty")
    stream = LineStream(shape, config, arena=arena)
    cum_l1 = cum_l3 = 0.0
    cum_k = 0
    done = 0
    min_n = 1 if threshold <= 0.0 else max(1, warm_up)
    confirm = 1 if threshold <= 0.0 else max(1, confirm)
    streak_label: int = -1
    streak = 0
    last: tuple[str, float, float, float] | None = None
    while done < n_max:
        take_n = min(chunk, n_max - done)
        tk = stream.take(take_n)
        l1 = cum_l1 + np.cumsum(tk.L1)
        l3 = cum_l3 + np.cumsum(tk.L3)
        kk = cum_k + np.cumsum(tk.k)
        n_prefix = done + np.arange(1, take_n + 1)
        ok = (l1 > 0.0) & (kk > 0) & (n_prefix >= min_n)
        if ok.any():
            a_hat = np.where(ok, estimators.AREA_COEFF * l3 / np.where(l1 > 0, l1, 1.0), np.nan)
            p_hat = np.where(ok, math.pi * a_hat / (l1 / np.maximum(kk, 1)), np.nan)
            idx = np.nonzero(ok)[0]
            loglik = _log_likelihoods(p_hat[idx], a_hat[idx], n_prefix[idx], entries)
            shifted = loglik - loglik.max(axis=1, keepdims=True)
            w = np.exp(shifted)
            probs = w / w.sum(axis=1, keepdims=True)
            top = np.argmax(probs, axis=1)
            top_prob = probs[np.arange(len(idx)), top]
            over = top_prob >= threshold
            for pos in range(len(idx)):
                if not over[pos]:
                    streak = 0
                    continue
                t = int(top[pos])
                streak = streak + 1 if t == streak_label else 1
                streak_label = t
                if streak >= confirm:
                    j = idx[pos]
                    return StopResult(
                        label=entries[t].name,
                        n_stop=int(n_prefix[j]),
                        censored=False,
                        area_hat=float(a_hat[j]),
                        perim_hat=float(p_hat[j]),
                        top_prob=float(top_prob[pos]),
                    )
            jl = idx[-1]
            last = (
                entries[int(top[-1])].name,
                float(a_hat[jl]),
                float(p_hat[jl]),
                float(top_prob[-1]),
            )
        cum_l1 = float(l1[-1])
        cum_l3 = float(l3[-1])
        cum_k = int(kk[-1])
        done += take_n
    if last is None:
        return StopResult(None, n_max, True, float("nan"), float("nan"), 0.0)
    return StopResult(last[0], n_max, True, last[1], last[2], last[3])


@dataclass
class StoppingStudy:
    stop_n: np.ndarray
    censored: np.ndarray
    labels: list[str | None]
    wrong_fraction: float

    def median_stop(self) -> float:
        return float(np.median(self.stop_n))


def lines_to_recognize(
    shape: Shape,
    entries: list[DictEntry],
    seeds,
    config: SamplerConfig | None = None,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    n_max: int = 100_000,
    warm_up: int = DEFAULT_WARMUP,
    arena: ArenaCircle | None = None,
) -> StoppingStudy:
    """Stopping-N distribution over seeds, plus the wrong-label fraction."""
    truth = shape.name
    if truth is not None and truth not in {e.name for e in entries}:
        raise ValueError(f"shape {truth!r} is not in the dictionary")
    config = config or SamplerConfig()
    stop_n, censored, labels = [], [], []
    wrong = 0
    for seed in seeds:
        res = explore_until_stop(
            shape,
            entries,
            dataclasses.replace(config, seed=int(seed)),
            threshold=threshold,
            n_max=n_max,
            warm_up=warm_up,
            arena=arena,
        )
        stop_n.append(res.n_stop)
        censored.append(res.censored)
        labels.append(res.label)
        if truth is not None and res.label != truth:
            wrong += 1
    return StoppingStudy(
        stop_n=np.array(stop_n),
        censored=np.array(censored, dtype=bool),
        labels=labels,
        wrong_fraction=wrong / max(len(labels), 1),
    )


def save_dictionary(entries: list[DictEntry], path) -> None:
    doc = [
        {
            "name": e.name,
            "p_ref": e.p_ref,
            "a_ref": e.a_ref,
            "sigma0_a": e.sigma0_a,
            "sigma0_p": e.sigma0_p,
            "corr": e.corr,
        }
        for e in entries
    ]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_dictionary(path) -> list[DictEntry]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError("dictionary file must hold an array of entries")
    return [
        DictEntry(
            name=str(e["name"]),
            p_ref=float(e["p_ref"]),
            a_ref=float(e["a_ref"]),
            sigma0_a=float(e["sigma0_a"]),
            sigma0_p=float(e["sigma0_p"]),
            corr=float(e.get("corr", 0.0)),
        )
        for e in doc
    ]
