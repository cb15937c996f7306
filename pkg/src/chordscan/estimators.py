"""Streaming accumulation of line observations and the derived estimators.

The accumulator keeps constant-size running sums (plus a fixed-bin chord
histogram and per-batch partials for batch-means error bars), so memory never
grows with the number of explored lines. Estimates are ratios of sums, which
makes them insensitive to lines that miss the shape entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .batch import BatchObservations
from .chords import LineObservation

# Area estimator coefficient in A_hat = C * sum(L3) / sum(L1). Fixed by the
# closed-form unit-disk chord moments <l> = pi/2 and <l^3> = 3*pi/2, which
# give C * 3 = pi, and equivalently by the convex reduction of the mean-chord
# (pi*A/P) and third-moment (3*A^2/P) identities.
AREA_COEFF = math.pi / 3.0

DEFAULT_BATCHES = 100
DEFAULT_BINS = 64
KL_EPSILON = 1e-9


class InsufficientDataError(ValueError):
    """Not enough observed lines/chords to form the requested estimate."""


class Accumulator:
    """Constant-memory running sums over observed lines; mergeable."""

    __slots__ = (
        "l_cap",
        "n_batches",
        "n_bins",
        "n_lines",
        "n_hit",
        "rejected",
        "sum_L1",
        "sum_L3",
        "chord_count",
        "chord_sum",
        "chord_cube_sum",
        "l_max_seen",
        "hist",
        "batch",
    )

    def __init__(self, l_cap: float, n_batches: int = DEFAULT_BATCHES, n_bins: int = DEFAULT_BINS):
        if l_cap <= 0.0:
            raise ValueError("l_cap (histogram upper edge) must be positive")
        if n_batches < 1 or n_bins < 1:
            raise ValueError("batch and bin counts must be positive")
        self.l_cap = float(l_cap)
        self.n_batches = int(n_batches)
        self.n_bins = int(n_bins)
        self.n_lines = 0
        self.n_hit = 0
        self.rejected = 0
        self.sum_L1 = 0.0
        self.sum_L3 = 0.0
        self.chord_count = 0
        self.chord_sum = 0.0
        self.chord_cube_sum = 0.0
        self.l_max_seen = 0.0
        self.hist = np.zeros(self.n_bins, dtype=np.int64)
        # per-batch partial sums: L1, L3, chord count, chord sum, chord cube sum
        self.batch = np.zeros((self.n_batches, 5))

    def same_layout(self, other: "Accumulator") -> bool:
        return (
            self.l_cap == other.l_cap
            and self.n_batches == other.n_batches
            and self.n_bins == other.n_bins
        )

    def _bin_of(self, lengths: np.ndarray) -> np.ndarray:
        b = np.floor(lengths / self.l_cap * self.n_bins).astype(np.int64)
        return np.clip(b, 0, self.n_bins - 1)

    def add(self, obs: LineObservation) -> None:
        """Accumulate one scalar observation (a zero observation just counts)."""
        bid = self.n_lines % self.n_batches
        self.n_lines += 1
        if obs.k == 0:
            return
        self.n_hit += 1
        self.sum_L1 += obs.L1
        self.sum_L3 += obs.L3
        self.chord_count += obs.k
        csum = float(sum(obs.chords))
        ccube = float(sum(c**3 for c in obs.chords))
        self.chord_sum += csum
        self.chord_cube_sum += ccube
        self.l_max_seen = max(self.l_max_seen, max(obs.chords))
        np.add.at(self.hist, self._bin_of(np.asarray(obs.chords)), 1)
        self.batch[bid] += (obs.L1, obs.L3, obs.k, csum, ccube)

    def note_rejections(self, n: int) -> None:
        self.rejected += int(n)

    def ingest(self, bobs: BatchObservations) -> None:
        """Accumulate a batch of accepted per-line statistics, in line order."""
        keep = ~bobs.rejected
        self.note_rejections(int(bobs.rejected.sum()))
        n = int(keep.sum())
        if n == 0:
            return
        bids = (self.n_lines + np.arange(n)) % self.n_batches
        k = bobs.k[keep]
        L1 = bobs.L1[keep]
        L3 = bobs.L3[keep]
        cube = bobs.chord_cube_sum[keep]
        self.n_lines += n
        self.n_hit += int(np.count_nonzero(k))
        self.sum_L1 += float(L1.sum())
        self.sum_L3 += float(L3.sum())
        self.chord_count += int(k.sum())
        self.chord_sum += float(L1.sum())
        self.chord_cube_sum += float(cube.sum())
        np.add.at(self.batch[:, 0], bids, L1)
        np.add.at(self.batch[:, 1], bids, L3)
        np.add.at(self.batch[:, 2], bids, k)
        np.add.at(self.batch[:, 4], bids, cube)
        if bobs.chords_flat.size:
            # chords arrive indexed by original line; remap to accepted order
            accepted_pos = np.cumsum(keep) - 1
            owner = accepted_pos[bobs.chords_line]
            owner_ok = keep[bobs.chords_line]
            vals = bobs.chords_flat[owner_ok]
            owner = owner[owner_ok]
            np.add.at(self.batch[:, 3], bids[owner], vals)
            np.add.at(self.hist, self._bin_of(vals), 1)
            if vals.size:
                self.l_max_seen = max(self.l_max_seen, float(vals.max()))

    def state_scalar_count(self) -> int:
        """Number of stored numeric values; constant in the line count."""
        return 10 + self.hist.size + self.batch.size


def accumulate(acc: Accumulator, obs: LineObservation) -> Accumulator:
    acc.add(obs)
    return acc


def merge(a: Accumulator, b: Accumulator) -> Accumulator:
    """Field-wise sum of two compatible accumulators (commutative, associative)."""
    if not a.same_layout(b):
        raise ValueError("accumulator layouts differ (l_cap / batches / bins)")
    out = Accumulator(a.l_cap, a.n_batches, a.n_bins)
    out.n_lines = a.n_lines + b.n_lines
    out.n_hit = a.n_hit + b.n_hit
    out.rejected = a.rejected + b.rejected
    out.sum_L1 = a.sum_L1 + b.sum_L1
    out.sum_L3 = a.sum_L3 + b.sum_L3
    out.chord_count = a.chord_count + b.chord_count
    out.chord_sum = a.chord_sum + b.chord_sum
    out.chord_cube_sum = a.chord_cube_sum + b.chord_cube_sum
    out.l_max_seen = max(a.l_max_seen, b.l_max_seen)
    out.hist = a.hist + b.hist
    out.batch = a.batch + b.batch
    return out


def estimate_area(acc: Accumulator) -> float:
    if acc.sum_L1 <= 0.0:
        raise InsufficientDataError("no in-shape intercept accumulated yet")
    return AREA_COEFF * acc.sum_L3 / acc.sum_L1


def estimate_mean_chord(acc: Accumulator) -> float:
    if acc.chord_count <= 0:
        raise InsufficientDataError("no chords accumulated yet")
    return acc.chord_sum / acc.chord_count


def estimate_perimeter(acc: Accumulator) -> float:
    """Mean-chord identity <l> = pi*A/P, rearranged with the estimated area."""
    return math.pi * estimate_area(acc) / estimate_mean_chord(acc)


def convex_third_moment_area(acc: Accumulator) -> float:
    """Area from raw third chord moments; consistent only for convex shapes."""
    if acc.chord_count <= 0:
        raise InsufficientDataError("no chords accumulated yet")
    return AREA_COEFF * acc.chord_cube_sum / acc.chord_sum


def _batch_values(acc: Accumulator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-batch (area, perimeter, convex-baseline area) for non-empty batches."""
    L1 = acc.batch[:, 0]
    L3 = acc.batch[:, 1]
    cnt = acc.batch[:, 2]
    csum = acc.batch[:, 3]
    cube = acc.batch[:, 4]
    ok = (L1 > 0.0) & (cnt > 0.0) & (csum > 0.0)
    if int(ok.sum()) < 2:
        raise InsufficientDataError("need at least 2 non-empty batches for errors")
    a = AREA_COEFF * L3[ok] / L1[ok]
    p = math.pi * a / (csum[ok] / cnt[ok])
    ach = AREA_COEFF * cube[ok] / csum[ok]
    return a, p, ach


def stderrs(acc: Accumulator) -> tuple[float, float]:
    """Batch-means standard errors of (area, perimeter).

    Batches are the accumulator's round-robin groups; the spread of per-batch
    estimates over sqrt(B) estimates the error of the pooled estimate.
    """
    a, p, _ = _batch_values(acc)
    nb = len(a)
    return (
        float(np.std(a, ddof=1) / math.sqrt(nb)),
        float(np.std(p, ddof=1) / math.sqrt(nb)),
    )


def convex_baseline_stderr(acc: Accumulator) -> float:
    """Batch-means standard error of the convex-only area baseline."""
    _, _, ach = _batch_values(acc)
    return float(np.std(ach, ddof=1) / math.sqrt(len(ach)))


@dataclass(frozen=True)
class EstimateReport:
    """A point in the perimeter-area representation space, with error bars."""

    area_hat: float
    perim_hat: float
    mean_chord: float
    stderr_a: float
    stderr_p: float
    n_lines: int
    n_hit: int
    rejected: int

    def to_dict(self) -> dict:
        return {
            "N": self.n_lines,
            "area_hat": self.area_hat,
            "perim_hat": self.perim_hat,
            "mean_chord": self.mean_chord,
            "stderr_a": self.stderr_a,
            "stderr_p": self.stderr_p,
            "n_hit": self.n_hit,
            "rejected_lines": self.rejected,
        }


def report(acc: Accumulator) -> EstimateReport:
    se_a, se_p = stderrs(acc)
    return EstimateReport(
        area_hat=estimate_area(acc),
        perim_hat=estimate_perimeter(acc),
        mean_chord=estimate_mean_chord(acc),
        stderr_a=se_a,
        stderr_p=se_p,
        n_lines=acc.n_lines,
        n_hit=acc.n_hit,
        rejected=acc.rejected,
    )


def normalized_histogram(acc: Accumulator) -> np.ndarray:
    """Chord-length distribution over l / l_max, as a probability vector.

    Accumulation bins are fixed at [0, l_cap] for streaming; this rebins the
    counts onto [0, 1] using the largest chord actually seen.
    """
    if acc.chord_count <= 0:
        raise InsufficientDataError("no chords accumulated yet")
    centers = (np.arange(acc.n_bins) + 0.5) * (acc.l_cap / acc.n_bins)
    target = np.floor(centers / acc.l_max_seen * acc.n_bins).astype(np.int64)
    target = np.clip(target, 0, acc.n_bins - 1)
    out = np.zeros(acc.n_bins)
    np.add.at(out, target, acc.hist.astype(float))
    return out / out.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray, eps: float = KL_EPSILON) -> float:
    """Relative entropy sum(p * ln(p/q)) with q smoothed by eps per bin."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"histogram binning mismatch: {p.shape} vs {q.shape}")
    q = q + eps
    q = q / q.sum()
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


@dataclass
class ConvergenceSeries:
    """Replicate spread of the estimators at increasing line counts."""

    n_values: np.ndarray
    sigma_a: np.ndarray
    sigma_p: np.ndarray
    sigma0_a: float = float("nan")
    exponent_a: float = float("nan")
    sigma0_p: float = float("nan")
    exponent_p: float = float("nan")

    def fit(self) -> "ConvergenceSeries":
        self.sigma0_a, self.exponent_a = fit_power(self.n_values, self.sigma_a)
        self.sigma0_p, self.exponent_p = fit_power(self.n_values, self.sigma_p)
        return self


def fit_power(n_values, sigmas) -> tuple[float, float]:
    """Least-squares fit sigma = prefactor * N**exponent in log-log space."""
    n_values = np.asarray(n_values, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if len(n_values) < 2:
        raise ValueError("need at least two samples to fit")
    if np.any(sigmas <= 0.0) or np.any(n_values <= 0.0):
        raise ValueError("power-law fit needs positive N and sigma")
    slope, intercept = np.polyfit(np.log(n_values), np.log(sigmas), 1)
    return float(np.exp(intercept)), float(slope)
