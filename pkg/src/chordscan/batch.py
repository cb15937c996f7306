"""Vectorized many-lines-at-once observation kernel.

Mirrors chords.observe over arrays of segments. One difference at measure-zero
inputs: a line passing within tolerance of any vertex is rejected outright here
(the scalar path resolves genuine vertex crossings); random lines hit this with
probability ~0 and rejections are counted either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chords import ONLINE_TOL
from .geometry import Point, Shape, contains

_PAD = 1e-9  # prefilter slack so tolerance-band vertices are never missed


class CompiledShape:
    """Shape flattened to per-ring arrays plus per-ring bounding circles."""

    __slots__ = ("shape", "rings", "centers", "radii", "tol")

    def __init__(self, shape: Shape):
        self.shape = shape
        self.rings = [np.ascontiguousarray(r.coords) for r in shape.rings]
        centers = []
        radii = []
        for c in self.rings:
            mid = 0.5 * (c.min(axis=0) + c.max(axis=0))
            centers.append(mid)
            radii.append(float(np.max(np.hypot(c[:, 0] - mid[0], c[:, 1] - mid[1]))))
        self.centers = np.array(centers)
        self.radii = np.array(radii)
        self.tol = ONLINE_TOL * shape.coordinate_scale()


@dataclass
class BatchObservations:
    """Per-line observation arrays; rejected lines carry zeroed statistics."""

    k: np.ndarray  # chords per line
    L1: np.ndarray  # == per-line chord sum
    L3: np.ndarray
    chord_cube_sum: np.ndarray
    chords_flat: np.ndarray  # all chord lengths, concatenated
    chords_line: np.ndarray  # owning line index per flat chord
    rejected: np.ndarray  # bool mask

    def __len__(self) -> int:
        return len(self.k)


def observe_segments(cshape: CompiledShape, a: np.ndarray, b: np.ndarray) -> BatchObservations:
    """Observe M segments given as (M, 2) endpoint arrays, endpoints outside."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = a.shape[0]
    d = b - a
    length = np.hypot(d[:, 0], d[:, 1])
    active = length > 0.0
    safe_len = np.where(active, length, 1.0)
    ux, uy = d[:, 0] / safe_len, d[:, 1] / safe_len
    nx, ny = -uy, ux
    tol = cshape.tol

    ev_line: list[np.ndarray] = []
    ev_t: list[np.ndarray] = []
    rejected = np.zeros(m, dtype=bool)

    for coords, center, rad in zip(cshape.rings, cshape.centers, cshape.radii):
        dcx = center[0] - a[:, 0]
        dcy = center[1] - a[:, 1]
        dist = np.abs(dcx * nx + dcy * ny)
        xi_c = dcx * ux + dcy * uy
        reach = rad + _PAD
        keep = active & (dist <= reach) & (xi_c >= -reach) & (xi_c <= length + reach)
        idx = np.nonzero(keep)[0]
        if idx.size == 0:
            continue
        vx, vy = coords[:, 0], coords[:, 1]
        sax = a[idx, 0]
        say = a[idx, 1]
        s = (vx[None, :] - sax[:, None]) * nx[idx, None] + (
            vy[None, :] - say[:, None]
        ) * ny[idx, None]
        on_line = np.abs(s) <= tol
        bad = on_line.any(axis=1)
        if bad.any():
            rejected[idx[bad]] = True
        s_next = np.concatenate([s[:, 1:], s[:, :1]], axis=1)
        cross = (s > 0.0) != (s_next > 0.0)
        rows, cols = np.nonzero(cross)
        if rows.size == 0:
            continue
        lines = idx[rows]
        cols2 = (cols + 1) % coords.shape[0]
        x1 = (vx[cols] - a[lines, 0]) * ux[lines] + (vy[cols] - a[lines, 1]) * uy[lines]
        x2 = (vx[cols2] - a[lines, 0]) * ux[lines] + (vy[cols2] - a[lines, 1]) * uy[lines]
        s1 = s[rows, cols]
        s2 = s_next[rows, cols]
        t = x1 + (x2 - x1) * (s1 / (s1 - s2))
        inside = (t >= 0.0) & (t <= length[lines])
        ev_line.append(lines[inside])
        ev_t.append(t[inside])

    if ev_line:
        lines_all = np.concatenate(ev_line)
        t_all = np.concatenate(ev_t)
    else:
        lines_all = np.empty(0, dtype=int)
        t_all = np.empty(0)

    counts = np.bincount(lines_all, minlength=m)
    rejected |= counts % 2 == 1
    valid_ev = ~rejected[lines_all]
    lines_all = lines_all[valid_ev]
    t_all = t_all[valid_ev]
    counts = np.bincount(lines_all, minlength=m)

    k = np.zeros(m, dtype=np.int64)
    L1 = np.zeros(m)
    L3 = np.zeros(m)
    cube = np.zeros(m)
    hit = np.nonzero(counts > 0)[0]
    if hit.size == 0:
        return BatchObservations(k, L1, L3, cube, np.empty(0), np.empty(0, dtype=int), rejected)

    order = np.lexsort((t_all, lines_all))
    lines_sorted = lines_all[order]
    t_sorted = t_all[order]
    hit_counts = counts[hit]
    cmax = int(hit_counts.max())
    row_of_line = np.full(m, -1, dtype=np.int64)
    row_of_line[hit] = np.arange(hit.size)
    rows = row_of_line[lines_sorted]
    starts = np.zeros(hit.size, dtype=np.int64)
    np.cumsum(hit_counts[:-1], out=starts[1:])
    pos = np.arange(lines_sorted.size) - starts[rows]

    tp = np.zeros((hit.size, cmax))
    tp[rows, pos] = t_sorted
    cnt = hit_counts[:, None]
    pos_grid = np.arange(cmax)[None, :]
    valid = pos_grid < cnt

    n_pairs = cmax // 2
    ch = tp[:, 1::2] - tp[:, 0::2]
    ch_valid = valid[:, 1::2]
    ch = np.where(ch_valid, ch, 0.0)
    L1_hit = ch.sum(axis=1)
    cube_hit = (ch * ch * ch).sum(axis=1)
    k_hit = hit_counts // 2

    L3_hit = np.zeros(hit.size)
    for i_pos in range(0, cmax, 2):
        ti = tp[:, i_pos]
        vi = valid[:, i_pos]
        for o_pos in range(1, cmax, 2):
            both = vi & valid[:, o_pos]
            gap = np.abs(tp[:, o_pos] - ti)
            L3_hit += np.where(both, gap * gap * gap, 0.0)
    for grp in (range(1, cmax, 2), range(0, cmax, 2)):
        grp = list(grp)
        for ii in range(len(grp)):
            for jj in range(ii + 1, len(grp)):
                p1, p2 = grp[ii], grp[jj]
                both = valid[:, p1] & valid[:, p2]
                gap = tp[:, p2] - tp[:, p1]
                L3_hit -= np.where(both, gap * gap * gap, 0.0)

    k[hit] = k_hit
    L1[hit] = L1_hit
    L3[hit] = L3_hit
    cube[hit] = cube_hit

    chord_rows, chord_cols = np.nonzero(ch_valid)
    chords_flat = ch[chord_rows, chord_cols]
    chords_line = hit[chord_rows]
    return BatchObservations(k, L1, L3, cube, chords_flat, chords_line, rejected)


def endpoints_outside(cshape: CompiledShape, a: np.ndarray, b: np.ndarray, sample: int = 8) -> bool:
    """Spot-check that segment endpoints are outside the shape (arena sanity)."""
    m = a.shape[0]
    step = max(1, m // sample)
    for i in range(0, m, step):
        if contains(cshape.shape, Point(*a[i])) or contains(cshape.shape, Point(*b[i])):
            return False
    return True
