import math

import numpy as np
import pytest

from chordscan import batch, chords, shapes
from chordscan.geometry import Point, Shape


def _random_segments(shape, n, seed):
    """Segments across the shape's arena, endpoints outside the shape."""
    from chordscan.sampling import arena_for, sample_iur_batch, _segments_from_lines

    arena = arena_for(shape)
    theta, p = sample_iur_batch(np.random.default_rng(seed), arena, n)
    return _segments_from_lines(theta, p, arena)


@pytest.mark.parametrize("name", shapes.BUILTIN_NAMES)
def test_batch_matches_scalar_observe(name):
    shape = shapes.builtin(name)
    a, b = _random_segments(shape, 400, seed=hash(name) % 1000)
    cshape = batch.CompiledShape(shape)
    bobs = batch.observe_segments(cshape, a, b)
    assert not bobs.rejected.any()
    for i in range(len(a)):
        obs = chords.observe(shape, (Point(*a[i]), Point(*b[i])))
        assert bobs.k[i] == obs.k
        assert bobs.L1[i] == pytest.approx(obs.L1, rel=1e-12, abs=1e-12)
        assert bobs.L3[i] == pytest.approx(obs.L3, rel=1e-12, abs=1e-10)
        got = np.sort(bobs.chords_flat[bobs.chords_line == i])
        assert np.allclose(got, np.sort(obs.chords), rtol=1e-12, atol=1e-12)


def test_batch_chord_cube_sums():
    shape = shapes.annulus()
    a, b = _random_segments(shape, 300, seed=3)
    bobs = batch.observe_segments(batch.CompiledShape(shape), a, b)
    for i in range(len(a)):
        mine = bobs.chords_flat[bobs.chords_line == i]
        assert bobs.chord_cube_sum[i] == pytest.approx(float(np.sum(mine**3)), rel=1e-12)


def test_vertex_hit_line_rejected():
    sq = shapes.square()
    a = np.array([[-1.0, -1.0], [-1.0, 0.5]])
    b = np.array([[2.0, 2.0], [2.0, 0.5]])  # first runs through two corners
    bobs = batch.observe_segments(batch.CompiledShape(sq), a, b)
    assert bobs.rejected[0]
    assert not bobs.rejected[1]
    assert bobs.k[1] == 1


def test_statue_reaches_k6():
    st = shapes.statue()
    # horizontal lines across the tooth band cross all six teeth
    ys = np.linspace(0.2, 0.9, 50) * st.rings[0].coords[:, 1].max()
    a = np.column_stack([np.full(50, -3.0), ys])
    b = np.column_stack([np.full(50, 3.0), ys])
    bobs = batch.observe_segments(batch.CompiledShape(st), a, b)
    assert int(bobs.k.max()) == 6


def test_zero_length_and_missing_segments():
    sq = shapes.square()
    a = np.array([[-1.0, 0.5], [-1.0, 9.0]])
    b = np.array([[-1.0, 0.5], [2.0, 9.0]])
    bobs = batch.observe_segments(batch.CompiledShape(sq), a, b)
    assert not bobs.rejected.any()
    assert bobs.k.tolist() == [0, 0]
    assert bobs.chords_flat.size == 0


def test_endpoints_outside_helper():
    sq = shapes.square()
    cs = batch.CompiledShape(sq)
    a = np.array([[-1.0, 0.5]])
    b = np.array([[2.0, 0.5]])
    assert batch.endpoints_outside(cs, a, b)
    assert not batch.endpoints_outside(cs, np.array([[0.5, 0.5]]), b)
