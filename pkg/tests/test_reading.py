import math

import numpy as np
import pytest

from chordscan import reading as rd
from chordscan import recognition as rec
from chordscan.geometry import exact_area, exact_perimeter
from chordscan.sampling import SamplerConfig


@pytest.fixture(scope="module")
def letter_dict():
    return rd.calibrate_letters(m_lines=800, replicates=30, config=SamplerConfig(seed=42))


def test_letter_I_exact():
    sh = rd.letter_shape("I", 2.0)
    assert exact_area(sh) == pytest.approx(5 * 4.0, abs=1e-12)
    assert exact_perimeter(sh) == pytest.approx(12 * 2.0, abs=1e-12)


def test_letter_L_exact():
    sh = rd.letter_shape("L", 1.0)
    assert exact_area(sh) == pytest.approx(7.0, abs=1e-12)
    assert exact_perimeter(sh) == pytest.approx(16.0, abs=1e-12)


def test_letter_O_exact():
    # outer boundary plus the hole boundary
    sh = rd.letter_shape("O", 1.0)
    assert len(sh.rings) == 2
    assert exact_area(sh) == pytest.approx(12.0, abs=1e-12)
    assert exact_perimeter(sh) == pytest.approx(24.0, abs=1e-12)


def test_unsupported_character():
    with pytest.raises(KeyError):
        rd.letter_shape("a", 1.0)
    with pytest.raises(KeyError):
        rd.word_shape("HI!", 1.0)


def test_alphabet_is_collision_free():
    alphabet = rd.Alphabet(1.0)
    assert alphabet.collisions == []
    assert len(alphabet.table) == 26
    assert alphabet.min_separation() > 0


def test_alphabet_scales_with_cell_side():
    a1 = rd.Alphabet(1.0)
    a2 = rd.Alphabet(2.0)
    for c in "AQZ":
        assert a2.table[c][0] == pytest.approx(4 * a1.table[c][0], rel=1e-12)
        assert a2.table[c][1] == pytest.approx(2 * a1.table[c][1], rel=1e-12)


def test_masks_have_no_corner_contact():
    for c, mask in rd.LETTER_MASKS.items():
        rd.mask_to_shape(mask, 1.0)  # raises on pinched outlines


def test_word_ii_additive():
    ws = rd.word_shape("II", 1.0)
    assert exact_area(ws.shape) == pytest.approx(10.0, abs=1e-12)
    assert exact_perimeter(ws.shape) == pytest.approx(24.0, abs=1e-12)


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        rd.word_shape("", 1.0)


def test_word_additivity_over_letters():
    ws = rd.word_shape("FREEDOM", 1.0)
    a_sum = sum(exact_area(s) for s in ws.letter_shapes)
    p_sum = sum(exact_perimeter(s) for s in ws.letter_shapes)
    assert exact_area(ws.shape) == pytest.approx(a_sum, rel=1e-9)
    assert exact_perimeter(ws.shape) == pytest.approx(p_sum, rel=1e-9)


def test_anagram_degeneracy():
    a = rd.word_shape("FREEDOM", 1.0)
    b = rd.word_shape("MODEERF", 1.0)
    assert exact_area(a.shape) == pytest.approx(exact_area(b.shape), rel=1e-9)
    assert exact_perimeter(a.shape) == pytest.approx(exact_perimeter(b.shape), rel=1e-9)


def test_default_word_list_anagram_free():
    words = rd.default_word_list()
    assert len(words) == 20
    assert "FREEDOM" in words
    assert rd.anagram_groups(words) == []


def test_read_local_zero_budget_censored(letter_dict):
    target = rd.word_shape("ON", 1.0)
    res = rd.read_local(target, letter_dict, 0, SamplerConfig(seed=1))
    assert res.censored
    assert res.per_letter_censored == [True, True]
    assert res.n_lines == 0


def test_read_global_zero_budget_censored(letter_dict):
    target = rd.word_shape("ON", 1.0)
    res = rd.read_global(target, letter_dict[:3], 0, SamplerConfig(seed=1))
    assert res.censored


def test_read_single_letter_equals_classification(letter_dict):
    target = rd.word_shape("C", 1.0)
    cfg = SamplerConfig(seed=7)
    res = rd.read_local(target, letter_dict, 3000, cfg)
    direct = rec.explore_until_stop(
        target.letter_shapes[0],
        letter_dict,
        cfg,
        n_max=3000,
        warm_up=rd._read_warmup(3000),
        confirm=rd.READ_CONFIRM,
        arena=rd.letter_arena(target.boxes[0], cfg.arena_scale),
        chunk=64,
    )
    assert res.text == direct.label
    assert res.n_lines == direct.n_stop


def test_read_local_freedom(letter_dict):
    target = rd.word_shape("FREEDOM", 1.0)
    ok = 0
    for seed in range(8):
        res = rd.read_local(target, letter_dict, 30_000 // 7, SamplerConfig(seed=seed))
        ok += res.text == "FREEDOM"
    assert ok >= 7


def test_read_global_anagram_dictionary_warns():
    entries = [
        rec.DictEntry("ON", 10.0, 5.0, 1.0, 1.0),
        rec.DictEntry("NO", 10.0, 5.0, 1.0, 1.0),
    ]
    target = rd.word_shape("ON", 1.0)
    with pytest.warns(UserWarning, match="anagram"):
        res = rd.read_global(target, entries, 500, SamplerConfig(seed=2))
    assert res.censored  # posterior is pinned at 1/2 between the twins


def test_letter_arena_covers_box():
    arena = rd.letter_arena((0.0, 0.0, 3.0, 5.0), 1.2)
    # every box corner is inside the arena
    for x, y in [(0, 0), (3, 0), (0, 5), (3, 5)]:
        assert math.hypot(x - arena.center.x, y - arena.center.y) <= arena.radius


def test_local_word_error_grows_like_sqrt_letters(letter_dict):
    # at a fixed per-letter line count, the spread of the summed word area
    # over seeds is about sqrt(n_letters) times one letter's spread
    word = "FREEDOM"
    target = rd.word_shape(word, 1.0)
    single = rd.word_shape("F", 1.0)
    n_per_letter = 400
    word_sums, singles = [], []
    for seed in range(24):
        cfg = SamplerConfig(seed=100 + seed)
        # threshold > 1 disables stopping, so every letter uses the full budget
        rw = rd.read_local(target, letter_dict, n_per_letter, cfg, threshold=1.5)
        rs = rd.read_local(single, letter_dict, n_per_letter, cfg, threshold=1.5)
        word_sums.append(rw.area_hat)
        singles.append(rs.area_hat)
    ratio = np.std(word_sums, ddof=1) / np.std(singles, ddof=1)
    assert 1.3 < ratio < 5.3  # sqrt(7) ~ 2.65, generous Monte Carlo band


def test_compare_strategies_smoke(letter_dict):
    words = ["FREEDOM", "PEOPLES", "NATIONS", "MANKIND", "DIGNITY",
             "JUSTICE", "RESPECT", "SECURITY", "PROGRESS", "TOLERANCE"]
    word_dict = rd.calibrate_words(
        words, m_lines=600, replicates=10, config=SamplerConfig(seed=55)
    )
    cmp = rd.compare_strategies(
        "FREEDOM",
        letter_dict,
        word_dict,
        seeds=range(4),
        budget=20_000,
    )
    assert cmp.word == "FREEDOM"
    assert cmp.exact_area == pytest.approx(75.0, abs=1e-9)
    assert 0.5 <= cmp.local_success <= 1.0
    assert 0.5 <= cmp.global_success <= 1.0
    # both strategies' area estimates center on the exact word area
    assert np.mean(cmp.local_area) == pytest.approx(75.0, rel=0.1)
    assert np.mean(cmp.global_area) == pytest.approx(75.0, rel=0.1)
