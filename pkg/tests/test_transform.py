import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from caft import spectral
from caft.errors import ValidationError
from caft.io import ManifestEntry, save_image
from caft.transform import (
    build_augmented_set,
    compute_window,
    impose_low_freq,
    low_freq_magnitude,
    plan_assignments,
    prepare_pair,
    resize_bilinear,
    swap_low_freq,
)

from oracles import bilinear_align_corners


class TestComputeWindow:
    def test_default_ratio_at_224(self):
        assert compute_window(224, 224, 0.04).side == 17

    def test_zero_ratio(self):
        w = compute_window(10, 10, 0.0)
        assert w.side == 0
        assert not w.mask().any()

    def test_half_ratio_takes_min_dimension(self):
        w = compute_window(3, 5, 0.5)
        assert w.side == 3
        assert w.mask().sum() == 9

    def test_floor_despite_representation_error(self):
        # 2 * 0.29 * 100 evaluates to 57.99999999999999 in binary floating point
        assert compute_window(100, 100, 0.29).side == 58

    @pytest.mark.parametrize("ratio", [-0.01, 0.51, float("nan")])
    def test_ratio_out_of_range(self, ratio):
        with pytest.raises(ValidationError):
            compute_window(8, 8, ratio)

    def test_window_centred_on_dc(self):
        w = compute_window(8, 8, 1 / 16)
        assert w.side == 1
        assert w.rows == slice(4, 5) and w.cols == slice(4, 5)

    @pytest.mark.parametrize("h, w", [(4, 4), (5, 5), (4, 7), (6, 3)])
    def test_full_ratio_covers_grid(self, h, w):
        win = compute_window(h, w, 0.5)
        m = win.mask()
        assert m.sum() == win.side ** 2
        assert win.rows.start >= 0 and win.rows.stop <= h

    @given(st.integers(1, 64), st.integers(1, 64), st.floats(0, 0.5), st.floats(0, 0.5))
    @settings(max_examples=200, deadline=None)
    def test_nesting(self, h, w, a, b):
        small, large = sorted((a, b))
        m1 = compute_window(h, w, small).mask()
        m2 = compute_window(h, w, large).mask()
        assert not np.any(m1 & ~m2)

    @given(st.integers(1, 20), st.integers(1, 20), st.floats(0, 0.5))
    @settings(max_examples=100, deadline=None)
    def test_origin_index_matches_centred_window(self, h, w, ratio):
        win = compute_window(h, w, ratio)
        data = np.arange(h * w).reshape(1, h, w)
        centred = spectral.shift_center(spectral.Spectrum(data.astype(complex))).data
        rows, cols = win.origin_index()
        np.testing.assert_array_equal(data[:, rows, cols], centred[:, win.rows, win.cols].real)


def random_image(rng, h=16, w=16, c=3):
    return rng.uniform(0, 255, (h, w, c))


class TestSwapLowFreq:
    def test_self_swap_is_identity(self):
        x = random_image(np.random.default_rng(0))
        np.testing.assert_allclose(swap_low_freq(x, x, 0.04, clip=False), x, atol=1e-6)

    def test_zero_window_is_identity(self):
        rng = np.random.default_rng(1)
        x, y = random_image(rng), random_image(rng)
        np.testing.assert_allclose(swap_low_freq(x, y, 0.0, clip=False), x, atol=1e-6)

    def test_dc_only_swap_on_constants(self):
        # one-bin window: DC of 100*64 is replaced by 200*64, every other bin is 0
        src = np.full((8, 8, 1), 100.0)
        tgt = np.full((8, 8, 1), 200.0)
        assert compute_window(8, 8, 0.07).side == 1
        np.testing.assert_array_equal(swap_low_freq(src, tgt, 0.07), np.full((8, 8, 1), 200.0))

    def test_only_window_magnitudes_change(self):
        rng = np.random.default_rng(2)
        x, y = random_image(rng, 32, 32, 1), random_image(rng, 32, 32, 1)
        out = swap_low_freq(x, y, 0.11, clip=False)
        win = compute_window(32, 32, 0.11)
        assert win.side == 7
        m_out, p_out = spectral.to_polar(spectral.shift_center(spectral.dft2(out)))
        m_x, p_x = spectral.to_polar(spectral.shift_center(spectral.dft2(x)))
        m_y, _ = spectral.to_polar(spectral.shift_center(spectral.dft2(y)))
        inside = win.mask()
        np.testing.assert_allclose(m_out[0][inside], m_y[0][inside], rtol=1e-9, atol=1e-6)
        np.testing.assert_allclose(m_out[0][~inside], m_x[0][~inside], rtol=1e-9, atol=1e-6)
        phase_diff = np.angle(np.exp(1j * (p_out[0] - p_x[0])))
        assert np.max(np.abs(phase_diff)) < 1e-9

    def test_even_window_stays_real(self):
        rng = np.random.default_rng(3)
        x, y = random_image(rng, 20, 20), random_image(rng, 20, 20)
        assert compute_window(20, 20, 0.1).side == 4
        out = swap_low_freq(x, y, 0.1, clip=False)
        assert out.shape == x.shape and np.all(np.isfinite(out))

    def test_output_clamped(self):
        rng = np.random.default_rng(4)
        x = random_image(rng)
        y = np.full_like(x, 255.0)
        out = swap_low_freq(x, y, 0.3)
        assert out.min() >= 0 and out.max() <= 255

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            swap_low_freq(np.zeros((4, 4, 1)), np.zeros((4, 5, 1)), 0.1)

    def test_native_backend_agrees(self):
        rng = np.random.default_rng(5)
        x, y = random_image(rng, 12, 18), random_image(rng, 12, 18)
        a = swap_low_freq(x, y, 0.2, clip=False)
        b = swap_low_freq(x, y, 0.2, clip=False, backend="native")
        np.testing.assert_allclose(a, b, atol=1e-9)

    @given(arrays(np.float64, (9, 10, 2), elements=st.floats(0, 255)),
           arrays(np.float64, (9, 10, 2), elements=st.floats(0, 255)),
           st.floats(0.01, 50), st.floats(0, 0.5))
    @settings(max_examples=40, deadline=None)
    def test_scale_commutes(self, x, y, c, ratio):
        # phase is only defined where the source window bins are non-negligible
        win = compute_window(9, 10, ratio)
        src_bins = np.abs(spectral.shift_center(spectral.dft2(x)).data[:, win.rows, win.cols])
        assume(src_bins.size == 0 or src_bins.min() > 1e-6 * max(1.0, float(np.abs(x).sum())))
        lhs = swap_low_freq(c * x, c * y, ratio, clip=False)
        rhs = c * swap_low_freq(x, y, ratio, clip=False)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-7 * max(1.0, c))

    @given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(1)),
                  elements=st.floats(0, 255)), st.floats(0, 0.5))
    @settings(max_examples=60, deadline=None)
    def test_self_swap_property(self, x, ratio):
        np.testing.assert_allclose(swap_low_freq(x, x, ratio, clip=False), x, atol=1e-6)


class TestPreparePair:
    def test_same_size_unchanged(self):
        rng = np.random.default_rng(0)
        s, t = random_image(rng), random_image(rng)
        _, t2 = prepare_pair(s, t)
        assert np.array_equal(t2, t)

    def test_upsample_keeps_corners(self):
        t = np.array([[0.0, 30.0], [60.0, 90.0]])[:, :, None]
        _, out = prepare_pair(np.zeros((4, 4, 1)), t)
        assert out.shape == (4, 4, 1)
        assert out[0, 0, 0] == 0 and out[0, 3, 0] == 30 and out[3, 0, 0] == 60 and out[3, 3, 0] == 90
        # interior weights: row 1 sits a third of the way down
        assert out[1, 1, 0] == pytest.approx(0 + 30 / 3 + 60 / 3)

    def test_matches_explicit_bilinear(self):
        rng = np.random.default_rng(1)
        t = rng.uniform(0, 255, (5, 7, 3))
        for h, w in [(9, 4), (1, 1), (5, 13), (2, 2)]:
            np.testing.assert_allclose(resize_bilinear(t, h, w), bilinear_align_corners(t, h, w), atol=1e-10)

    def test_constant_stays_constant(self):
        t = np.full((3, 5, 3), 77.0)
        _, out = prepare_pair(np.zeros((11, 6, 3)), t)
        np.testing.assert_allclose(out, 77.0, atol=1e-12)

    def test_channel_mismatch(self):
        with pytest.raises(ValidationError):
            prepare_pair(np.zeros((4, 4, 3)), np.zeros((4, 4, 1)))


@pytest.fixture
def corpus(tmp_path):
    rng = np.random.default_rng(0)
    source = []
    for i in range(10):
        p = tmp_path / f"s{i}.png"
        save_image(rng.uniform(0, 255, (12, 12, 3)), p)
        source.append(ManifestEntry(f"s{i}", str(p), i % 5))
    target_paths = {}
    dictionary = {}
    for i in range(10):
        p = tmp_path / f"t{i}.png"
        save_image(rng.uniform(0, 255, (10, 14, 3)), p)
        target_paths[f"t{i}"] = str(p)
        dictionary.setdefault(i % 5, []).append(f"t{i}")
    return source, dictionary, target_paths


class TestBuildAugmentedSet:
    def test_class_matched_targets(self, corpus):
        source, dictionary, paths = corpus
        out, log = build_augmented_set(source, dictionary, paths, seed=7)
        assert len(out) == len(source)
        pl = {t: k for k, ids in dictionary.items() for t in ids}
        for t, s in zip(out, source):
            assert t.label == s.label
            assert pl[t.target_id] == s.label
            assert not t.fallback
            assert t.image.shape == (12, 12, 3)
            assert t.window.side == compute_window(12, 12, 0.04).side
        assert [o["id"] for o in log["originals"]] == [s.id for s in source]

    def test_missing_label_skip(self, corpus):
        source, dictionary, paths = corpus
        del dictionary[3]
        out, log = build_augmented_set(source, dictionary, paths, fallback="skip", seed=1)
        assert all(t.label != 3 for t in out)
        skipped = {s["source_id"] for s in log["skipped"]}
        assert skipped == {s.id for s in source if s.label == 3}

    def test_missing_label_random(self, corpus):
        source, dictionary, paths = corpus
        del dictionary[3]
        out, log = build_augmented_set(source, dictionary, paths, fallback="random", seed=1)
        assert len(out) == len(source)
        assert {t.source_id for t in out if t.fallback} == {s.id for s in source if s.label == 3}
        assert all(t.label == s.label for t, s in zip(out, source))

    def test_empty_dictionary_random_fails(self, corpus):
        source, _, paths = corpus
        with pytest.raises(ValidationError):
            build_augmented_set(source, {}, paths, fallback="random")

    def test_deterministic(self, corpus, tmp_path):
        source, dictionary, paths = corpus
        a, log_a = build_augmented_set(source, dictionary, paths, seed=42, out_dir=tmp_path / "a")
        b, log_b = build_augmented_set(source, dictionary, paths, seed=42, workers=4, out_dir=tmp_path / "b")
        assert json.dumps(log_a) == json.dumps(log_b)
        for x, y in zip(a, b):
            assert np.array_equal(x.image, y.image)
        for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_changes_draws(self, corpus):
        source, dictionary, _ = corpus
        draws = {tuple(a.target_id for a in plan_assignments(source, dictionary, seed=s)) for s in range(20)}
        assert len(draws) > 1

    def test_unreadable_image_logged(self, corpus, tmp_path):
        source, dictionary, paths = corpus
        bad = tmp_path / "broken.png"
        bad.write_bytes(b"not an image")
        source = list(source)
        source[0] = ManifestEntry("s0", str(bad), source[0].label)
        out, log = build_augmented_set(source, dictionary, paths, seed=3)
        assert len(out) == len(source) - 1
        assert [e["source_id"] for e in log["errors"]] == ["s0"]

    def test_unknown_target_id(self, corpus):
        source, dictionary, paths = corpus
        dictionary[0].append("ghost")
        with pytest.raises(ValidationError):
            build_augmented_set(source, dictionary, paths)


def test_cached_magnitude_path_matches_swap():
    rng = np.random.default_rng(40)
    src, tgt = random_image(rng, 21, 18), random_image(rng, 21, 18)
    for ratio in (0.05, 0.1, 0.3):
        win = compute_window(21, 18, ratio)
        got = impose_low_freq(src, low_freq_magnitude(tgt, win), win, clip=False)
        np.testing.assert_array_equal(got, swap_low_freq(src, tgt, ratio, clip=False))
