import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpctf.filterbank import (
    BANK_NAMES,
    BankKind,
    BumpSegment,
    FrameletParams,
    GridError,
    ParameterError,
    build_bank,
    bump_eval,
    default_bank,
    filter_l2_norm_sq,
    grid,
    mirrored_label,
    multilevel_filter,
    reference_params,
    parse_params_text,
    sample_filter,
    validate_ctf6down,
    validate_params,
)

PI = math.pi
DOWN_C = (PI / 2 - 0.425, 2.0, PI)
DOWN_EPS = (0.125, 0.3, 0.35, 0.0778)


def bump_oracle(cL, cR, eL, eR, x):
    """Scalar transcription of the four-piece bump."""
    if x <= cL - eL or x >= cR + eR:
        return 0.0
    if x < cL + eL:
        return math.cos(PI * (cL + eL - x) / (4 * eL))
    if x <= cR - eR:
        return 1.0
    return math.cos(PI * (x - cR + eR) / (4 * eR))


def index_of(n, xi):
    """Grid index of the frequency ``xi`` (a multiple of 2 pi / n)."""
    return int(round(xi * n / (2 * PI))) % n


class TestBump:
    seg = BumpSegment(-1.0, 1.0, 0.3, 0.3)

    @pytest.mark.parametrize("xi, expected", [
        (0.0, 1.0),
        (-1.0, 0.7071067811865476),
        (-1.3, 0.0),
        (2.0, 0.0),
        (1.0, 0.7071067811865476),
    ])
    def test_reference_values(self, xi, expected):
        assert bump_eval(self.seg, xi) == pytest.approx(expected, abs=1e-15)

    def test_scalar_in_scalar_out(self):
        assert isinstance(bump_eval(self.seg, 0.5), float)

    @given(st.floats(-4, 4), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
    def test_matches_oracle(self, x, eL, eR):
        seg = BumpSegment(-1.2, 1.5, eL, eR)
        assert bump_eval(seg, x) == pytest.approx(bump_oracle(-1.2, 1.5, eL, eR, x), abs=1e-14)

    @given(st.floats(-4, 4))
    def test_range(self, x):
        assert 0.0 <= bump_eval(self.seg, x) <= 1.0

    def test_continuous_at_breakpoints(self):
        for b in (-1.3, -0.7, 0.7, 1.3):
            lo, hi = bump_eval(self.seg, np.array([b - 1e-9, b + 1e-9]))
            assert abs(lo - hi) < 1e-7

    def test_empty_plateau_rejected(self):
        with pytest.raises(ParameterError):
            BumpSegment(0.0, 1.0, 0.6, 0.6)

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ParameterError):
            BumpSegment(0.0, 1.0, 0.0, 0.2)

    def test_complementary_transitions(self):
        # adjacent bumps sharing a transition satisfy cos^2 + sin^2 = 1
        left = BumpSegment(-1.0, 0.5, 0.2, 0.25)
        right = BumpSegment(0.5, 2.0, 0.25, 0.2)
        x = np.linspace(0.25, 0.75, 101)
        np.testing.assert_allclose(bump_eval(left, x) ** 2 + bump_eval(right, x) ** 2, 1.0,
                                   atol=1e-15)


class TestValidation:
    def test_reference_parameters_valid(self):
        rep = validate_ctf6down(FrameletParams(DOWN_C, DOWN_EPS))
        assert rep.valid
        assert len(rep.inequalities) >= 5
        assert all(q.slack >= -1e-12 for q in rep.inequalities)

    def test_violation_is_named(self):
        rep = validate_ctf6down(FrameletParams((PI / 2, 2.0, PI), (0.3, 0.3, 0.35, 0.0778)))
        assert not rep.valid
        assert any("c1" in q.name for q in rep.failures)
        with pytest.raises(ParameterError, match="c1"):
            build_bank(BankKind.CTF6_DOWN, FrameletParams((PI / 2, 2.0, PI), (0.3, 0.3, 0.35, 0.0778)))

    def test_zero_width_rejected(self):
        with pytest.raises(ParameterError):
            FrameletParams(DOWN_C, (0.0, 0.3, 0.35, 0.0778))

    def test_wrong_s_rejected(self):
        with pytest.raises(ParameterError):
            validate_ctf6down(FrameletParams((1.0, PI), (0.1, 0.2, 0.1)))

    @pytest.mark.parametrize("c", [(1.0, 0.9, PI), (1.0, 2.0, 3.0), (-0.1, 2.0, PI)])
    def test_breakpoints_checked(self, c):
        with pytest.raises(ParameterError):
            FrameletParams(c, (0.1, 0.1, 0.1, 0.1))

    @pytest.mark.parametrize("kind", list(BankKind))
    def test_reference_parameters_pass(self, kind):
        assert validate_params(kind, reference_params(kind)).valid


class TestBanks:
    def test_down_bank_shape(self, down):
        assert down.labels == ["A", "AP", "AN", "BP1", "BP2", "BN1", "BN2"]
        assert down.factor("A") == 2
        assert all(down.factor(x) == 4 for x in down.labels[1:])
        assert down.lowpass.label == "A"

    def test_odd_bank_shape(self, ctf3):
        assert ctf3.labels == ["A", "BP1", "BN1"]
        assert all(ctf3.factor(x) == 2 for x in ctf3.labels)

    def test_even_bank_shape(self, ctf6):
        assert ctf6.labels == ["AP", "AN", "BP1", "BP2", "BN1", "BN2"]
        assert all(ctf6.factor(x) == 2 for x in ctf6.labels)
        assert ctf6.lowpass.label == "A"

    @pytest.mark.parametrize("name, d, count", [
        ("ctf6down", 1, 4), ("ctf6down", 2, 32), ("ctf6down", 3, 208),
        ("ctf6", 2, 32), ("ctf3", 2, 8), ("ctf3", 3, 26),
    ])
    def test_band_count(self, name, d, count):
        assert len(default_bank(name).band_labels(d)) == count

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            default_bank("ctf9")

    def test_perturbed_keeps_mirror(self, down):
        p = down.perturbed("BP2", 0.9)
        np.testing.assert_array_equal(p["BP2"].samples(64), 0.9 * down["BP2"].samples(64))
        np.testing.assert_array_equal(p["BN2"].samples(64), 0.9 * down["BN2"].samples(64))
        np.testing.assert_array_equal(p["BP1"].samples(64), down["BP1"].samples(64))


class TestSampling:
    def test_lowpass_dc(self, down):
        assert sample_filter(down["A"], 8)[0] == 1.0 + 0j

    def test_bp1_vanishes_on_negative_axis(self, down):
        assert sample_filter(down["BP1"], 8)[index_of(8, -PI / 2)] == 0

    def test_ap_at_zero(self, down):
        assert sample_filter(down["AP"], 4096)[0] == pytest.approx(math.cos(PI / 4), abs=1e-15)

    def test_grid_convention(self):
        g = grid(8)
        assert g[4] == -PI
        np.testing.assert_allclose(g, 2 * PI * np.array([0, 1, 2, 3, -4, -3, -2, -1]) / 8)

    @pytest.mark.parametrize("n", [7, 6, 0, 4])
    def test_bad_grid(self, down, n):
        with pytest.raises(GridError):
            sample_filter(down["A"], n)

    def test_cached_and_readonly(self, down):
        s = sample_filter(down["BP1"], 128)
        assert s is sample_filter(down["BP1"], 128)
        with pytest.raises(ValueError):
            s[0] = 1

    def test_lowpass_is_real(self, down, ctf3):
        for bank in (down, ctf3):
            assert np.all(bank["A"].samples(256).imag == 0)

    @pytest.mark.parametrize("name", BANK_NAMES)
    def test_mirror_exact(self, name):
        bank = default_bank(name)
        n = 512
        k = np.arange(n)
        for f in bank.filters:
            if f.is_mirror:
                src = f.mirror_of.samples(n)
                np.testing.assert_array_equal(f.samples(n), np.conj(src[(-k) % n]))

    def test_mirrored_label(self):
        assert [mirrored_label(x) for x in ("AP", "AN", "BP2", "BN1", "A")] == \
            ["AN", "AP", "BN2", "BP1", "A"]

    @pytest.mark.parametrize("n", [64, 256])
    def test_refinement_subsequence(self, down, n):
        for f in down.filters:
            np.testing.assert_array_equal(f.samples(2 * n)[::2], f.samples(n))

    @pytest.mark.parametrize("name", BANK_NAMES)
    def test_closed_form_samples(self, name):
        bank = default_bank(name)
        n = 64
        xs = grid(n)
        for f in bank.filters:
            if f.is_mirror:
                continue
            seg = f.segment
            expected = [
                sum(bump_oracle(seg.cL, seg.cR, seg.epsL, seg.epsR, x + s) for s in (-2 * PI, 0, 2 * PI))
                for x in xs
            ]
            np.testing.assert_allclose(f.samples(n).real, expected, atol=1e-14)


def _abs2(v):
    return v.real ** 2 + v.imag ** 2


class TestIdentities:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 300))
    def test_partitions_down(self, m):
        n = 4 * m
        b = default_bank("ctf6down")
        s = {x: b[x].samples(n) for x in b.labels}
        highs = sum(_abs2(s[x]) for x in ("BP1", "BP2", "BN1", "BN2"))
        assert np.max(np.abs(_abs2(s["A"]) + highs - 1)) < 1e-12
        assert np.max(np.abs(_abs2(s["AP"]) + _abs2(s["AN"]) + highs - 1)) < 1e-12
        assert np.max(np.abs(_abs2(s["AP"]) + _abs2(s["AN"]) - _abs2(s["A"]))) < 1e-12

    @pytest.mark.parametrize("name", ["ctf3", "ctf6"])
    @pytest.mark.parametrize("n", [64, 1000, 4096])
    def test_partitions_uniform(self, name, n):
        b = default_bank(name)
        highs = sum(_abs2(f.samples(n)) for f in b.filters if f.label.startswith("B"))
        assert np.max(np.abs(_abs2(b.lowpass.samples(n)) + highs - 1)) < 1e-12

    @pytest.mark.parametrize("n", [64, 4096])
    def test_non_overlap_exact(self, down, n):
        k = np.arange(n)
        a = down["A"].samples(n)
        assert np.all(a * a[(k + n // 2) % n] == 0)
        for x in ("AP", "AN", "BP1", "BP2", "BN1", "BN2"):
            u = down[x].samples(n)
            for g in (1, 2, 3):
                assert np.all(u * u[(k + g * n // 4) % n] == 0), (x, g)


class TestNorms:
    n = 1 << 16
    c1 = PI / 2 - 0.425

    def test_lowpass_norm(self, down):
        assert filter_l2_norm_sq(down["A"], self.n) == pytest.approx(self.c1 / PI, abs=1e-6)

    def test_ap_norm(self, down):
        assert filter_l2_norm_sq(down["AP"], self.n) == pytest.approx(self.c1 / (2 * PI), abs=1e-6)

    def test_six_filters_sum_to_one(self, down):
        tot = sum(filter_l2_norm_sq(down[x], 4096) for x in down.labels[1:])
        assert tot == pytest.approx(1.0, abs=1e-10)


class TestMultilevel:
    def test_level_one(self, down):
        for x in ("A", "BP1", "BN2"):
            np.testing.assert_array_equal(multilevel_filter(down, x, 1, 256), down[x].samples(256))

    def test_level_three_one_sided(self, down):
        n = 4096
        s = multilevel_filter(down, "BP2", 3, n)
        assert np.max(np.abs(s[grid(n) <= 0])) == 0

    def test_against_direct_product(self, down):
        n = 512
        k = np.arange(n)
        a = down["A"].samples(n)
        b = down["BN1"].samples(n)
        direct = a * a[(2 * k) % n] * b[(4 * k) % n]
        np.testing.assert_allclose(multilevel_filter(down, "BN1", 3, n), direct, atol=0)

    def test_divisibility(self, down):
        with pytest.raises(GridError):
            multilevel_filter(down, "A", 4, 24)


class TestParamsText:
    def test_override(self):
        p = parse_params_text("c1 = pi/2 - 0.4\n# comment\neps3=0.07\n", BankKind.CTF6_DOWN)
        assert p.c[0] == pytest.approx(PI / 2 - 0.4)
        assert p.eps[3] == 0.07
        assert p.c[1] == 2.0

    @pytest.mark.parametrize("text", ["c9=1", "foo=2", "c1=__import__('os')", "c1"])
    def test_rejects(self, text):
        with pytest.raises(ParameterError):
            parse_params_text(text, BankKind.CTF6_DOWN)
