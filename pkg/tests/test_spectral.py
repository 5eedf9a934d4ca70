import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from gevreyflow import (
    AbsDeriv,
    BracketPower,
    ConfigurationError,
    CoshWeight,
    Deriv,
    LinearFlow,
    OverflowGuardError,
    SechWeight,
    SymmetryError,
    analyze,
    apply_multiplier,
    dealias,
    make_grid,
    synthesize,
)
from gevreyflow.spectral import log_cosh, pad_spectrum, refined_samples

EPS = np.finfo(float).eps


def dft_direct(samples, grid):
    """O(N^2) reference transform: F_k = (1/N) sum_j f_j exp(-i xi_k x_j)."""
    j = np.arange(grid.N)
    F = np.array(
        [np.sum(samples * np.exp(-1j * xi_k * grid.x)) / grid.N for xi_k in grid.xi]
    )
    assert j.shape == samples.shape
    return F


real_fields = hnp.arrays(
    dtype=np.float64,
    shape=st.sampled_from([32, 64]),
    elements=st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
)


class TestGrid:
    def test_frequency_layout(self):
        g = make_grid(2 * np.pi, 16)
        assert g.k.tolist() == list(range(0, 8)) + list(range(-8, 0))
        assert np.allclose(g.xi, g.k.astype(float))
        assert g.dx == pytest.approx(np.pi / 8)

    def test_xi_max(self):
        g = make_grid(64.0, 512)
        assert g.xi_max == pytest.approx(8 * np.pi)

    @pytest.mark.parametrize(
        "L,N", [(0.0, 16), (-1.0, 32), (64.0, 15), (64.0, 8), (np.inf, 32)]
    )
    def test_rejects_bad_parameters(self, L, N):
        with pytest.raises(ConfigurationError):
            make_grid(L, N)

    def test_arrays_read_only(self):
        g = make_grid(64.0, 32)
        with pytest.raises(ValueError):
            g.x[0] = 1.0


class TestTransformPair:
    def test_single_cosine_mode(self):
        g = make_grid(64.0, 32)
        fld = analyze(np.cos(2 * np.pi * g.x / g.L), g)
        F = fld.spectrum
        assert F[1] == pytest.approx(0.5, abs=1e-14)
        assert F[-1] == pytest.approx(0.5, abs=1e-14)
        others = np.delete(F, [1, g.N - 1])
        assert np.abs(others).max() < 1e-14

    def test_constant_field(self):
        g = make_grid(64.0, 32)
        fld = analyze(np.ones(g.N), g)
        assert fld.spectrum[0] == pytest.approx(1.0)
        assert np.abs(fld.spectrum[1:]).max() < 1e-15

    def test_matches_direct_summation(self, rng):
        # frozen oracle: naive O(N^2) DFT at N=32
        g = make_grid(10.0, 32)
        f = rng.standard_normal(g.N)
        F = analyze(f, g).spectrum
        F_ref = dft_direct(f, g)
        assert np.abs(F - F_ref).max() < 100 * EPS * np.abs(f).max()

    @given(real_fields)
    def test_round_trip(self, f):
        g = make_grid(50.0, f.size)
        fld = analyze(f, g)
        back = synthesize(fld.spectrum, g)
        scale = max(np.abs(f).max(), 1.0)
        assert np.abs(back.samples - f).max() <= 100 * EPS * scale

    @given(real_fields)
    def test_hermitian_symmetry(self, f):
        g = make_grid(50.0, f.size)
        fld = analyze(f, g)
        scale = max(np.abs(fld.spectrum).max(), 1e-300)
        assert fld.hermitian_defect() <= 10 * EPS * scale

    @given(real_fields)
    def test_parseval(self, f):
        g = make_grid(50.0, f.size)
        assert analyze(f, g).parseval_defect() < 1e-13

    def test_synthesize_rejects_asymmetric_spectrum(self):
        g = make_grid(64.0, 32)
        F = np.zeros(g.N, dtype=complex)
        F[1] = 1.0  # no conjugate partner at k=-1
        with pytest.raises(SymmetryError):
            synthesize(F, g)

    def test_analyze_rejects_bad_input(self):
        g = make_grid(64.0, 32)
        with pytest.raises(ConfigurationError):
            analyze(np.zeros(31), g)
        bad = np.zeros(32)
        bad[3] = np.nan
        with pytest.raises(ConfigurationError):
            analyze(bad, g)


class TestMultipliers:
    def test_deriv_on_cosine(self):
        g = make_grid(2 * np.pi, 64)
        xi0 = 3.0
        fld = analyze(np.cos(xi0 * g.x), g)
        d = apply_multiplier(fld, Deriv(1))
        assert np.abs(d.samples - (-xi0 * np.sin(xi0 * g.x))).max() < 1e-12

    def test_cosh_weight_frozen_value(self):
        # cosh(0.5 * 4) = cosh(2) = 3.7621956910836314
        g = make_grid(2 * np.pi, 32)
        fld = analyze(np.cos(4.0 * g.x), g)
        w = apply_multiplier(fld, CoshWeight(0.5))
        ratio = w.spectrum[4].real / fld.spectrum[4].real
        assert ratio == pytest.approx(3.7621956910836314, rel=1e-12)

    @given(real_fields)
    def test_sech_inverts_cosh(self, f):
        g = make_grid(50.0, f.size)
        fld = analyze(f, g)
        rt = apply_multiplier(apply_multiplier(fld, CoshWeight(0.7)), SechWeight(0.7))
        scale = max(np.abs(f).max(), 1.0)
        assert np.abs(rt.samples - f).max() <= 10 * EPS * scale

    def test_sech_inverts_cosh_in_log_regime(self, rng):
        # sigma*xi_max = 40 > 30 exercises the log-space branch
        g = make_grid(2 * np.pi, 64)
        fld = analyze(rng.standard_normal(g.N), g)
        sigma = 40.0 / g.xi_max
        rt = apply_multiplier(apply_multiplier(fld, CoshWeight(sigma)), SechWeight(sigma))
        assert np.abs(rt.samples - fld.samples).max() <= 10 * EPS * np.abs(fld.samples).max()

    def test_sigma_zero_is_identity(self, rng):
        g = make_grid(64.0, 32)
        fld = analyze(rng.standard_normal(g.N), g)
        for sym in (CoshWeight(0.0), SechWeight(0.0)):
            out = apply_multiplier(fld, sym)
            assert np.array_equal(out.spectrum, fld.spectrum)

    @given(real_fields)
    def test_third_derivative_composes(self, f):
        g = make_grid(50.0, f.size)
        fld = analyze(f, g)
        once = apply_multiplier(fld, Deriv(3))
        thrice = fld
        for _ in range(3):
            thrice = apply_multiplier(thrice, Deriv(1))
        scale = max(np.abs(once.spectrum).max(), 1e-300)
        assert np.abs(once.spectrum - thrice.spectrum).max() <= 100 * EPS * scale

    @given(real_fields)
    def test_multipliers_preserve_hermitian_symmetry(self, f):
        g = make_grid(50.0, f.size)
        fld = analyze(f, g)
        for sym in (
            Deriv(2),
            AbsDeriv(1.5),
            BracketPower(-0.25),
            CoshWeight(0.3),
            LinearFlow(m=3, sign=1, alpha=1.0, t=0.1),
        ):
            out = apply_multiplier(fld, sym)
            scale = max(np.abs(out.spectrum).max(), 1e-300)
            assert out.hermitian_defect() <= 10 * EPS * scale
            assert out.parseval_defect() < 1e-13

    def test_linear_flow_is_unitary_and_invertible(self, rng):
        g = make_grid(64.0, 128)
        fld = analyze(rng.standard_normal(g.N), g)
        fwd = apply_multiplier(fld, LinearFlow(m=5, sign=1, alpha=1.0, t=0.37))
        # moduli preserved away from the (zeroed) Nyquist mode
        interior = np.abs(g.k) < g.N // 2
        assert np.allclose(np.abs(fwd.spectrum[interior]), np.abs(fld.spectrum[interior]))
        assert fwd.spectrum[g.nyquist_index] == 0.0
        back = apply_multiplier(fwd, LinearFlow(m=5, sign=-1, alpha=1.0, t=0.37))
        live = fld.spectrum.copy()
        live[g.nyquist_index] = 0.0
        assert np.abs(back.spectrum - live).max() < 100 * EPS * np.abs(live).max()

    def test_odd_deriv_zeroes_nyquist(self):
        g = make_grid(64.0, 32)
        w = Deriv(3).values(g)
        assert w[g.nyquist_index] == 0.0
        w2 = Deriv(2).values(g)
        assert w2[g.nyquist_index] != 0.0

    def test_bracket_power_values(self):
        g = make_grid(2 * np.pi, 32)
        w = BracketPower(2.0).values(g)
        assert w[3] == pytest.approx((1 + 3.0) ** 2)
        assert w[-3] == pytest.approx((1 + 3.0) ** 2)

    @pytest.mark.parametrize(
        "sym",
        [
            lambda: Deriv(-1),
            lambda: AbsDeriv(-0.5),
            lambda: CoshWeight(-1.0),
            lambda: SechWeight(-0.1),
            lambda: LinearFlow(m=4, sign=1, alpha=1.0, t=0.0),
            lambda: LinearFlow(m=3, sign=2, alpha=1.0, t=0.0),
            lambda: LinearFlow(m=3, sign=1, alpha=0.0, t=0.0),
            lambda: LinearFlow(m=3, sign=1, alpha=1.5, t=0.0),
        ],
    )
    def test_symbol_validation(self, sym):
        with pytest.raises(ConfigurationError):
            sym()


class TestOverflowGuard:
    def test_huge_weight_on_flat_spectrum_raises(self):
        g = make_grid(2 * np.pi, 64)
        sigma = 1000.0 / g.xi_max  # sigma * xi_max = 1000 > 700
        F = np.full(g.N, 1e-3, dtype=complex)  # real, even: Hermitian
        fld = synthesize(F, g)
        with pytest.raises(OverflowGuardError):
            apply_multiplier(fld, CoshWeight(sigma))

    def test_huge_weight_on_decaying_spectrum_survives(self):
        # coefficients fall like exp(-0.5*sigma*|xi|), so the weighted
        # spectrum grows only like exp(0.5*sigma*|xi|): representable even
        # though the raw weight overflows
        g = make_grid(2 * np.pi, 64)
        sigma = 1000.0 / g.xi_max
        F = np.exp(-0.5 * sigma * np.abs(g.xi)).astype(complex)
        fld = synthesize(F, g)
        out = apply_multiplier(fld, CoshWeight(sigma))
        assert np.all(np.isfinite(out.spectrum))
        k_top = g.N // 2 - 1
        expected = np.exp(0.5 * sigma * g.xi[k_top]) / 2.0
        assert out.spectrum[k_top].real == pytest.approx(expected, rel=1e-10)

    def test_log_cosh_accuracy(self):
        r = np.array([0.0, 1e-8, 0.5, 2.0, 20.0])
        assert np.abs(log_cosh(r) - np.log(np.cosh(r))).max() < 1e-14
        # far beyond overflow: log cosh(r) ~ |r| - log 2
        assert log_cosh(np.array([5000.0]))[0] == pytest.approx(5000.0 - np.log(2.0))


class TestDealias:
    def test_band_limited_field_unchanged(self, rng):
        g = make_grid(64.0, 64)
        F = np.zeros(g.N, dtype=complex)
        for k in (1, 5, 16):  # 16 = N/4 stays
            c = rng.standard_normal() + 1j * rng.standard_normal()
            F[k] = c
            F[-k] = np.conj(c)
        fld = synthesize(F, g)
        out = dealias(fld)
        assert np.array_equal(out.spectrum, fld.spectrum)

    def test_high_mode_zeroed(self):
        g = make_grid(64.0, 64)
        F = np.zeros(g.N, dtype=complex)
        F[g.N // 2 - 1] = 1.0
        F[-(g.N // 2 - 1)] = 1.0
        out = dealias(synthesize(F, g))
        assert np.all(out.spectrum == 0)

    def test_cube_matches_padded_oracle(self, rng):
        """Pseudospectral u^3 with the 1/2 rule against a 3x zero-padded
        product, which is alias-free by construction.

        With input modes strictly inside the band (|k| <= N/4 - 1) the two
        agree on every kept mode; a saturated band (mode N/4 populated) can
        alias triple products onto +-N/4 only, so interior modes still agree.
        """
        N = 64
        g = make_grid(30.0, N)

        def padded_cube(F):
            big = pad_spectrum(F, N, 3)
            w = np.fft.ifft(big * 3 * N).real
            return (np.fft.fft(w**3) / (3 * N))[: N // 4 + 1]

        # strict interior band: exact agreement on all kept modes
        F = np.zeros(N, dtype=complex)
        for k in range(1, N // 4):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            F[k] = c
            F[-k] = np.conj(c)
        u = synthesize(F, g)
        cubed = dealias(analyze(u.samples**3, g))
        oracle = padded_cube(F)
        assert np.abs(cubed.spectrum[: N // 4 + 1] - oracle).max() < 1e-12

        # saturated band: interior modes |k| < N/4 still exact
        F[N // 4] = 0.8
        F[-(N // 4)] = 0.8
        u = synthesize(F, g)
        cubed = dealias(analyze(u.samples**3, g))
        oracle = padded_cube(F)
        assert np.abs(cubed.spectrum[: N // 4] - oracle[: N // 4]).max() < 1e-12


class TestRefinement:
    def test_refined_grid_interpolates(self, rng):
        g = make_grid(64.0, 32)
        fld = analyze(rng.standard_normal(g.N), g)
        fine = refined_samples(fld, factor=2)
        assert np.abs(fine[::2] - fld.samples).max() < 1e-12

    def test_quartic_quadrature_exact_for_dealiased_field(self, rng):
        # band 4*(N/4) = N < 2N: the doubled grid integrates u^4 exactly
        g = make_grid(64.0, 64)
        fld = dealias(analyze(rng.standard_normal(g.N), g))
        fine = refined_samples(fld, factor=2)
        q = (g.L / fine.size) * np.sum(fine**4)
        big = pad_spectrum(fld.spectrum, g.N, 8)
        w = np.fft.ifft(big * 8 * g.N).real
        q_ref = (g.L / w.size) * np.sum(w**4)
        assert q == pytest.approx(q_ref, rel=1e-13)

    def test_sextic_quadrature_exact_for_dealiased_field(self, rng):
        # band 6*(N/4) = 3N/2 < 2N: still exact on the doubled grid
        g = make_grid(64.0, 64)
        fld = dealias(analyze(rng.standard_normal(g.N), g))
        fine = refined_samples(fld, factor=2)
        q = (g.L / fine.size) * np.sum(fine**6)
        big = pad_spectrum(fld.spectrum, g.N, 8)
        w = np.fft.ifft(big * 8 * g.N).real
        q_ref = (g.L / w.size) * np.sum(w**6)
        assert q == pytest.approx(q_ref, rel=1e-13)
