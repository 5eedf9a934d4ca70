"""Weighted norms, almost-conserved energies, commutator error operators,
rate identities, index/threshold formulas, and the analyticity-radius
estimator.

Conventions shared with the rest of the package: fields are real and
periodic with DFT coefficients F_k = (1/N) sum f_j exp(-i xi_k x_j), so
L * sum_k |F_k|^2 is the integral of f^2.  The bracket weight is 1 + |xi|
(not the (1+xi^2)^(1/2) variant), and cosh weights are evaluated in log
space whenever they would overflow directly.

Quadrature: quartic/sextic/product integrals are trapezoid sums on a
2x-refined grid (zero-padded synthesis).  States produced by the integrator
are band-limited to |k| <= N/4, so their sixth powers have bandwidth
3N/2 < 2N and these sums are exact, not approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import DampingProfile
from .errors import (
    ConfigurationError,
    DivergenceError,
    OverflowGuardError,
    UnderresolvedError,
)
from .inequalities import InequalityVerdict, _verdict
from .spectral import (
    CoshWeight,
    SechWeight,
    SpectralField,
    apply_log_weight,
    apply_multiplier,
    dealias_mask,
    hermitian_project,
    log_cosh,
    make_grid,
    pad_spectrum,
    synthesize,
)

_LOG_SWITCH = 30.0


# ---------------------------------------------------------------------------
# weighted norms
# ---------------------------------------------------------------------------


def _weighted_l2(L: float, logw: np.ndarray, amps: np.ndarray) -> float:
    """sqrt(L * sum exp(2*logw) * amps^2) without overflowing intermediates."""
    pos = amps > 0
    if not pos.any():
        return 0.0
    z = logw[pos] + np.log(amps[pos])
    m = float(z.max())
    total = float(np.exp(2.0 * (z - m)).sum())
    log_val = m + 0.5 * math.log(L * total)
    try:
        return math.exp(log_val)
    except OverflowError:
        raise OverflowGuardError(
            f"weighted norm exceeds double range (log value ~ {log_val:.1f})"
        ) from None


def hsigma_norm(f: SpectralField, sigma: float, s: float) -> float:
    """(L sum (1+|xi|)^(2s) cosh^2(sigma xi) |F_k|^2)^(1/2)."""
    if sigma < 0:
        raise ConfigurationError(f"weight radius must be >= 0, got {sigma}")
    xi = f.grid.xi
    logw = s * np.log1p(np.abs(xi)) + log_cosh(sigma * xi)
    return _weighted_l2(f.grid.L, logw, np.abs(f.spectrum))


def gsigma_norm(f: SpectralField, sigma: float, s: float) -> float:
    """Same as hsigma_norm with the one-sided weight e^(sigma |xi|)."""
    if sigma < 0:
        raise ConfigurationError(f"weight radius must be >= 0, got {sigma}")
    xi = f.grid.xi
    logw = s * np.log1p(np.abs(xi)) + sigma * np.abs(xi)
    return _weighted_l2(f.grid.L, logw, np.abs(f.spectrum))


# ---------------------------------------------------------------------------
# quadrature helpers (2x refined grid)
# ---------------------------------------------------------------------------


def _fine_xi(grid) -> np.ndarray:
    N = grid.N
    return (2.0 * np.pi / grid.L) * np.concatenate([np.arange(0, N), np.arange(-N, 0)])


def _refined_derivs(fld: SpectralField, orders: tuple[int, ...]) -> list[np.ndarray]:
    """Samples of the requested derivatives on the doubled grid."""
    N = fld.grid.N
    big = pad_spectrum(fld.spectrum, N, 2)
    xi = _fine_xi(fld.grid)
    out = []
    for order in orders:
        spec = big if order == 0 else big * (1j * xi) ** order
        out.append(np.fft.ifft(spec * (2 * N)).real)
    return out


def _quad(grid, *factors: np.ndarray) -> float:
    """Trapezoid integral over [0, L) of a pointwise product on the 2x grid."""
    prod = factors[0]
    for f in factors[1:]:
        prod = prod * f
    return float(grid.L / prod.size * prod.sum())


# ---------------------------------------------------------------------------
# energy functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalBreakdown:
    """A scalar functional with its named constituent integrals."""

    total: float
    terms: dict


def _spectral_moment(f: SpectralField, power: int) -> float:
    """L * sum xi^(2 power) |F_k|^2, the squared L2 norm of the power-th derivative."""
    return float(f.grid.L * np.sum(f.grid.xi ** (2 * power) * np.abs(f.spectrum) ** 2))


def functional_A(u: SpectralField, sigma: float, mu: int) -> FunctionalBreakdown:
    """Sixth-order almost-conserved energy of the weighted field U = cosh(sigma D) u.

    Terms: ||U||^2, ||U_x||^2, ||U_xx||^2, -(mu/6)||U||_L4^4,
    -(5 mu/3)||U U_x||^2, (1/18)||U||_L6^6.  For mu = -1 the three nonlinear
    terms are nonnegative, so the total dominates the Sobolev part.
    """
    if mu not in (-1, 1):
        raise ConfigurationError(f"mu must be +-1, got {mu}")
    U = apply_multiplier(u, CoshWeight(sigma))
    Uf, Uxf = _refined_derivs(U, (0, 1))
    g = u.grid
    terms = {
        "l2_sq": _spectral_moment(U, 0),
        "deriv1_sq": _spectral_moment(U, 1),
        "deriv2_sq": _spectral_moment(U, 2),
        "quartic": -(mu / 6.0) * _quad(g, Uf, Uf, Uf, Uf),
        "product_sq": -(5.0 * mu / 3.0) * _quad(g, Uf, Uf, Uxf, Uxf),
        "sextic": (1.0 / 18.0) * _quad(g, Uf, Uf, Uf, Uf, Uf, Uf),
    }
    return FunctionalBreakdown(total=sum(terms.values()), terms=terms)


def conserved_combinations(b: FunctionalBreakdown) -> dict:
    """The three flow invariants hiding in the breakdown (exact at sigma=0):
    mass, energy (gradient + quartic), and the second-order combination."""
    t = b.terms
    return {
        "inv0": t["l2_sq"],
        "inv1": t["deriv1_sq"] + t["quartic"],
        "inv2": t["deriv2_sq"] + t["product_sq"] + t["sextic"],
    }


def functional_M(v: SpectralField, sigma: float) -> float:
    """||cosh(sigma D) v||_L2^2."""
    return hsigma_norm(v, sigma, 0.0) ** 2


def functional_N(w1: SpectralField, w2: SpectralField, sigma: float) -> float:
    """Sum of the two weighted masses of a coupled pair."""
    return functional_M(w1, sigma) + functional_M(w2, sigma)


def damping_A_norm(a: DampingProfile, sigma: float, K: int = 40) -> float:
    """Analytic size of the damping coefficient:

        sum_k (k+1)^(1/4) sigma^k / k! * sup|d^k a|,

    summed exactly through K (the profiles expose exact derivative sups) and
    closed with the rigorous tail bound sup|d^k a| <= C R^k k!:

        tail <= C * sum_{k>K} (k+1) (sigma R)^k,

    a differentiated geometric series.  Requires sigma * R < 1; the returned
    value is head + tail, an upper bound sharp to 1e-12 relative (error
    otherwise: raise K).
    """
    if K < 8:
        raise ConfigurationError(f"truncation order must be >= 8, got K={K}")
    if sigma < 0:
        raise ConfigurationError(f"weight radius must be >= 0, got {sigma}")
    q = sigma * a.deriv_bound_rate
    if q >= 1.0:
        raise DivergenceError(
            f"damping-norm series diverges: sigma * R = {q:.6g} >= 1 (outside the (A3) regime)"
        )
    head = 0.0
    coeff = 1.0  # sigma^k / k!
    for k in range(0, K + 1):
        if k > 0:
            coeff *= sigma / k
        head += (k + 1) ** 0.25 * coeff * a.deriv_sup(k)
    # sum_{k>K} (k+1) q^k = d/dq [q * geometric] remainder, in closed form
    if q == 0.0:
        tail = 0.0
    else:
        full = 1.0 / (1.0 - q) ** 2
        partial = (1.0 - (K + 2) * q ** (K + 1) + (K + 1) * q ** (K + 2)) / (1.0 - q) ** 2
        tail = a.deriv_bound_coeff * (full - partial)
    if head > 0 and tail > 1e-12 * head:
        raise DivergenceError(
            f"tail bound {tail:.3e} exceeds 1e-12 of head {head:.6g} at K={K}; raise K"
        )
    return head + tail


# ---------------------------------------------------------------------------
# commutator error operators
# ---------------------------------------------------------------------------


def _apply_cosh_spectrum(spectrum: np.ndarray, grid, sigma: float) -> np.ndarray:
    logw = log_cosh(sigma * grid.xi)
    if sigma * grid.xi_max > _LOG_SWITCH:
        return apply_log_weight(spectrum, logw)
    return spectrum * np.exp(logw)


def _masked_spectrum(samples: np.ndarray, grid) -> np.ndarray:
    F = hermitian_project(np.fft.fft(samples) / grid.N)
    F[~dealias_mask(grid)] = 0.0
    return F


def operator_F(W: SpectralField, sigma: float, mu: int) -> SpectralField:
    """Cubic commutator error of the cosh weight:

        (mu/3) d_x [ dealias(W^3) - cosh(sigma D) dealias((sech(sigma D) W)^3) ].

    Vanishes identically at sigma = 0; for small sigma its L2 size scales
    like sigma^2 (both cubes see the same field to second order).
    """
    if mu not in (-1, 1):
        raise ConfigurationError(f"mu must be +-1, got {mu}")
    g = W.grid
    outer = _masked_spectrum(W.samples**3, g)
    inner = apply_multiplier(W, SechWeight(sigma))
    inner_cubed = _masked_spectrum(inner.samples**3, g)
    diff = outer - _apply_cosh_spectrum(inner_cubed, g, sigma)
    dx = 1j * g.xi.astype(float)
    out = (mu / 3.0) * dx * diff
    out[g.nyquist_index] = 0.0
    return synthesize(out, g)


def operator_G(W: SpectralField, a: DampingProfile, sigma: float) -> SpectralField:
    """Damping commutator error:

        dealias(a W) - cosh(sigma D) dealias(a * sech(sigma D) W).

    Zero for sigma = 0 and for constant a (constants commute with Fourier
    multipliers).  Both products carry the same dealias projection as the
    damping term inside the integrator, so the mass-rate identity closes
    exactly along discrete trajectories.
    """
    g = W.grid
    avals = a.values(g)
    first = _masked_spectrum(avals * W.samples, g)
    inner = apply_multiplier(W, SechWeight(sigma))
    prod = _masked_spectrum(avals * inner.samples, g)
    return synthesize(first - _apply_cosh_spectrum(prod, g, sigma), g)


# ---------------------------------------------------------------------------
# rate identities
# ---------------------------------------------------------------------------


def energy_rate_A(u: SpectralField, sigma: float, mu: int) -> FunctionalBreakdown:
    """Instantaneous drift of functional_A along the flow.

    With U = cosh(sigma D) u and F the cubic commutator error, the weighted
    field obeys the original equation forced by F(U), so the chain rule
    pairs F against the variational derivative of each energy term:

        dA/dt = 2 int U F + 2 int U_x F_x + 2 int U_xx F_xx
              - (2 mu/3) int U^3 F + (1/3) int U^5 F
              + (10 mu/3) int U U_x^2 F + (10 mu/3) int U^2 U_xx F.
    """
    if mu not in (-1, 1):
        raise ConfigurationError(f"mu must be +-1, got {mu}")
    U = apply_multiplier(u, CoshWeight(sigma))
    Ff = operator_F(U, sigma, mu)
    g = u.grid
    U0, U1, U2 = _refined_derivs(U, (0, 1, 2))
    F0, F1, F2 = _refined_derivs(Ff, (0, 1, 2))
    terms = {
        "pair_l2": 2.0 * _quad(g, U0, F0),
        "pair_deriv1": 2.0 * _quad(g, U1, F1),
        "pair_deriv2": 2.0 * _quad(g, U2, F2),
        "pair_cubic": -(2.0 * mu / 3.0) * _quad(g, U0, U0, U0, F0),
        "pair_quintic": (1.0 / 3.0) * _quad(g, U0, U0, U0, U0, U0, F0),
        "pair_grad_sq": (10.0 * mu / 3.0) * _quad(g, U0, U1, U1, F0),
        "pair_hess": (10.0 * mu / 3.0) * _quad(g, U0, U0, U2, F0),
    }
    return FunctionalBreakdown(total=sum(terms.values()), terms=terms)


def mass_rate_M(
    v: SpectralField, a: DampingProfile, sigma: float, mu: int, m: int
) -> tuple[float, float, float]:
    """Instantaneous drift of functional_M along the damped flow:

        dM/dt = -2 int a V^2 + 2 int (F(V) + G(V)) V,   V = cosh(sigma D) v.

    The dispersive and pure-cubic contributions vanish identically (odd
    pairings), leaving damping plus the two commutator errors.  Returns
    (total rate, damping term, commutator term).
    """
    V = apply_multiplier(v, CoshWeight(sigma))
    Ff = operator_F(V, sigma, mu)
    Gf = operator_G(V, a, sigma)
    g = v.grid
    V0 = _refined_derivs(V, (0,))[0]
    F0 = _refined_derivs(Ff, (0,))[0]
    G0 = _refined_derivs(Gf, (0,))[0]
    # the profile is analytic, so evaluate it on the doubled grid directly
    a_fine = a.values(make_grid(g.L, 2 * g.N))
    damping_term = -2.0 * _quad(g, a_fine, V0, V0)
    fg_term = 2.0 * _quad(g, F0 + G0, V0)
    return damping_term + fg_term, damping_term, fg_term


# ---------------------------------------------------------------------------
# index formulas, lifespan, sigma selection
# ---------------------------------------------------------------------------


def s_index(m: int) -> Fraction:
    """Critical regularity max{-(m-2)/6, -(14m-55)/60}, exact rational."""
    if m < 5 or m % 2 == 0:
        raise ConfigurationError(f"index formula needs odd m >= 5, got {m}")
    return max(Fraction(-(m - 2), 6), Fraction(-(14 * m - 55), 60))


def theta_max(m: int) -> Fraction:
    """Largest admissible drift exponent min{1, -s_index(m)}."""
    return min(Fraction(1), -s_index(m))


def lifespan_T0(a_norm: float, data_norm_sq: float, c0: float = 1.0, d: float = 2.0) -> float:
    """Local-existence window c0 / (1 + a_norm + data_norm_sq)^d.

    c0 and d are not pinned upstream; defaults (1, 2) are configuration.
    """
    if c0 <= 0:
        raise ConfigurationError(f"lifespan scale must be positive, got c0={c0}")
    if d <= 1:
        raise ConfigurationError(f"lifespan exponent must exceed 1, got d={d}")
    if a_norm < 0 or data_norm_sq < 0:
        raise ConfigurationError("norms must be nonnegative")
    return c0 / (1.0 + a_norm + data_norm_sq) ** d


def sigma_choice(
    sigma0: float,
    lam: float,
    T0: float,
    C1: float,
    a_norm: float,
    M0: float,
    theta: float,
) -> tuple[float, str]:
    """Radius for one iteration window: the three-way minimum

        min{ sigma0, b/(2 C1 a_norm), (b/(2 C1 M0))^(1/theta) },
        b = 1 - exp(-2 lam T0),

    evaluated with expm1 so tiny lam*T0 keeps full precision.  Returns
    (value, active_branch) with branch one of "cap", "damping", "data".
    """
    if theta == 0:
        raise ConfigurationError("degenerate exponent theta = 0: data branch undefined")
    if not 0.0 < theta <= 1.0:
        raise ConfigurationError(f"theta must lie in (0, 1], got {theta}")
    for name, val in (("sigma0", sigma0), ("lam", lam), ("T0", T0), ("C1", C1), ("a_norm", a_norm), ("M0", M0)):
        if val <= 0:
            raise ConfigurationError(f"{name} must be positive, got {val}")
    b = -math.expm1(-2.0 * lam * T0)
    candidates = {
        "cap": sigma0,
        "damping": b / (2.0 * C1 * a_norm),
        "data": (b / (2.0 * C1 * M0)) ** (1.0 / theta),
    }
    branch = min(candidates, key=candidates.get)
    return candidates[branch], branch


# ---------------------------------------------------------------------------
# radius estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiusFit:
    """Least-squares exponential-decay fit of a spectrum tail.

    sigma_hat is the estimated strip width (-slope of log|F_k| vs xi_k,
    clamped at 0); window is the (xi_lo, xi_hi) range actually fitted;
    residual the rms misfit.  clamped marks a positive slope; the
    superexponential flag marks spectra (entire functions) whose local decay
    rate keeps steepening across the window.
    """

    sigma_hat: float
    intercept: float
    window: tuple
    residual: float
    clamped: bool
    superexponential: bool
    n_modes: int


def radius_estimate(f: SpectralField, floor_rel: float = 1e-8) -> RadiusFit:
    """Fit the exponential decay rate of the positive-frequency tail.

    Modes are usable when |F_k| exceeds max(floor_rel, 1e-13) * max|F|; the
    top 10% (by frequency) of the usable set is dropped as dealiasing-
    contaminated.  Requires at least 12 surviving modes.
    """
    g = f.grid
    amps = np.abs(f.spectrum[1 : g.N // 2])
    xi = g.xi[1 : g.N // 2]
    peak = float(np.abs(f.spectrum).max())
    if peak == 0.0:
        raise UnderresolvedError("zero field has no spectral tail to fit")
    floor = max(floor_rel, 1e-13) * peak
    usable = np.nonzero(amps > floor)[0]
    if usable.size:
        keep = usable[: max(1, int(math.ceil(0.9 * usable.size)))]
    else:
        keep = usable
    if keep.size < 12:
        raise UnderresolvedError(
            f"only {keep.size} modes above the noise floor ({floor:.3e}); need >= 12"
        )
    x = xi[keep]
    y = np.log(amps[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    clamped = slope > 0
    half = keep.size // 2
    s_lo, _ = np.polyfit(x[:half], y[:half], 1)
    s_hi, _ = np.polyfit(x[half:], y[half:], 1)
    superexp = (s_hi < 0) and (s_lo < 0) and (abs(s_hi) > 1.25 * abs(s_lo))
    return RadiusFit(
        sigma_hat=max(0.0, float(-slope)),
        intercept=float(intercept),
        window=(float(x[0]), float(x[-1])),
        residual=resid,
        clamped=bool(clamped),
        superexponential=bool(superexp),
        n_modes=int(keep.size),
    )


def interpolation_check(v: SpectralField, sigma1: float) -> InequalityVerdict:
    """||v||_{H^{sigma1/2,0}} <= (||v||_L2 ||v||_{H^{sigma1,0}})^(1/2).

    Pointwise consequence of cosh^2(r/2) = (1 + cosh r)/2 <= cosh r for
    cosh r >= 1; the verdict carries the margin.
    """
    lhs = hsigma_norm(v, sigma1 / 2.0, 0.0)
    rhs = math.sqrt(hsigma_norm(v, 0.0, 0.0) * hsigma_norm(v, sigma1, 0.0))
    return _verdict(lhs, rhs, (sigma1,))
