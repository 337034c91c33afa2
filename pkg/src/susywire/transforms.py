"""Variable changes back to momentum space and Hankel transforms.

The chain is ``q = p / sqrt(-2 E~)``, ``q = tan(beta/2)`` and
``Z_i = sqrt(p) * alpha(p) * F_i(p)`` with ``alpha = p^2/2 - E~``.
Radial momentum amplitudes connect to configuration space through
``F(p) = i^-nu int_0^inf rho f(rho) J_nu(p rho) d rho`` with
``nu = jz -+ 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special
from scipy.integrate import trapezoid

from .multiplets import epsilon_of
from .operators import SpinorState
from .trigring import HalfInt, TrigPoly, differentiate, eval_at

__all__ = [
    "HankelConvergenceError",
    "MomentumSpinor",
    "RadialFunction",
    "beta_to_p",
    "p_to_beta",
    "momentum_spinor",
    "coupled_residual",
    "hankel",
    "hankel_values",
    "hankel_roundtrip_error",
    "configuration_radial",
]


class HankelConvergenceError(ArithmeticError):
    """Adaptive Hankel quadrature did not reach its tolerance."""


def _kappa(E_tilde: float) -> float:
    if not E_tilde < 0:
        raise ValueError(f"bound states need E_tilde < 0, got {E_tilde}")
    return math.sqrt(-2.0 * E_tilde)


def beta_to_p(beta, E_tilde: float):
    """``p = tan(beta/2) sqrt(-2 E~)`` for ``0 < beta < pi``."""
    b = np.asarray(beta, dtype=float)
    if np.any((b <= 0) | (b >= math.pi)):
        raise ValueError("beta must lie in the open interval (0, pi)")
    p = np.tan(b / 2) * _kappa(E_tilde)
    return float(p) if np.ndim(beta) == 0 else p


def p_to_beta(p, E_tilde: float):
    """Inverse of :func:`beta_to_p` for ``p > 0``."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("p must be positive and finite")
    b = 2.0 * np.arctan(arr / _kappa(E_tilde))
    return float(b) if np.ndim(p) == 0 else b


@dataclass(frozen=True)
class MomentumSpinor:
    """Radial momentum amplitudes ``F_1, F_2`` of one exact state.

    ``phase_upper`` / ``phase_lower`` are the powers of ``i`` (mod 4) that
    multiply the Bessel integrals; all stored samples are real.
    """

    jz: HalfInt
    E_tilde: float
    G: float
    p: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    upper: TrigPoly
    lower: TrigPoly
    phase_upper: int
    phase_lower: int

    def alpha(self, p=None):
        p = self.p if p is None else np.asarray(p, dtype=float)
        return 0.5 * p * p - self.E_tilde

    def amplitudes(self, p) -> tuple[np.ndarray, np.ndarray]:
        """``(F_1, F_2)`` at arbitrary positive momenta."""
        p = np.asarray(p, dtype=float)
        beta = p_to_beta(p, self.E_tilde)
        denom = np.sqrt(p) * self.alpha(p)
        return np.asarray(eval_at(self.upper, beta)) / denom, np.asarray(eval_at(self.lower, beta)) / denom


def momentum_grid(E_tilde: float, points: int = 400) -> np.ndarray:
    k = _kappa(E_tilde)
    return k * np.logspace(-3, 3, points)


def momentum_spinor(Z: SpinorState, j, G: float, points: int = 400) -> MomentumSpinor:
    """Sample ``F_i(p) = Z_i(beta(p)) / (sqrt(p) alpha(p))`` at the level of ``j``."""
    if not G > 0:
        raise ValueError(f"G must be positive, got {G}")
    eps = float(epsilon_of(j))
    E_tilde = -(G * G) / (2 * eps)
    p = momentum_grid(E_tilde, points)
    beta = p_to_beta(p, E_tilde)
    denom = np.sqrt(p) * (0.5 * p * p - E_tilde)
    F1 = np.asarray(eval_at(Z.upper, beta)) / denom
    F2 = np.asarray(eval_at(Z.lower, beta)) / denom
    jz2 = Z.jz.twice
    # i^-(jz -+ 1/2), reduced mod 4
    phase_upper = (-(jz2 - 1) // 2) % 4
    phase_lower = (-(jz2 + 1) // 2) % 4
    return MomentumSpinor(Z.jz, E_tilde, G, p, F1, F2, Z.upper, Z.lower, phase_upper, phase_lower)


def _l2(p: np.ndarray, values: np.ndarray) -> float:
    return math.sqrt(float(trapezoid(values * values, p)))


def coupled_residual(M: MomentumSpinor, G: float | None = None) -> tuple[float, float]:
    """Relative residuals of the first-order momentum-space system.

    ``(d/dp - (jz-1/2)/p)(alpha F1) + G F2`` and
    ``(d/dp + (jz+1/2)/p)(alpha F2) - G F1``, each divided by the L2 norm
    of ``alpha F_i``. Derivatives are analytic: ``alpha F_i = Z_i / sqrt(p)``,
    the ring derivative of ``Z_i`` and ``dbeta/dp = 2 cos^2(beta/2) / sqrt(-2E~)``.
    """
    G = M.G if G is None else G
    p = M.p
    beta = p_to_beta(p, M.E_tilde)
    dbeta_dp = 2.0 * np.cos(beta / 2) ** 2 / _kappa(M.E_tilde)
    sqrt_p = np.sqrt(p)
    jz = float(M.jz)

    def d_dp(comp: TrigPoly) -> tuple[np.ndarray, np.ndarray]:
        Y = np.asarray(eval_at(comp, beta)) / sqrt_p
        dZ = np.asarray(eval_at(differentiate(comp), beta))
        return Y, dZ * dbeta_dp / sqrt_p - 0.5 * Y / p

    Y1, dY1 = d_dp(M.upper)
    Y2, dY2 = d_dp(M.lower)
    F1 = Y1 / M.alpha()
    F2 = Y2 / M.alpha()
    res1 = dY1 - (jz - 0.5) / p * Y1 + G * F2
    res2 = dY2 + (jz + 0.5) / p * Y2 - G * F1
    n1, n2 = _l2(p, Y1), _l2(p, Y2)
    r1 = _l2(p, res1) / n1 if n1 else _l2(p, res1)
    r2 = _l2(p, res2) / n2 if n2 else _l2(p, res2)
    return r1, r2


# Hankel transform

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_MAX_HALF_PERIODS = 200_000


def _bessel_zeros(nu: float, count: int) -> np.ndarray:
    """First ``count`` positive zeros of ``J_nu`` (cached in power-of-two blocks)."""
    size = 64
    while size < count:
        size *= 2
    return _bessel_zeros_block(nu, size)[:count]


@lru_cache(maxsize=64)
def _bessel_zeros_block(nu: float, count: int) -> np.ndarray:
    """Positive zeros of ``J_nu``: tabulated for integer order, McMahon otherwise."""
    k = np.arange(1, count + 1, dtype=float)
    b = (k + nu / 2 - 0.25) * math.pi
    mu = 4 * nu * nu
    approx = b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
    if float(nu).is_integer() and nu >= 0:
        exact_count = min(count, 200)
        approx[:exact_count] = special.jn_zeros(int(nu), exact_count)
    return approx


def _subpanels(a: float, b: float, scale: float) -> list[tuple[float, float]]:
    out = []
    x = a
    while x < b:
        step = max(scale, 0.25 * x)
        y = min(b, x + step)
        if b - y < 0.1 * step:
            y = b
        out.append((x, y))
        x = y
    return out


def _panel_nodes(panels: list[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([p[0] for p in panels])
    b = np.array([p[1] for p in panels])
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return x, w


def _wynn(sums: list[float]) -> float:
    """Wynn epsilon extrapolation of a sequence of partial sums."""
    eps_prev = [0.0] * (len(sums) + 1)
    eps_cur = list(sums)
    best = sums[-1]
    r = 0
    while len(eps_cur) > 1:
        nxt = []
        for k in range(len(eps_cur) - 1):
            diff = eps_cur[k + 1] - eps_cur[k]
            if diff == 0 or not math.isfinite(diff):
                return best
            nxt.append(eps_prev[k + 1] + 1.0 / diff)
        eps_prev, eps_cur = eps_cur, nxt
        r += 1
        if r % 2 == 0:
            best = eps_cur[-1]
    return best


def _decay_radius(func: Callable, scale: float, rtol: float) -> float | None:
    """Radius beyond which ``|rho f(rho)|`` stays below ``rtol`` times its peak.

    Probes outward geometrically from ``scale/1000`` and stops at the first
    run of 16 negligible probes past ``scale``; returns None when ``f`` is
    still significant at ``1e4 * scale`` (slowly decaying tail).
    """
    probe = scale * np.logspace(-3, 4, 113)
    peak = 0.0
    quiet = 0
    for start in range(0, len(probe), 8):
        x = probe[start : start + 8]
        vals = np.abs(x * np.asarray(func(x), dtype=float))
        for xi, v in zip(x, vals):
            peak = max(peak, float(v))
            if v <= rtol * 1e-3 * peak:
                quiet += 1
                if quiet == 1:
                    first_quiet = float(xi)
                if quiet >= 16 and xi > scale:
                    return first_quiet
            else:
                quiet = 0
    if peak == 0.0:
        return 0.0
    return None


def _integrand(func: Callable, nu: float, p: float, x: np.ndarray) -> np.ndarray:
    return x * np.asarray(func(x), dtype=float) * special.jv(nu, p * x)


def _moment_slow_tail(func: Callable, scale: float, rtol: float) -> float:
    """``int_0^inf rho f(rho) d rho`` over doubling shells, Wynn-accelerated."""
    edges = [0.0] + [scale * 2.0**k for k in range(64)]
    sums: list[float] = []
    total = 0.0
    last_est = None
    for a, b in zip(edges, edges[1:]):
        x, w = _panel_nodes(_subpanels(a, b, scale))
        total += math.fsum(w * x * np.asarray(func(x), dtype=float))
        sums.append(total)
        if len(sums) >= 8:
            est = _wynn(sums[-16:])
            if last_est is not None and abs(est - last_est) <= rtol * max(max(map(abs, sums)), 1e-300):
                return est
            last_est = est
    raise HankelConvergenceError("radial moment at p = 0 did not converge")


def _hankel_point(func: Callable, nu: float, p: float, scale: float, radius: float | None, rtol: float) -> float:
    if p == 0.0 and nu != 0:
        return 0.0
    if radius is not None:
        if radius == 0.0:
            return 0.0
        if p == 0.0:
            edges = [0.0, radius]
        else:
            zeros = _bessel_zeros(float(nu), int(radius * p / math.pi) + 3) / p
            edges = [0.0, *zeros[zeros < radius].tolist(), max(radius, float(zeros[-1]))]
        if len(edges) > _MAX_HALF_PERIODS:
            raise HankelConvergenceError(f"p={p} needs {len(edges)} half-periods")
        panels = [sp for a, b in zip(edges, edges[1:]) for sp in _subpanels(a, b, scale)]
        total = 0.0
        for k in range(0, len(panels), 4096):
            x, w = _panel_nodes(panels[k : k + 4096])
            total += math.fsum(w * _integrand(func, nu, p, x))
        return total

    if p == 0.0:
        return _moment_slow_tail(func, scale, rtol)
    # oscillatory tail: half-period sums, Wynn-accelerated
    sums: list[float] = []
    total = 0.0
    chunk = 32
    start = 0
    last_est = None
    for _ in range(200):
        zeros = _bessel_zeros(float(nu), start + chunk) / p
        edges = ([0.0] if start == 0 else [float(zeros[start - 1])]) + zeros[start : start + chunk].tolist()
        for a, b in zip(edges, edges[1:]):
            x, w = _panel_nodes(_subpanels(a, b, scale))
            total += math.fsum(w * _integrand(func, nu, p, x))
            sums.append(total)
        start += chunk
        est = _wynn(sums[-24:])
        # relative to the largest partial sum, so heavy cancellation still terminates
        if last_est is not None and abs(est - last_est) <= rtol * max(max(map(abs, sums)), 1e-300):
            return est
        last_est = est
    raise HankelConvergenceError(f"Hankel quadrature at p={p} did not converge")


@dataclass(frozen=True)
class RadialFunction:
    """Samples of a radial function, plus an evaluator for off-grid points."""

    grid: np.ndarray
    values: np.ndarray
    order: float
    func: Callable | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if np.any(np.diff(self.grid) <= 0) or np.any(self.grid <= 0):
            raise ValueError("grid must be positive and strictly increasing")
        if not self.order > -1:
            raise ValueError(f"order must exceed -1, got {self.order}")

    @classmethod
    def from_callable(cls, func: Callable, grid, order: float, scale: float = 1.0) -> "RadialFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=float), order, func, scale)

    def __call__(self, x):
        if self.func is None:
            raise ValueError("radial function carries samples only")
        return self.func(x)


def hankel_values(func: Callable, nu: float, p, scale: float = 1.0, rtol: float = 1e-11) -> np.ndarray:
    """``g(p) = int_0^inf rho f(rho) J_nu(p rho) d rho`` at each ``p``.

    Panels end on the zeros of ``J_nu(p rho)`` and are split further so no
    panel is wider than ``max(scale, rho/4)``; each carries a 24-point
    Gauss-Legendre rule. A compactly decaying ``f`` is integrated up to
    its decay radius in one pass; otherwise half-period partial sums are
    accelerated with Wynn's epsilon algorithm.
    """
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(p_arr < 0):
        raise ValueError("momenta must be non-negative")
    radius = _decay_radius(func, scale, rtol)
    out = np.array([_hankel_point(func, nu, float(pk), scale, radius, rtol) for pk in p_arr])
    return out if np.ndim(p) else out[0]


def hankel(f: RadialFunction, order: float | None = None, grid=None) -> RadialFunction:
    """Hankel transform of ``f``; the result evaluates lazily off its grid."""
    if f.func is None:
        raise ValueError("hankel needs an evaluable radial function")
    nu = f.order if order is None else order
    grid = f.grid if grid is None else np.asarray(grid, dtype=float)
    func, scale = f.func, f.scale

    def transformed(x):
        return hankel_values(func, nu, x, scale=1.0 / scale if scale else 1.0)

    return RadialFunction(grid, np.asarray(hankel_values(func, nu, grid, scale=scale)), nu, transformed, 1.0 / scale if scale else 1.0)


def hankel_roundtrip_error(f: RadialFunction, order: float | None = None) -> float:
    """Relative L2 distance of ``hankel(hankel(f))`` from ``f`` on ``f.grid``."""
    g = hankel(f, order)
    back = hankel(g, order, grid=f.grid)
    return float(np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values))


def configuration_radial(M: MomentumSpinor, component: int, rho) -> tuple[np.ndarray, int]:
    """Configuration-space radial function ``f_i(rho)`` and its power of ``i``.

    Inverts ``F_i = i^-nu H_nu[f_i]`` using the self-inverse Hankel
    transform, with ``J_-n = (-1)^n J_n`` for negative integer order.
    """
    if component not in (1, 2):
        raise ValueError("component must be 1 (upper) or 2 (lower)")
    nu = float(M.jz) - 0.5 if component == 1 else float(M.jz) + 0.5
    sign = 1.0
    if nu < 0:
        sign = (-1.0) ** int(-nu)
        nu = -nu

    def amplitude(p):
        return M.amplitudes(p)[component - 1]

    values = sign * np.asarray(hankel_values(amplitude, nu, rho, scale=_kappa(M.E_tilde)))
    phase = (M.phase_upper if component == 1 else M.phase_lower)
    return values, (-phase) % 4
