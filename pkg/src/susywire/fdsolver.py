"""Staggered-grid finite differences for the partner Hamiltonians.

``A = d/dbeta + W`` is discretized from primal nodes ``beta_i = i h``
(``i = 1..n``, Dirichlet at both ends) to dual nodes ``beta_{i+1/2}``.
The discrete ``A_dag`` is the exact transpose, so ``H_- = A^T A`` and
``H_+ = A A^T`` are symmetric positive semidefinite tridiagonal matrices
that share their nonzero spectrum bit-for-bit in exact arithmetic.

Low eigenvalues come from Sturm-sequence bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .multiplets import build_multiplet, sector_levels
from .operators import SectorParams
from .trigring import HalfInt, eval_at

__all__ = [
    "Grid",
    "TridiagonalSym",
    "BidiagonalA",
    "discretize_A",
    "assemble_H",
    "sturm_count",
    "eigen_lowest",
    "eigen_all",
    "physical_levels",
    "ConvergenceStudy",
    "convergence_study",
    "extrapolate",
    "compare_with_exact",
    "exact_sector_levels",
]

Sign = Literal["+", "-"]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[0, pi]`` with ``n`` interior primal nodes."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 interior nodes, got {self.n}")

    @property
    def h(self) -> float:
        return math.pi / (self.n + 1)

    @property
    def primal(self) -> np.ndarray:
        return self.h * np.arange(1, self.n + 1)

    @property
    def dual(self) -> np.ndarray:
        return self.h * (np.arange(self.n + 1) + 0.5)


@dataclass(frozen=True)
class TridiagonalSym:
    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self) -> None:
        if len(self.off) != max(len(self.diag) - 1, 0):
            raise ValueError("off-diagonal must have length dim - 1")

    @property
    def dim(self) -> int:
        return len(self.diag)

    def norm_inf(self) -> float:
        absoff = np.abs(self.off)
        row = np.abs(self.diag).copy()
        row[:-1] += absoff
        row[1:] += absoff
        return float(row.max())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True)
class BidiagonalA:
    """``(n+1) x n`` matrix: row ``r`` has ``left[r]`` at column ``r-1`` and ``right[r]`` at column ``r``."""

    grid: Grid
    left: np.ndarray  # left[0] unused (f_0 = 0)
    right: np.ndarray  # right[n] unused (f_{n+1} = 0)

    def matvec(self, f: np.ndarray) -> np.ndarray:
        n = self.grid.n
        out = np.zeros(n + 1)
        out[:n] += self.right[:n] * f
        out[1:] += self.left[1:] * f
        return out

    def rmatvec(self, g: np.ndarray) -> np.ndarray:
        n = self.grid.n
        return self.right[:n] * g[:n] + self.left[1:] * g[1:]

    def to_dense(self) -> np.ndarray:
        n = self.grid.n
        M = np.zeros((n + 1, n))
        M[np.arange(n), np.arange(n)] = self.right[:n]
        M[np.arange(1, n + 1), np.arange(n)] = self.left[1:]
        return M


def discretize_A(jz, grid: Grid) -> BidiagonalA:
    """Row ``i+1/2``: ``(f_{i+1} - f_i)/h + W(beta_{i+1/2}) (f_i + f_{i+1})/2``, ``W = jz / sin(beta)``."""
    jz = HalfInt.of(jz)
    h = grid.h
    W = float(jz) / np.sin(grid.dual)
    left = -1.0 / h + 0.5 * W
    right = 1.0 / h + 0.5 * W
    return BidiagonalA(grid, left, right)


def assemble_H(jz, sign: Sign, grid: Grid) -> TridiagonalSym:
    """``H_- = A^T A`` on primal nodes, ``H_+ = A A^T`` on dual nodes."""
    A = discretize_A(jz, grid)
    n = grid.n
    if sign == "-":
        diag = A.right[:n] ** 2 + A.left[1:] ** 2
        off = A.left[1:n] * A.right[1:n]
    elif sign == "+":
        diag = np.zeros(n + 1)
        diag[1:] += A.left[1:] ** 2
        diag[:n] += A.right[:n] ** 2
        off = A.right[:n] * A.left[1:]
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return TridiagonalSym(diag, off)


def _pivmin(H: TridiagonalSym) -> float:
    e2max = float(np.max(H.off**2)) if H.off.size else 0.0
    return np.finfo(float).tiny * max(1.0, e2max)


def sturm_count(H: TridiagonalSym, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (LDL^T pivot signs)."""
    d = H.diag.tolist()
    e2 = (H.off**2).tolist()
    pivmin = _pivmin(H)
    return _count(d, e2, lam, pivmin)


def _count(d: list[float], e2: list[float], lam: float, pivmin: float) -> int:
    q = d[0] - lam
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0 else 0
    for i in range(1, len(d)):
        q = d[i] - lam - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _count_many(d: np.ndarray, e2: np.ndarray, lam: np.ndarray, pivmin: float) -> np.ndarray:
    q = d[0] - lam
    q[np.abs(q) < pivmin] = -pivmin
    count = (q < 0).astype(int)
    for i in range(1, len(d)):
        q = d[i] - lam - e2[i - 1] / q
        q[np.abs(q) < pivmin] = -pivmin
        count += q < 0
    return count


def _gershgorin(H: TridiagonalSym) -> tuple[float, float]:
    absoff = np.abs(H.off)
    radius = np.zeros(H.dim)
    radius[:-1] += absoff
    radius[1:] += absoff
    return float(np.min(H.diag - radius)), float(np.max(H.diag + radius))


def _bisect_indices(H: TridiagonalSym, indices: np.ndarray) -> np.ndarray:
    lo0, hi0 = _gershgorin(H)
    span = max(hi0 - lo0, 1.0)
    lo = np.full(len(indices), lo0 - 1e-3 * span)
    hi = np.full(len(indices), hi0 + 1e-3 * span)
    eps = np.finfo(float).eps
    pivmin = _pivmin(H)
    d_list, e2_list = H.diag.tolist(), (H.off**2).tolist()
    vectorized = len(indices) > 8
    for _ in range(200):
        width = hi - lo
        active = width > 2 * eps * np.maximum(np.abs(lo), np.abs(hi)) + pivmin
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        if vectorized:
            counts = _count_many(H.diag, H.off**2, mid[active].copy(), pivmin)
        else:
            counts = np.array([_count(d_list, e2_list, float(m), pivmin) for m in mid[active]])
        below = counts > indices[active]
        idx = np.flatnonzero(active)
        hi[idx[below]] = mid[idx[below]]
        lo[idx[~below]] = mid[idx[~below]]
    return 0.5 * (lo + hi)


def eigen_lowest(H: TridiagonalSym, levels: int) -> np.ndarray:
    """The ``levels`` smallest eigenvalues, ascending, by Sturm bisection to full precision."""
    if not 1 <= levels <= H.dim:
        raise ValueError(f"levels must be in 1..{H.dim}, got {levels}")
    return np.sort(_bisect_indices(H, np.arange(levels)))


def eigen_all(H: TridiagonalSym) -> np.ndarray:
    return eigen_lowest(H, H.dim)


def physical_levels(jz, sign: Sign, grid: Grid, levels: int) -> np.ndarray:
    """Lowest ``levels`` eigenvalues of the sector, without the structural null mode.

    ``A`` maps ``n`` primal values to ``n+1`` dual values, so ``A A^T`` always
    has one exact zero eigenvalue that has no continuum counterpart; it is
    dropped for ``sign = '+'``.
    """
    H = assemble_H(jz, sign, grid)
    if sign == "+":
        return eigen_lowest(H, levels + 1)[1:]
    return eigen_lowest(H, levels)


# convergence and extrapolation


def _power_limit(ns: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Fit ``y = L + C n^-p`` through three points; returns ``(L, p)``."""
    (n1, n2, n3), (y1, y2, y3) = ns, ys
    d1, d2 = y2 - y1, y3 - y2
    if d1 == 0 or d2 == 0 or d1 / d2 <= 0:
        return y3, float("nan")
    target = d1 / d2

    def mismatch(p: float) -> float:
        return (n1**-p - n2**-p) / (n2**-p - n3**-p) - target

    if n2 / n1 == n3 / n2:
        ratio = n2 / n1
        if target <= 1:
            return y3, float("nan")
        p = math.log(target) / math.log(ratio)
    else:
        try:
            p = brentq(mismatch, 1e-6, 50.0)
        except ValueError:
            return y3, float("nan")
    C = d2 / (n3**-p - n2**-p)
    return y3 - C * n3**-p, p


def _log_limit(ns: Sequence[float], ys: Sequence[float]) -> float:
    """Fit ``y = L + C / (ln n + D)`` through three points (linear in ``L``)."""
    x1, x2, x3 = (math.log(n) for n in ns)
    y1, y2, y3 = ys
    a = (y1 - y2) * (x3 - x2)
    b = (y2 - y3) * (x2 - x1)
    if a == b:
        return y3
    return (a * y3 - b * y1) / (a - b)


def extrapolate(ns: Sequence[int], ys: Sequence[float]) -> tuple[float, str, float, float]:
    """Extrapolate a refinement sequence to ``n -> infinity``.

    Two error models are tried: algebraic ``C n^-p`` (Richardson with the
    observed order) and logarithmic ``C / (ln n + D)``, which is what a
    Dirichlet node next to an inverse-square critical endpoint produces.
    With four or more points the model whose limit moves least between
    the last two windows is chosen. Returns ``(limit, model, order, spread)``.
    """
    if len(ns) < 3:
        raise ValueError("extrapolation needs at least three refinement levels")
    windows = [(ns[i : i + 3], ys[i : i + 3]) for i in range(len(ns) - 2)]
    power = [_power_limit(w_n, w_y) for w_n, w_y in windows]
    logs = [_log_limit(w_n, w_y) for w_n, w_y in windows]
    order = power[-1][1]
    if len(windows) == 1:
        return power[-1][0], "power", order, float("nan")
    spread_pow = abs(power[-1][0] - power[-2][0])
    spread_log = abs(logs[-1] - logs[-2])
    if math.isnan(order) or spread_log < spread_pow:
        return logs[-1], "log", order, spread_log
    return power[-1][0], "power", order, spread_pow


@dataclass
class ConvergenceStudy:
    jz: HalfInt
    sign: Sign
    n_list: list[int]
    eigenvalues: np.ndarray  # shape (len(n_list), levels)
    extrapolated: np.ndarray
    models: list[str]
    orders: np.ndarray
    monotone: np.ndarray
    flags: list[str] = field(default_factory=list)


def convergence_study(jz, sign: Sign, levels: int, n_list: Sequence[int]) -> ConvergenceStudy:
    """Lowest ``levels`` eigenvalues over a refinement list, with extrapolated limits."""
    n_list = list(n_list)
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending with at least 3 entries")
    jz = HalfInt.of(jz)
    eig = np.array([physical_levels(jz, sign, Grid(n), levels) for n in n_list])
    limits, models, orders, monotone, flags = [], [], [], [], []
    for lev in range(levels):
        limit, model, order, _ = extrapolate(n_list, eig[:, lev].tolist())
        errs = np.abs(eig[:, lev] - limit)
        mono = bool(np.all(np.diff(errs) < 0))
        limits.append(limit)
        models.append(model)
        orders.append(order)
        monotone.append(mono)
        if not mono:
            flags.append(f"level {lev}: error sequence is not monotone")
    return ConvergenceStudy(jz, sign, n_list, eig, np.array(limits), models, np.array(orders), np.array(monotone), flags)


def _eigvec(H: TridiagonalSym, lam: float, iterations: int = 3) -> np.ndarray:
    m = H.dim
    shift = lam - 1e-10 * max(1.0, abs(lam))
    ab = np.zeros((3, m))
    ab[0, 1:] = H.off
    ab[1] = H.diag - shift
    ab[2, :-1] = H.off
    v = np.ones(m) / math.sqrt(m)
    for _ in range(iterations):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    return v


def compare_with_exact(jz, sign: Sign, j, grid: Grid) -> tuple[float, float]:
    """Rayleigh quotient of the sampled exact eigenfunction and its L2 distance to the nearest discrete eigenvector."""
    jz, j = HalfInt.of(jz), HalfInt.of(j)
    if abs(jz) > j:
        raise ValueError(f"no exact state with jz={jz} in multiplet j={j}")
    Z = build_multiplet(j).states[jz]
    comp, nodes = (Z.upper, grid.dual) if sign == "+" else (Z.lower, grid.primal)
    H = assemble_H(jz, sign, grid)
    v = np.asarray(eval_at(comp, nodes), dtype=float)
    v /= np.linalg.norm(v)
    rayleigh = float(v @ H.matvec(v))

    below = sturm_count(H, rayleigh)
    candidates = [i for i in (below - 1, below) if 0 <= i < H.dim]
    lams = _bisect_indices(H, np.array(candidates))
    lam = float(lams[np.argmin(np.abs(lams - rayleigh))])
    u = _eigvec(H, lam)
    if u @ v < 0:
        u = -u
    # both vectors have unit discrete L2 norm, where the weight h cancels
    return rayleigh, float(np.linalg.norm(u - v))


def exact_sector_levels(jz, sign: Sign, levels: int) -> list[float]:
    return [float(x) for x in sector_levels(SectorParams(HalfInt.of(jz), sign), levels)]
