"""Deterministic random-matrix computations.

The central object is the map ``psi(alpha) = alpha + y*alpha*int t/(alpha-t) dH``
which sends admissible population locations to limiting sample-eigenvalue
locations and whose increasing branches characterize the complement of the
limiting spectral distribution's support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import CapExceeded, DomainError, NoRootError, PoleError
from .spectrum import EigenSpectrum

__all__ = [
    "PsiCurve",
    "SupportIntervals",
    "psi",
    "psi_derivative",
    "build_psi_curve",
    "lsd_support",
    "enumerate_partitions",
    "lsd_moment",
    "companion_stieltjes",
    "invert_companion",
    "invert_companion_batch",
    "mp_density",
]

PARTITION_CAP = 12
_SCAN_POINTS = 4096


@dataclass
class PsiCurve:
    """psi evaluated on a grid with per-point admissibility flags."""

    alpha_grid: np.ndarray
    psi_values: np.ndarray
    admissible: np.ndarray

    def __post_init__(self):
        self.alpha_grid = np.asarray(self.alpha_grid, dtype=float)
        self.psi_values = np.asarray(self.psi_values, dtype=float)
        self.admissible = np.asarray(self.admissible, dtype=bool)
        if not (len(self.alpha_grid) == len(self.psi_values) == len(self.admissible)):
            raise ValueError("grid, values, and flags must have equal length")
        if np.any(np.diff(self.alpha_grid) <= 0):
            raise ValueError("alpha_grid must be strictly ascending")

    def to_json_dict(self):
        return {
            "alpha_grid": self.alpha_grid.tolist(),
            "psi_values": self.psi_values.tolist(),
            "admissible": self.admissible.tolist(),
        }


@dataclass
class SupportIntervals:
    """Disjoint ascending support intervals of the limiting distribution."""

    intervals: list
    upper_edge: float
    zero_atom: bool = False

    def __post_init__(self):
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError("interval bounds out of order")
        for (_, hi), (lo2, _) in zip(self.intervals, self.intervals[1:]):
            if hi > lo2:
                raise ValueError("intervals must be disjoint and ascending")

    @property
    def lower_edge(self):
        """Lower edge of the continuous bulk (the zero atom excluded)."""
        for lo, hi in self.intervals:
            if hi > lo or not self.zero_atom:
                return lo
        return self.intervals[0][0]

    def to_json_dict(self):
        return {
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "upper_edge": self.upper_edge,
            "zero_atom": self.zero_atom,
        }


def _check_alpha(H, alpha):
    if alpha == 0:
        raise DomainError("psi is undefined at alpha = 0")
    if H.in_support(alpha):
        raise DomainError(f"alpha = {alpha} lies in the PSD support")


def psi(H, y, alpha):
    """Sample-location map ``alpha + y*alpha*int t/(alpha-t) dH(t)``."""
    _check_alpha(H, alpha)
    return alpha + y * alpha * H.integral_t_over(alpha)


def psi_derivative(H, y, alpha):
    """Analytic derivative ``1 - y*int t^2/(alpha-t)^2 dH(t)``."""
    _check_alpha(H, alpha)
    return 1.0 - y * H.integral_t2_over_sq(alpha)


def _psi_batch(H, y, alphas):
    a = np.asarray(alphas, dtype=float)
    return a + y * a * H.integral_t_over_batch(a)


def _psi_derivative_batch(H, y, alphas):
    a = np.asarray(alphas, dtype=float)
    return 1.0 - y * H.integral_t2_over_sq_batch(a)


def build_psi_curve(H, y, alpha_grid):
    """Evaluate psi on a grid, flagging admissible points (psi' > 0)."""
    grid = np.asarray(alpha_grid, dtype=float)
    ok = np.array([not (a == 0 or H.in_support(a)) for a in grid])
    vals = np.full(len(grid), np.nan)
    adm = np.zeros(len(grid), dtype=bool)
    if ok.any():
        vals[ok] = _psi_batch(H, y, grid[ok])
        adm[ok] = _psi_derivative_batch(H, y, grid[ok]) > 0
    return PsiCurve(grid, vals, adm)


def _scan_components(H):
    """Connected components of the complement of ``support(H) ∪ {0}``."""
    blocks = H.support_blocks()
    pts = sorted({0.0} | {b for blk in blocks for b in blk})
    comps = [(-math.inf, pts[0])]
    for left, right in zip(pts, pts[1:]):
        if right <= left:
            continue
        mid = 0.5 * (left + right)
        if not H.in_support(mid):
            comps.append((left, right))
    comps.append((pts[-1], math.inf))
    return comps


def _component_grid(lo, hi, scale, n=_SCAN_POINTS):
    if math.isinf(lo) and math.isinf(hi):
        raise ValueError("unbounded component on both sides")
    if math.isinf(hi):
        off = np.exp(np.linspace(math.log(1e-9 * scale), math.log(1e9 * scale), n))
        return lo + off
    if math.isinf(lo):
        off = np.exp(np.linspace(math.log(1e-9 * scale), math.log(1e9 * scale), n))
        return (hi - off)[::-1]
    # Finite component: cluster points toward both endpoints.
    u = np.linspace(1e-7, 1.0 - 1e-7, n)
    s = 0.5 * (1.0 - np.cos(math.pi * u))
    return lo + (hi - lo) * s


def _refine_root(H, y, a, b, fa):
    """Bisect a sign change of psi' to high relative accuracy."""
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = psi_derivative(H, y, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
        if abs(b - a) <= 1e-12 * max(1.0, abs(mid)):
            break
    return 0.5 * (a + b)


def lsd_support(H, y):
    """Support of the limiting spectral distribution for PSD ``H``, ratio ``y``.

    Scans psi' over the complement of the PSD support, maps the critical
    points through psi, and takes the complement of the increasing-branch
    images.  Requires ``H`` to have bounded support.
    """
    if not math.isfinite(H.support_upper):
        raise DomainError("lsd_support requires a PSD with bounded support")
    scale = max(1.0, H.support_upper, H.moment(1))
    gaps = []
    for lo, hi in _scan_components(H):
        grid = _component_grid(lo, hi, scale)
        dvals = _psi_derivative_batch(H, y, grid)
        finite = np.isfinite(dvals)
        grid, dvals = grid[finite], dvals[finite]
        if len(grid) == 0:
            continue
        # Critical points: sign changes of psi' inside the component.
        crits = []
        signs = dvals > 0
        for i in np.nonzero(signs[:-1] != signs[1:])[0]:
            crits.append(_refine_root(H, y, grid[i], grid[i + 1], dvals[i]))
        # Maximal psi'-positive runs between consecutive breakpoints.
        breaks = [lo] + crits + [hi]
        for left, right in zip(breaks, breaks[1:]):
            probe = _run_probe(grid, dvals, left, right)
            if probe is None or not probe:
                continue
            lam_left = _endpoint_psi(H, y, left, lo, hi, side="left")
            lam_right = _endpoint_psi(H, y, right, lo, hi, side="right")
            if lam_left is None or lam_right is None:
                continue
            gaps.append((lam_left, lam_right))

    upper_candidates = [g[0] for g in gaps if math.isinf(g[1])]
    if not upper_candidates:
        raise DomainError("no unbounded increasing branch found; scan failed")
    upper_edge = max(upper_candidates)

    # Complement of the gaps within [0, upper_edge].
    finite_gaps = sorted(
        (max(g[0], 0.0), min(g[1], upper_edge))
        for g in gaps
        if g[1] > 0 and g[0] < upper_edge
    )
    intervals = []
    cursor = 0.0
    for glo, ghi in finite_gaps:
        if glo > cursor:
            intervals.append([cursor, glo])
        cursor = max(cursor, ghi)
    if cursor < upper_edge:
        intervals.append([cursor, upper_edge])

    zero_atom = y > 1
    # A degenerate [0, 0] interval is the zero atom when y > 1 and an
    # artifact of the open gap (0, edge) otherwise.
    if intervals and intervals[0] == [0.0, 0.0] and not zero_atom:
        intervals = intervals[1:]
    if zero_atom and (not intervals or intervals[0] != [0.0, 0.0]):
        if intervals and intervals[0][0] == 0.0:
            pass  # bulk reaches down to zero; atom merges with it
        else:
            intervals = [[0.0, 0.0]] + intervals
    return SupportIntervals([(lo, hi) for lo, hi in intervals], upper_edge, zero_atom)


def _run_probe(grid, dvals, left, right):
    """True when psi' > 0 on the (left, right) stretch of the component."""
    lo = left if math.isfinite(left) else -math.inf
    hi = right if math.isfinite(right) else math.inf
    mask = (grid > lo) & (grid < hi)
    if not mask.any():
        return None
    return bool(np.median(dvals[mask]) > 0)


def _endpoint_psi(H, y, point, comp_lo, comp_hi, side):
    """psi limit at a run endpoint; None marks a branch that cannot bound a gap."""
    if math.isinf(point):
        return -math.inf if point < 0 else math.inf
    if point == comp_lo or point == comp_hi:
        # Component boundary: 0 maps to 0; a support edge sends psi to
        # +/- infinity with psi' < 0, so an increasing run never ends there.
        if point == 0.0:
            return 0.0
        return None
    return psi(H, y, point)


def enumerate_partitions(j):
    """All tuples ``(i_1, ..., i_j)`` with ``sum(l * i_l) == j``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if j > PARTITION_CAP:
        raise CapExceeded(f"partition enumeration capped at j = {PARTITION_CAP}")
    out = []

    def rec(level, remaining, acc):
        if level > j:
            if remaining == 0:
                out.append(tuple(acc))
            return
        if remaining == 0:
            out.append(tuple(acc) + (0,) * (j - level + 1))
            return
        for count in range(remaining // level + 1):
            rec(level + 1, remaining - level * count, acc + [count])

    rec(1, j, [])
    return out


def lsd_moment(H, y, j):
    """j-th moment of the limiting distribution from the PSD moments."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if j > PARTITION_CAP:
        raise CapExceeded(f"moment linkage capped at j = {PARTITION_CAP}")
    betas = [H.moment(l) for l in range(1, j + 1)]
    total = 0.0
    for part in enumerate_partitions(j):
        s = sum(part)
        coeff = math.factorial(j)
        for i in part:
            coeff //= math.factorial(i)
        coeff //= math.factorial(j + 1 - s)
        term = y ** s * coeff
        for l, i in enumerate(part, start=1):
            if i:
                term *= betas[l - 1] ** i
        total += term
    return total / y


def _all_eigs(spectrum: EigenSpectrum):
    """All d eigenvalues, structural zeros included."""
    z = spectrum.structural_zeros
    if z == 0:
        return spectrum.values_desc
    return np.concatenate([spectrum.values_desc, np.zeros(z)])


def companion_stieltjes(spectrum: EigenSpectrum, u):
    """Sample companion Stieltjes transform at a real point off the spectrum."""
    if u == 0:
        raise PoleError("u = 0 is a pole of the companion transform")
    lam = _all_eigs(spectrum)
    if np.any(lam == u):
        raise PoleError(f"u = {u} coincides with a sample eigenvalue")
    d, n = spectrum.d, spectrum.n
    return -(1.0 - d / n) / u + np.sum(1.0 / (lam - u)) / n


def _companion_batch(lam, d, n, u):
    return -(1.0 - d / n) / u + np.sum(1.0 / (lam[:, None] - u[None, :]), axis=0) / n


def invert_companion(spectrum: EigenSpectrum, alpha, tol=1e-12):
    """Solve ``companion_stieltjes(u) = -1/alpha`` on ``(lambda_1, inf)``."""
    if alpha <= 0:
        raise NoRootError("alpha must be positive")
    out = invert_companion_batch(spectrum, np.array([alpha]), tol=tol)
    if not np.isfinite(out[0]):
        raise NoRootError(f"no root above the spectrum for alpha = {alpha}")
    return float(out[0])


def invert_companion_batch(spectrum: EigenSpectrum, alphas, tol=1e-12):
    """Vectorized inversion; entries are NaN where no bracket is found."""
    alphas = np.asarray(alphas, dtype=float)
    lam = _all_eigs(spectrum)
    d, n = spectrum.d, spectrum.n
    lam1 = lam[0] if len(lam) else 0.0
    scale = max(lam1, 1e-300)
    m1 = float(np.mean(lam)) if len(lam) else 0.0
    target = -1.0 / alphas

    lo = np.full_like(alphas, lam1 + 1e-13 * scale)
    # Push lo toward lambda_1 until the transform is below every target.
    for _ in range(60):
        bad = _companion_batch(lam, d, n, lo) >= target
        if not bad.any():
            break
        lo[bad] = lam1 + (lo[bad] - lam1) * 0.25
    hi = lam1 + alphas * (1.0 + (d / n) * m1)
    hi = np.maximum(hi, lo + scale * 1e-9)
    ok = np.ones_like(alphas, dtype=bool)
    for _ in range(200):
        below = _companion_batch(lam, d, n, hi) < target
        if not below.any():
            break
        hi[below] = lam1 + 2.0 * (hi[below] - lam1)
    else:
        ok &= ~below

    for _ in range(120):
        mid = 0.5 * (lo + hi)
        smid = _companion_batch(lam, d, n, mid)
        less = smid < target
        lo = np.where(less, mid, lo)
        hi = np.where(less, hi, mid)
    u = 0.5 * (lo + hi)
    resid = np.abs(_companion_batch(lam, d, n, u) - target)
    ok &= resid <= max(tol, 1e-9 * np.abs(target).max())
    return np.where(ok, u, np.nan)


def mp_density(sigma2, y, x):
    """Classical white-noise bulk density; the y > 1 zero atom is separate."""
    if sigma2 <= 0 or y <= 0:
        raise ValueError("sigma2 and y must be positive")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    a = sigma2 * (1.0 - math.sqrt(y)) ** 2
    b = sigma2 * (1.0 + math.sqrt(y)) ** 2
    out = np.zeros_like(x_arr)
    inside = (x_arr > a) & (x_arr < b) & (x_arr > 0)
    xi = x_arr[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2.0 * math.pi * sigma2 * y * xi)
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out[0])
    return out
