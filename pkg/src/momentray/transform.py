"""The line transform, its dual, exact fibers, and box-pair pairings.

For a union of boxes E the fiber {s in I : gamma(x, s) in E} is solved in
closed form: each box contributes an intersection of per-coordinate
constraints that are linear in s (forward family) or monomial in t (dual
family), so fiber measures are exact and the only quadrature happens in
outer integrals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .sets import Box, BoxUnionSet, FiberSet, Interval

_CHUNK_LIMIT = 1 << 22


@dataclass(frozen=True)
class QuadSpec:
    """Outer-integral quadrature for the box-pair pairings.

    "layered" (default) applies composite midpoint along the first
    coordinate only and integrates the remaining coordinates and the line
    parameter exactly, so its error is one-dimensional regardless of the
    ambient dimension.  "midpoint" is a full per-axis tensor midpoint rule
    and "montecarlo" draws seeded uniform samples per box.
    """

    method: str = "layered"
    step: float = 1.0 / 512.0
    samples: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("layered", "midpoint", "montecarlo"):
            raise ValueError("method must be 'layered', 'midpoint' or 'montecarlo'")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def default_quad(dim):
    """Default layered spec; the step is a first-axis resolution."""
    return QuadSpec()


def _interval_pair(interval):
    if isinstance(interval, Interval):
        return interval.lo, interval.hi
    lo, hi = float(interval[0]), float(interval[1])
    if hi < lo:
        raise ValueError("interval upper end below lower end")
    return lo, hi


# ---------------------------------------------------------------------------
# exact fibers, scalar path


def _primal_fiber_box(blo, bhi, x, lo, hi):
    """Intersection of {s : gamma(x, s) in box} with [lo, hi], or None."""
    slo = max(lo, blo[0])
    shi = min(hi, bhi[0])
    x1 = x[0]
    for j in range(1, len(x)):
        coef = x1**j
        if coef == 0.0:
            if not (blo[j] <= x[j] <= bhi[j]):
                return None
            continue
        a = (blo[j] - x[j]) / coef
        b = (bhi[j] - x[j]) / coef
        if coef < 0.0:
            a, b = b, a
        slo = max(slo, a)
        shi = min(shi, b)
        if shi < slo:
            return None
    return (slo, shi) if shi >= slo else None


def _odd_root(v, j):
    return float(np.sign(v) * np.abs(v) ** (1.0 / j))


def _dual_fiber_box(blo, bhi, x, lo, hi):
    """Components of {t : gamma_star(x, t) in box} inside [lo, hi]."""
    comps = [(max(lo, blo[0]), min(hi, bhi[0]))]
    if comps[0][1] < comps[0][0]:
        return []
    x1 = x[0]
    for j in range(1, len(x)):
        # constraint: x1 * t^j in [x_j - bhi_j, x_j - blo_j]
        tlo = x[j] - bhi[j]
        thi = x[j] - blo[j]
        if x1 == 0.0:
            if tlo <= 0.0 <= thi:
                continue
            return []
        mlo, mhi = sorted((tlo / x1, thi / x1))
        if j % 2 == 1:
            pieces = [(_odd_root(mlo, j), _odd_root(mhi, j))]
        else:
            if mhi < 0.0:
                return []
            hi_root = mhi ** (1.0 / j)
            if mlo <= 0.0:
                pieces = [(-hi_root, hi_root)]
            else:
                lo_root = mlo ** (1.0 / j)
                pieces = [(-hi_root, -lo_root), (lo_root, hi_root)]
        comps = [
            (max(a, c), min(b, e))
            for a, b in comps
            for c, e in pieces
            if min(b, e) >= max(a, c)
        ]
        if not comps:
            return []
    return comps


def line_fiber(region, x, interval, dual=False):
    """Exact parameter set where the line through x meets the box union."""
    lo, hi = _interval_pair(interval)
    x = np.asarray(x, dtype=float)
    if x.size != region.dim:
        raise ValueError("point dimension does not match the set")
    pieces = []
    for blo, bhi in zip(region.los, region.his):
        if dual:
            pieces.extend(_dual_fiber_box(blo, bhi, x, lo, hi))
        else:
            piece = _primal_fiber_box(blo, bhi, x, lo, hi)
            if piece is not None:
                pieces.append(piece)
    return FiberSet(pieces)


# ---------------------------------------------------------------------------
# exact fibers, batch path (measures only)


def _primal_measures(region, X, lo, hi):
    n, d = X.shape
    x1 = X[:, 0]
    powers = x1[:, None] ** np.arange(1, d)[None, :]
    total = np.zeros(n)
    for blo, bhi in zip(region.los, region.his):
        slo = np.full(n, max(lo, blo[0]))
        shi = np.full(n, min(hi, bhi[0]))
        for j in range(1, d):
            coef = powers[:, j - 1]
            cj = X[:, j]
            with np.errstate(divide="ignore", invalid="ignore"):
                a = (blo[j] - cj) / coef
                b = (bhi[j] - cj) / coef
            lo_j = np.where(coef > 0, a, b)
            hi_j = np.where(coef > 0, b, a)
            zero = coef == 0.0
            if np.any(zero):
                ok = (cj >= blo[j]) & (cj <= bhi[j])
                lo_j = np.where(zero, np.where(ok, -np.inf, np.inf), lo_j)
                hi_j = np.where(zero, np.where(ok, np.inf, -np.inf), hi_j)
            slo = np.maximum(slo, lo_j)
            shi = np.minimum(shi, hi_j)
        total += np.clip(shi - slo, 0.0, None)
    return total


def _dual_measures(region, X, lo, hi):
    n, d = X.shape
    x1 = X[:, 0]
    zero = x1 == 0.0
    total = np.zeros(n)
    for blo, bhi in zip(region.los, region.his):
        comp_lo = [np.full(n, max(lo, blo[0]))]
        comp_hi = [np.full(n, min(hi, bhi[0]))]
        for j in range(1, d):
            tlo = X[:, j] - bhi[j]
            thi = X[:, j] - blo[j]
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = tlo / x1
                r2 = thi / x1
            mlo = np.minimum(r1, r2)
            mhi = np.maximum(r1, r2)
            if np.any(zero):
                ok = (tlo <= 0.0) & (0.0 <= thi)
                mlo = np.where(zero, np.where(ok, -np.inf, np.inf), mlo)
                mhi = np.where(zero, np.where(ok, np.inf, -np.inf), mhi)
            inv = 1.0 / j
            if j % 2 == 1:
                if j == 1:
                    s1_lo, s1_hi = mlo, mhi
                else:
                    s1_lo = np.sign(mlo) * np.abs(mlo) ** inv
                    s1_hi = np.sign(mhi) * np.abs(mhi) ** inv
                s2_lo = np.full(n, np.inf)
                s2_hi = np.full(n, -np.inf)
            else:
                hi_root = np.maximum(mhi, 0.0) ** inv
                lo_root = np.maximum(mlo, 0.0) ** inv
                feasible = mhi >= 0.0
                split = feasible & (mlo > 0.0)
                s1_lo = np.where(feasible, np.where(split, lo_root, -hi_root), np.inf)
                s1_hi = np.where(feasible, hi_root, -np.inf)
                s2_lo = np.where(split, -hi_root, np.inf)
                s2_hi = np.where(split, -lo_root, -np.inf)
            new_lo, new_hi = [], []
            for clo, chi in zip(comp_lo, comp_hi):
                new_lo.append(np.maximum(clo, s1_lo))
                new_hi.append(np.minimum(chi, s1_hi))
                if np.any(s2_lo <= s2_hi):
                    new_lo.append(np.maximum(clo, s2_lo))
                    new_hi.append(np.minimum(chi, s2_hi))
            comp_lo, comp_hi = new_lo, new_hi
        for clo, chi in zip(comp_lo, comp_hi):
            total += np.clip(chi - clo, 0.0, None)
    return total


def fiber_measure_batch(region, points, interval, dual=False):
    """Exact fiber measures for a batch of points, shape (n, d) -> (n,)."""
    lo, hi = _interval_pair(interval)
    X = np.asarray(points, dtype=float)
    squeeze = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != region.dim:
        raise ValueError("point dimension does not match the set")
    out = _dual_measures(region, X, lo, hi) if dual else _primal_measures(region, X, lo, hi)
    return float(out[0]) if squeeze else out


# ---------------------------------------------------------------------------
# grid functions


class GridFunction:
    """Multilinear interpolant of grid values, zero outside its box."""

    def __init__(self, origin, spacing, values):
        self.values = np.asarray(values, dtype=float)
        self.origin = np.asarray(origin, dtype=float)
        spacing = np.asarray(spacing, dtype=float)
        if spacing.ndim == 0:
            spacing = np.full(self.values.ndim, float(spacing))
        self.spacing = spacing
        if self.origin.size != self.values.ndim or self.spacing.size != self.values.ndim:
            raise ValueError("origin/spacing must match the value array rank")
        if np.any(self.spacing <= 0):
            raise ValueError("spacing must be positive")
        if min(self.values.shape) < 2:
            raise ValueError("need at least two grid nodes per axis")

    @property
    def dim(self):
        return self.values.ndim

    def support_box(self):
        extent = self.origin + self.spacing * (np.array(self.values.shape) - 1)
        return Box(np.stack([self.origin, extent], axis=1))

    def __call__(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        u = (p - self.origin) / self.spacing
        shape = np.array(self.values.shape)
        inside = np.all(u >= 0.0, axis=1) & np.all(u <= shape - 1, axis=1)
        i0 = np.clip(np.floor(u).astype(int), 0, shape - 2)
        frac = u - i0
        out = np.zeros(p.shape[0])
        for corner in itertools.product((0, 1), repeat=self.dim):
            idx = tuple((i0[:, a] + corner[a]) for a in range(self.dim))
            weight = np.ones(p.shape[0])
            for a in range(self.dim):
                weight *= frac[:, a] if corner[a] else (1.0 - frac[:, a])
            out += weight * self.values[idx]
        out[~inside] = 0.0
        if np.asarray(points).ndim == 1:
            return float(out[0])
        return out


# ---------------------------------------------------------------------------
# the transform and its dual on points


def _is_simple_function(f):
    return hasattr(f, "weights") and hasattr(f, "supports")


def _line_integral(f, points, interval, dual, quad):
    lo, hi = _interval_pair(interval)
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(f, BoxUnionSet):
        return fiber_measure_batch(f, X, (lo, hi), dual=dual)
    if _is_simple_function(f):
        out = np.zeros(X.shape[0])
        for w, support in zip(f.weights, f.supports):
            out += w * fiber_measure_batch(support, X, (lo, hi), dual=dual)
        return out
    if isinstance(f, GridFunction):
        quad = quad or default_quad(f.dim)
        if quad.method != "midpoint":
            raise ValueError("grid integrands use midpoint quadrature")
        n = max(1, int(np.ceil((hi - lo) / quad.step)))
        h = (hi - lo) / n
        svals = lo + (np.arange(n) + 0.5) * h
        d = X.shape[1]
        out = np.zeros(X.shape[0])
        block = max(1, _CHUNK_LIMIT // max(n, 1))
        for start in range(0, X.shape[0], block):
            Xb = X[start : start + block]
            pts = np.empty((Xb.shape[0], n, d))
            if dual:
                pts[:, :, 0] = svals[None, :]
                for j in range(1, d):
                    pts[:, :, j] = Xb[:, None, j] - Xb[:, None, 0] * svals[None, :] ** j
            else:
                pts[:, :, 0] = svals[None, :]
                for j in range(1, d):
                    pts[:, :, j] = Xb[:, None, j] + svals[None, :] ** j * Xb[:, None, 0]
            vals = f(pts.reshape(-1, d)).reshape(Xb.shape[0], n)
            out[start : start + block] = vals.sum(axis=1) * h
        return out
    raise TypeError(f"unsupported integrand type: {type(f).__name__}")


def apply_x(f, interval, x, quad=None):
    """Line transform of f at x: integral of f(gamma(x, s)) over s in I.

    Exact for box unions and simple functions; midpoint quadrature for grid
    functions.  Accepts a single point (d,) or a batch (n, d).
    """
    out = _line_integral(f, x, interval, dual=False, quad=quad)
    return float(out[0]) if np.asarray(x).ndim == 1 else out


def apply_x_star(g, window, x, quad=None):
    """Dual transform of g at x over the parameter window.

    Errors when g's first-axis support is not covered by the window, since
    the window would silently truncate the integral.
    """
    lo, hi = _interval_pair(window)
    if isinstance(g, BoxUnionSet):
        span = g.first_axis_span()
    elif _is_simple_function(g):
        spans = [s.first_axis_span() for s in g.supports]
        span = Interval(min(s.lo for s in spans), max(s.hi for s in spans))
    elif isinstance(g, GridFunction):
        span = g.support_box().interval(0)
    else:
        raise TypeError(f"unsupported integrand type: {type(g).__name__}")
    if span.lo < lo - 1e-12 or span.hi > hi + 1e-12:
        raise ValueError(
            f"window [{lo}, {hi}] does not cover the support's first-axis span "
            f"[{span.lo}, {span.hi}]"
        )
    out = _line_integral(g, x, window, dual=True, quad=quad)
    return float(out[0]) if np.asarray(x).ndim == 1 else out


# ---------------------------------------------------------------------------
# box-pair pairing <X chi_E, chi_F>


def _grid_axes(lo, hi, step):
    n = max(1, int(np.ceil((hi - lo) / step - 1e-12)))
    w = (hi - lo) / n
    centers = lo + (np.arange(n) + 0.5) * w
    return centers, w


def _midpoint_box_sum(values_fn, blo, bhi, step):
    axes, widths = [], []
    for lo_a, hi_a in zip(blo, bhi):
        centers, w = _grid_axes(lo_a, hi_a, step)
        axes.append(centers)
        widths.append(w)
    cellvol = float(np.prod(widths))
    counts = [a.size for a in axes]
    rest = int(np.prod(counts[1:])) if len(counts) > 1 else 1
    block = max(1, _CHUNK_LIMIT // max(rest, 1))
    total = 0.0
    for i0 in range(0, counts[0], block):
        sub = [axes[0][i0 : i0 + block]] + axes[1:]
        mesh = np.meshgrid(*sub, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        total += float(values_fn(pts).sum()) * cellvol
    return total


_GL_CACHE = {}


def _leggauss(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _power_roots(ratio, m):
    """Real solutions of v**m == ratio."""
    if m == 1:
        return (ratio,)
    if m % 2 == 0:
        if ratio < 0.0:
            return ()
        r = ratio ** (1.0 / m)
        return (-r, r)
    return (math.copysign(abs(ratio) ** (1.0 / m), ratio),)


def _overlap_product_integral(a_lo, a_hi, b_lo, b_hi, scales, exps, v_lo, v_hi):
    """Exact integral over v of prod_j |[a_j] ∩ ([b_j] + scales_j * v**exps_j)|.

    The integrand is piecewise polynomial: each factor is piecewise linear
    in the shift, so between shift-crossing breakpoints a Gauss-Legendre
    rule of sufficient order is exact.
    """
    if v_hi <= v_lo:
        return 0.0
    pts = [v_lo, v_hi, 0.0]
    for j in range(a_lo.size):
        sc = scales[j]
        if sc == 0.0:
            continue
        for c in (
            a_lo[j] - b_lo[j],
            a_lo[j] - b_hi[j],
            a_hi[j] - b_lo[j],
            a_hi[j] - b_hi[j],
        ):
            pts.extend(_power_roots(c / sc, int(exps[j])))
    pts = sorted(p for p in set(pts) if v_lo <= p <= v_hi)
    degree = int(exps.sum())
    nodes, weights = _leggauss(degree // 2 + 1)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        half = 0.5 * (b - a)
        v = 0.5 * (a + b) + half * nodes
        shift = scales[None, :] * v[:, None] ** exps[None, :]
        ov = np.minimum(a_hi, b_hi + shift) - np.maximum(a_lo, b_lo + shift)
        np.clip(ov, 0.0, None, out=ov)
        total += half * float(weights @ ov.prod(axis=1))
    return total


def _pairing_layered(E, F, lo, hi, step, dual):
    """Pairing value with midpoint in the first coordinate only.

    Primal route: for each first coordinate y of a point of F, the fiber
    measure integrated exactly over F's remaining coordinates and the line
    parameter.  Dual route: the mirror image over E with the parameter
    running through the window, where breakpoints come from real roots of
    the parameter powers.  Contributions add exactly across box pairs
    because a line point lies in at most one box of a disjoint union.
    """
    d = E.dim
    total = 0.0
    if not dual:
        exps = np.ones(d - 1, dtype=np.int64)
        for f_lo, f_hi in zip(F.los, F.his):
            centers, w = _grid_axes(f_lo[0], f_hi[0], step)
            for e_lo, e_hi in zip(E.los, E.his):
                s_lo, s_hi = max(lo, e_lo[0]), min(hi, e_hi[0])
                if s_hi <= s_lo:
                    continue
                for y in centers:
                    total += w * _overlap_product_integral(
                        f_lo[1:], f_hi[1:], e_lo[1:], e_hi[1:],
                        -(y ** np.arange(1, d)), exps, s_lo, s_hi,
                    )
    else:
        exps = np.arange(1, d, dtype=np.int64)
        for e_lo, e_hi in zip(E.los, E.his):
            centers, w = _grid_axes(e_lo[0], e_hi[0], step)
            for f_lo, f_hi in zip(F.los, F.his):
                t_lo, t_hi = max(lo, f_lo[0]), min(hi, f_hi[0])
                if t_hi <= t_lo:
                    continue
                scales = np.empty(d - 1)
                for z in centers:
                    scales.fill(z)
                    total += w * _overlap_product_integral(
                        e_lo[1:], e_hi[1:], f_lo[1:], f_hi[1:],
                        scales, exps, t_lo, t_hi,
                    )
    return float(total)


def _outer_integral(values_fn, region, quad):
    if quad.method == "midpoint":
        return sum(
            _midpoint_box_sum(values_fn, blo, bhi, quad.step)
            for blo, bhi in zip(region.los, region.his)
        )
    rng = np.random.default_rng(quad.seed)
    vols = region.box_volumes
    total_vol = vols.sum()
    result = 0.0
    for blo, bhi, vol in zip(region.los, region.his, vols):
        n_b = max(1, int(round(quad.samples * vol / total_vol)))
        pts = rng.uniform(blo, bhi, size=(n_b, region.dim))
        result += float(values_fn(pts).mean()) * vol
    return result


def bilinear_form(E, F, interval, quad=None):
    """Pairing <X chi_E, chi_F> with exact inner fibers over the interval."""
    if E.dim != F.dim:
        raise ValueError("E and F must share a dimension")
    quad = quad or default_quad(F.dim)
    lo, hi = _interval_pair(interval)
    if quad.method == "layered":
        return _pairing_layered(E, F, lo, hi, quad.step, dual=False)
    return _outer_integral(
        lambda pts: _primal_measures(E, pts, lo, hi), F, quad
    )


def bilinear_form_dual(E, F, window, quad=None):
    """Pairing <chi_E, X* chi_F> with exact dual fibers over the window.

    Equals bilinear_form(E, F, I) when the interval covers E's first-axis
    span and the window covers F's; the window condition is enforced here.
    """
    if E.dim != F.dim:
        raise ValueError("E and F must share a dimension")
    quad = quad or default_quad(E.dim)
    lo, hi = _interval_pair(window)
    span = F.first_axis_span()
    if span.lo < lo - 1e-12 or span.hi > hi + 1e-12:
        raise ValueError(
            f"window [{lo}, {hi}] does not cover F's first-axis span "
            f"[{span.lo}, {span.hi}]"
        )
    if quad.method == "layered":
        return _pairing_layered(E, F, lo, hi, quad.step, dual=True)
    return _outer_integral(
        lambda pts: _dual_measures(F, pts, lo, hi), E, quad
    )


def adjointness_gap(E, F, interval, window, quad=None):
    """Both sides of the pairing identity and their relative gap.

    The identity needs the interval to cover E's first-axis span and the
    window to cover F's (otherwise one side silently loses incidences), so
    both conditions are enforced.
    """
    lo, hi = _interval_pair(interval)
    span = E.first_axis_span()
    if span.lo < lo - 1e-12 or span.hi > hi + 1e-12:
        raise ValueError(
            f"interval [{lo}, {hi}] does not cover E's first-axis span "
            f"[{span.lo}, {span.hi}]"
        )
    primal = bilinear_form(E, F, (lo, hi), quad)
    dual = bilinear_form_dual(E, F, window, quad)
    denom = max(abs(primal), abs(dual))
    return {
        "primal": primal,
        "dual": dual,
        "abs_gap": abs(primal - dual),
        "rel_gap": abs(primal - dual) / denom if denom > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# superlevel sets of the transform over a region


@dataclass
class CellBlock:
    """Midpoint grid over one region box with transform values attached."""

    lows: np.ndarray
    widths: np.ndarray
    counts: tuple
    center_values: np.ndarray
    corner_values: np.ndarray | None = None

    @property
    def cell_volume(self):
        return float(np.prod(self.widths))


def region_cell_values(source, region, interval, grid_n, dual=False, corners=True):
    """Evaluate the transform of chi_source on per-box grids over region."""
    lo, hi = _interval_pair(interval)
    blocks = []
    for blo, bhi in zip(region.los, region.his):
        counts = tuple(int(grid_n) for _ in range(region.dim))
        widths = (bhi - blo) / np.array(counts)
        axes = [
            blo[a] + (np.arange(counts[a]) + 0.5) * widths[a]
            for a in range(region.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        vals = (
            _dual_measures(source, pts, lo, hi)
            if dual
            else _primal_measures(source, pts, lo, hi)
        )
        block = CellBlock(
            lows=blo.copy(),
            widths=widths,
            counts=counts,
            center_values=vals.reshape(counts),
        )
        if corners:
            corner_axes = [
                blo[a] + np.arange(counts[a] + 1) * widths[a]
                for a in range(region.dim)
            ]
            mesh = np.meshgrid(*corner_axes, indexing="ij")
            pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
            cvals = (
                _dual_measures(source, pts, lo, hi)
                if dual
                else _primal_measures(source, pts, lo, hi)
            )
            block.corner_values = cvals.reshape(tuple(c + 1 for c in counts))
        blocks.append(block)
    return blocks


def _mask_to_set(blocks, masks):
    bounds = []
    for block, mask in zip(blocks, masks):
        idx = np.argwhere(mask)
        if idx.size == 0:
            continue
        los = block.lows[None, :] + idx * block.widths[None, :]
        his = los + block.widths[None, :]
        bounds.extend(np.stack([los, his], axis=2))
    if not bounds:
        return None
    return BoxUnionSet([Box(b) for b in bounds], validate=False)


@dataclass
class SuperlevelResult:
    """Grid bracket of {x in region : (X chi_source)(x) >= theta}."""

    theta: float
    grid_n: int
    dim: int
    inner_measure: float
    outer_measure: float
    center_measure: float
    max_value: float
    blocks: list = field(repr=False)
    _inner_masks: list = field(repr=False)
    _outer_masks: list = field(repr=False)
    _center_masks: list = field(repr=False)

    def inner_set(self):
        return _mask_to_set(self.blocks, self._inner_masks)

    def outer_set(self):
        return _mask_to_set(self.blocks, self._outer_masks)

    def center_set(self):
        return _mask_to_set(self.blocks, self._center_masks)


def superlevel_set(source, region, interval, theta, grid_n, dual=False):
    """Inner and outer grid approximations of a transform superlevel set.

    A cell counts as inner when its center and all corners clear theta, and
    as outer when any sampled value does; the true set is bracketed between
    the two measures.
    """
    blocks = region_cell_values(source, region, interval, grid_n, dual=dual, corners=True)
    inner_masks, outer_masks, center_masks = [], [], []
    inner = outer = center = 0.0
    max_value = 0.0
    dim = region.dim
    for block in blocks:
        V = block.center_values
        C = block.corner_values
        max_value = max(max_value, float(V.max()), float(C.max()))
        corner_all = np.ones_like(V, dtype=bool)
        corner_any = np.zeros_like(V, dtype=bool)
        for offsets in itertools.product((0, 1), repeat=dim):
            sl = tuple(
                slice(o, o + n) for o, n in zip(offsets, block.counts)
            )
            corner_all &= C[sl] >= theta
            corner_any |= C[sl] >= theta
        center_mask = V >= theta
        inner_mask = center_mask & corner_all
        outer_mask = center_mask | corner_any
        vol = block.cell_volume
        inner += inner_mask.sum() * vol
        outer += outer_mask.sum() * vol
        center += center_mask.sum() * vol
        inner_masks.append(inner_mask)
        outer_masks.append(outer_mask)
        center_masks.append(center_mask)
    return SuperlevelResult(
        theta=float(theta),
        grid_n=int(grid_n),
        dim=dim,
        inner_measure=float(inner),
        outer_measure=float(outer),
        center_measure=float(center),
        max_value=max_value,
        blocks=blocks,
        _inner_masks=inner_masks,
        _outer_masks=outer_masks,
        _center_masks=center_masks,
    )
