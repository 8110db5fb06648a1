"""Executable superpotentials for the multivalued exchange boundary law.

A superpotential ``j`` is a locally Lipschitz scalar function whose Clarke
subdifferential drives the boundary condition ``-du/dn in alpha*dj(u)`` on
the exchange portion G3.  For scalar functions the subdifferential at a point
is a closed interval of limiting slopes, and the generalized directional
derivative satisfies the max formula

    j0(r; s) = max{ zeta * s : zeta in dj(r) },

which every built-in realizes exactly from its closed-form interval.

Built-ins (all anchored at a datum ``b``):

``exp_quadratic``
    quadratic well left of the anchor, saturating exponential right of it;
    nonconvex, relaxed-monotone with constant 1.
``min_quadratics``
    pointwise minimum of two convex parabolas with stationary point at the
    anchor; nonconvex when the graphs cross.
``quadratic``
    ``(r-b)^2 / 2``; the smooth law reproducing the linear Robin condition.
``truncated_quadratic``
    quadratic well with slopes clamped to ``m1`` and ``m2`` outside a band
    of radius ``r0``; convex with a globally bounded subgradient.
``abs``
    ``|r-b|``; convex kink at the anchor.

Extras without hypothesis guarantees: ``tresca`` (``|r|``), ``quintic_ramp``
(one-sided quintic), ``power_ramp`` (one-sided 9/4 power).

The ``check_*`` functions probe the standing hypotheses on finite sample
grids; the conditions are universally quantified over the real line, so a
dense grid augmented with every breakpoint (and breakpoints shifted by a tiny
offset) is used to cover the piecewise structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Interval",
    "Potential",
    "CheckReport",
    "GrowthReport",
    "ExpQuadraticPotential",
    "MinQuadraticsPotential",
    "QuadraticPotential",
    "TruncatedQuadraticPotential",
    "AbsPotential",
    "TrescaPotential",
    "QuinticRampPotential",
    "PowerRampPotential",
    "UnknownPotentialError",
    "make_potential",
    "potential_ids",
    "default_grid",
    "pair_grid",
    "check_growth",
    "check_sign_condition",
    "check_strict_condition",
    "estimate_relaxed_monotonicity",
    "check_scaled_sign_condition",
]


@dataclass(frozen=True)
class Interval:
    """Closed interval; the scalar Clarke subdifferential is one of these."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def project(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def distance(self, x: float) -> float:
        return max(self.lo - x, x - self.hi, 0.0)


class Potential:
    """Base class: closed-form value, interval subdifferential, and j0.

    Subclasses implement ``value_array`` and ``subdiff_bounds`` (vectorized)
    plus ``slope`` and ``breakpoints``.  ``slope`` is the derivative of the
    single-valued branch at differentiability points and 0 at kinks; solvers
    use it for the Robin-like linearization and it never affects the computed
    subdifferential itself.
    """

    id: str = "custom"
    convex: bool = False
    c0: float | None = None  # growth bound |dj(r)| <= c0 + c1 |r|
    c1: float | None = None
    m_j: float | None = None  # relaxed-monotonicity constant, when known

    def __init__(self, b: float = 0.0):
        self.b = float(b)

    # -- required surface --------------------------------------------------

    def value_array(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def slope(self, r: float) -> float:
        return 0.0

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def params(self) -> dict[str, float]:
        return {}

    # -- derived operations --------------------------------------------------

    def value(self, r: float) -> float:
        return float(self.value_array(np.asarray([r], dtype=float))[0])

    def subdiff(self, r: float) -> Interval:
        lo, hi = self.subdiff_bounds(np.asarray([r], dtype=float))
        return Interval(float(lo[0]), float(hi[0]))

    def j0(self, r, s):
        """Generalized directional derivative via the max formula."""
        r_arr = np.asarray(r, dtype=float)
        s_arr = np.asarray(s, dtype=float)
        lo, hi = self.subdiff_bounds(np.atleast_1d(r_arr))
        lo = lo.reshape(r_arr.shape) if r_arr.shape else lo[0]
        hi = hi.reshape(r_arr.shape) if r_arr.shape else hi[0]
        out = np.maximum(lo * s_arr, hi * s_arr)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def prox(self, z: float, tau: float) -> float:
        """Resolvent of ``tau * dj`` at z, i.e. the u with z in u + tau*dj(u).

        Only meaningful for convex potentials, where the map is maximal
        monotone and the solution unique; solved by bisection unless a
        subclass provides a closed form.
        """
        if not self.convex:
            raise ValueError(f"prox of nonconvex potential {self.id!r} is not single-valued")
        if tau <= 0.0:
            raise ValueError("prox step must be positive")

        def below(u: float) -> bool:  # u lies strictly left of the solution
            return u + tau * self.subdiff(u).hi < z

        def above(u: float) -> bool:
            return u + tau * self.subdiff(u).lo > z

        lo_u = hi_u = float(z)
        step = max(1.0, tau, abs(z))
        while above(lo_u):
            lo_u -= step
            step *= 2.0
        step = max(1.0, tau, abs(z))
        while below(hi_u):
            hi_u += step
            step *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo_u + hi_u)
            if above(mid):
                hi_u = mid
            elif below(mid):
                lo_u = mid
            else:
                return mid
            if hi_u - lo_u <= 1e-16 * max(1.0, abs(lo_u), abs(hi_u)):
                break
        return 0.5 * (lo_u + hi_u)

    def __repr__(self) -> str:
        extras = "".join(f", {k}={v:g}" for k, v in self.params().items())
        return f"{type(self).__name__}(b={self.b:g}{extras})"


class ExpQuadraticPotential(Potential):
    """Quadratic well below the anchor, saturating exponential above it.

    ``j(r) = (r-b)^2`` for ``r < b`` and ``1 - exp(-(r-b))`` for ``r >= b``.
    The subdifferential jumps from 0 to the full interval [0, 1] at the
    anchor, making the law nonmonotone; the relaxed-monotonicity constant
    is exactly 1 (adding ``r^2/2`` makes the subdifferential monotone).
    """

    id = "exp_quadratic"
    convex = False
    m_j = 1.0

    def __init__(self, b: float = 0.0):
        super().__init__(b)
        self.c0 = 1.0 + 2.0 * abs(self.b)
        self.c1 = 2.0

    def value_array(self, r: np.ndarray) -> np.ndarray:
        d = r - self.b
        out = np.empty_like(d)
        left = d < 0.0
        out[left] = d[left] ** 2
        out[~left] = -np.expm1(-d[~left])
        return out

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = r - self.b
        lo = np.empty_like(d)
        hi = np.empty_like(d)
        left = d < 0.0
        right = d > 0.0
        at = ~(left | right)
        lo[left] = hi[left] = 2.0 * d[left]
        lo[right] = hi[right] = np.exp(-d[right])
        lo[at] = 0.0
        hi[at] = 1.0
        return lo, hi

    def slope(self, r: float) -> float:
        d = r - self.b
        if d < 0.0:
            return 2.0
        if d > 0.0:
            return -float(np.exp(-d))
        return 0.0

    def breakpoints(self) -> tuple[float, ...]:
        return (self.b,)


class MinQuadraticsPotential(Potential):
    """Pointwise minimum of two convex parabolas stationary at the anchor.

    ``j(r) = min(k1/2 (r-b)^2 + c1, k2/2 (r-b)^2 + c2)``.  Where the graphs
    cross, the subdifferential is taken as the convex hull of the two branch
    slopes; at every other point it is the slope of the active branch.  With
    two crossings the function is nonconvex and has no finite
    relaxed-monotonicity constant (the subgradient jumps downward).
    """

    id = "min_quadratics"

    def __init__(self, b: float = 0.0, k1: float = 1.0, c1: float = 0.0, k2: float = 3.0, c2: float = -1.0):
        super().__init__(b)
        if k1 <= 0.0 or k2 <= 0.0:
            raise ValueError("both parabolas must be strictly convex (k1, k2 > 0)")
        self.k1, self.k2 = float(k1), float(k2)
        self.off1, self.off2 = float(c1), float(c2)
        self.c0 = max(self.k1, self.k2) * abs(self.b)
        self.c1 = max(self.k1, self.k2)
        if self.k1 != self.k2:
            rho2 = 2.0 * (self.off2 - self.off1) / (self.k1 - self.k2)
            self._rho = float(np.sqrt(rho2)) if rho2 > 0.0 else None
        else:
            self._rho = None
        self.convex = self._rho is None  # one branch wins everywhere
        self.m_j = 0.0 if self.convex else None

    def params(self) -> dict[str, float]:
        return {"k1": self.k1, "c1": self.off1, "k2": self.k2, "c2": self.off2}

    def _branches(self, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return 0.5 * self.k1 * d**2 + self.off1, 0.5 * self.k2 * d**2 + self.off2

    def value_array(self, r: np.ndarray) -> np.ndarray:
        j1, j2 = self._branches(r - self.b)
        return np.minimum(j1, j2)

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = r - self.b
        j1, j2 = self._branches(d)
        s1, s2 = self.k1 * d, self.k2 * d
        lo = np.where(j1 < j2, s1, np.where(j2 < j1, s2, np.minimum(s1, s2)))
        hi = np.where(j1 < j2, s1, np.where(j2 < j1, s2, np.maximum(s1, s2)))
        return lo, hi

    def slope(self, r: float) -> float:
        d = r - self.b
        j1, j2 = self._branches(np.asarray([d]))
        if j1[0] == j2[0]:
            return 0.0
        return self.k1 if j1[0] < j2[0] else self.k2

    def breakpoints(self) -> tuple[float, ...]:
        if self._rho is None:
            return ()
        return (self.b - self._rho, self.b + self._rho)


class QuadraticPotential(Potential):
    """``(r-b)^2 / 2``: the smooth law of the linear Robin condition."""

    id = "quadratic"
    convex = True
    m_j = 0.0

    def __init__(self, b: float = 0.0):
        super().__init__(b)
        self.c0 = abs(self.b)
        self.c1 = 1.0

    def value_array(self, r: np.ndarray) -> np.ndarray:
        return 0.5 * (r - self.b) ** 2

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = r - self.b
        return d, d.copy()

    def slope(self, r: float) -> float:
        return 1.0

    def prox(self, z: float, tau: float) -> float:
        return (z + tau * self.b) / (1.0 + tau)


class TruncatedQuadraticPotential(Potential):
    """Quadratic well with slopes clamped outside a band of radius ``r0``.

    Requires ``m1 <= -r0 < 0 < r0 <= m2``; the subgradient is globally
    bounded by ``max(|m1|, m2)``, so the growth condition holds with a
    constant bound.
    """

    id = "truncated_quadratic"
    convex = True
    m_j = 0.0

    def __init__(self, b: float = 0.0, m1: float = -2.0, m2: float = 3.0, r0: float = 1.0):
        super().__init__(b)
        if not (m1 <= -r0 < 0.0 < r0 <= m2):
            raise ValueError(f"require m1 <= -r0 < 0 < r0 <= m2, got m1={m1}, m2={m2}, r0={r0}")
        self.m1, self.m2, self.r0 = float(m1), float(m2), float(r0)
        self.c0 = max(abs(self.m1), self.m2)
        self.c1 = 0.0

    def params(self) -> dict[str, float]:
        return {"m1": self.m1, "m2": self.m2, "r0": self.r0}

    def value_array(self, r: np.ndarray) -> np.ndarray:
        d = r - self.b
        r0, m1, m2 = self.r0, self.m1, self.m2
        out = 0.5 * d**2
        low = d < -r0
        high = d > r0
        out[low] = 0.5 * r0**2 + m1 * (d[low] + r0)
        out[high] = 0.5 * r0**2 + m2 * (d[high] - r0)
        return out

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = r - self.b
        r0, m1, m2 = self.r0, self.m1, self.m2
        lo = np.clip(d, m1, m2)
        hi = lo.copy()
        lo = np.where(d < -r0, m1, lo)
        hi = np.where(d < -r0, m1, hi)
        lo = np.where(d > r0, m2, lo)
        hi = np.where(d > r0, m2, hi)
        at_lo = d == -r0
        lo = np.where(at_lo, m1, lo)
        hi = np.where(at_lo, -r0, hi)
        at_hi = d == r0
        lo = np.where(at_hi, r0, lo)
        hi = np.where(at_hi, m2, hi)
        return lo, hi

    def slope(self, r: float) -> float:
        d = r - self.b
        return 1.0 if -self.r0 < d < self.r0 else 0.0

    def breakpoints(self) -> tuple[float, ...]:
        return (self.b - self.r0, self.b + self.r0)

    def prox(self, z: float, tau: float) -> float:
        b, r0, m1, m2 = self.b, self.r0, self.m1, self.m2
        if z < b - r0 + tau * m1:
            return z - tau * m1
        if z <= b - r0 - tau * r0:
            return b - r0
        if z < b + r0 + tau * r0:
            return (z + tau * b) / (1.0 + tau)
        if z <= b + r0 + tau * m2:
            return b + r0
        return z - tau * m2


class AbsPotential(Potential):
    """``|r - b|``: convex kink at the anchor with subdifferential [-1, 1]."""

    id = "abs"
    convex = True
    m_j = 0.0
    c1 = 0.0

    def __init__(self, b: float = 0.0):
        super().__init__(b)
        self.c0 = 1.0

    def value_array(self, r: np.ndarray) -> np.ndarray:
        return np.abs(r - self.b)

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = r - self.b
        lo = np.where(d < 0.0, -1.0, np.where(d > 0.0, 1.0, -1.0))
        hi = np.where(d < 0.0, -1.0, np.where(d > 0.0, 1.0, 1.0))
        return lo.astype(float), hi.astype(float)

    def breakpoints(self) -> tuple[float, ...]:
        return (self.b,)

    def prox(self, z: float, tau: float) -> float:
        d = z - self.b
        if d > tau:
            return z - tau
        if d < -tau:
            return z + tau
        return self.b


class TrescaPotential(Potential):
    """``|r|`` regardless of the anchor; a friction-type flux potential.

    The anchor ``b`` is kept only so the hypothesis checkers know which datum
    the boundary condition pairs it with; the sign condition generally fails
    for ``b != 0``.
    """

    id = "tresca"
    convex = True
    m_j = 0.0
    c0 = 1.0
    c1 = 0.0

    def value_array(self, r: np.ndarray) -> np.ndarray:
        return np.abs(r)

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo = np.where(r < 0.0, -1.0, np.where(r > 0.0, 1.0, -1.0))
        hi = np.where(r < 0.0, -1.0, np.where(r > 0.0, 1.0, 1.0))
        return lo.astype(float), hi.astype(float)

    def breakpoints(self) -> tuple[float, ...]:
        return (0.0,)

    def prox(self, z: float, tau: float) -> float:
        if z > tau:
            return z - tau
        if z < -tau:
            return z + tau
        return 0.0


class QuinticRampPotential(Potential):
    """One-sided quintic ``beta (r-c)^5`` for ``r >= c``, zero below.

    Continuously differentiable and convex, but the subgradient grows like
    the fourth power, so no linear growth constants exist.
    """

    id = "quintic_ramp"
    convex = True
    m_j = 0.0

    def __init__(self, b: float = 0.0, beta: float = 1.0, c: float = 0.0):
        super().__init__(b)
        if beta <= 0.0:
            raise ValueError("beta must be positive")
        self.beta = float(beta)
        self.c = float(c)

    def params(self) -> dict[str, float]:
        return {"beta": self.beta, "c": self.c}

    def value_array(self, r: np.ndarray) -> np.ndarray:
        d = np.maximum(r - self.c, 0.0)
        return self.beta * d**5

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = np.maximum(r - self.c, 0.0)
        s = 5.0 * self.beta * d**4
        return s, s.copy()

    def slope(self, r: float) -> float:
        d = r - self.c
        return float(20.0 * self.beta * d**3) if d > 0.0 else 0.0

    def breakpoints(self) -> tuple[float, ...]:
        return (self.c,)


class PowerRampPotential(Potential):
    """One-sided power law ``beta r^{9/4}`` for ``r >= 0``, zero below."""

    id = "power_ramp"
    convex = True
    m_j = 0.0

    def __init__(self, b: float = 0.0, beta: float = 1.0):
        super().__init__(b)
        if beta <= 0.0:
            raise ValueError("beta must be positive")
        self.beta = float(beta)

    def params(self) -> dict[str, float]:
        return {"beta": self.beta}

    def value_array(self, r: np.ndarray) -> np.ndarray:
        d = np.maximum(r, 0.0)
        return self.beta * d ** 2.25

    def subdiff_bounds(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = np.maximum(r, 0.0)
        s = 2.25 * self.beta * d ** 1.25
        return s, s.copy()

    def slope(self, r: float) -> float:
        return float(2.25 * 1.25 * self.beta * r**0.25) if r > 0.0 else 0.0

    def breakpoints(self) -> tuple[float, ...]:
        return (0.0,)


_BUILTINS = (
    ExpQuadraticPotential,
    MinQuadraticsPotential,
    QuadraticPotential,
    TruncatedQuadraticPotential,
    AbsPotential,
)
_EXTRAS = (TrescaPotential, QuinticRampPotential, PowerRampPotential)
_REGISTRY = {cls.id: cls for cls in _BUILTINS + _EXTRAS}


class UnknownPotentialError(ValueError):
    def __init__(self, pid: str):
        ids = potential_ids()
        super().__init__(
            f"unknown potential {pid!r}; built-ins: {', '.join(ids[:5])}; extras: {', '.join(ids[5:])}"
        )
        self.available = ids


def potential_ids() -> tuple[str, ...]:
    return tuple(cls.id for cls in _BUILTINS + _EXTRAS)


def make_potential(pid: str, b: float = 0.0, **params: float) -> Potential:
    cls = _REGISTRY.get(pid)
    if cls is None:
        raise UnknownPotentialError(pid)
    return cls(b=b, **params)


# -- hypothesis checkers ------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a sampled hypothesis check.

    ``worst_margin`` is the largest violation of the asserted inequality over
    the grid (nonpositive when satisfied), attained at ``worst_point``.
    """

    name: str
    passed: bool
    worst_margin: float
    worst_point: tuple[float, ...]
    details: str = ""


@dataclass(frozen=True)
class GrowthReport:
    """Growth-condition verdict plus grid-fitted constants."""

    passed: bool
    worst_margin: float
    worst_r: float
    used_c0: float | None
    used_c1: float | None
    fitted_c0: float
    fitted_c1: float
    details: str = ""


def default_grid(
    p: Potential, span: float = 10.0, num: int = 2001, kink_offset: float = 1e-9
) -> np.ndarray:
    """Uniform grid around the anchor, plus breakpoints and shifted copies."""
    base = np.linspace(p.b - span, p.b + span, num)
    extra = []
    for bp in p.breakpoints():
        extra.extend((bp, bp - kink_offset, bp + kink_offset))
    if extra:
        base = np.concatenate([base, np.asarray(extra)])
    return np.unique(base)


def pair_grid(p: Potential, span: float = 10.0, num: int = 321) -> np.ndarray:
    """Coarser grid for quadratic-cost pair scans, breakpoints included."""
    base = np.linspace(p.b - span, p.b + span, num)
    extra = []
    for bp in p.breakpoints():
        for off in (0.0, -1e-9, 1e-9, -1e-4, 1e-4, -1e-2, 1e-2):
            extra.append(bp + off)
    if extra:
        base = np.concatenate([base, np.asarray(extra)])
    return np.unique(base)


def _magnitude(p: Potential, grid: np.ndarray) -> np.ndarray:
    lo, hi = p.subdiff_bounds(grid)
    return np.maximum(np.abs(lo), np.abs(hi))


def check_growth(
    p: Potential,
    grid: np.ndarray | None = None,
    c0: float | None = None,
    c1: float | None = None,
) -> GrowthReport:
    """Check ``|dj(r)| <= c0 + c1 |r|`` on the grid and fit tight constants.

    Uses the potential's declared constants unless overrides are given.  A
    potential without declared constants (superlinear growth) fails, with
    grid-fitted constants reported for reference.
    """
    if grid is None:
        grid = default_grid(p)
    mag = _magnitude(p, grid)
    absr = np.abs(grid)

    slope_fit = 0.0
    if len(grid) > 1 and np.ptp(absr) > 0.0:
        slope_fit = max(0.0, float(np.polyfit(absr, mag, 1)[0]))
    fitted_c1 = slope_fit
    fitted_c0 = float(np.max(mag - fitted_c1 * absr))

    use_c0 = c0 if c0 is not None else p.c0
    use_c1 = c1 if c1 is not None else p.c1
    if use_c0 is None or use_c1 is None:
        return GrowthReport(
            passed=False,
            worst_margin=float("inf"),
            worst_r=float(grid[int(np.argmax(mag))]),
            used_c0=None,
            used_c1=None,
            fitted_c0=fitted_c0,
            fitted_c1=fitted_c1,
            details="no linear growth constants declared",
        )

    margins = mag - (use_c0 + use_c1 * absr)
    worst = int(np.argmax(margins))
    scale = 1.0 + abs(use_c0) + abs(use_c1) * float(absr.max(initial=0.0))
    return GrowthReport(
        passed=bool(margins[worst] <= 1e-12 * scale),
        worst_margin=float(margins[worst]),
        worst_r=float(grid[worst]),
        used_c0=float(use_c0),
        used_c1=float(use_c1),
        fitted_c0=fitted_c0,
        fitted_c1=fitted_c1,
    )


def check_sign_condition(
    p: Potential, grid: np.ndarray | None = None, slack: float = 1e-14
) -> CheckReport:
    """Check the anchor sign condition ``j0(r; b-r) <= 0`` on the grid."""
    if grid is None:
        grid = default_grid(p)
    vals = p.j0(grid, p.b - grid)
    worst = int(np.argmax(vals))
    return CheckReport(
        name="sign_condition",
        passed=bool(vals[worst] <= slack),
        worst_margin=float(vals[worst]),
        worst_point=(float(grid[worst]),),
    )


def check_strict_condition(p: Potential, grid: np.ndarray | None = None) -> CheckReport:
    """Check that ``j0(r; b-r)`` vanishes only at the anchor itself.

    Asserts strict negativity at every grid point different from ``b``; the
    anchor point is excluded by construction.
    """
    if grid is None:
        grid = default_grid(p)
    mask = grid != p.b
    pts = grid[mask]
    if len(pts) == 0:
        return CheckReport("strict_condition", True, -np.inf, (p.b,), "grid held only the anchor")
    vals = p.j0(pts, p.b - pts)
    worst = int(np.argmax(vals))
    return CheckReport(
        name="strict_condition",
        passed=bool(vals[worst] < 0.0),
        worst_margin=float(vals[worst]),
        worst_point=(float(pts[worst]),),
    )


def _pairwise_symmetric_sum(p: Potential, grid: np.ndarray) -> np.ndarray:
    """Matrix of j0(r_i; r_j - r_i) + j0(r_j; r_i - r_j)."""
    lo, hi = p.subdiff_bounds(grid)
    d = grid[None, :] - grid[:, None]  # d[i, j] = r_j - r_i
    fwd = np.maximum(lo[:, None] * d, hi[:, None] * d)
    bwd = np.maximum(lo[None, :] * (-d), hi[None, :] * (-d))
    return fwd + bwd


def estimate_relaxed_monotonicity(p: Potential, grid: np.ndarray | None = None) -> float:
    """Smallest sampled constant in the relaxed monotonicity condition.

    Returns the supremum over distinct grid pairs of

        (j0(r; s-r) + j0(s; r-s)) / |r-s|^2,

    clamped below at zero.  Convex potentials give zero; pairs with ``r = s``
    are excluded by construction.
    """
    if grid is None:
        grid = pair_grid(p)
    total = _pairwise_symmetric_sum(p, grid)
    d = grid[None, :] - grid[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = total / d**2
    ratio[d == 0.0] = -np.inf
    return max(0.0, float(ratio.max()))


def check_scaled_sign_condition(
    p: Potential,
    grid: np.ndarray | None = None,
    c_values: tuple[float, ...] = (1.0, 2.0, 10.0, 100.0),
    slack: float = 1e-10,
) -> CheckReport:
    """Pairwise sign condition with scaling factors, gating coefficient monotonicity.

    Checks ``j0(r; -(r-s)+) + c * j0(s; (r-s)+) <= 0`` for every scale
    ``c >= 1``.  The ``c = 1`` instance is checked on all grid pairs (it is
    the convexity-type test); the ``c > 1`` instances are checked on pairs
    with both points at or below the anchor, the range where solutions of the
    comparison theory live, since any potential whose subgradient is positive
    somewhere violates the unrestricted condition for large ``c``.
    """
    if grid is None:
        grid = pair_grid(p)
    if any(c < 1.0 for c in c_values):
        raise ValueError("all scale factors must be >= 1")
    lo, hi = p.subdiff_bounds(grid)
    r = grid[:, None]
    s = grid[None, :]
    t = r - s  # only t > 0 contributes
    pos = t > 0.0
    below = (r <= p.b) & (s <= p.b)

    worst_margin = -np.inf
    worst_point = (float(p.b), float(p.b), 1.0)
    for c in sorted(set(float(c) for c in c_values)):
        # for t > 0: j0(r; -t) = -t*lo(r),  j0(s; t) = t*hi(s)
        term = t * (c * hi[None, :] - lo[:, None])
        domain = pos if c == 1.0 else (pos & below)
        masked = np.where(domain, term, -np.inf)
        idx = np.unravel_index(int(np.argmax(masked)), masked.shape)
        if masked[idx] > worst_margin:
            worst_margin = float(masked[idx])
            worst_point = (float(grid[idx[0]]), float(grid[idx[1]]), c)
    return CheckReport(
        name="scaled_sign_condition",
        passed=bool(worst_margin <= slack),
        worst_margin=worst_margin,
        worst_point=worst_point,
    )
