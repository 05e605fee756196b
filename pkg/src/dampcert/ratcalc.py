"""Real-coefficient polynomial and rational-function calculus.

Coefficients are stored in ascending degree order (``coeffs[k]`` multiplies
``s**k``) and trimmed to canonical form on construction.  All values are
immutable after construction; every operation here is a pure function, so
instances can be shared freely across workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateInputError, PoleAtEvaluationPointError

#: absolute threshold below which a trailing coefficient is trimmed
TRIM_EPS = 1e-12

#: relative root residual above which ``roots`` emits a warning
ROOT_RESIDUAL_TOL = 1e-6


def _trim(coeffs, eps=TRIM_EPS):
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.ndim != 1:
        raise DegenerateInputError("coefficients must be one-dimensional")
    nz = np.nonzero(np.abs(c) > eps)[0]
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in the Laplace variable, ascending coefficients."""

    coeffs: np.ndarray

    def __init__(self, coeffs, trim_eps=TRIM_EPS):
        c = _trim(coeffs, trim_eps)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    def __call__(self, s):
        """Evaluate at a complex point (or array of points) via Horner."""
        return npoly.polyval(s, self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([float(other)])
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def roots(self) -> np.ndarray:
        """All roots (with multiplicity) via balanced companion eigenvalues.

        Raises :class:`DegenerateInputError` for constant or zero inputs.
        Emits a warning when the scaled residual max|p(r)| / ||coeffs||_inf
        exceeds ``ROOT_RESIDUAL_TOL``.
        """
        if self.degree < 1:
            raise DegenerateInputError("root finding needs degree >= 1")
        r = npoly.polyroots(self.coeffs)
        scale = np.max(np.abs(self.coeffs))
        resid = np.max(np.abs(self(r))) / scale
        if resid > ROOT_RESIDUAL_TOL:
            warnings.warn(
                f"poorly conditioned roots: scaled residual {resid:.3e}",
                RuntimeWarning,
                stacklevel=2,
            )
        return r

    def shifted(self, sigma: float) -> "Polynomial":
        """Return q with q(w) = p(w - sigma).

        Zeros of p with Re(s) > -sigma map to zeros of q with Re(w) > 0.
        """
        if self.is_zero:
            return Polynomial([0.0])
        p = np.polynomial.Polynomial(self.coeffs)
        q = p(np.polynomial.Polynomial([-sigma, 1.0]))
        return Polynomial(np.atleast_1d(q.coef))

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


# -- Routh-Hurwitz ----------------------------------------------------------

HURWITZ = "hurwitz"
NOT_HURWITZ = "not_hurwitz"
MARGINAL = "marginal"


def _sign_changes(col):
    signs = [np.sign(v) for v in col if v != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _routh_first_column(desc, pivot_eps):
    """First column of the Routh array, with `pivot_eps` substituted for
    vanishing pivots.  Returns None when a full zero row appears."""
    n = len(desc) - 1  # degree
    scale = np.max(np.abs(desc))
    zero_tol = 1e-10 * scale
    width = (n + 2) // 2
    prev = np.zeros(width)
    prev[: len(desc[0::2])] = desc[0::2]
    curr = np.zeros(width)
    curr[: len(desc[1::2])] = desc[1::2]
    col = [prev[0]]
    for _ in range(n):
        if np.max(np.abs(curr)) <= zero_tol:
            return None  # symmetric root constellation (axis or +/- pairs)
        if abs(curr[0]) <= zero_tol:
            curr = curr.copy()
            curr[0] = pivot_eps
        col.append(curr[0])
        nxt = np.zeros(width)
        for k in range(width - 1):
            nxt[k] = (curr[0] * prev[k + 1] - prev[0] * curr[k + 1]) / curr[0]
        prev, curr = curr, nxt
    return col


def hurwitz_classification(p: Polynomial) -> str:
    """Classify a polynomial via the Routh array.

    Returns ``"hurwitz"`` when all zeros satisfy Re < 0, ``"not_hurwitz"``
    when some zero has Re >= 0, and ``"marginal"`` when the epsilon rule for
    vanishing pivots cannot decide (both-signs substitution disagrees, or a
    full zero row indicates an axis-symmetric root constellation that is at
    best borderline).  Callers wanting a conservative boolean should treat
    ``"marginal"`` as failure.
    """
    if p.degree < 1:
        raise DegenerateInputError("Hurwitz test needs degree >= 1")
    desc = p.coeffs[::-1].copy()
    if desc[0] < 0:
        desc = -desc
    # necessary condition: strict Hurwitz requires all coefficients > 0
    if np.any(desc <= 0.0):
        return NOT_HURWITZ
    eps = 1e-9 * np.max(np.abs(desc))
    verdicts = []
    for pivot in (eps, -eps):
        col = _routh_first_column(desc, pivot)
        if col is None:
            return NOT_HURWITZ
        verdicts.append(_sign_changes(col) == 0)
    if verdicts[0] != verdicts[1]:
        return MARGINAL
    return HURWITZ if verdicts[0] else NOT_HURWITZ


def is_strictly_hurwitz(p: Polynomial) -> bool:
    """True iff every zero of p has Re < 0 (marginal counts as False)."""
    return hurwitz_classification(p) == HURWITZ


# -- rational functions -----------------------------------------------------


@dataclass(frozen=True)
class RationalFunction:
    """Ratio of two real polynomials, denominator normalized to monic."""

    num: Polynomial
    den: Polynomial

    def __init__(self, num, den):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise DegenerateInputError("denominator must be nonzero")
        lead = den.coeffs[-1]
        object.__setattr__(self, "num", Polynomial(num.coeffs / lead))
        object.__setattr__(self, "den", Polynomial(den.coeffs / lead))

    @property
    def is_strictly_proper(self) -> bool:
        return self.num.degree < self.den.degree

    def reciprocal(self) -> "RationalFunction":
        if self.num.is_zero:
            raise DegenerateInputError("cannot invert the zero function")
        return RationalFunction(self.den, self.num)

    def __call__(self, s):
        """Evaluate at a complex scalar; raises near poles.

        The pole test is scale-aware: |den(s)| is compared against the
        magnitude the denominator terms would have without cancellation.
        """
        dv = self.den(s)
        scale = npoly.polyval(abs(s), np.abs(self.den.coeffs))
        if abs(dv) <= 1e-12 * max(scale, 1e-300):
            raise PoleAtEvaluationPointError(s)
        return self.num(s) / dv

    def eval_many(self, s):
        """Vectorized evaluation without pole guarding (caller's contract)."""
        s = np.asarray(s)
        return npoly.polyval(s, self.num.coeffs) / npoly.polyval(s, self.den.coeffs)

    def __repr__(self):
        return f"RationalFunction({list(self.num.coeffs)}, {list(self.den.coeffs)})"
