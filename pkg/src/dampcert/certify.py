"""Per-device gain certificates and parameter feasible-region sweeps.

The certificate logic is row-local: device i's verdict depends only on its
own entry and on row i of the network matrix.  That makes the sweep
embarrassingly parallel across devices and grid points, and any execution
schedule must produce identical results (all computation here is pure).
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from numpy.polynomial import polynomial as npoly

from .devices import DeviceEntry, check_entry_analytic
from .domain import BoundarySamples, ProhibitedDomain
from .errors import CertificateInapplicableError, ConfigurationError
from .netmodel import GridTopology, network_row, reduced_network, static_network
from .ratcalc import HURWITZ, Polynomial, RationalFunction, hurwitz_classification

#: default tolerance turning the strict gain inequality into a predicate
MARGIN_TOL = 1e-6


# -- network providers ------------------------------------------------------


@dataclass(frozen=True)
class StaticNetwork:
    """Constant network matrix (low-frequency simplification)."""

    matrix: np.ndarray

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigurationError("network matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_topology(cls, topology: GridTopology) -> "StaticNetwork":
        return cls(static_network(topology))

    @property
    def n_devices(self) -> int:
        return self.matrix.shape[0]

    def row_series(self, i: int, pts: np.ndarray):
        diag, off = network_row(self.matrix, i)
        n = len(pts)
        return np.full(n, diag, dtype=complex), np.full(n, off)

    def diagonal_ratfun(self, i: int) -> RationalFunction:
        diag, _ = network_row(self.matrix, i)
        return RationalFunction(Polynomial([diag]), Polynomial([1.0]))


@dataclass(frozen=True)
class DynamicNetwork:
    """Pointwise-evaluated dynamic network (full line dynamics)."""

    topology: GridTopology

    @property
    def n_devices(self) -> int:
        return self.topology.n_devices

    def row_series(self, i: int, pts: np.ndarray):
        diag = np.empty(len(pts), dtype=complex)
        off = np.empty(len(pts))
        for k, s in enumerate(pts):
            N = reduced_network(self.topology, s)
            diag[k], off[k] = network_row(N, i)
        return diag, off

    def diagonal_ratfun(self, i: int) -> RationalFunction:
        """Exact rational diagonal entry; only available without interior
        nodes (symbolic Kron reduction is out of scope)."""
        if self.topology.interior_nodes:
            raise CertificateInapplicableError(
                "rational diagonal entry unavailable with interior nodes; "
                "use the static network provider for the non-vanishing test"
            )
        node = self.topology.device_nodes[i]
        num = Polynomial([0.0])
        den = Polynomial([1.0])
        w0 = self.topology.omega0
        for ln in self.topology.lines:
            if node not in (ln.a, ln.b):
                continue
            p = ln.params
            term_num = Polynomial([p.stiffness * w0 / p.l])
            term_den = Polynomial([w0 * w0 + p.rho * p.rho, 2.0 * p.rho, 1.0])
            num = num * term_den + term_num * den
            den = den * term_den
        return RationalFunction(num, den)


# -- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class MarginReport:
    """Outcome of the boundary certificate for one device."""

    device: int
    min_lhs: float
    max_rhs: float
    margin: float
    worst_point: complex
    nonvanishing: bool
    passed: bool


@dataclass(frozen=True)
class ParameterGrid:
    """Rectangular grid of candidate control parameters, row-major order."""

    axes: tuple
    values: tuple

    def __init__(self, axes, values):
        axes = tuple(axes)
        values = tuple(np.asarray(v, dtype=float) for v in values)
        if not axes or len(axes) != len(values):
            raise ConfigurationError("grid needs matching axis names and value lists")
        for name, v in zip(axes, values):
            if v.ndim != 1 or len(v) == 0:
                raise ConfigurationError(f"grid axis {name!r} is empty")
            if np.any(np.diff(v) <= 0):
                raise ConfigurationError(f"grid axis {name!r} must be strictly increasing")
            v.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple:
        return tuple(len(v) for v in self.values)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self):
        """Iterate (index_tuple, {axis: value}) in row-major order."""
        idx_grids = np.indices(self.shape).reshape(len(self.axes), -1).T
        for idx in idx_grids:
            yield tuple(idx), {
                a: self.values[k][idx[k]] for k, a in enumerate(self.axes)
            }


@dataclass(frozen=True)
class FeasibilityMask:
    """Per-grid-point certificate verdicts and margins for one device."""

    device: int
    grid: ParameterGrid
    flags: np.ndarray
    margins: np.ndarray

    def __init__(self, device, grid, flags, margins):
        flags = np.asarray(flags, dtype=bool)
        margins = np.asarray(margins, dtype=float)
        if flags.shape != grid.shape or margins.shape != grid.shape:
            raise ConfigurationError("mask arrays must match the grid shape")
        flags.setflags(write=False)
        margins.setflags(write=False)
        object.__setattr__(self, "device", int(device))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "margins", margins)


# -- the gain condition -----------------------------------------------------


def local_gain_terms(entry: DeviceEntry, row, s: complex):
    """Left and right side of the per-device gain inequality at one point.

    row is the (diagonal, off-diagonal absolute sum) pair for the device's
    network row at s.  Returns (lhs, rhs) = (|D_inv(s) + diag|, off_sum).
    """
    diag, off = row
    return abs(entry.inverse(s) + diag), float(off)


def _gain_margin_curve(entry: DeviceEntry, diag, off, pts):
    """Vectorized lhs - rhs over sample points; raises if a pole of the
    inverse entry sits on the sample set."""
    denv = npoly.polyval(pts, entry.inverse.den.coeffs)
    scale = npoly.polyval(np.abs(pts), np.abs(entry.inverse.den.coeffs))
    if np.any(np.abs(denv) <= 1e-12 * np.maximum(scale, 1e-300)):
        k = int(np.argmin(np.abs(denv)))
        raise CertificateInapplicableError(
            f"pole of the inverse device entry on the sampled boundary near {pts[k]}"
        )
    dinv = npoly.polyval(pts, entry.inverse.num.coeffs) / denv
    lhs = np.abs(dinv + diag)
    return lhs, np.asarray(off, dtype=float)


def _strip_origin_roots(p: Polynomial) -> Polynomial:
    """Factor out structural s = 0 roots (the excluded origin)."""
    c = p.coeffs
    scale = np.max(np.abs(c)) or 1.0
    k = 0
    while k < len(c) - 1 and abs(c[k]) <= 1e-12 * scale:
        k += 1
    return Polynomial(c[k:]) if k else p


def _diagonal_numerator(entry: DeviceEntry, n_ii: RationalFunction) -> Polynomial:
    """Numerator polynomial of D_inv(s) + n_ii(s), origin roots stripped
    (the origin is excluded from the prohibited domain)."""
    inv = entry.inverse
    p = inv.num * n_ii.den + n_ii.num * inv.den
    return _strip_origin_roots(p)


def nonvanishing_diagonal(entry: DeviceEntry, n_ii: float, sigma: float) -> bool:
    """Shifted Routh test that D_inv(s) + n_ii has no zero with Re > -sigma.

    Since the prohibited domain lies in {Re >= -sigma}, this is sufficient
    for the diagonal to be nonzero throughout the domain.  It is also
    conservative: real zeros in (-sigma, 0) sit outside the damping wedge
    yet fail here.  A marginal Routh classification counts as failure.
    """
    rf = RationalFunction(Polynomial([float(n_ii)]), Polynomial([1.0]))
    p = _diagonal_numerator(entry, rf)
    if p.degree < 1:
        return not p.is_zero
    return hurwitz_classification(p.shifted(sigma)) == HURWITZ


#: diagonal zeros closer than this to the domain boundary fail the
#: certificate (conservative treatment of borderline root locations)
ZERO_GUARD = 1e-9


def _nonvanishing_rational(entry: DeviceEntry, n_ii: RationalFunction, dom: ProhibitedDomain) -> bool:
    """Diagonal non-vanishing over the prohibited domain.

    Fast path: the shifted Routh half-plane test (sufficient).  When that
    fails, fall back to exact zero locations and test domain membership
    directly; zeros within ZERO_GUARD of the domain boundary fail.
    """
    p = _diagonal_numerator(entry, n_ii)
    if p.degree < 1:
        return not p.is_zero
    if hurwitz_classification(p.shifted(dom.sigma)) == HURWITZ:
        return True
    for r in p.roots():
        if dom.contains(r) or dom.boundary_distance(r) <= ZERO_GUARD:
            return False
    return True


def boundary_certificate(
    entry: DeviceEntry,
    provider,
    device: int,
    dom: ProhibitedDomain,
    samples: BoundarySamples,
    margin_tol: float = MARGIN_TOL,
) -> MarginReport:
    """Boundary-sampled sufficient certificate for one device.

    Requires the device entry to be analytic on the prohibited domain;
    runs the non-vanishing diagonal test, then the gain inequality at every
    boundary sample.  Passing implies (by diagonal dominance plus the
    maximum-modulus argument) that the device contributes no closed-loop
    pole inside the domain.
    """
    if not check_entry_analytic(entry, dom):
        raise CertificateInapplicableError(
            f"device {device}: entry has a pole inside the prohibited domain"
        )
    nonvan = _nonvanishing_rational(entry, provider.diagonal_ratfun(device), dom)
    diag, off = provider.row_series(device, samples.points)
    lhs, rhs = _gain_margin_curve(entry, diag, off, samples.points)
    margins = lhs - rhs
    k = int(np.argmin(margins))
    return MarginReport(
        device=device,
        min_lhs=float(np.min(lhs)),
        max_rhs=float(np.max(rhs)),
        margin=float(margins[k]),
        worst_point=complex(samples.points[k]),
        nonvanishing=nonvan,
        passed=bool(nonvan and margins[k] > margin_tol),
    )


def certify_all(
    entries,
    provider,
    dom: ProhibitedDomain,
    samples: BoundarySamples,
    margin_tol: float = MARGIN_TOL,
) -> list[MarginReport]:
    """Boundary certificate for every device at fixed parameters."""
    entries = list(entries)
    if len(entries) != provider.n_devices:
        raise ConfigurationError(
            f"{len(entries)} device entries for a {provider.n_devices}-device network"
        )
    return [
        boundary_certificate(e, provider, i, dom, samples, margin_tol)
        for i, e in enumerate(entries)
    ]


# -- parameter sweep --------------------------------------------------------


def feasible_region(
    make_entry,
    grid: ParameterGrid,
    provider,
    device: int,
    dom: ProhibitedDomain,
    samples: BoundarySamples,
    margin_tol: float = MARGIN_TOL,
) -> FeasibilityMask:
    """Certificate verdict over a grid of candidate device parameters.

    make_entry maps an {axis: value} dict to a DeviceEntry.  Only row
    `device` of the network enters, so other devices' parameters are
    irrelevant here.  Grid points whose entry is not analytic on the domain
    are infeasible (margin reported as -inf), never silently skipped.
    """
    if grid.size == 0:
        raise ConfigurationError("empty parameter grid")
    diag, off = provider.row_series(device, samples.points)
    n_rf = provider.diagonal_ratfun(device)
    flags = np.zeros(grid.shape, dtype=bool)
    margins = np.full(grid.shape, -np.inf)
    for idx, point in grid.points():
        entry = make_entry(point)
        if not check_entry_analytic(entry, dom):
            continue
        try:
            lhs, rhs = _gain_margin_curve(entry, diag, off, samples.points)
        except CertificateInapplicableError:
            continue
        m = float(np.min(lhs - rhs))
        margins[idx] = m
        if m > margin_tol and _nonvanishing_rational(entry, n_rf, dom):
            flags[idx] = True
    return FeasibilityMask(device, grid, flags, margins)


@dataclass(frozen=True)
class SweepTask:
    """Picklable unit of sweep work for one device."""

    device: int
    make_entry: object
    grid: ParameterGrid


def _run_sweep_task(args):
    task, provider, dom, samples, margin_tol = args
    return feasible_region(
        task.make_entry, task.grid, provider, task.device, dom, samples, margin_tol
    )


def sweep_all(
    tasks,
    provider,
    dom: ProhibitedDomain,
    samples: BoundarySamples,
    margin_tol: float = MARGIN_TOL,
    workers: int = 1,
) -> dict:
    """Run feasible_region for each task; returns {device: FeasibilityMask}.

    Results are independent of worker count and execution order.
    """
    tasks = list(tasks)
    args = [(t, provider, dom, samples, margin_tol) for t in tasks]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            masks = list(pool.map(_run_sweep_task, args))
    else:
        masks = [_run_sweep_task(a) for a in args]
    return {t.device: m for t, m in zip(tasks, masks)}
