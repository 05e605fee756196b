"""Centralized validation oracle: closed-loop poles, damping ratios,
prohibited-domain screening, and linear step-response simulation.

The oracle works on the static network matrix only (the low-frequency
simplification); each diagonal device entry is realized in controllable
canonical form and the loop is closed through the constant network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .devices import DeviceEntry
from .domain import ProhibitedDomain
from .errors import ConfigurationError

#: eigenvalues with |s| below this (relative to the spectral scale) are
#: classified as structural origin poles of the Laplacian loop
ORIGIN_POLE_TOL = 1e-7

#: modal residues below this are treated as exact pole-zero cancellations
RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class PoleReport:
    """Closed-loop poles with damping ratios and domain-membership flags."""

    poles: np.ndarray
    damping: np.ndarray
    in_domain: np.ndarray
    origin_pole_count: int

    def __init__(self, poles, damping, in_domain, origin_pole_count):
        poles = np.asarray(poles, dtype=complex)
        damping = np.asarray(damping, dtype=float)
        in_domain = np.asarray(in_domain, dtype=bool)
        for a in (poles, damping, in_domain):
            a.setflags(write=False)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "damping", damping)
        object.__setattr__(self, "in_domain", in_domain)
        object.__setattr__(self, "origin_pole_count", int(origin_pole_count))


@dataclass(frozen=True)
class StepResponse:
    """Simulated deviations after a step power disturbance."""

    time: np.ndarray
    angles: np.ndarray
    powers: np.ndarray
    disturbance_device: int
    magnitude: float
    start: float
    divergent: bool

    def __init__(self, time, angles, powers, disturbance_device, magnitude, start, divergent):
        time = np.asarray(time, dtype=float)
        angles = np.asarray(angles, dtype=float)
        powers = np.asarray(powers, dtype=float)
        for a in (time, angles, powers):
            a.setflags(write=False)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "disturbance_device", int(disturbance_device))
        object.__setattr__(self, "magnitude", float(magnitude))
        object.__setattr__(self, "start", float(start))
        object.__setattr__(self, "divergent", bool(divergent))


def _realize(entry: DeviceEntry):
    """Controllable canonical (A, b, c) for one strictly proper entry."""
    den = entry.response.den.coeffs  # monic by construction
    num = entry.response.num.coeffs
    n = len(den) - 1
    if n < 1:
        raise ConfigurationError("device entry must be strictly proper")
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[:-1]
    b = np.zeros(n)
    b[-1] = 1.0
    c = np.zeros(n)
    c[: len(num)] = num
    return A, b, c


def closed_loop_matrix(entries, N_static: np.ndarray):
    """Closed-loop state matrix plus the stacked input/output maps.

    Returns (A_cl, B, C) with angle outputs theta = C x and power inputs
    entering through B; the loop through the static network is already
    closed in A_cl.
    """
    entries = list(entries)
    N = np.asarray(N_static, dtype=float)
    if N.shape != (len(entries), len(entries)):
        raise ConfigurationError(
            f"network matrix {N.shape} does not match {len(entries)} devices"
        )
    mats = [_realize(e) for e in entries]
    dims = [a.shape[0] for a, _, _ in mats]
    ntot = sum(dims)
    A = np.zeros((ntot, ntot))
    B = np.zeros((ntot, len(entries)))
    C = np.zeros((len(entries), ntot))
    pos = 0
    for k, (Ak, bk, ck) in enumerate(mats):
        nk = dims[k]
        A[pos : pos + nk, pos : pos + nk] = Ak
        B[pos : pos + nk, k] = bk
        C[k, pos : pos + nk] = ck
        pos += nk
    A_cl = A - B @ N @ C
    return A_cl, B, C


def damping_ratio(p: complex) -> float:
    """-Re(p)/|p|, the damping ratio of a pole; undefined at the origin."""
    if p == 0:
        raise ConfigurationError("damping ratio undefined for the origin pole")
    return float(np.clip(-p.real / abs(p), -1.0, 1.0))


def closed_loop_poles(entries, N_static, dom: ProhibitedDomain | None = None) -> PoleReport:
    """Eigenvalues of the closed-loop state matrix with classification.

    Structural origin poles (Laplacian zero modes) are counted separately
    and never flagged in-domain.  Modes whose maximum input-output residue
    is negligible (exact pole-zero cancellations of the diagonal
    realizations) are dropped from the report.
    """
    A_cl, B, C = closed_loop_matrix(entries, N_static)
    w, vl, vr = scipy.linalg.eig(A_cl, left=True, right=True)
    scale = max(1.0, float(np.max(np.abs(w))))
    keep = []
    for k in range(len(w)):
        num = np.abs(np.outer(C @ vr[:, k], vl[:, k].conj() @ B))
        den = abs(vl[:, k].conj() @ vr[:, k])
        if den == 0.0 or np.max(num) / den >= RESIDUE_TOL:
            keep.append(k)
    w = w[keep]
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    is_origin = np.abs(w) <= ORIGIN_POLE_TOL * scale
    damping = np.array(
        [1.0 if o else damping_ratio(p) for p, o in zip(w, is_origin)]
    )
    if dom is None:
        in_dom = np.zeros(len(w), dtype=bool)
    else:
        in_dom = np.asarray(dom.contains(w)) & ~is_origin
    return PoleReport(w, damping, in_dom, int(np.sum(is_origin)))


def screen_poles(
    report: PoleReport, dom: ProhibitedDomain, boundary_exclusion: float = 0.0
) -> bool:
    """True iff no reported pole lies inside the prohibited domain.

    Structural origin poles are exempt.  Poles closer than
    boundary_exclusion to the domain boundary are also exempt (used to keep
    hard verdicts away from numerically borderline cases).
    """
    scale = max(1.0, float(np.max(np.abs(report.poles), initial=0.0)))
    for p in report.poles:
        if abs(p) <= ORIGIN_POLE_TOL * scale:
            continue
        if not dom.contains(p):
            continue
        if boundary_exclusion > 0.0 and dom.boundary_distance(p) <= boundary_exclusion:
            continue
        return False
    return True


def dominant_pole(report: PoleReport):
    """The non-origin pole with the largest real part, or None."""
    scale = max(1.0, float(np.max(np.abs(report.poles), initial=0.0)))
    cands = [p for p in report.poles if abs(p) > ORIGIN_POLE_TOL * scale]
    if not cands:
        return None
    return max(cands, key=lambda p: p.real)


def step_response(
    entries,
    N_static,
    disturbance_device: int,
    magnitude: float,
    start: float,
    horizon: float,
    dt: float,
) -> StepResponse:
    """Closed-loop response to a step power injection at one device node.

    Fixed-step simulation using the exact zero-order-hold discretization;
    the step is capped at 0.1 / max|pole| so oscillatory modes are well
    resolved.  An unstable configuration still runs but the result is
    tagged divergent.
    """
    entries = list(entries)
    if not 0 <= disturbance_device < len(entries):
        raise ConfigurationError(f"disturbance device {disturbance_device} out of range")
    if dt <= 0 or horizon <= 0 or start < 0 or start >= horizon:
        raise ConfigurationError("need dt > 0, horizon > 0, 0 <= start < horizon")
    A_cl, B, C = closed_loop_matrix(entries, N_static)
    N = np.asarray(N_static, dtype=float)
    eigs = np.linalg.eigvals(A_cl)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    fastest = float(np.max(np.abs(eigs), initial=0.0))
    divergent = bool(
        np.any((eigs.real > 1e-9 * scale) & (np.abs(eigs) > ORIGIN_POLE_TOL * scale))
    )
    dt_eff = min(dt, 0.1 / fastest) if fastest > 0 else dt
    nsteps = int(np.ceil(horizon / dt_eff))
    t = np.arange(nsteps + 1) * dt_eff
    b_col = B[:, disturbance_device]
    n = A_cl.shape[0]
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = A_cl * dt_eff
    aug[:n, n] = b_col * dt_eff
    expm = scipy.linalg.expm(aug)
    Ad, bd = expm[:n, :n], expm[:n, n]
    x = np.zeros(n)
    angles = np.zeros((nsteps + 1, len(entries)))
    for k in range(nsteps):
        u = magnitude if t[k] >= start else 0.0
        x = Ad @ x + bd * u
        angles[k + 1] = C @ x
    powers = angles @ N.T
    return StepResponse(t, angles, powers, disturbance_device, magnitude, start, divergent)


def settling_metrics(time, y, band: float, start: float = 0.0):
    """Settling time into a +/-band absolute band and oscillation cycles.

    The final value is taken from the tail of the record; cycles are half
    the number of sign changes of (y - final) between the disturbance start
    and the settling instant.  Returns (settling_time, cycles); the
    settling time is NaN when the record never stays inside the band.
    """
    time = np.asarray(time, dtype=float)
    y = np.asarray(y, dtype=float)
    tail = max(2, len(y) // 50)
    final = float(np.mean(y[-tail:]))
    dev = y - final
    outside = np.abs(dev) > band
    if outside[-1]:
        return float("nan"), _count_cycles(dev[time >= start])
    last_out = np.nonzero(outside)[0]
    k_settle = (last_out[-1] + 1) if len(last_out) else 0
    t_settle = time[k_settle] if k_settle < len(time) else time[-1]
    mask = (time >= start) & (time <= t_settle)
    return float(t_settle), _count_cycles(dev[mask])


def _count_cycles(dev):
    signs = np.sign(dev[np.abs(dev) > 0])
    if len(signs) < 2:
        return 0.0
    changes = int(np.sum(signs[1:] != signs[:-1]))
    return changes / 2.0
