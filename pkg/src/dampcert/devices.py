"""GFM and GFL device dynamics, plus a dynamics-agnostic custom entry.

Every device is reduced to its diagonal angle-per-power entry (a strictly
proper rational function of s) and the reciprocal power-per-angle form the
gain condition needs.

Sign convention: the published small-signal models carry explicit minus
signs on the power/angle ratios.  Composed verbatim with the closed-loop
determinant, a lone GFM device on a stiff tie of susceptance b would get
the characteristic polynomial m*s^2 + d*s - b, contradicting the swing
equation.  Entries here are therefore built with the positive sign, so the
single-device closed loop is m*s^2 + d*s + b; magnitudes (all the
certificate ever uses) are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .domain import ProhibitedDomain
from .errors import ConfigurationError
from .netmodel import GFL, GFM
from .ratcalc import Polynomial, RationalFunction


@dataclass(frozen=True)
class GfmParams:
    """Grid-forming device: virtual swing with inertia m [s], damping d [pu]."""

    m: float
    d: float

    def __post_init__(self):
        if not self.m > 0:
            raise ConfigurationError(f"GFM inertia m must be > 0, got {self.m}")
        if not self.d > 0:
            raise ConfigurationError(f"GFM damping d must be > 0, got {self.d}")


@dataclass(frozen=True)
class GflParams:
    """Grid-following device: virtual inertia H [s], damping D [pu], PLL
    gains kp/ki, voltage setpoint v0 [pu]."""

    H: float
    D: float
    kp: float
    ki: float
    v0: float = 1.0

    def __post_init__(self):
        for name in ("H", "D", "kp", "ki", "v0"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"GFL parameter {name} must be > 0")


@dataclass(frozen=True)
class CustomRational:
    """Escape hatch: directly specified angle-per-power diagonal entry."""

    entry: RationalFunction

    def __post_init__(self):
        if not self.entry.is_strictly_proper:
            raise ConfigurationError(
                "custom device entry must be strictly proper "
                "(the far-field boundary truncation relies on it)"
            )


DeviceModel = Union[GfmParams, GflParams, CustomRational]


@dataclass(frozen=True)
class DeviceEntry:
    """Diagonal device entry and its reciprocal.

    response  angle response to electrical power (strictly proper)
    inverse   power-per-angle form entering the gain condition
    """

    response: RationalFunction
    inverse: RationalFunction


def gfm_entry(p: GfmParams) -> DeviceEntry:
    """Swing-equation entry 1 / (s*(m*s + d))."""
    den = Polynomial([0.0, p.d, p.m])
    resp = RationalFunction(Polynomial([1.0]), den)
    return DeviceEntry(resp, resp.reciprocal())


def gfl_entry(p: GflParams) -> DeviceEntry:
    """PLL-based entry (s^2 + v0*kp*s + v0*ki) / (s*(H*s + D)*(v0*kp*s + v0*ki))."""
    num = Polynomial([p.v0 * p.ki, p.v0 * p.kp, 1.0])
    den = (
        Polynomial([0.0, 1.0])
        * Polynomial([p.D, p.H])
        * Polynomial([p.v0 * p.ki, p.v0 * p.kp])
    )
    resp = RationalFunction(num, den)
    return DeviceEntry(resp, resp.reciprocal())


def make_entry(model: DeviceModel) -> DeviceEntry:
    if isinstance(model, GfmParams):
        return gfm_entry(model)
    if isinstance(model, GflParams):
        return gfl_entry(model)
    if isinstance(model, CustomRational):
        return DeviceEntry(model.entry, model.entry.reciprocal())
    raise ConfigurationError(f"unknown device model {model!r}")


def model_role(model: DeviceModel) -> str:
    return GFM if isinstance(model, GfmParams) else GFL


def device_matrix(models, roles=None) -> list[DeviceEntry]:
    """Entries of the diagonal device matrix, in topology device order.

    When the topology's role tags are passed, GFM/GFL models are checked
    against them (custom devices may stand in for either role).
    """
    models = list(models)
    if not models:
        raise ConfigurationError("device list is empty")
    if roles is not None:
        if len(roles) != len(models):
            raise ConfigurationError(
                f"{len(models)} devices but {len(roles)} device nodes in topology"
            )
        for k, (model, role) in enumerate(zip(models, roles)):
            if isinstance(model, GfmParams) and role != GFM:
                raise ConfigurationError(f"device {k} is GFM but node role is {role}")
            if isinstance(model, GflParams) and role != GFL:
                raise ConfigurationError(f"device {k} is GFL but node role is {role}")
    return [make_entry(m) for m in models]


def _roots_or_empty(poly: Polynomial) -> np.ndarray:
    if poly.degree < 1:
        return np.empty(0, dtype=complex)
    return poly.roots()


def check_device_nonsingular(entry: DeviceEntry, dom: ProhibitedDomain) -> bool:
    """True iff no zero of the device's angle-response numerator lies in the
    prohibited domain (the non-singularity assumption of the certificate)."""
    zeros = _roots_or_empty(entry.response.num)
    return not np.any(dom.contains(zeros))


def check_entry_analytic(entry: DeviceEntry, dom: ProhibitedDomain) -> bool:
    """True iff both the entry and its reciprocal are analytic inside the
    prohibited domain (the excluded origin does not count)."""
    poles = np.concatenate(
        [_roots_or_empty(entry.response.num), _roots_or_empty(entry.response.den)]
    )
    return not np.any(dom.contains(poles))
