"""Study configuration: YAML schema, validation, and derived objects.

A single config file drives every command.  Defaults (omega0 = 1.0
normalized, v0 = 1.0 pu, spacing = 0.01, margin_tol = 1e-6) are injected
at load time and echoed back in reports so a run is reproducible from its
output alone.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field

import numpy as np
import yaml

from .certify import DynamicNetwork, ParameterGrid, StaticNetwork, SweepTask
from .devices import (
    CustomRational,
    DeviceModel,
    GflParams,
    GfmParams,
    device_matrix,
    make_entry,
)
from .domain import ProhibitedDomain
from .errors import ConfigurationError
from .netmodel import GFL, GFM, GridTopology, Line, LineParams
from .ratcalc import Polynomial, RationalFunction

DEFAULT_SPACING = 0.01
DEFAULT_MARGIN_TOL = 1e-6
DEFAULT_OMEGA0 = 1.0


@dataclass(frozen=True)
class GridEntryFactory:
    """Picklable factory: device model with some parameters swept."""

    base: DeviceModel

    def __call__(self, point):
        try:
            model = dataclasses.replace(self.base, **point)
        except TypeError as exc:
            raise ConfigurationError(f"bad sweep axis for {self.base}: {exc}") from exc
        return make_entry(model)


@dataclass(frozen=True)
class SimulationSpec:
    device: int
    magnitude: float
    start: float
    horizon: float
    dt: float


@dataclass
class StudyConfig:
    topology: GridTopology
    models: list
    domain: ProhibitedDomain
    spacing: float
    margin_tol: float
    network_mode: str
    sweeps: list  # list[SweepTask]
    simulation: SimulationSpec | None
    workers: int
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def entries(self):
        return device_matrix(self.models, self.topology.device_roles)

    def provider(self):
        if self.network_mode == "dynamic":
            return DynamicNetwork(self.topology)
        return StaticNetwork.from_topology(self.topology)

    def digest(self) -> str:
        return hashlib.sha256(
            yaml.safe_dump(self.raw, sort_keys=True).encode()
        ).hexdigest()[:16]


def _require(mapping, key, section):
    if key not in mapping:
        raise ConfigurationError(f"missing field {key!r} in section {section!r}")
    return mapping[key]


def _num(mapping, key, section, default=None):
    if key not in mapping:
        if default is None:
            raise ConfigurationError(f"missing field {key!r} in section {section!r}")
        return default
    v = mapping[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigurationError(f"field {key!r} in section {section!r} must be numeric")
    return float(v)


def _parse_topology(sec) -> GridTopology:
    devs = _require(sec, "devices", "topology")
    if not isinstance(devs, list) or not devs:
        raise ConfigurationError("topology.devices must be a non-empty list")
    names, roles = [], []
    for d in devs:
        names.append(str(_require(d, "name", "topology.devices")))
        role = str(_require(d, "role", "topology.devices")).lower()
        if role not in (GFM, GFL):
            raise ConfigurationError(f"topology.devices role must be gfm/gfl, got {role!r}")
        roles.append(role)
    interior = [str(n) for n in sec.get("interior", [])]
    lines = []
    for ln in sec.get("lines", []):
        lines.append(
            Line(
                str(_require(ln, "a", "topology.lines")),
                str(_require(ln, "b", "topology.lines")),
                LineParams(
                    l=_num(ln, "l", "topology.lines"),
                    rho=_num(ln, "rho", "topology.lines", 0.0),
                    stiffness=_num(ln, "stiffness", "topology.lines", 1.0),
                ),
            )
        )
    omega0 = _num(sec, "omega0", "topology", DEFAULT_OMEGA0)
    return GridTopology(names, roles, interior, lines, omega0=omega0)


def _parse_device(d, topology: GridTopology):
    node = str(_require(d, "node", "devices"))
    if node not in topology.device_nodes:
        raise ConfigurationError(f"devices entry names unknown device node {node!r}")
    role = str(d.get("role", topology.device_roles[topology.device_nodes.index(node)]))
    if role == GFM:
        return node, GfmParams(m=_num(d, "m", "devices"), d=_num(d, "d", "devices"))
    if role == GFL:
        return node, GflParams(
            H=_num(d, "H", "devices"),
            D=_num(d, "D", "devices"),
            kp=_num(d, "kp", "devices"),
            ki=_num(d, "ki", "devices"),
            v0=_num(d, "v0", "devices", 1.0),
        )
    if role == "custom":
        num = d.get("num")
        den = d.get("den")
        if not isinstance(num, list) or not isinstance(den, list):
            raise ConfigurationError("custom device needs 'num' and 'den' coefficient lists")
        return node, CustomRational(RationalFunction(Polynomial(num), Polynomial(den)))
    raise ConfigurationError(f"unknown device role {role!r}")


def _parse_axis(ax):
    name = str(_require(ax, "name", "sweep.axes"))
    lo = _num(ax, "min", "sweep.axes")
    hi = _num(ax, "max", "sweep.axes")
    count = int(_num(ax, "count", "sweep.axes"))
    if not (hi > lo and count >= 1):
        raise ConfigurationError(f"sweep axis {name!r} needs max > min and count >= 1")
    return name, np.linspace(lo, hi, count)


def parse_config(data: dict) -> StudyConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a mapping")
    topology = _parse_topology(_require(data, "topology", "<root>"))

    dev_sec = _require(data, "devices", "<root>")
    by_node = {}
    for d in dev_sec:
        node, model = _parse_device(d, topology)
        if node in by_node:
            raise ConfigurationError(f"duplicate device definition for node {node!r}")
        by_node[node] = model
    models = []
    for node in topology.device_nodes:
        if node not in by_node:
            raise ConfigurationError(f"no device definition for node {node!r}")
        models.append(by_node[node])
    device_matrix(models, topology.device_roles)  # role/order validation

    dom_sec = _require(data, "domain", "<root>")
    domain = ProhibitedDomain(
        sigma=_num(dom_sec, "sigma", "domain"),
        xi=_num(dom_sec, "xi", "domain"),
        eps1=_num(dom_sec, "eps1", "domain", 1e-3),
        eps2=_num(dom_sec, "eps2", "domain", 0.1),
        eta1=_num(dom_sec, "eta1", "domain", 10.0),
        eta2=_num(dom_sec, "eta2", "domain", 10.0),
    )
    spacing = _num(dom_sec, "spacing", "domain", DEFAULT_SPACING)
    if spacing <= 0:
        raise ConfigurationError("domain.spacing must be > 0")

    exec_sec = data.get("execution", {}) or {}
    margin_tol = _num(exec_sec, "margin_tol", "execution", DEFAULT_MARGIN_TOL)
    workers = int(_num(exec_sec, "workers", "execution", 1.0))
    network_mode = str(exec_sec.get("network", "static"))
    if network_mode not in ("static", "dynamic"):
        raise ConfigurationError("execution.network must be 'static' or 'dynamic'")

    sweeps = []
    for sw in data.get("sweep", []) or []:
        node = str(_require(sw, "node", "sweep"))
        if node not in topology.device_nodes:
            raise ConfigurationError(f"sweep names unknown device node {node!r}")
        i = topology.device_nodes.index(node)
        axes = [_parse_axis(ax) for ax in _require(sw, "axes", "sweep")]
        grid = ParameterGrid([a for a, _ in axes], [v for _, v in axes])
        sweeps.append(SweepTask(i, GridEntryFactory(models[i]), grid))

    sim = None
    sim_sec = data.get("simulation")
    if sim_sec:
        node = str(_require(sim_sec, "device", "simulation"))
        if node not in topology.device_nodes:
            raise ConfigurationError(f"simulation names unknown device node {node!r}")
        sim = SimulationSpec(
            device=topology.device_nodes.index(node),
            magnitude=_num(sim_sec, "magnitude", "simulation"),
            start=_num(sim_sec, "start", "simulation", 1.0),
            horizon=_num(sim_sec, "horizon", "simulation"),
            dt=_num(sim_sec, "dt", "simulation", 0.01),
        )

    # normalized echo of the effective configuration
    raw = {
        "topology": {
            "omega0": topology.omega0,
            "devices": [
                {"name": n, "role": r}
                for n, r in zip(topology.device_nodes, topology.device_roles)
            ],
            "interior": list(topology.interior_nodes),
            "lines": [
                {
                    "a": ln.a,
                    "b": ln.b,
                    "l": ln.params.l,
                    "rho": ln.params.rho,
                    "stiffness": ln.params.stiffness,
                }
                for ln in topology.lines
            ],
        },
        "devices": [
            {"node": n, **_model_dict(m)} for n, m in zip(topology.device_nodes, models)
        ],
        "domain": {
            "sigma": domain.sigma,
            "xi": domain.xi,
            "eps1": domain.eps1,
            "eps2": domain.eps2,
            "eta1": domain.eta1,
            "eta2": domain.eta2,
            "spacing": spacing,
        },
        "execution": {
            "margin_tol": margin_tol,
            "workers": workers,
            "network": network_mode,
        },
        "sweep": data.get("sweep", []) or [],
        "simulation": sim_sec or {},
    }
    return StudyConfig(
        topology=topology,
        models=models,
        domain=domain,
        spacing=spacing,
        margin_tol=margin_tol,
        network_mode=network_mode,
        sweeps=sweeps,
        simulation=sim,
        workers=workers,
        raw=raw,
    )


def _model_dict(m):
    if isinstance(m, GfmParams):
        return {"role": GFM, "m": m.m, "d": m.d}
    if isinstance(m, GflParams):
        return {"role": GFL, "H": m.H, "D": m.D, "kp": m.kp, "ki": m.ki, "v0": m.v0}
    return {
        "role": "custom",
        "num": list(m.entry.num.coeffs),
        "den": list(m.entry.den.coeffs),
    }


def load_config(path: str) -> StudyConfig:
    """Load, validate, and normalize a study configuration file."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config parse error in {path!r}: {exc}") from exc
    return parse_config(data)
