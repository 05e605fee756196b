"""Grid topology, dynamic line admittances, and Kron reduction.

Topologies are immutable after construction.  The network matrix is always
evaluated pointwise at a complex frequency; no symbolic rational-matrix
reduction is attempted.  Device nodes come first (GFM block, then GFL
block) and fix the row/column ordering of every derived matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, LineResonanceError, ReductionSingularityError

GFM = "gfm"
GFL = "gfl"

#: relative pivot threshold for Kron reduction singularity detection
PIVOT_REL_TOL = 1e-10


@dataclass(frozen=True)
class LineParams:
    """Electrical parameters of one line.

    l is the per-unit line inductance, rho the resistance-inductance ratio
    in 1/s.  The nominal angular frequency omega0 is held once per topology.
    The stiffness multiplier scales the admittance to model a non-flat
    operating-point angle difference; 1.0 means the flat-angle assumption.
    """

    l: float
    rho: float = 0.0
    stiffness: float = 1.0

    def __post_init__(self):
        if not self.l > 0:
            raise ConfigurationError(f"line inductance must be > 0, got {self.l}")
        if self.rho < 0:
            raise ConfigurationError(f"rho must be >= 0, got {self.rho}")
        if not self.stiffness > 0:
            raise ConfigurationError("stiffness multiplier must be > 0")


@dataclass(frozen=True)
class Line:
    a: str
    b: str
    params: LineParams


@dataclass(frozen=True)
class GridTopology:
    """Device nodes (role-tagged), interior nodes, and lines.

    device_nodes must list all GFM nodes before all GFL nodes; this ordering
    fixes the block partition of the reduced network matrix.
    """

    device_nodes: tuple
    device_roles: tuple
    interior_nodes: tuple
    lines: tuple
    omega0: float = 1.0

    def __init__(self, device_nodes, device_roles, interior_nodes, lines, omega0=1.0):
        device_nodes = tuple(device_nodes)
        device_roles = tuple(device_roles)
        interior_nodes = tuple(interior_nodes)
        lines = tuple(
            ln if isinstance(ln, Line) else Line(ln[0], ln[1], ln[2]) for ln in lines
        )
        object.__setattr__(self, "device_nodes", device_nodes)
        object.__setattr__(self, "device_roles", device_roles)
        object.__setattr__(self, "interior_nodes", interior_nodes)
        object.__setattr__(self, "lines", lines)
        object.__setattr__(self, "omega0", float(omega0))
        self._validate()

    def _validate(self):
        if len(self.device_nodes) != len(self.device_roles):
            raise ConfigurationError("device_nodes and device_roles length mismatch")
        if not self.device_nodes:
            raise ConfigurationError("topology needs at least one device node")
        if not self.omega0 > 0:
            raise ConfigurationError("omega0 must be > 0")
        for r in self.device_roles:
            if r not in (GFM, GFL):
                raise ConfigurationError(f"unknown device role {r!r}")
        # GFM block first, GFL block second
        seen_gfl = False
        for r in self.device_roles:
            if r == GFL:
                seen_gfl = True
            elif seen_gfl:
                raise ConfigurationError("GFM devices must precede GFL devices")
        names = list(self.device_nodes) + list(self.interior_nodes)
        if len(set(names)) != len(names):
            raise ConfigurationError("node identifiers must be unique")
        known = set(names)
        for ln in self.lines:
            if ln.a == ln.b:
                raise ConfigurationError(f"self-loop at node {ln.a!r}")
            if ln.a not in known or ln.b not in known:
                raise ConfigurationError(f"line references unknown node: {ln.a}-{ln.b}")
        if not self._connected():
            raise ConfigurationError("topology graph is not connected")

    def _connected(self) -> bool:
        names = list(self.device_nodes) + list(self.interior_nodes)
        if len(names) == 1:
            return True
        adj = {n: set() for n in names}
        for ln in self.lines:
            adj[ln.a].add(ln.b)
            adj[ln.b].add(ln.a)
        seen = {names[0]}
        stack = [names[0]]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(names)

    @property
    def all_nodes(self) -> tuple:
        return self.device_nodes + self.interior_nodes

    @property
    def n_devices(self) -> int:
        return len(self.device_nodes)

    def node_index(self, name: str) -> int:
        return self.all_nodes.index(name)


def line_admittance(line: LineParams, s: complex, omega0: float) -> complex:
    """Dynamic admittance omega0 / ((s^2 + 2*rho*s + omega0^2 + rho^2) * l).

    Raises :class:`LineResonanceError` when the denominator vanishes, which
    happens at s = -rho +/- j*omega0.
    """
    den = (s * s + 2.0 * line.rho * s + omega0 * omega0 + line.rho * line.rho) * line.l
    scale = (abs(s) ** 2 + 2.0 * line.rho * abs(s) + omega0**2 + line.rho**2) * line.l
    if abs(den) <= 1e-12 * scale:
        raise LineResonanceError(s)
    return line.stiffness * omega0 / den


def assemble_Y(topology: GridTopology, s: complex) -> np.ndarray:
    """Graph Laplacian of line admittances over all nodes at frequency s."""
    nodes = topology.all_nodes
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    Y = np.zeros((n, n), dtype=complex)
    for ln in topology.lines:
        y = line_admittance(ln.params, s, topology.omega0)
        i, j = idx[ln.a], idx[ln.b]
        Y[i, i] += y
        Y[j, j] += y
        Y[i, j] -= y
        Y[j, i] -= y
    return Y


def kron_reduce(Y: np.ndarray, interior: Sequence[int], node_names=None) -> np.ndarray:
    """Schur complement of Y onto the non-interior nodes.

    Interior nodes are eliminated one at a time (classic Kron step); a pivot
    with |pivot| < PIVOT_REL_TOL * ||Y||_inf raises
    :class:`ReductionSingularityError` naming the offending node.
    """
    Y = np.array(Y, dtype=complex)
    interior = list(interior)
    if not interior:
        return Y
    n = Y.shape[0]
    names = list(node_names) if node_names is not None else list(range(n))
    scale = np.max(np.abs(Y)) or 1.0
    keep = [k for k in range(n) if k not in set(interior)]
    order = keep + interior
    Y = Y[np.ix_(order, order)]
    names = [names[k] for k in order]
    m = len(keep)
    while Y.shape[0] > m:
        k = Y.shape[0] - 1
        pivot = Y[k, k]
        if abs(pivot) < PIVOT_REL_TOL * scale:
            raise ReductionSingularityError(names[k])
        Y = Y[:k, :k] - np.outer(Y[:k, k], Y[k, :k]) / pivot
        names = names[:k]
    return Y


def static_network(topology: GridTopology) -> np.ndarray:
    """Constant network matrix: Laplacian at s = 0, all interiors eliminated.

    This is the low-frequency simplification used by the case studies and
    by the centralized pole oracle.
    """
    Y = assemble_Y(topology, 0.0)
    nd = topology.n_devices
    interior = list(range(nd, len(topology.all_nodes)))
    N = kron_reduce(Y, interior, node_names=topology.all_nodes)
    return N.real


def reduced_network(topology: GridTopology, s: complex) -> np.ndarray:
    """Dynamic network matrix at frequency s (assemble + Kron reduce)."""
    Y = assemble_Y(topology, s)
    nd = topology.n_devices
    interior = list(range(nd, len(topology.all_nodes)))
    return kron_reduce(Y, interior, node_names=topology.all_nodes)


def network_row(N: np.ndarray, i: int):
    """Diagonal entry and off-diagonal absolute row sum for device i."""
    n = N.shape[0]
    if not 0 <= i < n:
        raise ConfigurationError(f"device index {i} out of range for {n}x{n} matrix")
    off = np.sum(np.abs(N[i, :])) - abs(N[i, i])
    return N[i, i], float(off)
