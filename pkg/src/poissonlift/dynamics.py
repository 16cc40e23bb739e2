"""Hamilton's equations, fixed-step RK4 and conservation diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DivergenceError, PreconditionViolated
from .exactpoly import Poly, VarContext, compile_polys
from .poisson_core import PoissonTensor, hamiltonian_vf


@dataclass(frozen=True)
class ODESystem:
    """``dz_j/dt = rhs_j(z)`` over the coordinates of ``context``."""

    context: VarContext
    rhs: tuple
    coords: tuple = None

    def __post_init__(self):
        coords = tuple(self.coords) if self.coords is not None else self.context.coords
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if len(self.rhs) != len(coords):
            raise ValueError(f"{len(self.rhs)} right-hand sides for {len(coords)} coordinates")

    def bind(self, params: Mapping[str, object]) -> "ODESystem":
        names = [n for n in params if self.context.is_param(n)]
        if not names:
            return self
        ctx = self.context.without_params(*names)
        return ODESystem(ctx, tuple(r.subs_params(params) for r in self.rhs), self.coords)

    def render(self) -> list[str]:
        """One ``d<z>/dt = ...`` line per coordinate."""
        return [f"d{z}/dt = {r}" for z, r in zip(self.coords, self.rhs)]

    def as_dict(self) -> dict[str, str]:
        return {z: str(r) for z, r in zip(self.coords, self.rhs)}

    def compile(self):
        if self.context.params:
            raise PreconditionViolated("all parameters bound", detail=f"unbound {', '.join(self.context.params)}")
        return compile_polys(list(self.rhs), self.coords)


def hamiltons_equations(pi: PoissonTensor, H: Poly) -> ODESystem:
    """``dz_j/dt = {z_j, H}``."""
    vf = hamiltonian_vf(pi, H)
    return ODESystem(pi.context, tuple(vf.components), pi.coords)


@dataclass
class Trajectory:
    times: list
    states: list
    coords: tuple
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.coords])
        for t, z in zip(self.times, self.states):
            w.writerow([repr(t), *(repr(v) for v in z)])
        return buf.getvalue()


def integrate_rk4(
    sys: ODESystem,
    z0: Sequence[float],
    dt: float,
    T: float,
    params: Mapping[str, object] | None = None,
    every: int = 1,
) -> Trajectory:
    """Classical fixed-step RK4; ``round(T/dt)`` steps, keeping every ``every``-th state."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not T >= dt:
        raise ValueError("T must be at least dt")
    if len(z0) != len(sys.coords):
        raise ValueError(f"z0 needs {len(sys.coords)} components")
    f = sys.bind(params or {}).compile()
    steps = int(round(T / dt))
    z = tuple(float(v) for v in z0)
    times, states = [0.0], [z]
    h2, h6 = dt / 2.0, dt / 6.0
    for n in range(1, steps + 1):
        try:
            k1 = f(*z)
            k2 = f(*(a + h2 * b for a, b in zip(z, k1)))
            k3 = f(*(a + h2 * b for a, b in zip(z, k2)))
            k4 = f(*(a + dt * b for a, b in zip(z, k3)))
        except OverflowError:
            raise DivergenceError(n, z) from None
        z = tuple(a + h6 * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(z, k1, k2, k3, k4))
        if not all(math.isfinite(v) for v in z):
            raise DivergenceError(n, z)
        if n % every == 0 or n == steps:
            times.append(n * dt)
            states.append(z)
    return Trajectory(times, states, sys.coords, {"dt": dt, "T": T, "steps": steps, "method": "rk4"})


@dataclass
class Drift:
    name: str
    initial: float
    max_abs: float
    max_rel: float


@dataclass
class ConservationReport:
    drifts: list
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Drift:
        for d in self.drifts:
            if d.name == name:
                return d
        raise KeyError(name)

    def worst_relative(self) -> float:
        return max((d.max_rel for d in self.drifts), default=0.0)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "meta": dict(self.meta),
            "functions": [
                {"name": d.name, "initial": d.initial, "max_abs_drift": d.max_abs, "max_rel_drift": d.max_rel}
                for d in self.drifts
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def conservation_report(traj: Trajectory, fns, params: Mapping[str, object] | None = None) -> ConservationReport:
    """Maximum drift ``|f(z(t)) - f(z(0))|`` per function.

    The relative drift divides by ``|f(z(0))|`` unless that is zero, in
    which case it equals the absolute drift.  ``fns`` is a FunctionFamily or
    a sequence of ``(name, Poly)`` pairs.
    """
    drifts = []
    for name, f in getattr(fns, "entries", fns):
        if params:
            f = f.subs_params(params)
        g = f.compile(traj.coords)
        vals = [g(*z) for z in traj.states]
        f0 = vals[0]
        worst = max(abs(v - f0) for v in vals)
        rel = worst / abs(f0) if f0 != 0 else worst
        drifts.append(Drift(name, f0, worst, rel))
    return ConservationReport(drifts, dict(traj.meta))
