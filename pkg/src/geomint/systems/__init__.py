"""Benchmark systems bundled as (action, frozen field, invariants) records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional

import numpy as np

from ..actions import HomogeneousAction
from ..integrators import CotangentGroup, SolveConfig, symplectic_step

__all__ = [
    "System",
    "CotangentForm",
    "symplectic_integrate",
    "SYSTEM_IDS",
    "get_system",
]


@dataclass(frozen=True)
class CotangentForm:
    """Hamiltonian (f1, f2) view of a system on a cotangent group, with
    pack/unpack maps between (g, mu) pairs and the flat state layout."""

    group: CotangentGroup
    f: Callable[[Any, np.ndarray], tuple]
    pack: Callable[[Any, np.ndarray], np.ndarray]
    unpack: Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class System:
    name: str
    action: HomogeneousAction
    field: Callable[[np.ndarray], np.ndarray]
    initial: np.ndarray
    energy: Callable[[np.ndarray], float]
    invariants: Mapping[str, Callable[[np.ndarray], float]]
    cotangent: Optional[CotangentForm] = None


def symplectic_integrate(
    system: System,
    theta: float,
    h: float,
    n_steps: int,
    t0: float = 0.0,
    solve: SolveConfig = SolveConfig(),
):
    """Uniform-step driver for the implicit symplectic family, working on
    the system's flat state layout."""
    if system.cotangent is None:
        raise ValueError(f"system {system.name} has no cotangent formulation")
    ct = system.cotangent
    g, mu = ct.unpack(np.asarray(system.initial, dtype=float))
    ys = np.empty((n_steps + 1, system.initial.shape[0]))
    ys[0] = ct.pack(g, mu)
    for n in range(n_steps):
        g, mu = symplectic_step(ct.group, ct.f, g, mu, h, theta, solve)
        ys[n + 1] = ct.pack(g, mu)
    ts = t0 + h * np.arange(n_steps + 1)
    return ts, ys


SYSTEM_IDS = (
    "heavytop-body",
    "heavytop-spatial",
    "heavytop-lp",
    "heavytop-ext",
    "pendulum",
    "quadrotor",
)


def _heavytop_params(preset, overrides):
    from .heavytop import BRULS_TOP, HeavyTopParams

    if preset not in (None, "bruls-top"):
        raise ValueError(f"unknown heavy top preset {preset!r}")
    allowed = {"mass", "gravity", "length"}
    unknown = set(overrides) - allowed
    if unknown:
        raise ValueError(f"unknown heavy top overrides: {sorted(unknown)}")
    return HeavyTopParams(
        inertia=BRULS_TOP.inertia,
        mass=overrides.get("mass", BRULS_TOP.mass),
        length=overrides.get("length", BRULS_TOP.length),
        gravity=overrides.get("gravity", BRULS_TOP.gravity),
    )


def get_system(system_id: str, preset: Optional[str] = None, **overrides) -> System:
    """Build a named benchmark system.

    Recognized overrides: heavy top -- mass, gravity, length; pendulum --
    n, mass, length, gravity; quadrotor -- payload_mass, gravity.
    The only named preset is ``bruls-top`` (the heavy top benchmark
    parameters, also the default).
    """
    if system_id.startswith("heavytop-"):
        from . import heavytop as ht

        params = _heavytop_params(preset, overrides)
        builders = {
            "heavytop-body": ht.build_body,
            "heavytop-spatial": ht.build_spatial,
            "heavytop-lp": ht.build_liepoisson,
            "heavytop-ext": ht.build_ext,
        }
        if system_id not in builders:
            raise ValueError(f"unknown system {system_id!r}")
        return builders[system_id](params)

    if preset is not None:
        raise ValueError(f"preset {preset!r} only applies to heavy top systems")

    if system_id == "pendulum":
        from .pendulum import PendulumParams, build_pendulum

        allowed = {"n", "mass", "length", "gravity"}
        unknown = set(overrides) - allowed
        if unknown:
            raise ValueError(f"unknown pendulum overrides: {sorted(unknown)}")
        params = PendulumParams.uniform(
            int(overrides.get("n", 2)),
            mass=overrides.get("mass", 1.0),
            length=overrides.get("length", 1.0),
            gravity=overrides.get("gravity", 9.81),
        )
        return build_pendulum(params)

    if system_id == "quadrotor":
        from .quadrotor import QuadrotorParams, build_quadrotor

        allowed = {"payload_mass", "gravity"}
        unknown = set(overrides) - allowed
        if unknown:
            raise ValueError(f"unknown quadrotor overrides: {sorted(unknown)}")
        params = QuadrotorParams(
            payload_mass=overrides.get("payload_mass", 1.0),
            gravity=overrides.get("gravity", 9.81),
        )
        return build_quadrotor(params)

    raise ValueError(f"unknown system {system_id!r} (expected one of {SYSTEM_IDS})")
