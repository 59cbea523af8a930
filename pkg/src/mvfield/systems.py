"""Built-in dynamical systems and the two sampling modes.

Systems evaluate their right-hand side exactly as printed:

    reporbit:   x' = y + x(x^2 + y^2 - 1),  y' = -x + y(x^2 + y^2 - 1)
    vanderpol:  x' = y,                     y' = y(1 - x^2) - x
    lorenz:     x' = 10(y - x),  y' = 28x - xz - y,  z' = xy - (8/3)z
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import ParameterError, SampleCloud


class DivergenceError(RuntimeError):
    def __init__(self, step: int, state):
        self.step = step
        self.state = state
        super().__init__(f"trajectory diverged at step {step}: {state}")


DIVERGENCE_LIMIT = 1e6


def _reporbit(p: np.ndarray) -> np.ndarray:
    x, y = p[..., 0], p[..., 1]
    r = x * x + y * y - 1.0
    return np.stack([y + x * r, -x + y * r], axis=-1)


def _vanderpol(p: np.ndarray) -> np.ndarray:
    x, y = p[..., 0], p[..., 1]
    return np.stack([y, y * (1.0 - x * x) - x], axis=-1)


def _lorenz(p: np.ndarray) -> np.ndarray:
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([10.0 * (y - x), 28.0 * x - x * z - y, x * y - (8.0 / 3.0) * z], axis=-1)


@dataclass(frozen=True)
class System:
    name: str
    dim: int
    rhs: Callable[[np.ndarray], np.ndarray]
    default_box: tuple[tuple[float, float], ...]


_SYSTEMS = {
    "reporbit": System("reporbit", 2, _reporbit, ((-3.0, 3.0), (-3.0, 3.0))),
    "vanderpol": System("vanderpol", 2, _vanderpol, ((-7.0, 7.0), (-7.0, 7.0))),
    "lorenz": System("lorenz", 3, _lorenz, ((-20.0, 20.0), (-30.0, 30.0), (0.0, 50.0))),
}


def builtin_system(name: str) -> System:
    try:
        return _SYSTEMS[name]
    except KeyError:
        raise ParameterError(
            f"unknown system {name!r}; choose from {sorted(_SYSTEMS)}"
        ) from None


def sample_random(system: System, n: int, box, seed: int) -> SampleCloud:
    """n positions uniform i.i.d. in the box, velocities from the system."""
    box = np.asarray(box, dtype=float)
    if box.shape != (system.dim, 2) or (box[:, 1] <= box[:, 0]).any():
        raise ParameterError("box must be per-axis (min, max) with min < max")
    rng = np.random.default_rng(np.random.PCG64(seed))
    pos = box[:, 0] + rng.random((n, system.dim)) * (box[:, 1] - box[:, 0])
    return SampleCloud(pos, system.rhs(pos))


def euler_trajectory(system: System, x0, dt: float, steps: int) -> SampleCloud:
    """Explicit-Euler orbit x_{i+1} = x_i + dt * f(x_i) with the velocity
    attached at each of the steps+1 points.  Aborts with DivergenceError
    when any coordinate leaves [-1e6, 1e6]."""
    if dt <= 0.0:
        raise ParameterError("dt must be positive")
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    x = np.asarray(x0, dtype=float)
    if x.shape != (system.dim,):
        raise ParameterError(f"x0 must have dimension {system.dim}")
    pos = np.empty((steps + 1, system.dim))
    vel = np.empty_like(pos)
    for i in range(steps + 1):
        if not np.isfinite(x).all() or np.abs(x).max() > DIVERGENCE_LIMIT:
            raise DivergenceError(i, x.tolist())
        pos[i] = x
        v = system.rhs(x)
        vel[i] = v
        x = x + dt * v
    return SampleCloud(pos, vel)


def thin_trajectory(cloud: SampleCloud, target: int) -> SampleCloud:
    """Deterministic even subsampling of a trajectory down to ~target points."""
    n = len(cloud)
    if target >= n:
        return cloud
    idx = np.linspace(0, n - 1, target).round().astype(np.int64)
    idx = np.unique(idx)
    return SampleCloud(cloud.positions[idx], cloud.velocities[idx])
