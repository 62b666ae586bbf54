"""Plant abstractions and the built-in benchmark plants.

A plant bundles discrete-time dynamics ``x(k+1) = f(x(k), u(k), w(k))``
with a Lyapunov function ``V``, a stabilizing policy ``kappa``, and the
closed-loop contraction factor ``rho`` / open-loop growth factor ``alpha``
used by the stability certificates.

All built-in plants are vectorized: ``f``, ``kappa`` and ``V`` accept
arrays with the state/input/disturbance components on the last axis and
broadcast over leading axes. This lets the Monte-Carlo engine step many
runs at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DimensionError

SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class DisturbanceModel:
    """Per-step additive disturbance: none, uniform(lo, hi) or gaussian(mean, variance)."""

    kind: str = "none"
    dim: int = 0
    lo: float = 0.0
    hi: float = 0.0
    mean: float = 0.0
    variance: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "gaussian"):
            raise ConfigError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == "uniform" and self.lo > self.hi:
            raise ConfigError("disturbance.lo must be <= disturbance.hi")
        if self.kind == "gaussian" and self.variance < 0:
            raise ConfigError("disturbance.variance must be >= 0")

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Draw disturbances of the given leading shape, component axis last."""
        full = tuple(shape) + (self.dim,)
        if self.kind == "none" or self.dim == 0:
            return np.zeros(full)
        if self.kind == "uniform":
            return rng.random(full) * (self.hi - self.lo) + self.lo
        return rng.standard_normal(full) * np.sqrt(self.variance) + self.mean


@dataclass(frozen=True)
class PlantModel:
    """A plant with certified policy: dynamics, Lyapunov data, and rate constants.

    ``alpha`` may be None for plants where no global open-loop growth bound
    exists (the cubic benchmark); simulation never needs it, only the
    certificate evaluation does.
    """

    name: str
    n: int
    p: int
    m: int
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    lyapunov: Callable[[np.ndarray], np.ndarray]
    policy: Callable[[np.ndarray], np.ndarray]
    rho: float
    alpha: Optional[float] = None
    phi1: Callable[[np.ndarray], np.ndarray] = lambda s: s
    phi2: Callable[[np.ndarray], np.ndarray] = lambda s: s
    sample_box: float = 10.0  # half-width of the box used for invariant sampling
    vectorized: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.rho < 1.0):
            raise ConfigError(f"rho must lie in [0, 1), got {self.rho}")
        if self.alpha is not None and self.alpha < 1.0:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")


def step(plant: PlantModel, x, u, w) -> np.ndarray:
    """One application of the plant dynamics, with dimension checks."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape[-1:] != (plant.n,):
        raise DimensionError(f"state has last dim {x.shape[-1:]}, expected {plant.n}")
    if u.shape[-1:] != (plant.p,):
        raise DimensionError(f"input has last dim {u.shape[-1:]}, expected {plant.p}")
    if w.shape[-1:] != (plant.m,):
        raise DimensionError(f"disturbance has last dim {w.shape[-1:]}, expected {plant.m}")
    return plant.f(x, u, w)


def norm(x) -> np.ndarray:
    """Euclidean norm over the last axis (keeps leading axes)."""
    return np.sqrt(np.sum(np.square(x), axis=-1))


def lqr_gain_scalar(a: float, q: float, r: float, tol: float = 1e-12, max_iter: int = 100000) -> float:
    """Infinite-horizon LQR gain for x+ = a x + u with stage cost q x^2 + r u^2.

    Iterates the scalar Riccati recursion to a fixed point.
    """
    pk = q
    for _ in range(max_iter):
        pk_next = q + a * a * pk * r / (r + pk)
        if abs(pk_next - pk) <= tol:
            pk = pk_next
            break
        pk = pk_next
    return a * pk / (r + pk)


def _cubic_scalar(alpha: Optional[float] = None) -> PlantModel:
    def f(x, u, w):
        return x + 0.01 * (x ** 3 + u) + w

    def kappa(x):
        return -x ** 3 - x

    return PlantModel(
        name="cubic_scalar", n=1, p=1, m=1,
        f=f, lyapunov=norm, policy=kappa,
        rho=0.99, alpha=alpha, vectorized=True,
        params={} if alpha is None else {"alpha": alpha},
    )


def _linear_scalar(a: float, q: float = 0.2, r: float = 2.0) -> PlantModel:
    gain = lqr_gain_scalar(a, q, r)
    rho = abs(a - gain)
    if rho >= 1.0:
        raise ConfigError(f"LQR loop for a={a} is not contracting (|a-K|={rho})")

    def f(x, u, w):
        return a * x + u + w

    def kappa(x):
        return -gain * x

    return PlantModel(
        name="linear_scalar", n=1, p=1, m=1,
        f=f, lyapunov=norm, policy=kappa,
        rho=rho, alpha=max(1.0, abs(a)), vectorized=True,
        params={"a": a, "gain": gain},
    )


def sat(mu):
    """Unit saturation: clips to [-1, 1]."""
    return np.clip(mu, -1.0, 1.0)


def _sat_2d() -> PlantModel:
    def f(x, u, w):
        x1 = x[..., 0]
        x2 = x[..., 1]
        out = np.empty(np.broadcast_shapes(x.shape[:-1], u.shape[:-1], w.shape[:-1]) + (2,))
        out[..., 0] = x2 + u[..., 0] + np.sqrt(w[..., 0] ** 2 + 5.0) - SQRT5
        out[..., 1] = -sat(x1 + x2) + u[..., 1]
        return out

    def kappa(x):
        out = np.empty(x.shape)
        out[..., 0] = -x[..., 1]
        out[..., 1] = 0.8 * sat(x[..., 0] + x[..., 1])
        return out

    def v(x):
        return 2.0 * norm(x)

    return PlantModel(
        name="sat_2d", n=2, p=2, m=1,
        f=f, lyapunov=v, policy=kappa,
        rho=0.5, alpha=1.618,
        phi1=lambda s: 2.0 * s, phi2=lambda s: 2.0 * s,
        vectorized=True,
    )


def _log_lyapunov(rho: float) -> PlantModel:
    if not (0.0 <= rho < 1.0):
        raise ConfigError(f"log_lyapunov rho must lie in [0, 1), got {rho}")

    def f(x, u, w):
        return x ** 2 + u

    def v(x):
        return np.log(norm(x) + 1.0)

    def kappa(x):
        # closed loop satisfies V(f(x, kappa(x), 0)) = rho * V(x) exactly
        return -x ** 2 + np.exp(rho * v(x)[..., None]) - 1.0

    return PlantModel(
        name="log_lyapunov", n=1, p=1, m=0,
        f=f, lyapunov=v, policy=kappa,
        rho=rho, alpha=2.0,
        phi1=lambda s: np.log(s + 1.0), phi2=lambda s: np.log(s + 1.0),
        sample_box=100.0, vectorized=True,
        params={"rho": rho},
    )


_BUILDERS = {
    "cubic_scalar": _cubic_scalar,
    "linear_scalar": _linear_scalar,
    "sat_2d": _sat_2d,
    "log_lyapunov": _log_lyapunov,
}


def make_builtin_plant(name: str, **params) -> PlantModel:
    """Construct one of the four built-in plants by name.

    cubic_scalar(alpha=None), linear_scalar(a), sat_2d(), log_lyapunov(rho).
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown plant {name!r}; choose from {sorted(_BUILDERS)}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for plant {name!r}: {exc}") from None
