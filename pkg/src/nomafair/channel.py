"""Large-scale path loss, Rayleigh fading and user placement.

Channel power gains follow ``|h|^2 = |g|^2 / (1 + d^alpha)`` with ``d`` in
meters, so a user at the base station sees the transmitted power unchanged.
Realizations are always returned sorted ascending (weakest user first), which
is the decoding order assumed by every optimizer in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateChannelError, DomainError

# Fixed-distance layouts, distances in meters, farthest user first.
SCENARIOS = {
    1: (340.0, 290.0, 220.0, 150.0),
    2: (800.0, 600.0, 400.0, 200.0),
    3: (1800.0, 1200.0, 700.0, 300.0),
}


class Fading(str, Enum):
    UNIT = "unit"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class PlacementSpec:
    """Where the users are: a fixed list of distances or a uniform disc.

    Exactly one of ``distances`` and ``radius`` is set. Use the
    :meth:`fixed` and :meth:`disc` constructors.
    """

    user_count: int
    distances: tuple[float, ...] | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.user_count < 1:
            raise DomainError("user_count must be >= 1")
        if (self.distances is None) == (self.radius is None):
            raise DomainError("exactly one of distances or radius must be given")
        if self.distances is not None:
            if len(self.distances) != self.user_count:
                raise DomainError("len(distances) must equal user_count")
            if any(not math.isfinite(d) or d < 0 for d in self.distances):
                raise DomainError("distances must be finite and >= 0")
        if self.radius is not None and not (math.isfinite(self.radius) and self.radius > 0):
            raise DomainError("radius must be finite and > 0")

    @classmethod
    def fixed(cls, distances) -> "PlacementSpec":
        d = tuple(float(x) for x in distances)
        return cls(user_count=len(d), distances=d)

    @classmethod
    def disc(cls, radius: float, user_count: int) -> "PlacementSpec":
        return cls(user_count=int(user_count), radius=float(radius))

    @classmethod
    def scenario(cls, number: int) -> "PlacementSpec":
        return cls.fixed(SCENARIOS[number])

    @property
    def is_disc(self) -> bool:
        return self.radius is not None


@dataclass(frozen=True)
class ChannelRealization:
    gains: tuple[float, ...]
    noise_power: float

    def __post_init__(self):
        g = self.gains
        if len(g) < 1:
            raise DomainError("at least one user is required")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise DomainError("noise_power must be finite and > 0")
        if any(not math.isfinite(x) or x <= 0 for x in g):
            raise DegenerateChannelError(f"degenerate gain in {g}")
        if any(g[i] > g[i + 1] for i in range(len(g) - 1)):
            raise DomainError("gains must be sorted ascending")

    @classmethod
    def from_gains(cls, gains, noise_power: float) -> "ChannelRealization":
        """Build a realization from gains in any order (they get sorted)."""
        g = np.asarray(gains, dtype=float)
        order = np.argsort(g, kind="stable")
        return cls(tuple(float(x) for x in g[order]), float(noise_power))

    @property
    def user_count(self) -> int:
        return len(self.gains)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gains, dtype=float)


def pathloss_gain(fading_power, distance, alpha):
    """Channel power gain ``|g|^2 / (1 + d^alpha)``; broadcasts over arrays."""
    g = np.asarray(fading_power, dtype=float)
    d = np.asarray(distance, dtype=float)
    a = np.asarray(alpha, dtype=float)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(d)) and np.all(np.isfinite(a))):
        raise DomainError("inputs must be finite")
    if np.any(g < 0) or np.any(d < 0) or np.any(a < 0):
        raise DomainError("inputs must be non-negative")
    out = g / (1.0 + d**a)
    return float(out) if out.ndim == 0 else out


def sample_rayleigh_power(rng: np.random.Generator, size=None):
    """Squared Rayleigh amplitude, i.e. a unit-mean exponential variate."""
    return rng.standard_exponential(size)


def place_users(spec: PlacementSpec, rng: np.random.Generator | None = None, size=None):
    """User distances in meters.

    Fixed layouts come back verbatim. Disc layouts draw ``r = R * sqrt(u)``
    with ``u`` uniform on (0, 1], which is uniform over the disc area. With
    ``size`` the disc draw has shape ``size + (user_count,)``.
    """
    if spec.distances is not None:
        d = np.asarray(spec.distances, dtype=float)
        if size is None:
            return d
        return np.broadcast_to(d, tuple(np.atleast_1d(size)) + d.shape).copy()
    if rng is None:
        raise DomainError("a random generator is required for disc placement")
    shape = (spec.user_count,) if size is None else tuple(np.atleast_1d(size)) + (spec.user_count,)
    u = 1.0 - rng.random(shape)
    return spec.radius * np.sqrt(u)


def realize_gains(spec: PlacementSpec, alpha: float, fading: Fading, rng, size: int):
    """Batch of ``size`` sorted gain vectors, shape ``(size, M)``.

    Draw order is fixed (placement first, then fading) so a given generator
    state always yields the same batch. Rows with degenerate gains are kept;
    callers mask them with :func:`degenerate_rows`.
    """
    fading = Fading(fading)
    d = place_users(spec, rng, size=size)
    if fading is Fading.RAYLEIGH:
        g = sample_rayleigh_power(rng, d.shape)
    else:
        g = np.ones_like(d)
    with np.errstate(over="ignore"):
        gains = g / (1.0 + d**alpha)
    return np.sort(gains, axis=-1, kind="stable")


def degenerate_rows(gains: np.ndarray) -> np.ndarray:
    return ~np.all(np.isfinite(gains) & (gains > 0), axis=-1)


def realize_channels(spec: PlacementSpec, alpha: float, noise_power: float,
                     fading: Fading = Fading.UNIT, rng=None) -> ChannelRealization:
    """One sorted channel realization.

    Raises :class:`DegenerateChannelError` if a gain underflows to zero or is
    not finite; the caller should redraw.
    """
    fading = Fading(fading)
    if not noise_power > 0:
        raise DomainError("noise_power must be > 0")
    d = place_users(spec, rng)
    if fading is Fading.RAYLEIGH:
        if rng is None:
            raise DomainError("Rayleigh fading needs a random generator")
        g = sample_rayleigh_power(rng, d.shape)
    else:
        g = np.ones_like(d)
    with np.errstate(over="ignore"):
        gains = g / (1.0 + d**alpha)
    if degenerate_rows(gains):
        raise DegenerateChannelError(f"degenerate gains {gains.tolist()}")
    return ChannelRealization.from_gains(gains, noise_power)
