"""Small dense linear algebra helpers and seeded matrix sampling.

Eigenvalue work is delegated to LAPACK through numpy; the sampling path
draws standard normals by the Box-Muller transform over a named, seeded
bit generator so that a (generator, seed, stream) triple reproduces the
same matrices on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SamplingError

GENERATORS = {
    "philox": np.random.Philox,
    "pcg64": np.random.PCG64,
}


def as_square(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def symmetrize(a) -> np.ndarray:
    m = as_square(a)
    return (m + m.T) / 2.0


def sym_eigvals(s) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending."""
    return np.linalg.eigvalsh(symmetrize(s))


def spectral_radius(a) -> float:
    """Largest eigenvalue magnitude."""
    m = as_square(a)
    return float(np.max(np.abs(np.linalg.eigvals(m)))) if m.size else 0.0


def operator_norm(a) -> float:
    """Euclidean operator norm, computed as sqrt(lambda_max(A^T A))."""
    m = as_square(a)
    top = sym_eigvals(m.T @ m)[-1]
    return float(np.sqrt(max(top, 0.0)))


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream: (generator name, seed, stream index).

    Streams with distinct indices are statistically independent; identical
    triples yield identical draws.
    """

    seed: int
    stream: int = 0
    generator_id: str = "philox"

    def __post_init__(self):
        if self.generator_id not in GENERATORS:
            raise ValueError(
                f"unknown generator {self.generator_id!r}; known: {sorted(GENERATORS)}"
            )

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(GENERATORS[self.generator_id](seq))


def standard_normals(gen: np.random.Generator, count: int) -> np.ndarray:
    """Box-Muller normals from the generator's uniform stream."""
    pairs = (count + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # (0, 1]; keeps log finite
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(2.0 * np.pi * u2)
    z[1::2] = radius * np.sin(2.0 * np.pi * u2)
    return z[:count]


class StablePair(NamedTuple):
    a1: np.ndarray
    a2: np.ndarray
    rejections: int


def sample_stable_invertible_pair(
    n: int,
    rng: RngStream,
    max_draws: int = 10**6,
    rho_cap: float = 1.0 - 1e-9,
    det_floor: float = 1e-9,
) -> StablePair:
    """Draw two n-by-n standard normal matrices, redrawing each until it has
    spectral radius below ``rho_cap`` and determinant magnitude above
    ``det_floor``. The number of rejected draws is reported.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    gen = rng.generator()
    accepted: list[np.ndarray] = []
    draws = 0
    while len(accepted) < 2:
        if draws >= max_draws:
            raise SamplingError(f"exceeded {max_draws} draws while sampling a stable pair")
        draws += 1
        mat = standard_normals(gen, n * n).reshape(n, n)
        if spectral_radius(mat) < rho_cap and abs(np.linalg.det(mat)) > det_floor:
            accepted.append(mat)
    return StablePair(accepted[0], accepted[1], draws - 2)
