"""Supercell grids: q_k unit cells per direction, m points per unit cell."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError


@dataclass(frozen=True)
class SupercellGrid:
    dimension: int
    supercell: tuple
    m: int
    offset: tuple = field(default=None)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.dimension}", "discrete_hamiltonian")
        sc = tuple(int(q) for q in np.atleast_1d(self.supercell))
        if len(sc) != self.dimension or min(sc) < 1:
            raise ConfigurationError(f"bad supercell {self.supercell!r}", "discrete_hamiltonian")
        if int(self.m) < 2:
            raise ConfigurationError(f"need at least 2 points per cell, got m={self.m}", "discrete_hamiltonian")
        off = (0.0,) * self.dimension if self.offset is None else tuple(float(v) for v in np.atleast_1d(self.offset))
        if len(off) != self.dimension:
            raise ConfigurationError(f"offset {self.offset!r} does not match dimension", "discrete_hamiltonian")
        object.__setattr__(self, "supercell", sc)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "offset", off)

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def shape(self) -> tuple:
        return tuple(q * self.m for q in self.supercell)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cells(self) -> int:
        return int(np.prod(self.supercell))

    def indices(self) -> np.ndarray:
        """All grid multi-indices, (P, n), in C (row-major) order."""
        grids = np.meshgrid(*[np.arange(N) for N in self.shape], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def positions(self, idx=None) -> np.ndarray:
        idx = self.indices() if idx is None else np.asarray(idx)
        return np.asarray(self.offset) + self.h * idx

    def flat(self, idx) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(idx).T), self.shape)

    def shift_steps(self, gamma) -> np.ndarray:
        """Grid-index displacement realising the lattice translation ``gamma``."""
        g = np.atleast_1d(np.asarray(gamma))
        if g.shape != (self.dimension,) or np.any(g != np.round(g)):
            raise GeometryError(f"translation {gamma!r} is not an element of Z^{self.dimension}", "group_cocycle")
        return np.round(g).astype(int) * self.m

    def inner(self, u, v) -> complex:
        return complex(np.vdot(u, v) * self.h ** self.dimension)
