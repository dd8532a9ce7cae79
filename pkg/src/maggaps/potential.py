"""Morse-type periodic potentials: zeros, Hessians and the nondegeneracy check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, MorseTypeViolation, NumericalError
from .trigpoly import TrigPolynomial

HESSIAN_FLOOR = 1e-8
BOUNDARY_MARGIN = 1e-3


class MorsePotential:
    """A real trigonometric polynomial V on R^n / Z^n with exact derivatives."""

    def __init__(self, poly: TrigPolynomial):
        if not isinstance(poly, TrigPolynomial):
            raise ConfigurationError("potential must be a TrigPolynomial", "potential")
        self.poly = poly
        self.dimension = poly.dimension
        self._grad = poly.gradient()
        self._hess = [[g.derivative(k) for k in range(self.dimension)] for g in self._grad]

    @classmethod
    def from_terms(cls, dimension, terms) -> "MorsePotential":
        return cls(TrigPolynomial.from_terms(dimension, terms))

    @classmethod
    def sin2(cls, dimension=1, frequency=1) -> "MorsePotential":
        """sum_i sin^2(pi * frequency * x_i)."""
        terms = []
        for i in range(dimension):
            k = [0] * dimension
            k[i] = frequency
            terms += [([0] * dimension, "cos", 0.5), (k, "cos", -0.5)]
        return cls.from_terms(dimension, terms)

    def __call__(self, x) -> np.ndarray:
        return self.poly(x)

    def _pts(self, x):
        x = np.asarray(x, dtype=float)
        if self.dimension == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return x

    def gradient(self, x) -> np.ndarray:
        x = self._pts(x)
        return np.stack([g(x) for g in self._grad], axis=-1)

    def hessian(self, x) -> np.ndarray:
        x = self._pts(x)
        n = self.dimension
        out = np.empty(x.shape[:-1] + (n, n))
        for i, k in itertools.product(range(n), repeat=2):
            out[..., i, k] = self._hess[i][k](x)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    @property
    def period_lattice(self) -> np.ndarray:
        return np.eye(self.dimension, dtype=int)

    def is_zero(self) -> bool:
        return self.poly.is_zero()


def from_morse_function(f: TrigPolynomial) -> MorsePotential:
    """V = |df|^2 for the flat metric."""
    if not isinstance(f, TrigPolynomial):
        raise ConfigurationError("Morse function must be a periodic trigonometric polynomial", "potential")
    grad = f.gradient()
    V = grad[0] * grad[0]
    for g in grad[1:]:
        V = V + g * g
    return MorsePotential(V)


def hessian_at(V: MorsePotential, xbar) -> np.ndarray:
    return V.hessian(np.asarray(xbar, dtype=float))


@dataclass
class WellList:
    zeros: list
    hessians: list
    cell_origin: tuple
    c_estimate: float = field(default=float("nan"))

    def __len__(self):
        return len(self.zeros)


def _choose_origin(coords: np.ndarray) -> float:
    """Cell origin s (in [-1/2, 1/2)) keeping every coordinate away from s mod 1."""
    c = np.sort(np.mod(coords, 1.0))

    def clear(s):
        d = np.abs(np.mod(c - s + 0.5, 1.0) - 0.5)
        return d.min() > BOUNDARY_MARGIN

    if clear(0.0):
        return 0.0
    c = np.unique(np.round(c, 12))
    gaps = np.diff(np.append(c, c[0] + 1.0))
    best = gaps.max()
    mids = [np.mod(c[i] + gaps[i] / 2 + 0.5, 1.0) - 0.5 for i in range(len(c)) if gaps[i] > best - 1e-9]
    return float(min(mids, key=lambda s: (abs(s), s)))


def _newton(V: MorsePotential, x, max_iter=60):
    for _ in range(max_iter):
        g = V.gradient(x)
        if np.linalg.norm(g) < 1e-13:
            return x, True
        H = V.hessian(x)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        x = x - step
    return x, np.linalg.norm(V.gradient(x)) < 1e-12


def find_zeros(V: MorsePotential, samples: int = 256) -> WellList:
    """All zeros of V in one period cell, by grid scan plus Newton on grad V.

    The cell is translated so that no zero lies within 1e-3 of its boundary.
    """
    n = V.dimension
    if V.is_zero():
        # whole torus is the zero set; report one representative, rejected downstream
        z = np.zeros(n)
        return WellList([z], [V.hessian(z)], (0.0,) * n)
    ax = np.arange(samples) / samples
    mesh = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), axis=-1)
    vals = V(mesh.reshape(-1, n)).reshape((samples,) * n)
    scale = max(float(np.abs(vals).max()), 1e-300)
    is_min = np.ones(vals.shape, bool)
    for axis in range(n):
        for s in (1, -1):
            is_min &= vals <= np.roll(vals, s, axis=axis)
    # neighbourhood of a zero: V ~ c (h)^2 at worst, so keep small local minima only
    seeds = mesh[is_min & (vals < 1e-2 * scale)]
    # rounding level of evaluating the coefficient sum; 0 when terms cancel exactly
    floor = 64 * np.finfo(float).eps * sum(abs(c) for c in V.poly.coeffs.values())
    zeros: list = []
    for seed in seeds:
        z, ok = _newton(V, seed.copy())
        if not ok:
            raise NumericalError(f"Newton refinement of grad V did not converge from seed {seed.tolist()}", "potential")
        if abs(V(z)) > floor or np.linalg.norm(V.gradient(z)) > 1e-12:
            continue  # positive local minimum, not a zero
        z = np.mod(z, 1.0)
        if not any(np.linalg.norm(np.mod(z - w + 0.5, 1.0) - 0.5) < 1e-8 for w in zeros):
            zeros.append(z)
    if not zeros:
        raise MorseTypeViolation("Morse-type violation: V has no zero in the period cell", "potential")
    pts = np.array(zeros)
    origin = tuple(_choose_origin(pts[:, k]) for k in range(n))
    placed = np.mod(pts - np.array(origin), 1.0) + np.array(origin)
    order = np.lexsort(placed.T[::-1])
    placed = placed[order]
    hess = [V.hessian(z) for z in placed]
    return WellList([z for z in placed], hess, origin)


def verify_morse_type(V: MorsePotential, wells: WellList, samples: int = 128, radius: float = 1e-2) -> dict:
    """Check V >= 0 on a sample grid and positive definite Hessians at the zeros.

    ``c_estimate`` is half the smallest Hessian eigenvalue minus the cubic
    Taylor remainder bound on a ball of ``radius``.
    """
    n = V.dimension
    ax = np.arange(samples) / samples
    mesh = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), axis=-1).reshape(-1, n)
    vmin = float(V(mesh).min())
    if vmin < -1e-12:
        raise MorseTypeViolation(f"Morse-type violation: V takes negative values (min {vmin:.3e} on the sample grid)", "potential")
    lows = []
    for j, (z, H) in enumerate(zip(wells.zeros, wells.hessians)):
        lo = float(np.linalg.eigvalsh(H).min())
        if lo < HESSIAN_FLOOR:
            raise MorseTypeViolation(
                f"Morse-type violation: degenerate zero of V at well {j} (x={np.round(z, 12).tolist()}): smallest Hessian "
                f"eigenvalue {lo:.3e} < {HESSIAN_FLOOR:g}", "potential")
        lows.append(lo)
    third = V.poly.derivative_bound(3) * n ** 1.5
    c = 0.5 * min(lows) - third * radius / 6
    wells.c_estimate = c
    return {"nonneg_ok": True, "hessian_ok": True, "c_estimate": c, "min_value": vmin}
