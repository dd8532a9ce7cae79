"""Real trigonometric polynomials on the unit torus.

A polynomial is stored as complex Fourier coefficients ``{k: c_k}`` so that

    p(x) = sum_k c_k exp(2 pi i k.x),     c_{-k} = conj(c_k).

Derivatives and products stay exact in this representation.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np

from .errors import ConfigurationError

_DROP = 1e-15


class TrigPolynomial:
    def __init__(self, dimension: int, coeffs: dict | None = None):
        if dimension not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {dimension}", "potential")
        self.dimension = dimension
        clean = {}
        for k, c in (coeffs or {}).items():
            k = tuple(int(v) for v in np.atleast_1d(k))
            if len(k) != dimension:
                raise ConfigurationError(f"frequency {k} does not match dimension {dimension}", "potential")
            clean[k] = clean.get(k, 0.0) + complex(c)
        self.coeffs = {k: c for k, c in clean.items() if abs(c) > _DROP}
        self._compile()

    def _compile(self):
        if self.coeffs:
            self._k = np.array(list(self.coeffs), dtype=float).reshape(-1, self.dimension)
            self._c = np.array(list(self.coeffs.values()), dtype=complex)
        else:
            self._k = np.zeros((0, self.dimension))
            self._c = np.zeros(0, dtype=complex)

    @classmethod
    def from_terms(cls, dimension: int, terms: Iterable) -> "TrigPolynomial":
        """Build from ``(frequency, kind, amplitude)`` with kind in {'cos', 'sin'}.

        ``amplitude * cos(2 pi k.x)`` or ``amplitude * sin(2 pi k.x)``.
        """
        coeffs: dict = {}
        for freq, kind, amp in terms:
            k = np.atleast_1d(np.asarray(freq, dtype=float))
            if k.shape != (dimension,):
                raise ConfigurationError(f"frequency {freq!r} does not match dimension {dimension}", "potential")
            if not np.all(np.isfinite(k)) or np.any(np.abs(k - np.round(k)) > 1e-12):
                raise ConfigurationError(
                    f"frequency {freq!r} is not an integer vector; term is not Z^n-periodic", "potential")
            k = tuple(int(v) for v in np.round(k))
            mk = tuple(-v for v in k)
            amp = float(amp)
            if kind == "cos":
                pair = (amp / 2, amp / 2)
            elif kind == "sin":
                pair = (amp / 2j, -amp / 2j)
            else:
                raise ConfigurationError(f"term kind must be 'cos' or 'sin', got {kind!r}", "potential")
            coeffs[k] = coeffs.get(k, 0.0) + pair[0]
            coeffs[mk] = coeffs.get(mk, 0.0) + pair[1]
        return cls(dimension, coeffs)

    @classmethod
    def constant(cls, dimension: int, value: float) -> "TrigPolynomial":
        return cls(dimension, {(0,) * dimension: value})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape (..., n) (or (...) when n = 1)."""
        x = np.asarray(x, dtype=float)
        pts = x[..., None] if self.dimension == 1 and (x.ndim == 0 or x.shape[-1] != 1) else x
        phase = 2 * np.pi * (pts @ self._k.T)
        return (np.exp(1j * phase) @ self._c).real

    def derivative(self, axis: int) -> "TrigPolynomial":
        return TrigPolynomial(
            self.dimension, {k: c * 2j * math.pi * k[axis] for k, c in self.coeffs.items()})

    def gradient(self) -> list:
        return [self.derivative(i) for i in range(self.dimension)]

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return TrigPolynomial(self.dimension, out)

    def __mul__(self, other):
        if np.isscalar(other):
            return TrigPolynomial(self.dimension, {k: c * other for k, c in self.coeffs.items()})
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0.0) + c1 * c2
        return TrigPolynomial(self.dimension, out)

    __rmul__ = __mul__

    def derivative_bound(self, order: int) -> float:
        """Upper bound on every ``order``-th partial derivative, sum |c_k| (2 pi |k|)^order."""
        if not self.coeffs:
            return 0.0
        norms = np.linalg.norm(self._k, axis=1)
        return float(np.sum(np.abs(self._c) * (2 * np.pi * norms) ** order))

    def to_terms(self) -> list:
        """Inverse of :meth:`from_terms` (one cos/sin pair per +-k)."""
        terms = []
        seen = set()
        for k in sorted(self.coeffs):
            if k in seen:
                continue
            mk = tuple(-v for v in k)
            seen.update({k, mk})
            c = self.coeffs[k]
            if k == mk:
                terms.append((k, "cos", c.real))
                continue
            # c_k e^{i t} + conj(c_k) e^{-i t} = 2 Re(c_k) cos t - 2 Im(c_k) sin t
            if abs(c.real) > _DROP:
                terms.append((k, "cos", 2 * c.real))
            if abs(c.imag) > _DROP:
                terms.append((k, "sin", -2 * c.imag))
        return terms

    def __repr__(self):
        return f"TrigPolynomial(dimension={self.dimension}, terms={len(self.coeffs)})"
