"""The lattice group Z^n, magnetic phases, multipliers and the twisted group algebra.

For a constant field ``b dx1 ^ dx2`` two closed-form gauges are provided::

    landau     A = b x1 dx2               psi_g(x) = b g1 (x2 - x02)
    symmetric  A = b/2 (x1 dx2 - x2 dx1)  psi_g(x) = b/2 (g1 (x2 - x02) - g2 (x1 - x01))

An optional :class:`GaugeFunction` ``phi`` replaces ``A`` by ``A + d phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError
from .grid import SupercellGrid
from .trigpoly import TrigPolynomial

GAUGES = ("landau", "symmetric")


@dataclass(frozen=True)
class LatticeGroup:
    """Gamma = Z^n acting on R^n by translations; fundamental cell [0, 1)^n."""

    dimension: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.dimension}", "group_cocycle")

    @property
    def identity(self) -> tuple:
        return (0,) * self.dimension

    def element(self, g) -> tuple:
        g = np.atleast_1d(np.asarray(g))
        if g.shape != (self.dimension,) or np.any(g != np.round(g)):
            raise GeometryError(f"{g!r} is not an element of Z^{self.dimension}", "group_cocycle")
        return tuple(int(v) for v in np.round(g))

    def compose(self, g1, g2) -> tuple:
        return tuple(a + b for a, b in zip(self.element(g1), self.element(g2)))

    def inverse(self, g) -> tuple:
        return tuple(-a for a in self.element(g))

    def act(self, g, x) -> np.ndarray:
        return np.asarray(x, dtype=float) + np.asarray(self.element(g), dtype=float)

    def cell_index(self, x) -> np.ndarray:
        """The unique gamma with x - gamma in the fundamental cell."""
        return np.floor(np.asarray(x, dtype=float)).astype(int)

    def random_elements(self, rng: np.random.Generator, count: int, bound: int = 20) -> np.ndarray:
        return rng.integers(-bound, bound + 1, size=(count, self.dimension))


@dataclass(frozen=True)
class GaugeFunction:
    """phi(x) = periodic(x) + linear . x, normalised downstream so only differences matter."""

    dimension: int
    periodic: TrigPolynomial | None = None
    linear: tuple = None

    def __post_init__(self):
        lin = (0.0,) * self.dimension if self.linear is None else tuple(float(v) for v in np.atleast_1d(self.linear))
        if len(lin) != self.dimension:
            raise ConfigurationError("linear part does not match dimension", "discrete_hamiltonian")
        if self.periodic is not None and not isinstance(self.periodic, TrigPolynomial):
            raise ConfigurationError(
                "gauge function must be a trigonometric polynomial plus a linear term "
                "(needed for exact edge integrals of d phi)", "discrete_hamiltonian")
        object.__setattr__(self, "linear", lin)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        val = x @ np.asarray(self.linear)
        if self.periodic is not None:
            val = val + self.periodic(x)
        return val

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = np.broadcast_to(np.asarray(self.linear), x.shape).copy()
        if self.periodic is not None:
            for k, d in enumerate(self.periodic.gradient()):
                g[..., k] += d(x)
        return g

    def __add__(self, other: "GaugeFunction") -> "GaugeFunction":
        if self.periodic is None:
            per = other.periodic
        elif other.periodic is None:
            per = self.periodic
        else:
            per = self.periodic + other.periodic
        return GaugeFunction(self.dimension, per, tuple(a + b for a, b in zip(self.linear, other.linear)))


@dataclass(frozen=True)
class GaugeData:
    """Constant magnetic field b with a gauge choice and base point x0."""

    dimension: int
    field_strength: float = 0.0
    gauge: str = "landau"
    base_point: tuple = None
    shift: GaugeFunction | None = None

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.dimension}", "group_cocycle")
        if self.gauge not in GAUGES:
            raise ConfigurationError(f"unsupported gauge {self.gauge!r}; expected one of {GAUGES}", "group_cocycle")
        if self.dimension == 1 and self.field_strength != 0:
            raise ConfigurationError("a magnetic field needs dimension 2", "group_cocycle")
        x0 = (0.0,) * self.dimension if self.base_point is None else tuple(
            float(v) for v in np.atleast_1d(self.base_point))
        if len(x0) != self.dimension:
            raise ConfigurationError("base point does not match dimension", "group_cocycle")
        object.__setattr__(self, "base_point", x0)
        object.__setattr__(self, "field_strength", float(self.field_strength))

    @classmethod
    def from_flux(cls, dimension, p, q, gauge="landau", base_point=None):
        """Field b = 2 pi p / q (flux p/q quanta per unit cell)."""
        return cls(dimension, 2 * np.pi * p / q, gauge, base_point)

    @property
    def group(self) -> LatticeGroup:
        return LatticeGroup(self.dimension)

    def _base_psi(self, g, x):
        if self.dimension == 1 or self.field_strength == 0.0:
            return np.zeros(x.shape[:-1])
        b = self.field_strength
        x0 = np.asarray(self.base_point)
        d = x - x0
        if self.gauge == "landau":
            return b * g[0] * d[..., 1]
        return 0.5 * b * (g[0] * d[..., 1] - g[1] * d[..., 0])

    def psi(self, gamma, x) -> np.ndarray:
        """psi_gamma(x), with gamma^* A - A = d psi_gamma and psi_gamma(x0) = 0."""
        g = np.asarray(self.group.element(gamma), dtype=float)
        x = np.asarray(x, dtype=float)
        if self.dimension == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        val = self._base_psi(g, x)
        if self.shift is not None:
            x0 = np.asarray(self.base_point)
            phi = self.shift
            val = val + phi(x + g) - phi(x) - phi(x0 + g) + phi(x0)
        return val

    def sigma(self, g1, g2) -> complex:
        x = np.asarray(self.base_point) + np.asarray(self.group.element(g2), dtype=float)
        return complex(np.exp(-1j * self.psi(g1, x)))

    def sigma_array(self, g1, g2) -> np.ndarray:
        """sigma over broadcast integer arrays of shape (..., n)."""
        g1 = np.asarray(g1, dtype=float)
        g2 = np.asarray(g2, dtype=float)
        x0 = np.asarray(self.base_point)
        x = x0 + g2
        val = np.zeros(np.broadcast_shapes(g1.shape, g2.shape)[:-1])
        if self.dimension == 2 and self.field_strength != 0.0:
            b = self.field_strength
            d = x - x0
            if self.gauge == "landau":
                val = val + b * g1[..., 0] * d[..., 1]
            else:
                val = val + 0.5 * b * (g1[..., 0] * d[..., 1] - g1[..., 1] * d[..., 0])
        if self.shift is not None:
            phi = self.shift
            val = val + phi(x + g1) - phi(x) - phi(x0 + g1) + phi(x0)
        return np.exp(-1j * val)

    def vector_potential(self, x) -> np.ndarray:
        """Components (A_1, ..., A_n) at points x of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        A = np.zeros(x.shape)
        if self.dimension == 2 and self.field_strength != 0.0:
            b = self.field_strength
            if self.gauge == "landau":
                A[..., 1] = b * x[..., 0]
            else:
                A[..., 0] = -0.5 * b * x[..., 1]
                A[..., 1] = 0.5 * b * x[..., 0]
        if self.shift is not None:
            A = A + self.shift.gradient(x)
        return A

    def link_integral(self, x, axis: int, h: float) -> np.ndarray:
        """Exact integral of A along the segment x -> x + h e_axis."""
        x = np.asarray(x, dtype=float)
        val = np.zeros(x.shape[:-1])
        if self.dimension == 2 and self.field_strength != 0.0:
            b = self.field_strength
            if self.gauge == "landau":
                if axis == 1:
                    val = b * x[..., 0] * h
            else:
                val = 0.5 * b * h * (x[..., 0] if axis == 1 else -x[..., 1])
        if self.shift is not None:
            e = np.zeros(self.dimension)
            e[axis] = h
            val = val + self.shift(x + e) - self.shift(x)
        return val

    def with_shift(self, phi: GaugeFunction) -> "GaugeData":
        new = phi if self.shift is None else self.shift + phi
        return GaugeData(self.dimension, self.field_strength, self.gauge, self.base_point, new)

    def flux_commensurate(self, supercell) -> bool:
        """True when the flux through the supercell is an integer multiple of 2 pi."""
        if self.dimension == 1 or self.field_strength == 0.0:
            return True
        turns = self.field_strength * np.prod(supercell) / (2 * np.pi)
        return abs(turns - round(turns)) < 1e-9


def phase_function(gauge: GaugeData, gamma, x) -> np.ndarray:
    return gauge.psi(gamma, x)


class Multiplier:
    """sigma(g, g') = exp(-i psi_g(g' + x0)); a U(1)-valued 2-cocycle on Z^n."""

    def __init__(self, gauge: GaugeData):
        self.gauge = gauge

    def __call__(self, g1, g2) -> complex:
        return self.gauge.sigma(g1, g2)

    def conjugate(self, g1, g2) -> complex:
        return self.gauge.sigma(g1, g2).conjugate()

    def array(self, g1, g2) -> np.ndarray:
        """Vectorised sigma over integer arrays of shape (..., n)."""
        return self.gauge.sigma_array(g1, g2)


def multiplier(gauge: GaugeData) -> Multiplier:
    return Multiplier(gauge)


def check_cocycle(sigma, triples) -> float:
    """Maximal defect of sigma(a,b) sigma(ab,c) = sigma(a,bc) sigma(b,c)."""
    triples = list(triples)
    if not triples:
        raise ValueError("triples must be nonempty")
    worst = 0.0
    for a, b, c in triples:
        ab = tuple(np.add(a, b))
        bc = tuple(np.add(b, c))
        lhs = sigma(a, b) * sigma(ab, c)
        rhs = sigma(a, bc) * sigma(b, c)
        worst = max(worst, abs(lhs - rhs))
    return worst


# -- magnetic translations on Bloch-periodic grid functions -------------------
#
# A supercell function u stands for the cover function with
#     T_L u = exp(-i theta_k) u  for the supercell generators L = q_k e_k,
# i.e. u(y + L) = exp(i theta_k) exp(-i psi_L(y)) u(y).


def _theta_vector(grid: SupercellGrid, theta) -> np.ndarray:
    if theta is None:
        return np.zeros(grid.dimension)
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    if t.shape != (grid.dimension,):
        raise ConfigurationError(f"Bloch momentum {theta!r} does not match dimension", "discrete_hamiltonian")
    return t


def wrap(gauge: GaugeData, grid: SupercellGrid, theta, idx):
    """Map cover grid indices to (flat supercell index, phase factor).

    The value of the Bloch-periodic extension at cover index ``idx`` is
    ``factor * u[flat]``.
    """
    idx = np.array(idx, dtype=int, copy=True).reshape(-1, grid.dimension)
    factor = np.ones(len(idx), dtype=complex)
    th = _theta_vector(grid, theta)
    shape = grid.shape
    for k in range(grid.dimension):
        L = np.zeros(grid.dimension, dtype=int)
        L[k] = grid.supercell[k]
        while True:
            hi = idx[:, k] >= shape[k]
            if not hi.any():
                break
            idx[hi, k] -= shape[k]
            y = grid.positions(idx[hi])
            factor[hi] *= np.exp(1j * th[k] - 1j * gauge.psi(L, y))
        while True:
            lo = idx[:, k] < 0
            if not lo.any():
                break
            idx[lo, k] += shape[k]
            y = grid.positions(idx[lo])
            factor[lo] *= np.exp(-1j * th[k] - 1j * gauge.psi(-L, y))
    return grid.flat(idx), factor


def check_commensurate(gauge: GaugeData, grid: SupercellGrid):
    if grid.dimension != gauge.dimension:
        raise ConfigurationError("grid and gauge dimensions differ", "discrete_hamiltonian")
    if not gauge.flux_commensurate(grid.supercell):
        raise ConfigurationError(
            f"flux b={gauge.field_strength:g} is incommensurate with supercell {grid.supercell}: "
            "b * q1 * q2 must be a multiple of 2 pi", "discrete_hamiltonian")


def translated_momentum(gauge: GaugeData, gamma, grid: SupercellGrid, theta=None) -> np.ndarray:
    """Bloch momentum of T_gamma u when u has momentum ``theta``."""
    th = _theta_vector(grid, theta).copy()
    for k in range(grid.dimension):
        L = [0] * grid.dimension
        L[k] = grid.supercell[k]
        ratio = gauge.sigma(gamma, L) / gauge.sigma(L, gamma)
        th[k] = th[k] + np.angle(ratio)
    return np.mod(th, 2 * np.pi)


def translation_matrix(gauge: GaugeData, gamma, grid: SupercellGrid, theta=None):
    """Sparse matrix of T_gamma from the ``theta`` sector to ``translated_momentum``."""
    import scipy.sparse as sp

    check_commensurate(gauge, grid)
    idx = grid.indices()
    src = idx - grid.shift_steps(gamma)
    flat, factor = wrap(gauge, grid, theta, src)
    # (T u)(x) = exp(-i psi_gamma(x - gamma)) u(x - gamma), evaluated via the extension
    x_minus = grid.positions(src)
    vals = factor * np.exp(-1j * gauge.psi(gamma, x_minus))
    P = grid.size
    return sp.csr_matrix((vals, (np.arange(P), flat)), shape=(P, P))


def magnetic_translate(gauge: GaugeData, gamma, u, grid: SupercellGrid, theta=None) -> np.ndarray:
    """(T_gamma u)(x) = exp(-i psi_gamma(gamma^-1 x)) u(gamma^-1 x) on the supercell grid.

    ``u`` is read as a Bloch-periodic function with momentum ``theta``; the result
    has momentum ``translated_momentum(gauge, gamma, grid, theta)``.
    """
    u = np.asarray(u)
    out = translation_matrix(gauge, gamma, grid, theta) @ u.reshape(grid.size)
    return out.reshape(u.shape)


# -- twisted group algebra ----------------------------------------------------


@dataclass(frozen=True)
class TwistedElement:
    """Finitely supported f: Z^n -> C, an element of C(Gamma, sigma)."""

    support: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "support", {tuple(int(v) for v in k): complex(c) for k, c in self.support.items()})

    def __getitem__(self, g) -> complex:
        return self.support.get(tuple(int(v) for v in g), 0.0)

    @classmethod
    def delta(cls, g, value=1.0) -> "TwistedElement":
        return cls({tuple(g): value})

    @classmethod
    def random(cls, rng: np.random.Generator, dimension: int, window: int = 5, density: float = 0.3):
        """Random element supported in the box [-window, window]^n."""
        axes = [np.arange(-window, window + 1)] * dimension
        pts = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
        keep = rng.random(len(pts)) < density
        vals = rng.normal(size=keep.sum()) + 1j * rng.normal(size=keep.sum())
        return cls({tuple(p): v for p, v in zip(pts[keep], vals)})

    def distance(self, other: "TwistedElement") -> float:
        keys = set(self.support) | set(other.support)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)


def twisted_convolve(f: TwistedElement, g: TwistedElement, sigma) -> TwistedElement:
    """(f * g)(x) = sum_{x1 x2 = x} f(x1) g(x2) sigma(x1, x2)."""
    if not f.support or not g.support:
        return TwistedElement()
    A = np.array(list(f.support), dtype=int)
    B = np.array(list(g.support), dtype=int)
    fa = np.array(list(f.support.values()))
    gb = np.array(list(g.support.values()))
    if hasattr(sigma, "array"):
        S = sigma.array(A[:, None, :], B[None, :, :])
    else:
        S = np.array([[sigma(tuple(a), tuple(b)) for b in B] for a in A])
    prod = (fa[:, None] * gb[None, :] * S).ravel()
    keys = (A[:, None, :] + B[None, :, :]).reshape(-1, A.shape[1])
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    vals = np.zeros(len(uniq), dtype=complex)
    np.add.at(vals, inv.ravel(), prod)
    return TwistedElement({tuple(k): v for k, v in zip(uniq.tolist(), vals)})


def vn_trace(f: TwistedElement) -> complex:
    """tr_Gamma of the convolution operator g -> f * g: its (delta_e, delta_e) entry."""
    if not f.support:
        return 0j
    n = len(next(iter(f.support)))
    return f[(0,) * n]


# -- randomized identity suite --------------------------------------------------


def identity_defects(gauge: GaugeData, rng: np.random.Generator, instances: int = 1000,
                     grid: SupercellGrid | None = None, bound: int = 10, window: int = 2) -> dict:
    """Maximal defects of the algebraic identities over seeded random instances.

    Phases are compared absolutely; algebra elements relative to their largest entry.
    """
    import scipy.sparse as sp

    n = gauge.dimension
    G = gauge.group
    sig = multiplier(gauge)
    e = G.identity
    g = [tuple(v) for v in G.random_elements(rng, 3 * instances, bound)]
    triples = list(zip(g[0::3], g[1::3], g[2::3]))
    out = {
        "cocycle": check_cocycle(sig, triples),
        "unit": max(abs(sig(a, e) - 1) + abs(sig(e, a) - 1) for a, _, _ in triples),
        "inverse": max(abs(sig(a, G.inverse(a)) - sig(G.inverse(a), a)) for a, _, _ in triples),
    }
    if grid is not None:
        theta = tuple(rng.uniform(0, 2 * np.pi, n))
        Te = translation_matrix(gauge, e, grid, theta)
        out["translation_identity"] = float(abs(Te - sp.identity(grid.size)).max())
        worst = 0.0
        P = grid.size
        for a, b, _ in triples[: max(1, instances // 10)]:
            T2 = translation_matrix(gauge, b, grid, theta)
            T1 = translation_matrix(gauge, a, grid, translated_momentum(gauge, b, grid, theta))
            T12 = translation_matrix(gauge, G.compose(a, b), grid, theta)
            D = T1 @ T2 - sig(a, b) * T12
            worst = max(worst, float(abs(D).max()) if D.nnz else 0.0)
        out["projective_law"] = worst
    assoc = trace = 0.0
    for _ in range(instances):
        f, h, k = (TwistedElement.random(rng, n, window, 0.5) for _ in range(3))
        lhs = twisted_convolve(twisted_convolve(f, h, sig), k, sig)
        rhs = twisted_convolve(f, twisted_convolve(h, k, sig), sig)
        scale = max([abs(v) for v in lhs.support.values()] + [1.0])
        assoc = max(assoc, lhs.distance(rhs) / scale)
        t1 = vn_trace(twisted_convolve(f, h, sig))
        t2 = vn_trace(twisted_convolve(h, f, sig))
        trace = max(trace, abs(t1 - t2) / max(1.0, abs(t1)))
    out["associativity"] = assoc
    out["traciality"] = trace
    return out
