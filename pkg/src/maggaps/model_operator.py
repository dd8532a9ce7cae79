"""Harmonic-oscillator model operator K built from the wells of V.

Each zero of V contributes K_j = -div(G grad) + x^T Q x with G the frozen
inverse metric and Q = Hess V / 2.  In normal-mode coordinates its levels
are sum_k w_k (2 m_k + 1), w_k^2 the eigenvalues of G^(1/2) Q G^(1/2).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CutoffExceeded, DomainError, ResolutionError


@dataclass(frozen=True)
class OscillatorWell:
    location: np.ndarray
    inverse_metric: np.ndarray
    quadratic_form: np.ndarray
    frequencies: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.frequencies)

    @property
    def ground_level(self) -> float:
        return float(np.sum(self.frequencies))

    @classmethod
    def from_matrices(cls, G, Q, location=None) -> "OscillatorWell":
        G = np.atleast_2d(np.asarray(G, dtype=float))
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        for name, M in (("inverse metric", G), ("quadratic form", Q)):
            if M.shape[0] != M.shape[1] or not np.allclose(M, M.T, atol=1e-12 * max(1, np.abs(M).max())):
                raise DomainError(f"{name} must be a symmetric square matrix", "model_operator")
            if np.linalg.eigvalsh(M).min() <= 0:
                raise DomainError(f"{name} must be positive definite", "model_operator")
        if G.shape != Q.shape:
            raise DomainError("inverse metric and quadratic form differ in size", "model_operator")
        # Q v = lam G^{-1} v  <=>  G^(1/2) Q G^(1/2) w = lam w
        lam = sla.eigh(Q, np.linalg.inv(G), eigvals_only=True)
        w = np.sort(np.sqrt(lam))
        loc = np.zeros(len(G)) if location is None else np.atleast_1d(np.asarray(location, dtype=float))
        return cls(loc, G, Q, w)


def build_wells(wells, metric=None) -> list:
    n = len(np.atleast_1d(wells.zeros[0]))
    G = np.eye(n) if metric is None else np.atleast_2d(np.asarray(metric, dtype=float))
    return [OscillatorWell.from_matrices(G, 0.5 * np.asarray(H), z) for z, H in zip(wells.zeros, wells.hessians)]


@dataclass(frozen=True)
class ModelSpectrum:
    alphas: np.ndarray
    mults: np.ndarray
    cutoff: float
    tolerance: float

    def __iter__(self):
        return iter(zip(self.alphas.tolist(), self.mults.tolist()))

    def __len__(self):
        return len(self.alphas)

    def to_json(self) -> str:
        levels = [{"alpha": float(a), "mult": int(r)} for a, r in self]
        return json.dumps({"levels": levels, "cutoff": float(self.cutoff)}, indent=2)

    @classmethod
    def from_json(cls, text: str, tolerance=None) -> "ModelSpectrum":
        data = json.loads(text)
        a = np.array([lv["alpha"] for lv in data["levels"]], dtype=float)
        r = np.array([lv["mult"] for lv in data["levels"]], dtype=int)
        R = float(data["cutoff"])
        return cls(a, r, R, 1e-9 * max(1.0, R) if tolerance is None else tolerance)


def enumerate_spectrum(wells, R: float, tolerance: float | None = None) -> ModelSpectrum:
    """All levels sum_k w_k (2 m_k + 1) <= R over all wells, merged within ``tolerance``."""
    tol = 1e-9 * max(1.0, R) if tolerance is None else tolerance
    levels = []
    for well in wells:
        w = np.asarray(well.frequencies)
        ranges = [range(int(math.floor((R / wk - 1) / 2)) + 1) if R >= wk else range(0) for wk in w]
        for idx in itertools.product(*ranges):
            e = float(np.sum(w * (2 * np.asarray(idx) + 1)))
            if e <= R + tol:
                levels.append(e)
    if not levels:
        raise DomainError(f"cutoff R={R:g} lies below every model level", "model_operator")
    levels.sort()
    alphas, mults = [levels[0]], [1]
    for e in levels[1:]:
        if e - alphas[-1] <= tol:
            # running mean keeps merged clusters centred
            mults[-1] += 1
            alphas[-1] += (e - alphas[-1]) / mults[-1]
        else:
            alphas.append(e)
            mults.append(1)
    return ModelSpectrum(np.array(alphas), np.array(mults, dtype=int), float(R), tol)


def counting_function(spec: ModelSpectrum, lam: float) -> int:
    """N(lam; K) = number of eigenvalues <= lam, multiplicities counted."""
    if lam > spec.cutoff + spec.tolerance:
        raise CutoffExceeded(f"lambda={lam:g} exceeds the enumerated cutoff R={spec.cutoff:g}", "model_operator")
    return int(spec.mults[spec.alphas <= lam + spec.tolerance].sum())


def counting_function_array(spec: ModelSpectrum, lams) -> np.ndarray:
    lams = np.asarray(lams, dtype=float)
    if lams.size and lams.max() > spec.cutoff + spec.tolerance:
        raise CutoffExceeded(f"lambda={lams.max():g} exceeds the enumerated cutoff R={spec.cutoff:g}",
                             "model_operator")
    cum = np.concatenate([[0], np.cumsum(spec.mults)])
    return cum[np.searchsorted(spec.alphas, lams + spec.tolerance, side="right")]


# -- finite-difference discretisation on a Dirichlet box ----------------------


def central_weights(derivative: int, order: int) -> np.ndarray:
    """Central finite-difference weights (offsets -p..p, p = order/2) for unit spacing."""
    if order % 2:
        raise ValueError("order must be even")
    p = order // 2
    offs = np.arange(-p, p + 1, dtype=float)
    A = np.vander(offs, increasing=True).T
    rhs = np.zeros(len(offs))
    rhs[derivative] = math.factorial(derivative)
    return np.linalg.solve(A, rhs)


def _banded(weights, size, h, power):
    p = len(weights) // 2
    diags = [np.full(size - abs(k), weights[k + p]) for k in range(-p, p + 1)]
    return sp.diags(diags, list(range(-p, p + 1)), shape=(size, size), format="csr") / h ** power


def default_half_width(well: OscillatorWell, mu: float) -> float:
    return 8.0 * math.sqrt(mu) * max(1.0, 1.0 / float(np.min(well.frequencies)))


def discretize_model(well: OscillatorWell, mu: float, L: float | None = None, m: int = 200,
                     order: int = 8) -> sp.csr_matrix:
    """Matrix of mu (-div G grad) + x^T Q x / mu on [-L, L]^n with Dirichlet walls.

    ``m`` interior points per direction; central differences of ``order``.
    """
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}", "model_operator")
    L = default_half_width(well, mu) if L is None else float(L)
    n = well.dimension
    h = 2 * L / (m + 1)
    x = -L + h * np.arange(1, m + 1)
    D2 = _banded(central_weights(2, order), m, h, 2)
    D1 = _banded(central_weights(1, order), m, h, 1)
    eye = sp.identity(m, format="csr")

    def embed(op, axis):
        mats = [op if a == axis else eye for a in range(n)]
        out = mats[0]
        for M in mats[1:]:
            out = sp.kron(out, M, format="csr")
        return out

    G = well.inverse_metric
    kinetic = sp.csr_matrix((m ** n, m ** n))
    for i in range(n):
        for k in range(n):
            if G[i, k] == 0:
                continue
            term = embed(D2, i) if i == k else embed(D1, i) @ embed(D1, k)
            kinetic = kinetic - G[i, k] * term
    mesh = np.stack(np.meshgrid(*([x] * n), indexing="ij"), axis=-1).reshape(-1, n)
    pot = np.einsum("pi,ik,pk->p", mesh, well.quadratic_form, mesh)
    H = mu * kinetic + sp.diags(pot / mu)
    H = 0.5 * (H + H.T)
    return H.tocsr()


def model_levels(well: OscillatorWell, mu: float, count: int = 3, L: float | None = None, m: int = 200,
                 order: int = 8, check_boundary: bool = True):
    """Lowest ``count`` eigenvalues of :func:`discretize_model` (and the ground state)."""
    H = discretize_model(well, mu, L, m, order)
    N = H.shape[0]
    k = min(count, N - 2)
    if N <= 1500:
        vals, vecs = np.linalg.eigh(H.toarray())
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        vals, vecs = spla.eigsh(H, k=k, sigma=-1.0, which="LM")
        order_ = np.argsort(vals)
        vals, vecs = vals[order_], vecs[:, order_]
    if check_boundary:
        n = well.dimension
        shape = (m,) * n
        ground = np.abs(vecs[:, 0].reshape(shape)) ** 2
        layer = max(1, m // 10)
        inner = ground[(slice(layer, m - layer),) * n].sum()
        outer = 1.0 - inner / ground.sum()
        if outer > 1e-8:
            raise ResolutionError(
                f"box half-width too small: {outer:.2e} of the ground-state mass sits in the boundary layer",
                "model_operator")
    return vals, vecs
