"""Gauge-covariant finite differences for H(mu) = mu H_A + V / mu on a supercell.

Kinetic part: the 2n-point stencil with Peierls link factors exp(i int A),

    (H_A u)(x) = h^-2 sum_k [2 u(x) - e^{i a_k(x)} u(x + h e_k) - e^{-i a_k(x - h e_k)} u(x - h e_k)],

where a_k(x) is the exact integral of A over the edge. Hops leaving the
supercell pick up the magnetic Bloch factor of :func:`group_cocycle.wrap`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DomainError
from .grid import SupercellGrid
from .group_cocycle import (GaugeData, GaugeFunction, check_commensurate, translated_momentum,
                            translation_matrix, wrap)
from .trigpoly import TrigPolynomial


def kinetic_matrix(gauge: GaugeData, grid: SupercellGrid, theta=None) -> sp.csr_matrix:
    check_commensurate(gauge, grid)
    idx = grid.indices()
    P = grid.size
    h = grid.h
    x = grid.positions(idx)
    rows, cols, vals = [], [], []
    for k in range(grid.dimension):
        nb = idx.copy()
        nb[:, k] += 1
        flat, factor = wrap(gauge, grid, theta, nb)
        hop = -np.exp(1j * gauge.link_integral(x, k, h)) * factor / h ** 2
        rows.append(np.arange(P))
        cols.append(flat)
        vals.append(hop)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    upper = sp.csr_matrix((vals, (rows, cols)), shape=(P, P))
    diag = sp.identity(P, format="csr") * (2 * grid.dimension / h ** 2)
    return (diag + upper + upper.conj().T).tocsr()


@dataclass(frozen=True)
class DiscreteOperator:
    """matrix = mu * kinetic + diag(potential) / mu at Bloch momentum theta."""

    kinetic: sp.csr_matrix
    potential: np.ndarray
    mu: float
    gauge: GaugeData
    grid: SupercellGrid
    theta: tuple

    @property
    def matrix(self) -> sp.csr_matrix:
        return (self.mu * self.kinetic + sp.diags(self.potential / self.mu)).tocsr()

    @property
    def shape(self):
        return self.kinetic.shape

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def scale(self) -> float:
        """Gershgorin bound on |spectrum|."""
        M = self.matrix
        return float(abs(M).sum(axis=1).max())

    def hermiticity_defect(self) -> float:
        M = self.matrix
        d = abs(M - M.conj().T)
        return float(d.max() / max(abs(M).max(), 1e-300)) if d.nnz else 0.0

    def at(self, mu: float) -> "DiscreteOperator":
        if mu <= 0:
            raise DomainError(f"mu must be positive, got {mu}", "discrete_hamiltonian")
        return DiscreteOperator(self.kinetic, self.potential, float(mu), self.gauge, self.grid, self.theta)


def assemble(mu: float, gauge: GaugeData, V, grid: SupercellGrid, theta=None) -> DiscreteOperator:
    """H(mu) at Bloch momentum ``theta`` (defaults to 0).

    ``V`` is anything callable on an (P, n) array of points; normally a
    :class:`potential.MorsePotential`.
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}", "discrete_hamiltonian")
    th = tuple(np.zeros(grid.dimension)) if theta is None else tuple(np.atleast_1d(np.asarray(theta, float)))
    K = kinetic_matrix(gauge, grid, th)
    pot = np.asarray(V(grid.positions()), dtype=float).reshape(grid.size)
    return DiscreteOperator(K, pot, float(mu), gauge, grid, th)


# -- gauge transformations ----------------------------------------------------


def _as_gauge_function(phi, dimension) -> GaugeFunction:
    if isinstance(phi, GaugeFunction):
        return phi
    if isinstance(phi, TrigPolynomial):
        return GaugeFunction(dimension, phi)
    if phi is None or (np.isscalar(phi) and phi == 0):
        return GaugeFunction(dimension)
    raise ConfigurationError(
        "gauge function must be given symbolically (TrigPolynomial or GaugeFunction) "
        "so that edge integrals of d phi are exact", "discrete_hamiltonian")


def gauge_transform(gauge: GaugeData, phi, grid: SupercellGrid | None = None):
    """A -> A + d phi.  Returns (new gauge, diagonal of U = exp(-i phi)) with

        assemble(new) = U assemble(old) U^*

    entrywise (periodic phi; a linear part also shifts the Bloch momentum,
    see :func:`momentum_shift`).  The diagonal is None when no grid is given.
    """
    phi = _as_gauge_function(phi, gauge.dimension)
    new = gauge.with_shift(phi)
    if grid is None:
        return new, None
    U = np.exp(-1j * phi(grid.positions()))
    return new, U


def momentum_shift(phi, grid: SupercellGrid) -> np.ndarray:
    """Delta such that assemble(new, theta) and assemble(old, theta + Delta) are isospectral."""
    phi = _as_gauge_function(phi, grid.dimension)
    return np.asarray(phi.linear) * np.asarray(grid.supercell)


def conjugate(op: DiscreteOperator, U) -> sp.csr_matrix:
    D = sp.diags(U)
    return (D @ op.matrix @ D.conj().T).tocsr()


def commutation_defect(op: DiscreteOperator, gamma) -> float:
    """max_j ||(H T_gamma - T_gamma H) e_j|| / ||H||_max over the standard basis.

    T_gamma maps the operator's Bloch sector to the sector of
    :func:`group_cocycle.translated_momentum`; H on the left is taken there.
    """
    gauge, grid = op.gauge, op.grid
    T = translation_matrix(gauge, gamma, grid, op.theta)
    th2 = translated_momentum(gauge, gamma, grid, op.theta)
    H1 = op.matrix
    K2 = kinetic_matrix(gauge, grid, th2)
    H2 = (op.mu * K2 + sp.diags(op.potential / op.mu)).tocsr()
    # potential is Z^n-periodic, so T_gamma permutes its samples
    D = (H2 @ T - T @ H1).tocsc()
    col = np.sqrt(np.asarray(abs(D).power(2).sum(axis=0))).ravel()
    return float(col.max() / max(abs(H1).max(), 1e-300)) if col.size else 0.0


# -- coordinate-list dump -----------------------------------------------------


def write_coo(op, path, dimension=None):
    """Header ``n rows cols nnz`` then ``i j re im`` lines (0-indexed)."""
    M = (op.matrix if isinstance(op, DiscreteOperator) else sp.csr_matrix(op)).tocoo()
    n = op.grid.dimension if isinstance(op, DiscreteOperator) else (dimension or 0)
    with open(path, "w") as fh:
        fh.write(f"{n} {M.shape[0]} {M.shape[1]} {M.nnz}\n")
        for i, j, v in zip(M.row, M.col, M.data):
            v = complex(v)
            fh.write(f"{i} {j} {v.real:.17g} {v.imag:.17g}\n")


def read_coo(path):
    with open(path) as fh:
        n, rows, cols, nnz = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 4))
    M = sp.csr_matrix((data[:, 2] + 1j * data[:, 3], (data[:, 0].astype(int), data[:, 1].astype(int))),
                      shape=(rows, cols))
    return n, M
