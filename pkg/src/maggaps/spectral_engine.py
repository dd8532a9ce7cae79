"""Diagonalisation, Bloch sweeps, band extraction and the integrated density of states."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discrete_hamiltonian import DiscreteOperator, kinetic_matrix
from .errors import DomainError, NumericalError, RangeError
from .grid import SupercellGrid

DENSE_MAX = 1024
SOLVER_TOL = 1e-10


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    mu: float | None = None
    theta: tuple | None = None
    dim: int = 0

    @property
    def complete(self) -> bool:
        return len(self.eigenvalues) == self.dim


def eigen_lowest(H, count: int, dense_max: int = DENSE_MAX, maxiter: int | None = None) -> EigenResult:
    """Lowest ``count`` eigenvalues of a Hermitian operator or matrix.

    Dense LAPACK up to ``dense_max``, shift-invert Lanczos (ARPACK) above.
    """
    mu = theta = None
    if isinstance(H, DiscreteOperator):
        mu, theta = H.mu, H.theta
        M = H.matrix
    else:
        M = H
    N = M.shape[0]
    if not 1 <= count <= N:
        raise DomainError(f"count must lie in [1, {N}], got {count}", "spectral_engine")
    Ms = sp.csr_matrix(M)
    scale = max(float(abs(Ms).sum(axis=1).max()), 1e-300)
    if N <= dense_max or count > N // 4:
        A = Ms.toarray()
        vals, vecs = sla.eigh(A, subset_by_index=[0, count - 1], check_finite=False)
    else:
        # the operators here are >= 0, so a shift just below 0 targets the bottom
        sigma = -1e-3 * scale / N
        try:
            vals, vecs = spla.eigsh(Ms, k=count, sigma=sigma, which="LM", tol=0, maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise NumericalError(
                f"Lanczos did not converge for {count} eigenpairs ({len(exc.eigenvalues)} converged)",
                "spectral_engine") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    res = np.linalg.norm(Ms @ vecs - vecs * vals, axis=0)
    if res.max(initial=0.0) > 1e-8 * scale:
        raise NumericalError(f"eigen residual {res.max():.3e} exceeds 1e-8 * {scale:.3e}", "spectral_engine")
    return EigenResult(np.asarray(vals, dtype=float), res, mu, theta, N)


def theta_grid(dimension: int, points: int = 8) -> list:
    """Uniform Bloch momenta 2 pi j / points in every direction."""
    ax = 2 * np.pi * np.arange(points) / points
    mesh = np.meshgrid(*([ax] * dimension), indexing="ij")
    return [tuple(float(v) for v in row) for row in np.stack([m.ravel() for m in mesh], axis=1)]


def default_count(mu: float, grid: SupercellGrid, R: float, margin: float = 1.2, potential=None) -> int:
    """Weyl estimate of the number of eigenvalues below R on the supercell, with margin.

    With ``potential`` (samples of V on the grid) the phase-space volume of
    mu |xi|^2 + V(x) / mu <= R is used; otherwise the free operator's.
    """
    n = grid.dimension
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    if potential is None:
        avg = (max(R, 0.0) / mu) ** (n / 2)
    else:
        avg = float(np.mean(np.clip(R - np.asarray(potential) / mu, 0.0, None) ** (n / 2))) / mu ** (n / 2)
    weyl = ball * avg * grid.cells / (2 * math.pi) ** n
    return int(min(grid.size, math.ceil(margin * weyl) + 2 * grid.cells + 2))


def _solve_one(args):
    mu, gauge, pot, grid, th, count, dense_max, R = args
    K = kinetic_matrix(gauge, grid, th)
    op = DiscreteOperator(K, pot, mu, gauge, grid, th)
    N = grid.size
    while True:
        try:
            res = eigen_lowest(op, count, dense_max)
        except NumericalError as exc:
            raise NumericalError(f"{exc.args[0]} at theta={th}", "spectral_engine") from exc
        # grow until the spectrum above R is reached
        if R is None or count >= N or res.eigenvalues[-1] > R:
            return res
        count = min(N, 2 * count)


def bloch_sweep(mu, gauge, V, grid: SupercellGrid, thetas, count: int | None = None, jobs: int = 1,
                dense_max: int = DENSE_MAX, R: float | None = None) -> list:
    """One :class:`EigenResult` per Bloch momentum, in the order of ``thetas``.

    With ``R`` and no ``count`` the count is estimated and then doubled per
    momentum until an eigenvalue above R is found.
    """
    thetas = list(thetas)
    if not thetas:
        raise DomainError("theta grid is empty", "spectral_engine")
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}", "discrete_hamiltonian")
    pot = np.asarray(V(grid.positions()), dtype=float).reshape(grid.size)
    adaptive = None
    if count is None:
        if R is None:
            raise DomainError("give either count or the cutoff R", "spectral_engine")
        count = default_count(mu, grid, R, potential=pot)
        adaptive = R
    count = min(count, grid.size)
    tasks = [(float(mu), gauge, pot, grid, tuple(np.atleast_1d(th)), count, dense_max, adaptive)
             for th in thetas]
    if jobs <= 1:
        return [_solve_one(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_one, tasks))


def ids_curve(results, grid: SupercellGrid, lams) -> np.ndarray:
    """N_Gamma(lam) = (#theta * cells)^-1 sum_theta #{E <= lam} on an array of lam."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    total = np.zeros(lams.shape)
    for r in results:
        if not r.complete and lams.size and lams.max() >= r.eigenvalues[-1]:
            raise RangeError(
                f"lambda={lams.max():g} is beyond the resolved range at theta={r.theta} "
                f"(highest computed eigenvalue {r.eigenvalues[-1]:g}); raise count", "spectral_engine")
        total += np.searchsorted(r.eigenvalues, lams, side="right")
    return total / (len(results) * grid.cells)


def ids(results, grid: SupercellGrid, lam: float) -> float:
    return float(ids_curve(results, grid, [lam])[0])


def resolved_max(results) -> float:
    """Largest lambda at which :func:`ids_curve` is exact."""
    return min(np.inf if r.complete else r.eigenvalues[-1] for r in results)


@dataclass
class BandReport:
    bands: list
    gaps: list
    ids_samples: list = field(default_factory=list)
    mu: float | None = None
    flux: tuple | None = None
    cutoff: float | None = None
    threshold: float | None = None
    ids_bands: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def gaps_below(self, R: float) -> list:
        return [g for g in self.gaps if g[0] < R]

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "flux": list(self.flux) if self.flux is not None else None,
            "cutoff": self.cutoff,
            "threshold": self.threshold,
            "bands": [[float(a), float(b)] for a, b in self.bands],
            "gaps": [[float(a), float(b)] for a, b in self.gaps],
            "ids_bands": [[float(a), float(b)] for a, b in self.ids_bands],
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def ids_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "N_gamma"])
        for lam, N in self.ids_samples:
            w.writerow([repr(float(lam)), repr(float(N))])
        return buf.getvalue()


def _merge(intervals, delta):
    intervals = sorted(intervals)
    out = [list(intervals[0])]
    for a, b in intervals[1:]:
        if a - out[-1][1] > delta:
            out.append([a, b])
        else:
            out[-1][1] = max(out[-1][1], b)
    return [tuple(iv) for iv in out]


def index_hulls(results, R: float) -> list:
    """[min_theta E_i, max_theta E_i] for every band index i that reaches below R."""
    k = min(len(r.eigenvalues) for r in results)
    E = np.array([np.asarray(r.eigenvalues)[:k] for r in results])
    lo, hi = E.min(axis=0), E.max(axis=0)
    keep = lo <= R
    return [(float(a), float(min(b, R))) for a, b in zip(lo[keep], hi[keep])]


def growth_intervals(lams, N) -> list:
    """Intervals [lam_i, lam_j] of the sample grid on which N increases (points of growth)."""
    lams = np.asarray(lams)
    N = np.asarray(N)
    steps = np.nonzero(np.diff(N) > 0)[0]
    if steps.size == 0:
        return []
    out = []
    lo = hi = steps[0]
    for s in steps[1:]:
        if s == hi + 1:
            hi = s
        else:
            out.append((float(lams[lo]), float(lams[hi + 1])))
            lo = hi = s
    out.append((float(lams[lo]), float(lams[hi + 1])))
    return out


def extract_bands(results, R: float, delta: float | None = None, grid: SupercellGrid | None = None,
                  lams=None, method: str = "hulls") -> BandReport:
    """Bands of the sweep below R, merged across gaps <= ``delta``.

    ``method="hulls"`` takes, per band index, the hull over theta;
    ``method="pooled"`` sorts all eigenvalues <= R and splits where consecutive
    values differ by more than ``delta`` (this resolves the theta sampling as
    separate bands once the true bands are wider than delta per sample).
    Gaps are the open intervals between consecutive bands; when the sweep
    resolves spectrum above R, the gap from the last band to the lowest
    eigenvalue above R is included too.
    """
    delta = max(1e-6, 5 * SOLVER_TOL) if delta is None else float(delta)
    if delta <= 2 * SOLVER_TOL:
        raise DomainError(f"gap threshold {delta:g} must exceed twice the solver tolerance", "spectral_engine")
    if method == "hulls":
        hulls = index_hulls(results, R)
    elif method == "pooled":
        pool = np.concatenate([np.asarray(r.eigenvalues) for r in results])
        hulls = [(float(v), float(v)) for v in pool[pool <= R]]
    else:
        raise DomainError(f"unknown band method {method!r}", "spectral_engine")
    if not hulls:
        raise DomainError(f"no eigenvalue below R={R:g}", "spectral_engine")
    bands = _merge(hulls, delta)
    gaps = [(bands[i][1], bands[i + 1][0]) for i in range(len(bands) - 1)]
    pooled = np.concatenate([np.asarray(r.eigenvalues) for r in results])
    above = np.sort(pooled[pooled > R])
    if above.size and above[0] - bands[-1][1] > delta:
        gaps.append((bands[-1][1], float(above[0])))
    rep = BandReport([(float(a), float(b)) for a, b in bands], [(float(a), float(b)) for a, b in gaps],
                     mu=results[0].mu, cutoff=float(R), threshold=delta)
    if grid is not None:
        if lams is None:
            top = min(R, resolved_max(results) * (1 - 1e-12))
            lams = np.linspace(0.0, top, 401)
        N = ids_curve(results, grid, lams)
        rep.ids_samples = list(zip(np.asarray(lams).tolist(), N.tolist()))
        rep.ids_bands = growth_intervals(lams, N)
    return rep
