"""Quantitative checks of the clustering of the spectrum of H(mu) around the model levels.

Window half-width throughout is ``w = C * mu**(1/5)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_hermite

from .discrete_hamiltonian import assemble
from .errors import DomainError, GeometryError, MuTooLarge
from .model_operator import ModelSpectrum, OscillatorWell, counting_function_array
from .spectral_engine import BandReport

WIDTH_EXPONENT = 0.2
IDS_TOL = 0.05


def window(mu: float, C: float) -> float:
    return C * mu ** WIDTH_EXPONENT


@dataclass
class ClusterAssignment:
    level: list          # model index per band
    distance: list       # |centre - alpha_p|
    width: list          # b - a
    included: list       # band inside (alpha_p - w, alpha_p + w)
    unassigned: list     # bands outside every window
    C: float
    mu: float
    disjoint: bool
    exponent: float = WIDTH_EXPONENT

    @property
    def inclusion(self) -> bool:
        return all(self.included)

    @property
    def passed(self) -> bool:
        return self.inclusion and self.disjoint

    def unique(self) -> bool:
        """At most one band per model level."""
        return len(set(self.level)) == len(self.level)

    def cluster_widths(self, bands) -> dict:
        """Hull width of the bands attached to each model level."""
        out: dict = {}
        for p, (a, b) in zip(self.level, bands):
            lo, hi = out.get(p, (a, b))
            out[p] = (min(lo, a), max(hi, b))
        return {p: hi - lo for p, (lo, hi) in out.items()}


def _nearest(alphas, centre):
    return int(np.argmin(np.abs(alphas - centre)))


def windows_disjoint(model: ModelSpectrum, mu: float, C: float, upto: float | None = None):
    """None if consecutive windows (up to alpha <= upto) are disjoint, else the colliding pair."""
    w = window(mu, C)
    a = model.alphas if upto is None else model.alphas[model.alphas <= upto]
    for p in range(len(a) - 1):
        if a[p + 1] - a[p] <= 2 * w:
            return p, p + 1
    return None


def cluster_check(report: BandReport, model: ModelSpectrum, mu: float, C: float) -> ClusterAssignment:
    if len(model) == 0:
        raise DomainError("model spectrum is empty", "gap_analysis")
    w = window(mu, C)
    R = report.cutoff if report.cutoff is not None else model.cutoff
    level, dist, width, inc, unassigned = [], [], [], [], []
    for i, (a, b) in enumerate(report.bands):
        c = 0.5 * (a + b)
        p = _nearest(model.alphas, c)
        alpha = model.alphas[p]
        ok = alpha - w < a and b < alpha + w
        level.append(p)
        dist.append(abs(c - alpha))
        width.append(b - a)
        inc.append(bool(ok))
        if not ok:
            unassigned.append(i)
    # windows that can meet spectrum below R
    disjoint = windows_disjoint(model, mu, C, upto=R + w) is None
    return ClusterAssignment(level, dist, width, inc, unassigned, C, mu, disjoint)


def fit_cluster_constant(report: BandReport, model: ModelSpectrum, mu: float, ids=None, lams=None,
                         tol: float = IDS_TOL, slack: float = 1e-6) -> float:
    """Smallest C putting every band inside the window of its nearest level.

    With ``ids`` (and ``lams``) the sandwich violation must also be <= ``tol``;
    both conditions are monotone in C, so the combined constant is found by bisection.
    """
    need = 0.0
    for a, b in report.bands:
        alpha = model.alphas[_nearest(model.alphas, 0.5 * (a + b))]
        need = max(need, abs(a - alpha), abs(b - alpha))
    C = (1 + slack) * need / mu ** WIDTH_EXPONENT + 1e-12
    if ids is None:
        return C

    def ok(c):
        return sandwich_check(ids, model, mu, c, lams) <= tol

    if ok(C):
        return C
    lo, hi = C, 2 * C + 1.0
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise DomainError("no constant satisfies the sandwich inequality", "gap_analysis")
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return (1 + slack) * hi


def _ids_values(ids, lams):
    if callable(ids):
        return np.asarray(ids(np.asarray(lams, dtype=float)), dtype=float)
    table = dict((float(l), float(n)) for l, n in ids)
    try:
        return np.array([table[float(l)] for l in lams])
    except KeyError as exc:
        raise DomainError(f"lambda {exc.args[0]} not among the ids samples", "gap_analysis") from None


def sandwich_check(ids, model: ModelSpectrum, mu: float, C: float, lams=None) -> float:
    """max over lam of the violation of N(lam - w; K) <= N_Gamma(lam) <= N(lam + w; K).

    ``ids`` is either a callable on lambda arrays or a list of (lambda, N) samples.
    """
    if lams is None:
        if callable(ids):
            raise DomainError("a lambda grid is needed with a callable ids", "gap_analysis")
        lams = [l for l, _ in ids]
    lams = np.asarray(lams, dtype=float)
    w = window(mu, C)
    N = _ids_values(ids, lams)
    lower = counting_function_array(model, lams - w)
    upper = counting_function_array(model, lams + w)
    viol = np.maximum(np.maximum(lower - N, N - upper), 0.0)
    return float(viol.max(initial=0.0))


@dataclass
class JumpRow:
    alpha: float
    mult: int
    jump: float
    passed: bool


def multiplicity_check(ids, model: ModelSpectrum, mu: float, C: float, levels=None,
                       tol: float = IDS_TOL) -> list:
    """Per-level jump N_Gamma(alpha + w) - N_Gamma(alpha - w) against r_p.

    ``levels`` selects model indices (default: the first two).
    """
    if not callable(ids):
        raise DomainError("multiplicity_check needs ids as a callable of lambda", "gap_analysis")
    levels = list(range(min(2, len(model)))) if levels is None else list(levels)
    w = window(mu, C)
    top = max(levels) + 1
    for p in range(min(top, len(model) - 1)):
        if model.alphas[p + 1] - model.alphas[p] <= 2 * w:
            raise MuTooLarge(
                f"mu={mu:g} too large: windows around alpha_{p + 1}={model.alphas[p]:.6g} and "
                f"alpha_{p + 2}={model.alphas[p + 1]:.6g} overlap (half-width {w:.4g})", "gap_analysis")
    rows = []
    for p in levels:
        a, r = float(model.alphas[p]), int(model.mults[p])
        J = float(np.diff(ids(np.array([a - w, a + w])))[0])
        rows.append(JumpRow(a, r, J, abs(J - r) <= tol))
    return rows


@dataclass
class WidthFit:
    slope: float
    intercept: float
    residual: float
    threshold: float = 0.19

    @property
    def passed(self) -> bool:
        return self.slope >= self.threshold


def width_scaling_fit(sweep, threshold: float = 0.19, min_points: int = 4) -> WidthFit:
    """Least-squares slope of log(width) against log(mu)."""
    mus = np.array([s[0] for s in sweep], dtype=float)
    widths = np.array([s[1] for s in sweep], dtype=float)
    if len(mus) < min_points or mus.max() / mus.min() < 10 * (1 - 1e-12):
        raise DomainError(f"need >= {min_points} mu values spanning a decade", "gap_analysis")
    if np.any(widths <= 0):
        raise DomainError("degenerate fit: nonpositive widths", "gap_analysis")
    X = np.log(mus)
    Y = np.log(widths)
    A = np.stack([X, np.ones_like(X)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - Y) ** 2)))
    return WidthFit(float(coef[0]), float(coef[1]), resid, threshold)


def power_slope(xs, ys) -> float:
    """Plain log-log least-squares slope."""
    X = np.log(np.asarray(xs, dtype=float))
    Y = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(X, Y, 1)[0])


# -- quasimodes ---------------------------------------------------------------


def cutoff_profile(t) -> np.ndarray:
    """J(t): 1 on [0, 1], cos(pi (t - 1) / 2) on [1, 2], 0 beyond."""
    t = np.abs(np.asarray(t, dtype=float))
    out = np.where(t <= 1, 1.0, np.cos(0.5 * np.pi * (t - 1)))
    return np.where(t >= 2, 0.0, out)


def oscillator_state(well: OscillatorWell, index, mu: float, x) -> tuple:
    """Normalised eigenfunction of K(mu) = mu(-div G grad) + x^T Q x / mu at offsets x.

    ``index`` is a multi-index over the normal modes (an int in 1-D).
    Returns (values, eigenvalue).
    """
    n = well.dimension
    idx = np.atleast_1d(np.asarray(index, dtype=int))
    if idx.shape != (n,) or np.any(idx < 0):
        raise DomainError(f"level index {index!r} must be {n} nonnegative integers", "gap_analysis")
    G = well.inverse_metric
    evals, evecs = np.linalg.eigh(G)
    Gh = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    Ginvh = evecs @ np.diag(1 / np.sqrt(evals)) @ evecs.T
    lam, O = np.linalg.eigh(Gh @ well.quadratic_form @ Gh)
    omega = np.sqrt(lam)
    # x = G^(1/2) O z decouples the modes
    z = np.asarray(x, dtype=float).reshape(-1, n) @ (O.T @ Ginvh).T
    val = np.ones(len(z))
    for k in range(n):
        s = z[:, k] * math.sqrt(omega[k] / mu)
        mk = int(idx[k])
        norm = (omega[k] / (math.pi * mu)) ** 0.25 / math.sqrt(2.0 ** mk * math.factorial(mk))
        val = val * norm * eval_hermite(mk, s) * np.exp(-0.5 * s * s)
    # Jacobian of x -> z
    val = val / math.sqrt(abs(np.linalg.det(Gh)))
    energy = float(np.sum(omega * (2 * idx + 1)))
    return val, energy


@dataclass
class QuasimodeResult:
    rayleigh: float
    level: float
    mu: float
    kappa: float
    norm: float

    @property
    def residual(self) -> float:
        return abs(self.rayleigh - self.level)


def quasimode(well: OscillatorWell, index, mu: float, kappa: float, gauge, grid):
    """phi = J(mu^-kappa (x - xbar)) psi(x - xbar) on the grid (vector, level, centre)."""
    if not 1 / 3 < kappa < 1 / 2:
        raise DomainError(f"kappa must lie in (1/3, 1/2), got {kappa}", "gap_analysis")
    n = grid.dimension
    radius = 2 * mu ** kappa
    lo = np.asarray(grid.offset)
    hi = lo + np.asarray(grid.supercell, dtype=float)
    mid = 0.5 * (lo + hi)
    centre = np.asarray(well.location, dtype=float) + np.round(mid - np.asarray(well.location))
    if np.any(centre - radius < lo) or np.any(centre + radius > hi - grid.h):
        raise GeometryError(
            f"cutoff support radius {radius:.3g} does not fit in supercell {grid.supercell} "
            f"around the well at {centre.tolist()}: mu={mu:g} too large", "gap_analysis")
    x = grid.positions()
    d = x - centre
    psi, level = oscillator_state(well, index, mu, d)
    J = cutoff_profile(np.linalg.norm(d, axis=1) / mu ** kappa)
    phi = (J * psi).astype(complex)
    # local gauge with A(xbar) = 0, so the quadratic model carries no field
    a = gauge.vector_potential(centre[None, :])[0]
    phi *= np.exp(-1j * (d @ a))
    return phi, level, centre


def quasimode_check(well: OscillatorWell, index, mu: float, kappa: float, gauge, V, grid,
                    theta=None) -> QuasimodeResult:
    """Rayleigh quotient of the cut-off oscillator state against the assembled H(mu)."""
    phi, level, _ = quasimode(well, index, mu, kappa, gauge, grid)
    H = assemble(mu, gauge, V, grid, theta).matrix
    num = np.vdot(phi, H @ phi).real
    den = np.vdot(phi, phi).real
    return QuasimodeResult(float(num / den), level, mu, kappa, float(den * grid.h ** grid.dimension))


# -- gap counts -----------------------------------------------------------------


def gap_count_vs_mu(experiment, mus, R: float | None = None) -> list:
    """[(mu, number of gaps opening below R)] for decreasing ``mus``."""
    mus = list(mus)
    if any(b >= a for a, b in zip(mus, mus[1:])):
        raise DomainError("mu list must be strictly decreasing", "gap_analysis")
    R = experiment.cutoff if R is None else R
    table = []
    for mu in mus:
        _, rep = experiment.report(mu)
        table.append((mu, len(rep.gaps_below(R))))
    return table


def gap_count_monotone(table) -> bool:
    counts = [c for _, c in table]
    return all(b >= a for a, b in zip(counts, counts[1:]))
