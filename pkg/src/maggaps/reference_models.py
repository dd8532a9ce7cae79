"""Reference spectra with closed or semi-closed forms.

* hyperbolic Landau levels on the Poincare disc (Comtet-Houston),
* the Harper (Hofstadter) tight-binding operator at rational flux p/q.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .errors import DomainError

HARPER_K_POINTS = 64
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class HyperbolicSpectrum:
    theta: float
    eigenvalues: tuple
    continuum_threshold: float

    def format(self) -> str:
        ev = ", ".join(f"{float(e):g}" for e in self.eigenvalues) or "(none)"
        return f"{ev} | continuum \u2265 {float(self.continuum_threshold):g}"


def comtet_houston(theta) -> HyperbolicSpectrum:
    """Point spectrum (2k+1)theta - k(k+1), 0 <= k < theta - 1/2, and continuum [1/4 + theta^2, oo).

    Rational input (int, Fraction) is kept exact.
    """
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}", "reference_models")
    t = theta if isinstance(theta, (int, Fraction)) else float(theta)
    ev = []
    k = 0
    while k < t - Fraction(1, 2):
        ev.append((2 * k + 1) * t - k * (k + 1))
        k += 1
    thr = Fraction(1, 4) + t * t if isinstance(t, (int, Fraction)) else 0.25 + t * t
    norm = lambda v: int(v) if isinstance(v, Fraction) and v.denominator == 1 else v
    return HyperbolicSpectrum(theta, tuple(norm(e) for e in ev), norm(thr))


# -- Harper ---------------------------------------------------------------------


def harper_bloch_matrix(p: int, q: int, coupling: float, k1: float, k2: float) -> np.ndarray:
    """q x q Landau-gauge Bloch matrix.

    Diagonal coupling * cos(k2 + 2 pi p j / q); unit hopping j -> j+1 with
    the corner link carrying exp(i k1).  For q = 1 this is 2 cos k1 + coupling cos k2.
    """
    j = np.arange(q)
    H = np.diag(coupling * np.cos(k2 + 2 * np.pi * p * j / q)).astype(complex)
    S = np.zeros((q, q), dtype=complex)
    S[j[:-1], j[:-1] + 1] = 1.0
    S[q - 1, 0] += np.exp(1j * k1)
    return H + S + S.conj().T


@dataclass
class HarperBands:
    p: int
    q: int
    coupling: float
    bands: list                 # per band index, min/max over the k-grid
    merged: list = field(default_factory=list)
    gaps: list = field(default_factory=list)

    @property
    def gap_count(self) -> int:
        return len(self.gaps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["flux_p", "flux_q", "band_index", "lower", "upper"])
        for i, (a, b) in enumerate(self.bands):
            w.writerow([self.p, self.q, i, repr(float(a)), repr(float(b))])
        return buf.getvalue()


def harper_spectrum(p: int, q: int, coupling: float = 2.0, k_points: int = HARPER_K_POINTS,
                    jobs: int = 1, tol: float = MERGE_TOL) -> HarperBands:
    if int(p) != p or int(q) != q or q < 1:
        raise DomainError(f"flux {p}/{q} must be integers with q >= 1", "reference_models")
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise DomainError(f"flux {p}/{q} is not in lowest terms", "reference_models")
    ks = 2 * np.pi * np.arange(k_points) / k_points

    def row(k1):
        return np.array([sla.eigvalsh(harper_bloch_matrix(p, q, coupling, k1, k2)) for k2 in ks])

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            blocks = list(ex.map(row, ks))
    else:
        blocks = [row(k1) for k1 in ks]
    E = np.concatenate(blocks)          # (k_points^2, q)
    bands = [(float(E[:, i].min()), float(E[:, i].max())) for i in range(q)]
    merged = [list(bands[0])]
    for a, b in bands[1:]:
        if a - merged[-1][1] <= tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    merged = [tuple(m) for m in merged]
    gaps = [(merged[i][1], merged[i + 1][0]) for i in range(len(merged) - 1)]
    return HarperBands(p, q, float(coupling), bands, merged, gaps)


def harper_gap_table(q_max: int, coupling: float = 2.0, k_points: int = 32, jobs: int = 1) -> list:
    """[(p, q, open gaps)] for all reduced 0 < p/q <= 1 with q <= q_max (p = 0 for q = 1)."""
    if not 1 <= q_max <= 30:
        raise DomainError(f"q_max must lie in [1, 30], got {q_max}", "reference_models")
    rows = []
    for q in range(1, q_max + 1):
        ps = [0] if q == 1 else [p for p in range(1, q) if math.gcd(p, q) == 1]
        for p in ps:
            rows.append((p, q, harper_spectrum(p, q, coupling, k_points, jobs).gap_count))
    return rows
