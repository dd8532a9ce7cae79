"""INI-style experiment configuration.

Sections and keys (unknown sections or keys are rejected)::

    [experiment]  dimension, mu (comma list, decreasing), cutoff
    [potential]   preset (sin2) | terms ("k cos|sin amp; ..."), kind (potential | morse_function)
    [gauge]       gauge (landau | symmetric), flux_p, flux_q, base_point
    [grid]        m, supercell, theta_points
    [sweep]       count, delta, dense_max
    [analysis]    toggles (cluster, sandwich, multiplicity, quasimode, harper) and parameters
    [output]      dir

Frequencies in ``terms`` are integer vectors written ``k`` (1-D) or ``k1,k2``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .grid import SupercellGrid
from .group_cocycle import GaugeData
from .potential import MorsePotential, from_morse_function
from .trigpoly import TrigPolynomial

SCHEMA = {
    "experiment": {"dimension", "mu", "cutoff", "name"},
    "potential": {"preset", "terms", "kind", "frequency"},
    "gauge": {"gauge", "flux_p", "flux_q", "base_point"},
    "grid": {"m", "supercell", "theta_points"},
    "sweep": {"count", "delta", "dense_max"},
    "analysis": {
        "cluster", "sandwich", "multiplicity", "quasimode", "harper",
        "fit_mu", "assign_mu", "ids_points", "ids_tol", "width_slope", "min_gaps",
        "multiplicity_mu", "multiplicity_c", "multiplicity_levels", "multiplicity_tol",
        "quasimode_kappa", "quasimode_mu", "quasimode_m", "quasimode_supercell",
        "quasimode_slope", "quasimode_level",
        "harper_q_max", "harper_coupling", "harper_k_points",
    },
    "output": {"dir"},
}


def _fail(key, msg):
    raise ConfigurationError(f"{key}: {msg}", "cli")


@dataclass
class ExperimentConfig:
    name: str
    dimension: int
    mus: list
    cutoff: float
    potential: MorsePotential
    gauge: GaugeData
    flux: tuple
    grid: SupercellGrid
    theta_points: int = 8
    count: int | None = None
    delta: float | None = None
    dense_max: int | None = None
    analysis: dict = field(default_factory=dict)
    out_dir: str = "out"


class _Reader:
    def __init__(self, cp: configparser.ConfigParser):
        self.cp = cp

    def raw(self, sec, key, default=None):
        if self.cp.has_option(sec, key):
            v = self.cp.get(sec, key).strip()
            return v if v != "" else default
        return default

    def num(self, sec, key, default=None, kind=float, positive=False):
        v = self.raw(sec, key)
        if v is None:
            return default
        try:
            out = kind(v) if kind is float else int(v)
        except ValueError:
            _fail(f"{sec}.{key}", f"expected a {'number' if kind is float else 'integer'}, got {v!r}")
        if positive and not out > 0:
            _fail(f"{sec}.{key}", f"must be positive, got {v!r}")
        return out

    def nums(self, sec, key, default=None, kind=float):
        v = self.raw(sec, key)
        if v is None:
            return default
        try:
            return [kind(t) for t in v.replace(";", ",").split(",") if t.strip()]
        except ValueError:
            _fail(f"{sec}.{key}", f"expected a comma list of numbers, got {v!r}")

    def flag(self, sec, key, default=False):
        v = self.raw(sec, key)
        if v is None:
            return default
        try:
            return self.cp.getboolean(sec, key)
        except ValueError:
            _fail(f"{sec}.{key}", f"expected true/false, got {v!r}")


def parse_terms(text: str, dimension: int) -> list:
    terms = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != 3:
            _fail("potential.terms", f"term {chunk!r} must read 'frequency cos|sin amplitude'")
        freq, kind, amp = parts
        try:
            k = tuple(float(v) for v in freq.split(","))
            a = float(amp)
        except ValueError:
            _fail("potential.terms", f"term {chunk!r} has a non-numeric field")
        if len(k) != dimension:
            _fail("potential.terms", f"frequency {freq!r} does not have {dimension} components")
        terms.append((k, kind, a))
    if not terms:
        _fail("potential.terms", "no terms given")
    return terms


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {str(path)!r}: {exc.strerror}", "cli") from None
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config {str(path)!r}: {exc}", "cli") from None
    for sec in cp.sections():
        if sec not in SCHEMA:
            _fail(sec, f"unknown section [{sec}]")
        for key in cp.options(sec):
            if key not in SCHEMA[sec]:
                _fail(f"{sec}.{key}", "unknown key")
    r = _Reader(cp)

    dim = r.num("experiment", "dimension", 1, int)
    if dim not in (1, 2):
        _fail("experiment.dimension", f"must be 1 or 2, got {dim}")
    mus = r.nums("experiment", "mu")
    if not mus:
        _fail("experiment.mu", "at least one mu is required")
    if any(m <= 0 for m in mus):
        _fail("experiment.mu", f"all mu must be positive, got {mus}")
    if any(b >= a for a, b in zip(mus, mus[1:])):
        _fail("experiment.mu", f"mu list must be strictly decreasing, got {mus}")
    cutoff = r.num("experiment", "cutoff", positive=True)
    if cutoff is None:
        _fail("experiment.cutoff", "required")

    preset = r.raw("potential", "preset")
    terms = r.raw("potential", "terms")
    kind = r.raw("potential", "kind", "potential")
    if (preset is None) == (terms is None):
        _fail("potential", "give exactly one of 'preset' or 'terms'")
    if preset is not None:
        if preset != "sin2":
            _fail("potential.preset", f"unknown preset {preset!r} (available: sin2)")
        V = MorsePotential.sin2(dim, r.num("potential", "frequency", 1, int))
    else:
        t = parse_terms(terms, dim)
        if kind == "potential":
            V = MorsePotential.from_terms(dim, t)
        elif kind == "morse_function":
            V = from_morse_function(TrigPolynomial.from_terms(dim, t))
        else:
            _fail("potential.kind", f"must be 'potential' or 'morse_function', got {kind!r}")

    p = r.num("gauge", "flux_p", 0, int)
    q = r.num("gauge", "flux_q", 1, int)
    if q < 1:
        _fail("gauge.flux_q", f"must be >= 1, got {q}")
    if dim == 1 and p != 0:
        _fail("gauge.flux_p", "a magnetic field needs dimension 2")
    gname = r.raw("gauge", "gauge", "landau")
    if gname not in ("landau", "symmetric"):
        _fail("gauge.gauge", f"must be 'landau' or 'symmetric', got {gname!r}")
    x0 = r.nums("gauge", "base_point")
    if x0 is not None and len(x0) != dim:
        _fail("gauge.base_point", f"needs {dim} components")
    gauge = GaugeData.from_flux(dim, p, q, gname, x0)

    m = r.num("grid", "m", 64, int, positive=True)
    sc = r.nums("grid", "supercell", [1] * dim, int)
    if len(sc) != dim or any(v < 1 for v in sc):
        _fail("grid.supercell", f"needs {dim} positive integers, got {sc}")
    grid = SupercellGrid(dim, tuple(sc), m)
    if not gauge.flux_commensurate(grid.supercell):
        _fail("grid.supercell", f"flux {p}/{q} is not commensurate with supercell {tuple(sc)}")
    tp = r.num("grid", "theta_points", 8, int, positive=True)

    a = {
        "cluster": r.flag("analysis", "cluster", True),
        "sandwich": r.flag("analysis", "sandwich", True),
        "multiplicity": r.flag("analysis", "multiplicity", False),
        "quasimode": r.flag("analysis", "quasimode", False),
        "harper": r.flag("analysis", "harper", False),
        "fit_mu": r.num("analysis", "fit_mu", max(mus), positive=True),
        "assign_mu": r.num("analysis", "assign_mu", min(mus), positive=True),
        "ids_points": r.num("analysis", "ids_points", 200, int, positive=True),
        "ids_tol": r.num("analysis", "ids_tol", 0.05, positive=True),
        "width_slope": r.num("analysis", "width_slope", 0.19),
        "min_gaps": r.num("analysis", "min_gaps", 1, int),
        "multiplicity_mu": r.num("analysis", "multiplicity_mu", min(mus), positive=True),
        "multiplicity_c": r.num("analysis", "multiplicity_c", None, positive=True),
        "multiplicity_levels": r.nums("analysis", "multiplicity_levels", [0, 1], int),
        "multiplicity_tol": r.num("analysis", "multiplicity_tol", 0.05, positive=True),
        "quasimode_kappa": r.num("analysis", "quasimode_kappa", 0.45),
        "quasimode_mu": r.nums("analysis", "quasimode_mu", [1e-3, 3e-3, 1e-2, 3e-2, 1e-1]),
        "quasimode_m": r.num("analysis", "quasimode_m", 2048, int, positive=True),
        "quasimode_supercell": r.num("analysis", "quasimode_supercell", 2, int, positive=True),
        "quasimode_slope": r.num("analysis", "quasimode_slope", 0.3),
        "quasimode_level": r.num("analysis", "quasimode_level", 0, int),
        "harper_q_max": r.num("analysis", "harper_q_max", 7, int, positive=True),
        "harper_coupling": r.num("analysis", "harper_coupling", 2.0),
        "harper_k_points": r.num("analysis", "harper_k_points", 32, int, positive=True),
    }
    if a["fit_mu"] not in mus:
        _fail("analysis.fit_mu", f"{a['fit_mu']} is not in experiment.mu")
    return ExperimentConfig(
        name=r.raw("experiment", "name", path.stem), dimension=dim, mus=mus, cutoff=cutoff,
        potential=V, gauge=gauge, flux=(p, q), grid=grid, theta_points=tp,
        count=r.num("sweep", "count", None, int, positive=True),
        delta=r.num("sweep", "delta", None, positive=True),
        dense_max=r.num("sweep", "dense_max", None, int, positive=True),
        analysis=a, out_dir=r.raw("output", "dir", "out"))
