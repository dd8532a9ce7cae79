"""One experiment: potential, gauge and discretisation, swept over mu."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import SupercellGrid
from .group_cocycle import GaugeData, check_commensurate
from .model_operator import ModelSpectrum, build_wells, enumerate_spectrum
from .potential import MorsePotential, WellList, find_zeros, verify_morse_type
from .spectral_engine import DENSE_MAX, BandReport, bloch_sweep, extract_bands, ids_curve, theta_grid


@dataclass
class Experiment:
    potential: MorsePotential
    gauge: GaugeData
    grid: SupercellGrid
    cutoff: float
    theta_points: int = 8
    count: int | None = None
    delta: float | None = None
    jobs: int = 1
    dense_max: int = DENSE_MAX
    flux: tuple = (0, 1)
    _wells: WellList | None = field(default=None, repr=False)

    def __post_init__(self):
        check_commensurate(self.gauge, self.grid)

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def thetas(self) -> list:
        return theta_grid(self.dimension, self.theta_points)

    def wells(self) -> WellList:
        if self._wells is None:
            w = find_zeros(self.potential)
            verify_morse_type(self.potential, w)
            self._wells = w
        return self._wells

    def oscillators(self):
        return build_wells(self.wells())

    def model(self, cutoff: float | None = None) -> ModelSpectrum:
        """Model spectrum; the default cutoff leaves room for the windows above R."""
        osc = self.oscillators()
        if cutoff is None:
            step = 2 * min(float(np.min(w.frequencies)) for w in osc)
            cutoff = self.cutoff + 2 * step
        return enumerate_spectrum(osc, cutoff)

    def sweep(self, mu: float):
        return bloch_sweep(mu, self.gauge, self.potential, self.grid, self.thetas(), count=self.count,
                           jobs=self.jobs, dense_max=self.dense_max, R=self.cutoff * 1.3)

    def report(self, mu: float, results=None, lams=None) -> tuple:
        results = self.sweep(mu) if results is None else results
        rep = extract_bands(results, self.cutoff, self.delta, grid=self.grid, lams=lams)
        rep.flux = tuple(self.flux)
        rep.meta = {"m": self.grid.m, "supercell": list(self.grid.supercell),
                    "theta_points": self.theta_points, "gauge": self.gauge.gauge}
        return results, rep

    def ids_function(self, results):
        return lambda lams: ids_curve(results, self.grid, lams)

    def with_gauge(self, gauge: GaugeData, flux=None) -> "Experiment":
        return replace(self, gauge=gauge, flux=self.flux if flux is None else flux)
