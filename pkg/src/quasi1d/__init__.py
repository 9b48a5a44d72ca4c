"""Collective light-matter response of emitter chains coupled to quasi-1D reservoirs."""

__version__ = "0.1.0"

from .collective import (CouplingMatrix, EmitterChain, ModeDecomposition, build_coupling_matrix,
                         classify_modes, decompose, tridiagonal_modes)
from .dynamics import TimeTrace, evolve, zero_offdiagonal
from .eit import (EITParameters, eit_transmission, group_velocity, keff_closed_forms,
                  keff_exact, keff_series)
from .errors import (ConfigError, FrequencyRangeError, ModelValidityError, PoleError,
                     PositionError, Quasi1DError, QuasiDefectiveError, ScenarioError,
                     WronskianError)
from .greens import (BandgapModel, CavityModel, LocalModel, RateUnits, TabulatedCoupling,
                     WaveguideModel, cavity_green, frequency_dependent_cavity, jc_rates)
from .layered import HelmholtzSolution, LayeredReservoir, LayeredStack, Slab, helmholtz_green
from .spectra import (SpectrumTable, beer_lambert, fano, nonmarkov_spectrum, reflection,
                      scattering, transmission, transmission_product)
from .scenario import load_config, run_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
