"""Pressure, metric compactifications and boundary structure for
countable Markov shifts."""

from .boundary import (BoundaryModel, BoundarySymbol, CompactifiedShift,
                       boundary_entropy, build_boundary_model,
                       check_no_excursion, compactify)
from .diffprobe import (KinkReport, PressureCurve, check_pressure_axioms,
                        gateaux_derivative, kink_scan, pressure_curve)
from .errors import CmsError, ConvergenceError, ValidationError
from .gallery import GalleryEntry, catalogue, instantiate
from .metrics import (MetricClassification, ShiftMetric, VertexMetric,
                      classify, make_metric, rho_eval, shift_distance,
                      vertex_set_diameter)
from .potentials import (Affine, LocallyConstant, Potential, VertexFormula,
                         birkhoff_sum, constant, discretize, eval_potential,
                         make_formula, variation)
from .pressure import (EquilibriumData, MarkovMeasure, PressureEstimate,
                       boundary_equidistribution, compactified_pressure,
                       equilibrium_measure, gurevich_pressure,
                       interior_pressure, loop_entropy, measure_free_energy,
                       separated_set_pressure, sft_pressure,
                       variational_witness_check)
from .sectors import (SectorCertificate, SectorDecomposition, boundary_chains,
                      decompose, verify)
from .shifts import (ExplicitSpec, PeriodicOrbit, ShiftSpec, TruncatedSFT,
                     Word, enumerate_words, is_topologically_mixing,
                     make_generator, mixing_bound, periodic_orbits, truncate)

__version__ = "0.1.0"
