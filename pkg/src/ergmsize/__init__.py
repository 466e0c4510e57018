"""Exponential-family random graph models with a network-size offset."""

from .asymptotics import (MixingSpec, finite_n_degree_pmf, finite_n_mixing_degree, finite_n_tie_prob,
                          mixing_expected_degree, poisson_limit_pmf)
from .ego import (EgoRecord, EgoSample, ImpliedStats, SurveySchema, bootstrap_resample, census,
                  implied_actor_stat, implied_edge_stat, implied_stats, read_survey, synth_population)
from .errors import (DegeneracyError, ErgmError, InputError, InvalidDyadError, NotEgocentricError,
                     NumericalError, SeparationError, TooLargeError, WrongMethodError)
from .fit import FitConfig, FitResult, fit_logistic_dyad_independent, fit_mean_value
from .network import AttributeTable, Network, density, dyad_count, toggle
from .sampler import GibbsChain, SamplerConfig, exact_distribution, gibbs_sample
from .study import StudyConfig, run_invariance_demo, run_scaling_study
from .synth import SynthSpec
from .terms import (ModelSpec, OffsetSpec, TermSpec, change_stats, conditional_tie_prob, global_stats,
                    nhsls_model)

__version__ = "0.1.0"
