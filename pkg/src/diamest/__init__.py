"""Expected diameter of labeled Boolean datasets under homogeneous halfspaces."""
from .core import (Dataset, DimensionError, EstimateReport, LabeledPoint, NonSeparableError, diameter_from_inner,
                   distance_exact, distance_mc, restricted_distance, sign_eval)
from .estimators import (FourierParams, InfeasiblePlanError, PlannerParams, bern_sol1, bern_sol2, estimate_alt,
                         estimate_angle, estimate_dir, estimate_fourier, fourier_ell, plan_alt, plan_dir,
                         run_until_converged)
from .oracle import enumerate_consistent, oracle_uni, oracle_vol
from .perceptron import perceptron
from .structure import (Automorphism, SubcubeStructure, TruncationParams, apply_automorphism, detect_subcube,
                        invert_automorphism, normal_cdf, orbit_representatives, stabilizer_element,
                        structured_diameter)
from .version_space import ChainConfig, HitAndRun, VersionSpace, hit_and_run, initial_point

__version__ = "0.1.0"
