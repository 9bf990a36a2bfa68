"""Confidence regions for extreme quantiles of heavy-tailed data.

Three constructions around the Weissman quantile estimate: a normal
approximation, a censored likelihood ratio and a data-tilting statistic.
"""
from .distributions import HeavyDist, SecondOrder, cdf, sample, second_order, upper_quantile
from .errors import (DomainError, EstimationError, InfeasibleTargetError, InvalidInputError,
                     NoRootError, TailcrError, UnboundedRegionError)
from .lr import LrSolution, g_eval, lr_region, lr_stat, solve_lambda
from .normal import cdf_expansion, normal_region, predicted_coverage
from .region import Region
from .special import chi2_1_quantile, normal_pdf_cdf, normal_quantile, two_sided_z
from .tail import TailFit, TailSample, c_hat, censored_loglik, fit_tail, hill, make_tail_sample, weissman_quantile
from .tilt import (TiltSolution, distance, inner_solve, outer_solve, tilt_region, tilted_fit,
                   weights_from_multipliers)

__version__ = "0.1.0"
