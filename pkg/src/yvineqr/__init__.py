"""Bivariate quantile regression with Y-vine copulas."""

from .exceptions import DomainError, FitError, ModelFormatError, NoSolutionOnLine, QuadratureError
from .margins import MarginalModel, UniformMarginal, fit_marginal
from .paircop import Family, PairCopulaSpec, fit_pair
from .predict import (build_context, cond_indep_curve, conditional_cdf, conditional_quantile_curve,
                      simulate, univariate_conditional_quantile)
from .quantile import QuantileCurve, closed_form_curve, confidence_region, quantile_curve
from .serialize import load_model, save_model
from .structure import build_structure, check_structure
from .yvine import YVineModel, acll, fit, model_from_pairs

__version__ = "0.1.0"

__all__ = [
    "DomainError", "FitError", "ModelFormatError", "NoSolutionOnLine", "QuadratureError",
    "MarginalModel", "UniformMarginal", "fit_marginal",
    "Family", "PairCopulaSpec", "fit_pair",
    "build_context", "cond_indep_curve", "conditional_cdf", "conditional_quantile_curve",
    "simulate", "univariate_conditional_quantile",
    "QuantileCurve", "closed_form_curve", "confidence_region", "quantile_curve",
    "load_model", "save_model", "build_structure", "check_structure",
    "YVineModel", "acll", "fit", "model_from_pairs",
]
