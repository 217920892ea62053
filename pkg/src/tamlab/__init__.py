"""Tamagawa products, local densities and heights for y^2 = x^3 + a4 x + a6."""

from .census import CensusResult, factor_discriminant, run_census
from .curves import Curve, HeightBound, LongModel, SingularCurveError, count_curves, enumerate_curves
from .densities import delta, delta_closed_form, delta_hat, delta_prime, delta_table, rho_minimal
from .generic_tate import generic_tate
from .heights import (
    ConvenientTest, HeightReport, RationalPoint, canonical_height, canonical_height_oracle,
    check_fe_positivity, f_e, find_points, is_convenient, shared_root_polynomial,
)
from .kodaira import KodairaType, LocalReduction
from .series import SeriesValue, l_tam, p_tam
from .tate import TateData, bad_primes, classify, local_data, tamagawa_product, tate_data

__version__ = "0.1.0"

__all__ = [
    "CensusResult", "ConvenientTest", "Curve", "HeightBound", "HeightReport", "KodairaType",
    "LocalReduction", "LongModel", "RationalPoint", "SeriesValue", "SingularCurveError", "TateData",
    "bad_primes", "canonical_height", "canonical_height_oracle", "check_fe_positivity", "classify",
    "count_curves", "delta", "delta_closed_form", "delta_hat", "delta_prime", "delta_table",
    "enumerate_curves", "f_e", "factor_discriminant", "find_points", "generic_tate", "is_convenient",
    "l_tam", "local_data", "p_tam", "rho_minimal", "run_census", "shared_root_polynomial",
    "tamagawa_product", "tate_data",
]
