"""Additivity tests for two-way layouts with one observation per cell."""

from ._core import (
    AdditivityError,
    Method,
    calibrate,
    classic_test,
    default_k_grid,
    f_cdf,
    f_quantile,
    fit_additive,
    fit_interaction,
    generate,
    modified_tukey_test,
    power_grid,
    read_csv,
    spectrum,
    statistic,
)

__all__ = [
    "AdditivityError",
    "Method",
    "calibrate",
    "classic_test",
    "default_k_grid",
    "f_cdf",
    "f_quantile",
    "fit_additive",
    "fit_interaction",
    "generate",
    "modified_tukey_test",
    "power_grid",
    "read_csv",
    "spectrum",
    "statistic",
]
