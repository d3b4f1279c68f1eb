"""Random binary tree growth and its subtree-size limits."""

from ._core import (
    CovarianceReport,
    Measure,
    Tree,
    boundary_measure,
    clt_experiment,
    grow,
    increment_pmf,
    increments,
    parse_measure,
    selftest,
    theoretical_cov,
)

__all__ = [
    "CovarianceReport",
    "Measure",
    "Tree",
    "boundary_measure",
    "clt_experiment",
    "grow",
    "increment_pmf",
    "increments",
    "parse_measure",
    "selftest",
    "theoretical_cov",
]
