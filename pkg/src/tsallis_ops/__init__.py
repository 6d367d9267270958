"""Tsallis relative operator entropy: matrix numerics, executable inequality
checks on seeded random ensembles, and a small statement language."""

from .entropy import (
    DensityMatrix,
    Lambda,
    ln_lambda,
    ln_lambda_op,
    operator_entropy,
    power_mean,
    rel_op_entropy,
    tsallis_entropy,
    tsallis_op_entropy,
    tsallis_rel_entropy,
    tsallis_rel_op_entropy,
    umegaki_rel_entropy,
    von_neumann_entropy,
)
from .matrix import HermitianMatrix, LoewnerVerdict, TolerancePolicy, kron, loewner_leq, matrix_power
from .properties import PROPERTIES, PropertyReport, SuiteConfig, run_all, run_property

__all__ = [
    "DensityMatrix", "HermitianMatrix", "Lambda", "LoewnerVerdict", "PROPERTIES", "PropertyReport",
    "SuiteConfig", "TolerancePolicy", "kron", "ln_lambda", "ln_lambda_op", "loewner_leq", "matrix_power",
    "operator_entropy", "power_mean", "rel_op_entropy", "run_all", "run_property", "tsallis_entropy",
    "tsallis_op_entropy", "tsallis_rel_entropy", "tsallis_rel_op_entropy", "umegaki_rel_entropy",
    "von_neumann_entropy",
]
