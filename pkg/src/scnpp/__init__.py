"""Solvers for the split common null point problem in finite dimensions."""

from .linops import LinearOp, adjoint_apply, apply, gram_norm, lift_operator
from .mappings import (
    Affine,
    AffineMonotone,
    AffineVI,
    Ball,
    Box,
    Halfspace,
    NormalCone,
    ProductMap,
    ResolventError,
    ResolventParams,
    SubdiffL1,
    Zero,
    fixed_point_residual,
    project_set,
    resolve,
)
from .problems import (
    ScnppInstance,
    ValidationError,
    feasibility_instance,
    lift_to_product,
    svip_instance,
    validate,
)
from .schemes import (
    Breakdown,
    RunTrace,
    SolverConfig,
    StepSizeError,
    fb_step,
    halpern_step,
    haugazeau_step,
    haugazeau_T,
    product_step,
    relax,
    run,
)

__version__ = "0.1.0"
