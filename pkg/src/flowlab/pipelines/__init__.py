"""Constructive conversions between flow specifications."""

from flowlab.pipelines.almost_periodic import (
    AlmostPeriodicOutput,
    AlmostPeriodicTarget,
    almost_periodic_pipeline,
    rotation_seeds,
    rotation_target,
)
from flowlab.pipelines.itpfi import (
    BinomialCheck,
    BoundedReduction,
    binomial_approx_check,
    itpfi2_to_poisson,
    itpfi_bounded_reduce,
    poisson_to_itpfi2,
)
from flowlab.pipelines.specs import ITPFI2Spec, PipelineResult, PoissonFlowSpec
from flowlab.pipelines.two_point import (
    TwoPointFamily,
    poisson_to_two_point,
    split_divisible,
    two_point_to_poisson,
    verify_split,
)

__all__ = [
    "AlmostPeriodicOutput",
    "AlmostPeriodicTarget",
    "BinomialCheck",
    "BoundedReduction",
    "ITPFI2Spec",
    "PipelineResult",
    "PoissonFlowSpec",
    "TwoPointFamily",
    "almost_periodic_pipeline",
    "binomial_approx_check",
    "itpfi2_to_poisson",
    "itpfi_bounded_reduce",
    "poisson_to_itpfi2",
    "poisson_to_two_point",
    "rotation_seeds",
    "rotation_target",
    "split_divisible",
    "two_point_to_poisson",
    "verify_split",
]
