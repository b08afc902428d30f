"""Finite-difference checks for every differentiable building block.

Each check projects the output onto a fixed random tensor and averages, which keeps
the scalar small enough for float32 central differences.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .autograd import ops
from .autograd.gradcheck import gradcheck
from .autograd.tensor import Tensor
from .models.network import MBConvSpec, NetworkSpec, StageSpec
from .models.reports import GradcheckResult
from .models.training import LossConfig
from .network.blocks import MBConvParams, SEParams, mbconv_block, se_block
from .network.model import SegmentationModel
from .scoring.losses import bce, composite_loss, soft_dice

logger = logging.getLogger(__name__)

PRIMITIVE_TOLERANCE = 1e-3
END_TO_END_TOLERANCE = 5e-3

Check = Tuple[str, Callable[..., Tensor], List[Tensor], float]


def _param(rng: np.random.Generator, *shape: int, low: Optional[float] = None) -> Tensor:
    data = rng.standard_normal(shape)
    # keep samples off the relu kink
    data = data + np.sign(data) * 0.05
    if low is not None:
        data = np.abs(data) + low
    return Tensor(data, requires_grad=True)


def _projected(rng: np.random.Generator, f: Callable[..., Tensor]) -> Callable:
    """Wrap ``f`` as mean(f(...) * r) for a fixed random r."""
    cache = {}

    def wrapped(*inputs: Tensor) -> Tensor:
        out = f(*inputs)
        if "r" not in cache:
            cache["r"] = Tensor(rng.standard_normal(out.shape))
        return ops.reduce_mean(ops.mul(out, cache["r"]))

    return wrapped


def _tiny_spec() -> NetworkSpec:
    return NetworkSpec(
        input_channels=1,
        input_size=16,
        stem_channels=8,
        stages=[StageSpec(repeats=1, channels=8, stride=1), StageSpec(1, 8, stride=2)],
        decoder_channels=[8],
    )


def build_checks(seed: int = 0) -> List[Check]:
    """(name, function, inputs, tolerance) for each block."""
    rng = np.random.default_rng(seed)

    def proj(f):
        return _projected(rng, f)

    tol = PRIMITIVE_TOLERANCE
    checks: List[Check] = [
        ("add (broadcast)", proj(ops.add), [_param(rng, 2, 3, 4, 4), _param(rng, 1, 3, 1, 1)], tol),
        ("sub", proj(ops.sub), [_param(rng, 3, 4), _param(rng, 3, 4)], tol),
        ("mul (broadcast)", proj(ops.mul), [_param(rng, 2, 3, 4), _param(rng, 4)], tol),
        ("div", proj(ops.div), [_param(rng, 3, 4), _param(rng, 3, 4, low=0.5)], tol),
        ("log", proj(ops.log), [_param(rng, 3, 4, low=0.5)], tol),
        ("sigmoid", proj(ops.sigmoid), [_param(rng, 3, 4)], tol),
        ("relu", proj(ops.relu), [_param(rng, 3, 4)], tol),
        ("swish", proj(ops.swish), [_param(rng, 2, 3, 4), _param(rng, 1)], tol),
        (
            "conv2d (stride 2, padding 1)",
            proj(lambda a, w, b: ops.conv2d(a, w, b, stride=2, padding=1)),
            [_param(rng, 1, 2, 5, 5), _param(rng, 3, 2, 3, 3), _param(rng, 3)],
            tol,
        ),
        (
            "conv2d (depthwise)",
            proj(lambda a, w: ops.conv2d(a, w, padding=1, groups=4)),
            [_param(rng, 1, 4, 5, 5), _param(rng, 4, 1, 3, 3)],
            tol,
        ),
        ("global_avg_pool", proj(ops.global_avg_pool), [_param(rng, 2, 3, 4, 4)], tol),
        (
            "upsample_bilinear",
            proj(lambda a: ops.upsample_bilinear(a, 2)),
            [_param(rng, 1, 2, 3, 3)],
            tol,
        ),
        (
            "concat",
            proj(lambda a, b: ops.concat([a, b], axis=1)),
            [_param(rng, 1, 2, 3, 3), _param(rng, 1, 1, 3, 3)],
            tol,
        ),
    ]

    pred = Tensor(rng.uniform(0.1, 0.9, size=(1, 1, 4, 4)), requires_grad=True)
    truth = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 4, 4)))
    checks += [
        ("bce", bce, [pred, truth], tol),
        ("soft_dice", soft_dice, [pred, truth], tol),
        (
            "composite_loss",
            lambda z, t: composite_loss(z, t, LossConfig()),
            [_param(rng, 1, 1, 8, 8), Tensor((rng.random((1, 1, 8, 8)) > 0.5).astype(np.float32))],
            tol,
        ),
    ]

    se = SEParams.init(rng, 8, 2)
    checks.append(
        (
            "se_block",
            proj(lambda a, w1, w2: se_block(a, SEParams(w1, se.reduce_bias, w2, se.expand_bias))),
            [_param(rng, 1, 8, 4, 4), se.reduce_weights, se.expand_weights],
            tol,
        )
    )

    block_spec = MBConvSpec(in_channels=4, out_channels=4, expansion=2, kernel=3, stride=1)
    block = MBConvParams.init(rng, block_spec)
    checks.append(
        (
            "mbconv_block",
            proj(lambda a, *_: mbconv_block(a, block, block_spec)),
            [_param(rng, 1, 4, 4, 4), *block.named().values()],
            tol,
        )
    )

    model = SegmentationModel(_tiny_spec(), seed=seed)
    image = Tensor(rng.standard_normal((1, 1, 16, 16)), requires_grad=True)
    target = Tensor((rng.random((1, 1, 16, 16)) > 0.7).astype(np.float32))
    checks.append(
        (
            "composite_loss(model(x))",
            lambda a, *_: composite_loss(model(a), target),
            [image, *model.parameters()],
            END_TO_END_TOLERANCE,
        )
    )
    return checks


def run_gradchecks(
    seed: int = 0, max_elements: int = 8, names: Sequence[str] = ()
) -> List[GradcheckResult]:
    """Run every check (or only ``names``) and report the worst relative error of each."""
    results = []
    for name, f, inputs, tolerance in build_checks(seed):
        if names and name not in names:
            continue
        error = gradcheck(f, inputs, max_elements=max_elements, seed=seed)
        logger.debug("gradcheck %s: %.3e (tolerance %.0e)", name, error, tolerance)
        results.append(GradcheckResult(name=name, error=error, tolerance=tolerance))
    return results
