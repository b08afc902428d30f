import pytest

from contrail_seg.autograd import Tensor, gradcheck, ops
from contrail_seg.diagnostics import build_checks, run_gradchecks


def test_every_block_passes_its_gradient_check():
    results = run_gradchecks(seed=0, max_elements=4)

    assert len(results) == len(build_checks(0))
    failed = [(r.name, r.error) for r in results if not r.passed]
    assert failed == []


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_gradient_checks_hold_for_many_random_inputs(seed):
    results = run_gradchecks(seed=seed, max_elements=4)

    assert len(results) == len(build_checks(seed))
    failed = [(r.name, r.error) for r in results if not r.passed]
    assert failed == []


def test_checks_can_be_selected_by_name():
    results = run_gradchecks(names=["relu", "sigmoid"])

    assert [r.name for r in results] == ["sigmoid", "relu"]


def test_unknown_check_names_select_nothing():
    assert run_gradchecks(names=["no such block"]) == []


def test_gradcheck_detects_a_wrong_backward_pass():
    x = Tensor([3.0, -2.0], requires_grad=True)

    # detach hides one factor from the tape, so the analytic gradient is half the true one
    error = gradcheck(lambda t: ops.reduce_sum(ops.mul(t, t.detach())), [x])

    assert error == pytest.approx(0.5, abs=1e-2)
