import numpy as np
import pytest

from lsro_core.autodiff import (
    LOG_FLOOR,
    OpKind,
    Tensor,
    add,
    apply,
    dropout,
    finite_difference_check,
    guarded_log,
    log,
    matmul,
    mul,
    reduce_mean,
    reduce_sum,
    relu,
    scale,
    softmax_rows,
    sub,
    tanh,
)
from lsro_core.errors import LabError, LabErrorCode


def test_relu_forward():
    assert apply(OpKind.RELU, Tensor([-1.0, 0.0, 2.0])).data.tolist() == [0.0, 0.0, 2.0]


def test_softmax_of_equal_logits_is_uniform():
    np.testing.assert_allclose(softmax_rows(Tensor([[0.0, 0.0, 0.0, 0.0]])).data, [[0.25] * 4])


def test_matmul_of_ones_gives_row_sums():
    out = Tensor(np.ones((2, 3))) @ Tensor(np.ones((3, 1)))
    assert out.shape == (2, 1)
    assert out.data.tolist() == [[3.0], [3.0]]


def test_shape_mismatch_names_op_and_shapes():
    with pytest.raises(LabError) as exc:
        add(Tensor(np.ones((2, 3))), Tensor(np.ones((3, 2))))
    assert exc.value.code is LabErrorCode.SHAPE_MISMATCH
    assert "add" in str(exc.value)
    assert "(2, 3)" in str(exc.value) and "(3, 2)" in str(exc.value)


def test_matmul_inner_dimension_mismatch():
    with pytest.raises(LabError) as exc:
        matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    assert exc.value.code is LabErrorCode.SHAPE_MISMATCH


def test_plain_log_rejects_non_positive_entries():
    with pytest.raises(LabError) as exc:
        log(Tensor([1.0, 0.0]))
    assert exc.value.code is LabErrorCode.DOMAIN_ERROR


def test_guarded_log_is_finite_at_zero():
    assert guarded_log(Tensor([0.0])).item() == pytest.approx(np.log(LOG_FLOOR))


def test_tensor_copies_its_input():
    source = np.array([1.0, 2.0])
    t = Tensor(source)
    source[0] = 99.0
    assert t.data[0] == 1.0


def test_square_gradient():
    x = Tensor([3.0], requires_grad=True)
    reduce_sum(mul(x, x)).backward()
    assert x.grad.tolist() == [6.0]


def test_softmax_cross_entropy_gradient_is_p_minus_q(rng):
    z = Tensor(rng.normal(size=(1, 5)), requires_grad=True)
    q = np.zeros((1, 5))
    q[0, 2] = 1.0
    p = softmax_rows(z)
    loss = scale(reduce_sum(mul(Tensor(q), guarded_log(p))), -1.0)
    loss.backward()
    np.testing.assert_allclose(z.grad, p.data - q, atol=1e-12)


def test_backward_needs_scalar_loss():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    with pytest.raises(LabError) as exc:
        tanh(x).backward()
    assert exc.value.code is LabErrorCode.SHAPE_MISMATCH


def test_backward_twice_doubles_grads_exactly(rng):
    w = Tensor(rng.normal(size=(3, 2)), requires_grad=True)
    x = Tensor(rng.normal(size=(4, 3)))
    loss = reduce_mean(tanh(x @ w))
    loss.backward()
    first = w.grad.copy()
    loss.backward()
    assert np.array_equal(w.grad, 2.0 * first)


def test_grads_only_reach_leaves():
    a = Tensor([1.0, 2.0], requires_grad=True)
    hidden = tanh(a)
    reduce_sum(hidden).backward()
    assert hidden.grad is None
    assert a.grad is not None


def test_shared_subexpression_accumulates():
    a = Tensor([2.0], requires_grad=True)
    b = mul(a, a)
    reduce_sum(add(b, b)).backward()
    assert a.grad.tolist() == [8.0]


def _away_from_zero(rng, shape):
    return rng.uniform(0.2, 2.0, size=shape) * rng.choice([-1.0, 1.0], size=shape)


GRAD_CASES = {
    "matmul": (lambda p: reduce_sum(tanh(matmul(p[0], p[1]))), [(2, 3), (3, 4)]),
    "add": (lambda p: reduce_sum(tanh(add(p[0], p[1]))), [(3, 2), (3, 2)]),
    "sub": (lambda p: reduce_sum(tanh(sub(p[0], p[1]))), [(3, 2), (3, 2)]),
    "scale": (lambda p: reduce_sum(tanh(scale(p[0], 2.5))), [(2, 2)]),
    "relu": (lambda p: reduce_sum(mul(relu(p[0]), relu(p[0]))), [(3, 3)]),
    "tanh": (lambda p: reduce_mean(tanh(p[0])), [(4,)]),
    "log": (lambda p: reduce_sum(log(mul(p[0], p[0]))), [(5,)]),
    "softmax_rows": (lambda p: reduce_sum(mul(Tensor(np.arange(12.0).reshape(3, 4)), softmax_rows(p[0]))), [(3, 4)]),
    "sum": (lambda p: reduce_sum(mul(p[0], p[0])), [(2, 3)]),
    "mean": (lambda p: reduce_mean(mul(p[0], p[0])), [(2, 3)]),
    "elementwise_mul": (lambda p: reduce_sum(tanh(mul(p[0], p[1]))), [(2, 2), (2, 2)]),
    "dropout": (
        lambda p: reduce_sum(tanh(dropout(p[0], 0.3, train=True, rng=np.random.default_rng(5)))),
        [(4, 4)],
    ),
}


@pytest.mark.parametrize("name", sorted(GRAD_CASES))
def test_gradients_match_finite_differences(name, rng):
    build, shapes = GRAD_CASES[name]
    for _ in range(100):
        point = [_away_from_zero(rng, s) for s in shapes]
        assert finite_difference_check(build, point) < 1e-4


def test_gradcheck_on_quadratic_is_tight(rng):
    error = finite_difference_check(lambda p: reduce_sum(mul(p[0], p[0])), [rng.normal(size=(3, 3))])
    assert error < 1e-6


def test_gradcheck_on_identity_map_is_zero(rng):
    error = finite_difference_check(lambda p: reduce_sum(p[0]), [rng.normal(size=(4,))])
    assert error == pytest.approx(0.0, abs=1e-8)


def test_gradcheck_rejects_non_positive_step():
    with pytest.raises(LabError) as exc:
        finite_difference_check(lambda p: reduce_sum(p[0]), [np.ones(2)], step=0.0)
    assert exc.value.code is LabErrorCode.INVALID_ARGUMENT


def test_softmax_rows_sum_to_one_and_ignore_row_shifts(rng):
    x = rng.normal(scale=5.0, size=(6, 7))
    p = softmax_rows(Tensor(x)).data
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-6)
    assert np.all((p > 0) & (p < 1))
    shifted = softmax_rows(Tensor(x + rng.normal(size=(6, 1)) * 10)).data
    np.testing.assert_allclose(shifted, p, atol=1e-9)


def test_dropout_eval_mode_is_identity(rng):
    x = rng.normal(size=(5, 5))
    assert np.array_equal(dropout(Tensor(x), 0.5, train=False).data, x)


def test_dropout_train_mode_masks_and_rescales():
    x = np.ones((200, 50))
    out = dropout(Tensor(x), 0.3, train=True, rng=np.random.default_rng(0)).data
    survivors = out[out != 0.0]
    np.testing.assert_allclose(survivors, 1.0 / 0.7)
    assert abs((out == 0.0).mean() - 0.3) < 0.02


def test_dropout_is_deterministic_per_seed(rng):
    x = Tensor(rng.normal(size=(4, 4)))
    a = dropout(x, 0.5, train=True, rng=np.random.default_rng(9)).data
    b = dropout(x, 0.5, train=True, rng=np.random.default_rng(9)).data
    assert np.array_equal(a, b)


def test_dropout_train_mode_needs_generator():
    with pytest.raises(LabError) as exc:
        dropout(Tensor(np.ones(3)), 0.5, train=True)
    assert exc.value.code is LabErrorCode.INVALID_ARGUMENT
