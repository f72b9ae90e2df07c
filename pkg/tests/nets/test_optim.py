import numpy as np
import pytest

from lsro_core.autodiff import Tensor, mul, reduce_sum, sub
from lsro_core.config import NetworkConfig, TrainConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_core.rng import stage_rng
from lsro_nets.labels import one_hot_rows
from lsro_nets.losses import batch_cross_entropy
from lsro_nets.network import build_network
from lsro_nets.optim import AdamOptimizer, AdamState, adam_step, lr_at, sgd_momentum_step


def _net(seed=0, dropout=0.0):
    cfg = NetworkConfig(input_dim=3, hidden_dims=[4], embed_dim=2, num_classes=2, dropout_rate=dropout)
    return build_network(cfg, stage_rng(seed, "init"))


def _set(net, value, grad):
    for p in net.parameters():
        p.data[...] = value
        p.grad = np.full_like(p.data, grad)


def test_lr_schedule():
    cfg = TrainConfig()
    assert lr_at(39, cfg) == 0.002
    assert lr_at(40, cfg) == 0.0002
    flat = TrainConfig(epochs=10, decay_epoch=10)
    assert {lr_at(e, flat) for e in range(10)} == {flat.lr_initial}
    lrs = [lr_at(e, cfg) for e in range(cfg.epochs)]
    assert all(a >= b for a, b in zip(lrs, lrs[1:]))


def test_plain_sgd_step():
    net = _net()
    _set(net, 1.0, 2.0)
    sgd_momentum_step(net, lr=0.1, momentum=0.0)
    for p in net.parameters():
        np.testing.assert_allclose(p.data, 0.8)
        assert p.grad is None


def test_momentum_second_update():
    net = _net()
    _set(net, 0.0, 2.0)
    sgd_momentum_step(net, lr=0.1, momentum=0.9)
    first = net.parameters()[0].data.copy()
    for p in net.parameters():
        p.grad = np.full_like(p.data, 2.0)
    sgd_momentum_step(net, lr=0.1, momentum=0.9)
    second_update = first - net.parameters()[0].data
    np.testing.assert_allclose(second_update, 0.1 * 2.0 * 1.9)


def test_zero_grad_leaves_parameters():
    net = _net()
    before = [p.data.copy() for p in net.parameters()]
    for p in net.parameters():
        p.grad = np.zeros_like(p.data)
    sgd_momentum_step(net, lr=0.1, momentum=0.9)
    assert all(np.array_equal(a, p.data) for a, p in zip(before, net.parameters()))


def test_missing_grads_are_reported():
    with pytest.raises(LabError) as exc:
        sgd_momentum_step(_net(), lr=0.1, momentum=0.9)
    assert exc.value.code is LabErrorCode.MISSING_GRAD


def test_single_sgd_step_decreases_sample_loss(rng):
    for seed in range(20):
        net = _net(seed)
        x = rng.normal(size=(1, 3))
        target = one_hot_rows(np.array([int(rng.integers(2))]), 2)

        def loss():
            return batch_cross_entropy(net.forward(x)[1], target, np.ones(1))

        before = loss()
        before.backward()
        sgd_momentum_step(net, lr=1e-4, momentum=0.0)
        assert loss().item() < before.item()


def test_adam_first_step_moves_by_lr():
    p = Tensor([1.0, -2.0], requires_grad=True)
    p.grad = np.array([0.5, -3.0])
    opt = AdamOptimizer([p], lr=0.01)
    opt.step()
    np.testing.assert_allclose(p.data, [0.99, -1.99], atol=1e-6)
    assert opt.state.t == 1
    assert p.grad is None


def test_adam_zero_grad_at_fresh_state():
    p = Tensor([1.0, 2.0], requires_grad=True)
    p.grad = np.zeros(2)
    adam_step([p], AdamState.for_params([p]), lr=0.1, beta1=0.5, beta2=0.99)
    assert p.data.tolist() == [1.0, 2.0]


def test_adam_missing_grads():
    p = Tensor([1.0], requires_grad=True)
    with pytest.raises(LabError) as exc:
        adam_step([p], AdamState.for_params([p]), lr=0.1, beta1=0.5, beta2=0.99)
    assert exc.value.code is LabErrorCode.MISSING_GRAD


def test_adam_minimizes_a_quadratic():
    x = Tensor([0.0], requires_grad=True)
    opt = AdamOptimizer([x], lr=0.05)
    target = Tensor([3.0])
    for _ in range(1000):
        d = sub(x, target)
        reduce_sum(mul(d, d)).backward()
        opt.step()
    assert abs(x.data[0] - 3.0) < 0.1
