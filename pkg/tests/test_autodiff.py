"""Tests for the tensor tape, differentiable ops and parameter modules."""

import numpy as np
import pytest

from egnas.autodiff import ops
from egnas.autodiff.gradcheck import gradcheck, relative_error
from egnas.autodiff.module import BatchNorm, Linear, Module, find_module
from egnas.autodiff.tensor import Tape, Tensor, backward, debug_checks
from egnas.exceptions import IndexOutOfRangeError, NumericError, ShapeError

TOL = 1e-4


def param(rng, rows, cols, offset=0.0):
    return Tensor(rng.normal(size=(rows, cols)) + offset, requires_grad=True)


def weighted_sum(out: Tensor, weights: np.ndarray) -> Tensor:
    """Scalar that depends on every output entry differently."""
    return ops.sum_all(out * Tensor(weights))


class TestOps:
    def test_add_broadcasts_a_row(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]])
        b = Tensor([[10.0, 20.0]])
        np.testing.assert_array_equal((a + b).data, [[11.0, 22.0], [13.0, 24.0]])

    def test_mul_by_scalar_tensor(self):
        a = Tensor([[1.0, -2.0]])
        np.testing.assert_array_equal((a * Tensor(3.0)).data, [[3.0, -6.0]])

    def test_incompatible_shapes_raise(self):
        with pytest.raises(ShapeError):
            Tensor(np.ones((2, 3))) + Tensor(np.ones((3, 2)))
        with pytest.raises(ShapeError):
            ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))

    def test_matmul_hand_example(self):
        out = ops.matmul(Tensor([[1.0, 2.0]]), Tensor([[3.0], [4.0]]))
        assert out.item() == 11.0

    def test_relu_sigmoid_tanh_values(self):
        x = Tensor([[-1.0, 0.0, 2.0]])
        np.testing.assert_array_equal(ops.relu(x).data, [[0.0, 0.0, 2.0]])
        np.testing.assert_allclose(ops.sigmoid(x).data, 1 / (1 + np.exp(-x.data)), atol=1e-12)
        np.testing.assert_allclose(ops.tanh(x).data, np.tanh(x.data))

    def test_gather_rows_allows_duplicates(self):
        src = Tensor([[1.0], [2.0], [3.0]])
        np.testing.assert_array_equal(ops.gather_rows(src, [2, 0, 2]).data, [[3.0], [1.0], [3.0]])

    def test_gather_rows_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            ops.gather_rows(Tensor(np.ones((2, 1))), [2])

    @pytest.mark.parametrize(
        "mode,expected",
        [
            ("sum", [[4.0, 6.0], [0.0, 0.0], [5.0, -1.0]]),
            ("mean", [[2.0, 3.0], [0.0, 0.0], [5.0, -1.0]]),
            ("max", [[3.0, 4.0], [0.0, 0.0], [5.0, -1.0]]),
        ],
    )
    def test_segment_aggregate_with_empty_segment(self, mode, expected):
        values = Tensor([[1.0, 2.0], [5.0, -1.0], [3.0, 4.0]])
        out = ops.segment_aggregate(values, [0, 2, 0], 3, mode)
        np.testing.assert_array_equal(out.data, expected)

    def test_segment_aggregate_rejects_bad_ids(self):
        with pytest.raises(IndexOutOfRangeError):
            ops.segment_aggregate(Tensor(np.ones((2, 1))), [0, 3], 3)
        with pytest.raises(ShapeError):
            ops.segment_aggregate(Tensor(np.ones((2, 1))), [0], 3)

    def test_segment_max_tie_sends_gradient_to_first_row(self):
        values = Tensor([[1.0], [1.0], [0.5]], requires_grad=True)
        backward(ops.sum_all(ops.segment_aggregate(values, [0, 0, 0], 1, "max")))
        np.testing.assert_array_equal(values.grad, [[1.0], [0.0], [0.0]])

    def test_softmax_rows_sum_to_one(self, rng):
        out = ops.softmax_rows(Tensor(rng.normal(size=(4, 5)) * 50))
        np.testing.assert_allclose(out.data.sum(axis=1), 1.0)

    def test_softmax_rows_ignore_a_per_row_shift(self, rng):
        logits = rng.normal(size=(4, 5)) * 5
        shifts = rng.normal(size=(4, 1)) * 100
        np.testing.assert_allclose(
            ops.softmax_rows(Tensor(logits + shifts)).data,
            ops.softmax_rows(Tensor(logits)).data,
            atol=1e-12,
        )

    def test_segment_sum_is_an_indicator_matmul(self, rng):
        for _ in range(50):
            rows = int(rng.integers(1, 33))
            segments = int(rng.integers(1, 8))
            ids = rng.integers(0, segments, size=rows)
            values = rng.normal(size=(rows, 3))
            indicator = np.zeros((segments, rows))
            indicator[ids, np.arange(rows)] = 1.0
            out = ops.segment_aggregate(Tensor(values), ids, segments, "sum")
            np.testing.assert_allclose(out.data, indicator @ values, atol=1e-12)

    @pytest.mark.parametrize("mode", ["sum", "mean", "max"])
    def test_segment_aggregate_matches_row_loop(self, rng, mode):
        reducers = {"sum": np.sum, "mean": np.mean, "max": np.max}
        for _ in range(200):
            rows = int(rng.integers(1, 12))
            segments = int(rng.integers(1, 6))
            ids = rng.integers(0, segments, size=rows)
            values = rng.normal(size=(rows, 2))
            out = ops.segment_aggregate(Tensor(values), ids, segments, mode).data
            for s in range(segments):
                members = [values[r] for r in range(rows) if ids[r] == s]
                expected = reducers[mode](members, axis=0) if members else np.zeros(2)
                np.testing.assert_allclose(out[s], expected, atol=1e-9)

    def test_cross_entropy_uniform_logits(self):
        loss = ops.cross_entropy(Tensor(np.zeros((3, 4))), [0, 1, 3])
        assert loss.item() == pytest.approx(np.log(4))

    def test_dropout_is_identity_in_eval(self, rng):
        x = Tensor(rng.normal(size=(3, 3)))
        assert ops.dropout(x, 0.5, rng, training=False) is x

    def test_concat_and_slice(self):
        a, b = Tensor([[1.0, 2.0]]), Tensor([[3.0]])
        joined = ops.concat_cols(a, b)
        np.testing.assert_array_equal(joined.data, [[1.0, 2.0, 3.0]])
        np.testing.assert_array_equal(ops.slice_cols(joined, 1, 3).data, [[2.0, 3.0]])


class TestBackward:
    def test_requires_scalar_loss(self):
        with pytest.raises(ShapeError):
            backward(Tensor(np.ones((2, 1)), requires_grad=True))

    def test_gather_accumulates_duplicate_rows(self):
        src = Tensor([[1.0], [2.0]], requires_grad=True)
        backward(ops.sum_all(ops.gather_rows(src, [0, 0, 1])))
        np.testing.assert_array_equal(src.grad, [[2.0], [1.0]])

    def test_gradients_accumulate_until_zeroed(self):
        w = Tensor([[2.0]], requires_grad=True)
        backward(w * w)
        backward(w * w)
        assert w.grad[0, 0] == 8.0
        w.zero_grad()
        np.testing.assert_array_equal(w.grad, [[0.0]])

    def test_reused_intermediate_sums_both_paths(self):
        w = Tensor([[3.0]], requires_grad=True)
        h = w * Tensor([[2.0]])
        backward(h * h)
        # d(4 w^2)/dw = 8 w
        assert w.grad[0, 0] == pytest.approx(24.0)

    def test_tape_is_in_creation_order(self, rng):
        w = param(rng, 2, 2)
        h = ops.relu(w @ w)
        loss = ops.sum_all(h + w)
        seqs = [record.output._seq for record in Tape.from_output(loss).records]
        assert seqs == sorted(seqs)
        assert len(seqs) == 4

    def test_constant_inputs_are_not_recorded(self):
        out = Tensor([[1.0]]) + Tensor([[2.0]])
        assert out.is_leaf and not out.requires_grad

    def test_debug_mode_flags_non_finite_values(self):
        with debug_checks(), pytest.raises(NumericError):
            Tensor([[np.inf]]) * Tensor([[0.0]])
        # outside the block non-finite values pass silently
        out = Tensor([[np.inf]]) * Tensor([[0.0]])
        assert np.isnan(out.data[0, 0])

    def test_zero_op_passes_no_gradient(self, rng):
        w = param(rng, 3, 2)
        zero = ops.zeros(3, 2)
        backward(ops.sum_all(w * zero))
        np.testing.assert_array_equal(w.grad, np.zeros((3, 2)))

    def test_unreached_parameter_has_zero_gradient(self):
        used = Tensor([[3.0]], requires_grad=True)
        unused = Tensor([[1.0, 2.0]], requires_grad=True)
        backward(ops.sum_all(used * used))
        assert used.grad[0, 0] == 6.0
        np.testing.assert_array_equal(unused.grad, [[0.0, 0.0]])

    def test_gather_conserves_gradient_mass(self, rng):
        for _ in range(20):
            src = param(rng, 6, 3)
            index = rng.integers(0, 6, size=int(rng.integers(1, 15)))
            upstream = rng.normal(size=(len(index), 3))
            backward(ops.sum_all(ops.gather_rows(src, index) * Tensor(upstream)))
            np.testing.assert_allclose(src.grad.sum(axis=0), upstream.sum(axis=0), atol=1e-12)


class TestGradients:
    """Central finite differences against the recorded backward rules."""

    def test_relative_error_definition(self):
        assert relative_error(np.array([1.0]), np.array([1.0])) == 0.0
        assert relative_error(np.zeros(2), np.zeros(2)) == 0.0

    @pytest.mark.parametrize("mode", ["add", "sub", "mul"])
    def test_binary_with_row_broadcast(self, rng, mode):
        a, b = param(rng, 4, 3), param(rng, 1, 3)
        weights = rng.normal(size=(4, 3))
        loss = lambda: weighted_sum(ops.elementwise(a, b, mode), weights)  # noqa: E731
        assert gradcheck(loss, [a, b]) < TOL

    @pytest.mark.parametrize("mode", ["relu", "sigmoid", "tanh"])
    def test_unary(self, rng, mode):
        a = param(rng, 4, 3)
        weights = rng.normal(size=(4, 3))
        loss = lambda: weighted_sum(ops.elementwise(a, mode=mode), weights)  # noqa: E731
        assert gradcheck(loss, [a]) < TOL

    def test_matmul(self, rng):
        a, b = param(rng, 3, 4), param(rng, 4, 2)
        weights = rng.normal(size=(3, 2))
        assert gradcheck(lambda: weighted_sum(a @ b, weights), [a, b]) < TOL

    def test_concat_slice_gather(self, rng):
        a, b = param(rng, 3, 2), param(rng, 3, 3)
        weights = rng.normal(size=(5, 3))

        def loss():
            joined = ops.concat_cols(a, b)
            picked = ops.gather_rows(ops.slice_cols(joined, 1, 4), [0, 2, 2, 1, 0])
            return weighted_sum(picked, weights)

        assert gradcheck(loss, [a, b]) < TOL

    @pytest.mark.parametrize("mode", ["sum", "mean", "max"])
    def test_segment_aggregate(self, rng, mode):
        values = param(rng, 6, 3)
        weights = rng.normal(size=(4, 3))
        seg = [0, 1, 0, 3, 3, 0]
        loss = lambda: weighted_sum(ops.segment_aggregate(values, seg, 4, mode), weights)  # noqa: E731
        assert gradcheck(loss, [values]) < TOL

    def test_softmax_and_cross_entropy(self, rng):
        logits = param(rng, 4, 3)
        weights = rng.normal(size=(4, 3))
        assert gradcheck(lambda: weighted_sum(ops.softmax_rows(logits), weights), [logits]) < TOL
        assert gradcheck(lambda: ops.cross_entropy(logits, [0, 2, 1, 2]), [logits]) < TOL

    def test_absolute_and_means(self, rng):
        a = param(rng, 3, 3, offset=0.1)
        assert gradcheck(lambda: ops.mean_all(ops.absolute(a)), [a]) < TOL

    def test_scale_and_one_minus(self, rng):
        a = param(rng, 2, 3)
        weights = rng.normal(size=(2, 3))
        loss = lambda: weighted_sum(ops.one_minus(ops.scale(a, 2.5)), weights)  # noqa: E731
        assert gradcheck(loss, [a]) < TOL

    def test_dropout_with_fixed_mask(self, rng):
        a = param(rng, 4, 3)
        weights = rng.normal(size=(4, 3))

        def loss():
            mask_rng = np.random.default_rng(7)
            return weighted_sum(ops.dropout(a, 0.3, mask_rng, training=True), weights)

        assert gradcheck(loss, [a]) < TOL

    @pytest.mark.parametrize("training", [True, False])
    def test_batch_norm(self, rng, training):
        x = param(rng, 5, 3)
        layer = BatchNorm(3)
        layer.scale.data[:] = rng.normal(size=(1, 3))
        layer.shift.data[:] = rng.normal(size=(1, 3))
        layer.state.running_mean = rng.normal(size=3)
        layer.state.running_var = rng.uniform(0.5, 2.0, size=3)
        layer.train(training)
        weights = rng.normal(size=(5, 3))
        loss = lambda: weighted_sum(layer(x), weights)  # noqa: E731
        assert gradcheck(loss, [x, layer.scale, layer.shift]) < TOL


class TestBatchNorm:
    def test_training_normalizes_columns(self, rng):
        layer = BatchNorm(2)
        out = layer(Tensor(rng.normal(3.0, 2.0, size=(50, 2))))
        np.testing.assert_allclose(out.data.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.data.std(axis=0), 1.0, atol=1e-4)

    def test_running_statistics_use_unbiased_variance(self):
        layer = BatchNorm(1, momentum=1.0)
        layer(Tensor([[1.0], [3.0]]))
        assert layer.state.running_mean[0] == 2.0
        assert layer.state.running_var[0] == 2.0

    def test_zero_row_batch_passes_through(self):
        layer = BatchNorm(2)
        out = layer(Tensor(np.zeros((0, 2))))
        assert out.shape == (0, 2)
        np.testing.assert_array_equal(layer.state.running_mean, [0.0, 0.0])


class Pair(Module):
    def __init__(self, rng):
        self.first = Linear(2, 3, rng)
        self.layers = [Linear(3, 3, rng, bias=False), BatchNorm(3)]


class TestModule:
    def test_parameter_names_follow_attributes(self, rng):
        names = [name for name, _ in Pair(rng).named_parameters()]
        assert names == [
            "first.weight",
            "first.bias",
            "layers.0.weight",
            "layers.1.scale",
            "layers.1.shift",
        ]

    def test_buffers_and_lookup(self, rng):
        model = Pair(rng)
        assert [name for name, _ in model.named_buffers()] == [
            "layers.1.running_mean",
            "layers.1.running_var",
        ]
        assert find_module(model, "layers.1") is model.layers[1]
        find_module(model, "layers.1").set_buffer("running_var", np.full(3, 4.0))
        np.testing.assert_array_equal(model.layers[1].state.running_var, [4.0, 4.0, 4.0])

    def test_train_eval_propagates(self, rng):
        model = Pair(rng).eval()
        assert not model.layers[1].training
        model.train()
        assert model.layers[1].training

    def test_num_parameters(self, rng):
        assert Pair(rng).num_parameters() == 6 + 3 + 9 + 3 + 3
