"""Tests for the genotype, the entity and edge operations, and mixed ops."""

import json

import numpy as np
import pytest

from egnas.autodiff.tensor import Tensor
from egnas.exceptions import GenotypeError, ShapeError
from egnas.graphdata.graph import Graph
from egnas.searchspace.edge_ops import (
    ConcatEdgeOp,
    EdgeSkipOp,
    EdgeZeroOp,
    FilmEdgeOp,
    GRUEdgeOp,
    build_edge_op,
)
from egnas.searchspace.embedding import e0_init
from egnas.searchspace.entity_ops import (
    AggregateEntityOp,
    EntitySkipOp,
    EntityZeroOp,
    build_entity_op,
)
from egnas.searchspace.genotype import (
    EDGE_OPS,
    ENTITY_OPS,
    CellGenotype,
    CellTopology,
    EdgeOpKind,
    EntityOpKind,
    Genotype,
    parse_op,
)
from egnas.searchspace.mixed import MixedOp, mixed_edge_op, mixed_entity_op
from tests.helpers import baseline_cell, permute_graph

AGGREGATE_KINDS = [EntityOpKind.SUM, EntityOpKind.MEAN, EntityOpKind.MAX]
PARAM_EDGE_KINDS = [EdgeOpKind.CONCAT, EdgeOpKind.GRU, EdgeOpKind.FILM]


def inputs(graph: Graph) -> tuple[Tensor, Tensor]:
    return Tensor(graph.node_features), Tensor(graph.edge_features)


def single_edge_update(op, e: np.ndarray, rel: np.ndarray) -> np.ndarray:
    """Unwrapped edge update of one edge, written with explicit per-unit loops."""

    def affine(layer, x):
        w = layer.weight.data
        b = layer.bias.data[0] if layer.bias is not None else np.zeros(w.shape[1])
        return np.array([sum(x[i] * w[i, k] for i in range(len(x))) + b[k] for k in range(w.shape[1])])

    def sigmoid(x):
        return np.array([1.0 / (1.0 + np.exp(-v)) for v in x])

    if isinstance(op, ConcatEdgeOp):
        return affine(op.mlp, np.concatenate([e, rel]))
    if isinstance(op, FilmEdgeOp):
        film = affine(op.film.linear, rel)
        d = len(e)
        return np.array([film[k] * e[k] + film[d + k] for k in range(d)])
    x = np.array([max(v, 0.0) for v in affine(op.p_x, rel)])
    r = sigmoid(affine(op.u_r, x) + affine(op.w_r, e))
    z = sigmoid(affine(op.u_z, x) + affine(op.w_z, e))
    h = np.array([np.tanh(v) for v in affine(op.u_h, x) + affine(op.w_h, r * e)])
    return np.array([(1 - z[k]) * e[k] + z[k] * h[k] for k in range(len(e))])


def bare_aggregate(kind: EntityOpKind, graph: Graph, rng) -> AggregateEntityOp:
    """Aggregation with gamma = 1, beta = 0 and no wrapper: the op is pure aggregation."""
    op = AggregateEntityOp(kind, graph.node_dim, graph.edge_dim, rng)
    op.film.set_identity()
    op.use_wrapper = False
    return op


class TestGenotype:
    def test_topology_candidates(self):
        topology = CellTopology(num_nodes=3)
        assert topology.candidate_edges == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
        assert topology.incoming(3) == [0, 1, 2]

    def test_op_order_ends_with_zero(self):
        assert [k.value for k in ENTITY_OPS] == ["Sum", "Mean", "Max", "EntitySkip", "Zero"]
        assert [k.value for k in EDGE_OPS] == ["Concat", "GRU", "FiLM", "EdgeSkip", "Zero"]

    def test_baseline_is_valid(self, genotype):
        genotype.validate()
        assert genotype.num_cells == 2
        assert genotype.num_nodes == 4

    @pytest.mark.parametrize(
        "entity",
        [
            [(0, 1, EntityOpKind.ZERO)],
            [(1, 1, EntityOpKind.SUM)],
            [(0, 1, EntityOpKind.SUM), (0, 1, EntityOpKind.MEAN)],
            [(0, 2, EntityOpKind.SUM)],
        ],
    )
    def test_invalid_entity_dags(self, entity):
        cell = CellGenotype(entity=entity, edge=[(0, 1, EdgeOpKind.CONCAT)])
        with pytest.raises(GenotypeError):
            Genotype(cells=[cell], d_v=4, d_e=4).validate()

    def test_three_incoming_edges_rejected(self):
        cell = CellGenotype(
            entity=[
                (0, 1, EntityOpKind.SUM),
                (0, 2, EntityOpKind.SUM),
                (0, 3, EntityOpKind.SUM),
                (1, 3, EntityOpKind.SUM),
                (2, 3, EntityOpKind.SUM),
            ],
            edge=[(0, 1, EdgeOpKind.GRU), (1, 2, EdgeOpKind.GRU), (2, 3, EdgeOpKind.GRU)],
        )
        with pytest.raises(GenotypeError, match="3 incoming"):
            Genotype(cells=[cell], d_v=4, d_e=4).validate()

    def test_no_cells_rejected(self):
        with pytest.raises(GenotypeError):
            Genotype(cells=[], d_v=4, d_e=4).validate()

    def test_json_round_trip(self, genotype, tmp_path):
        path = tmp_path / "genotype.json"
        genotype.save(path)
        data = json.loads(path.read_text())
        assert data["cells"][0]["entity"][0] == [0, 1, "Sum"]
        assert Genotype.load(path) == genotype

    def test_from_dict_rejects_unknown_op(self, genotype):
        data = genotype.to_dict()
        data["cells"][0]["edge"][0][2] = "Attention"
        with pytest.raises(GenotypeError, match="Unknown edge op"):
            Genotype.from_dict(data)

    def test_from_dict_rejects_missing_keys(self):
        with pytest.raises(GenotypeError, match="Malformed"):
            Genotype.from_dict({"cells": [{"entity": []}], "d_v": 4, "d_e": 4})

    def test_load_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        with pytest.raises(GenotypeError):
            Genotype.load(path)

    def test_parse_op_uses_the_dag_vocabulary(self):
        assert parse_op("entity", "Max") is EntityOpKind.MAX
        with pytest.raises(GenotypeError):
            parse_op("entity", "GRU")


class TestEntityOps:
    def test_aggregators_match_brute_force(self, rng, small_graph):
        V, E = inputs(small_graph)
        x = small_graph.node_features
        for kind, reduce in [(EntityOpKind.SUM, np.sum), (EntityOpKind.MEAN, np.mean), (EntityOpKind.MAX, np.max)]:
            out = bare_aggregate(kind, small_graph, rng)(V, E, small_graph).data
            for t in range(small_graph.num_nodes):
                sources = small_graph.src[small_graph.dst == t]
                np.testing.assert_allclose(out[t], reduce(x[sources], axis=0), atol=1e-12)

    @pytest.mark.parametrize("kind,expected", [(EntityOpKind.SUM, 6.0), (EntityOpKind.MEAN, 3.0), (EntityOpKind.MAX, 5.0)])
    def test_path_into_middle_node(self, rng, kind, expected):
        graph = Graph(
            num_nodes=3,
            edges=[[0, 1], [2, 1]],
            node_features=[[1.0], [2.0], [5.0]],
            edge_features=[[0.3], [-0.7]],
        )
        out = bare_aggregate(kind, graph, rng)(*inputs(graph), graph).data
        np.testing.assert_allclose(out, [[0.0], [expected], [0.0]], atol=1e-12)

    def test_film_modulates_messages(self, rng):
        graph = Graph(num_nodes=2, edges=[[0, 1]], node_features=[[2.0], [0.0]], edge_features=[[1.0]])
        op = AggregateEntityOp(EntityOpKind.SUM, 1, 1, rng)
        op.use_wrapper = False
        op.film.linear.weight.data[:] = [[3.0, 0.0]]
        op.film.linear.bias.data[:] = [[0.0, 0.5]]
        out = op(*inputs(graph), graph).data
        # gamma = 3, beta = 0.5: message = 3 * 2 + 0.5
        np.testing.assert_allclose(out, [[0.0], [6.5]])

    def test_skip_and_zero(self, small_graph):
        V, E = inputs(small_graph)
        assert EntitySkipOp(3, 2)(V, E, small_graph) is V
        out = EntityZeroOp(3, 2)(V, E, small_graph)
        assert out.shape == (5, 3)
        assert not out.data.any()

    def test_shape_mismatch(self, rng, small_graph):
        V, E = inputs(small_graph)
        op = build_entity_op(EntityOpKind.SUM, 4, 2, rng)
        with pytest.raises(ShapeError):
            op(V, E, small_graph)

    @pytest.mark.parametrize("kind", AGGREGATE_KINDS)
    def test_permutation_equivariance(self, rng, small_graph, kind):
        op = build_entity_op(kind, 3, 2, rng).eval()
        perm = np.array([3, 0, 4, 1, 2])
        permuted = permute_graph(small_graph, perm)
        out = op(*inputs(small_graph), small_graph).data
        out_perm = op(*inputs(permuted), permuted).data
        np.testing.assert_allclose(out_perm[perm], out, atol=1e-12)


class TestEdgeOps:
    def test_concat_matches_hand_computation(self, rng, small_graph):
        op = ConcatEdgeOp(3, 2, rng)
        op.use_wrapper = False
        V, E = inputs(small_graph)
        x = small_graph.node_features
        stacked = np.hstack([small_graph.edge_features, x[small_graph.src], x[small_graph.dst]])
        expected = stacked @ op.mlp.weight.data + op.mlp.bias.data
        np.testing.assert_allclose(op(E, V, small_graph).data, expected, atol=1e-12)

    def _gru_with_gate(self, rng, bias: float) -> GRUEdgeOp:
        op = GRUEdgeOp(3, 2, rng)
        op.use_wrapper = False
        op.u_z.weight.data[:] = 0.0
        op.w_z.weight.data[:] = 0.0
        op.u_z.bias.data[:] = bias
        return op

    def test_gru_closed_gate_keeps_old_features(self, rng, small_graph):
        V, E = inputs(small_graph)
        out = self._gru_with_gate(rng, -50.0)(E, V, small_graph).data
        np.testing.assert_allclose(out, small_graph.edge_features, atol=1e-12)

    def test_gru_open_gate_takes_candidate(self, rng, small_graph):
        V, E = inputs(small_graph)
        op = self._gru_with_gate(rng, 50.0)
        out = op(E, V, small_graph).data
        rel = np.hstack([small_graph.node_features[small_graph.src], small_graph.node_features[small_graph.dst]])
        x = np.maximum(rel @ op.p_x.weight.data + op.p_x.bias.data, 0.0)
        e = small_graph.edge_features
        r = 1 / (1 + np.exp(-(x @ op.u_r.weight.data + op.u_r.bias.data + e @ op.w_r.weight.data)))
        h = np.tanh(x @ op.u_h.weight.data + op.u_h.bias.data + (r * e) @ op.w_h.weight.data)
        np.testing.assert_allclose(out, h, atol=1e-12)
        assert np.all(np.abs(out) < 1.0)

    def test_film_identity_returns_input(self, rng, small_graph):
        op = FilmEdgeOp(3, 2, rng)
        op.use_wrapper = False
        op.film.set_identity()
        V, E = inputs(small_graph)
        np.testing.assert_allclose(op(E, V, small_graph).data, small_graph.edge_features)

    def test_skip_and_zero(self, small_graph):
        V, E = inputs(small_graph)
        assert EdgeSkipOp(3, 2)(E, V, small_graph) is E
        assert not EdgeZeroOp(3, 2)(E, V, small_graph).data.any()

    @pytest.mark.parametrize("kind", PARAM_EDGE_KINDS)
    def test_updates_are_row_local(self, rng, small_graph, kind):
        op = build_edge_op(kind, 3, 2, rng).eval()
        V, E = inputs(small_graph)
        base = op(E, V, small_graph).data
        bumped = small_graph.edge_features.copy()
        bumped[4] += [1.0, -2.0]
        out = op(Tensor(bumped), V, small_graph).data
        changed = np.flatnonzero(np.any(np.abs(out - base) > 1e-12, axis=1))
        assert set(changed.tolist()) <= {4}

    @pytest.mark.parametrize("kind", PARAM_EDGE_KINDS)
    def test_permutation_equivariance(self, rng, small_graph, kind):
        op = build_edge_op(kind, 3, 2, rng).eval()
        permuted = permute_graph(small_graph, np.array([2, 4, 0, 1, 3]))
        out = op(*reversed(inputs(small_graph)), small_graph).data
        out_perm = op(*reversed(inputs(permuted)), permuted).data
        # Edge order is preserved by the relabeling.
        np.testing.assert_allclose(out_perm, out, atol=1e-12)

    @pytest.mark.parametrize("kind", PARAM_EDGE_KINDS)
    def test_single_edge_updates_match_vector_arithmetic(self, kind):
        rng = np.random.default_rng(11)
        for _ in range(200):
            d_v, d_e = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            op = build_edge_op(kind, d_v, d_e, rng)
            op.use_wrapper = False
            graph = Graph(
                num_nodes=2,
                edges=[[0, 1]],
                node_features=rng.normal(size=(2, d_v)),
                edge_features=rng.normal(size=(1, d_e)),
            )
            out = op(Tensor(graph.edge_features), Tensor(graph.node_features), graph).data[0]
            e = graph.edge_features[0]
            rel = np.concatenate(graph.node_features)
            np.testing.assert_allclose(out, single_edge_update(op, e, rel), atol=1e-9)

    def test_shape_mismatch(self, rng, small_graph):
        V, E = inputs(small_graph)
        with pytest.raises(ShapeError):
            build_edge_op(EdgeOpKind.CONCAT, 3, 2, rng)(V, E, small_graph)


class TestMixedOp:
    def test_uniform_alphas_average_all_candidates(self, rng, small_graph):
        mixed = mixed_entity_op(3, 2, rng).eval()
        V, E = inputs(small_graph)
        out = mixed(Tensor(np.zeros((1, 5))), V, E, small_graph).data
        total = sum(mixed.candidates[k.value](V, E, small_graph).data for k in ENTITY_OPS)
        np.testing.assert_allclose(out, total / 5, atol=1e-12)

    def test_zero_and_skip_halve_the_input(self, small_graph):
        kinds = (EntityOpKind.ENTITY_SKIP, EntityOpKind.ZERO)
        mixed = MixedOp([EntitySkipOp(3, 2), EntityZeroOp(3, 2)], kinds)
        V, E = inputs(small_graph)
        out = mixed(Tensor([[0.0, 0.0]]), V, E, small_graph).data
        np.testing.assert_allclose(out, 0.5 * small_graph.node_features)

    def test_saturated_alpha_selects_one_op(self, rng, small_graph):
        mixed = mixed_edge_op(3, 2, rng).eval()
        V, E = inputs(small_graph)
        alpha = np.zeros((1, 5))
        alpha[0, 1] = 1000.0
        out = mixed(Tensor(alpha), E, V, small_graph).data
        expected = mixed.candidates["GRU"](E, V, small_graph).data
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_alpha_shape_checked(self, rng, small_graph):
        mixed = mixed_entity_op(3, 2, rng)
        with pytest.raises(ShapeError):
            mixed(Tensor(np.zeros((1, 3))), *inputs(small_graph), small_graph)

    def test_candidates_have_separate_parameters(self, rng):
        names = [name for name, _ in mixed_edge_op(3, 2, rng).named_parameters()]
        assert any(name.startswith("candidates.Concat.") for name in names)
        assert any(name.startswith("candidates.GRU.") for name in names)
        assert not any(name.startswith("candidates.EdgeSkip.") for name in names)


class TestEmbedding:
    def test_missing_edge_features_become_ones(self):
        graph = Graph(num_nodes=3, edges=[[0, 1], [1, 2]], node_features=np.ones((3, 2)), edge_features=[])
        np.testing.assert_array_equal(e0_init(graph).data, np.ones((2, 1)))

    def test_provided_edge_features_pass_through(self, small_graph):
        np.testing.assert_array_equal(e0_init(small_graph).data, small_graph.edge_features)


def test_baseline_cell_covers_every_nonzero_op():
    cell = baseline_cell()
    assert {op for *_, op in cell.entity} == set(ENTITY_OPS) - {EntityOpKind.ZERO}
    assert {op for *_, op in cell.edge} == set(EDGE_OPS) - {EdgeOpKind.ZERO}
