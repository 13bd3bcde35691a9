"""Tests de la incorporación y salida de peers en el árbol dinámico."""

import pytest

from src.domain.errors import InputError, MeasurementGapError
from src.domain.tomography.dfs_ordering import dfs_order
from src.domain.tomography.dynamic_recovery import (
    attach_peer,
    build_join_context,
    remove_peer,
    select_representatives,
)
from src.domain.tomography.routing_tree_model import (
    tree_from_edges,
    trees_topologically_equal,
)
from src.domain.tomography.static_recovery import RecoveryConfig, recover_tree
from src.infrastructure.simulation.topology_generator import (
    AnalyticCovarianceOracle,
    analytic_covariance_matrix,
)

RHO = RecoveryConfig(rho=0.5)


def dict_oracle(pairs: dict):
    """Oráculo a partir de {(x, y): σ²}; simétrico."""

    def oracle(a: str, b: str) -> float:
        if (a, b) in pairs:
            return pairs[(a, b)]
        if (b, a) in pairs:
            return pairs[(b, a)]
        raise MeasurementGapError(a, b)

    return oracle


def two_leaf_tree():
    """s → r1(2) → {a, b}"""
    return tree_from_edges(
        "s", [("s", "r1"), ("r1", "a"), ("r1", "b")], ["a", "b"], {"r1": 2.0}
    )


def static_without(net, left_out):
    clients = [c for c in net.clients if c != left_out]
    cov = analytic_covariance_matrix(net, clients)
    rho = 0.5 * net.min_link_variance()
    order = dfs_order(cov, tol=rho)
    return recover_tree(net.source, order, cov, RecoveryConfig(rho=rho)), rho


class TestRepresentatives:
    def test_smallest_leaf_id_per_child(self):
        tree = tree_from_edges(
            "s",
            [("s", "r1"), ("r1", "b"), ("r1", "a"), ("s", "c")],
            ["a", "b", "c"],
            {"r1": 1.0},
        )
        assert select_representatives(tree, "s") == {"r1": "a", "c": "c"}

    def test_leaf_is_not_a_base_router(self):
        with pytest.raises(InputError):
            select_representatives(two_leaf_tree(), "a")

    def test_context_uses_reference_pair(self):
        tree = two_leaf_tree()
        oracle = dict_oracle({("k", "a"): 5.0, ("k", "b"): 2.0, ("a", "b"): 2.0})
        ctx = build_join_context(tree, oracle, "r1", "k")
        assert ctx.best_child == "a"
        assert ctx.best_sigma == 5.0
        assert ctx.reference_sigma == 2.0


class TestAttachPeer:
    def test_unrelated_peer_goes_to_root(self):
        tree = two_leaf_tree()
        oracle = dict_oracle({("k", "a"): 0.0, ("k", "b"): 0.0, ("a", "b"): 2.0})
        attach_peer(tree, oracle, "k", RHO)
        assert tree.parent["k"] == "s"

    def test_sibling_peer_joins_router(self):
        tree = two_leaf_tree()
        oracle = dict_oracle({("k", "a"): 2.0, ("k", "b"): 2.0, ("a", "b"): 2.0})
        attach_peer(tree, oracle, "k", RHO)
        assert tree.parent["k"] == "r1"

    def test_deeper_peer_creates_router_over_leaf(self):
        tree = two_leaf_tree()
        oracle = dict_oracle({("k", "a"): 5.0, ("k", "b"): 2.0, ("a", "b"): 2.0})
        attach_peer(tree, oracle, "k", RHO)
        router = tree.parent["k"]
        assert tree.label(router) == 5.0
        assert sorted(tree.children[router]) == ["a", "k"]
        assert tree.parent[router] == "r1"

    def test_duplicate_peer(self):
        with pytest.raises(InputError):
            attach_peer(two_leaf_tree(), dict_oracle({}), "a", RHO)

    def test_missing_pair_propagates(self):
        with pytest.raises(MeasurementGapError):
            attach_peer(two_leaf_tree(), dict_oracle({("a", "b"): 2.0}), "k", RHO)

    def test_leave_one_out_matches_static(self, make_network):
        joins = 0
        for seed in range(100):
            net = make_network(seed, max_leaves=8)
            oracle = AnalyticCovarianceOracle(net)
            for joining in net.clients:
                tree, rho = static_without(net, joining)
                attach_peer(tree, oracle, joining, RecoveryConfig(rho=rho))
                assert trees_topologically_equal(
                    tree, net.truth
                ), f"semilla {seed}, peer {joining}"
                joins += 1
        assert joins > 300

    def test_growing_from_an_empty_tree(self, make_network):
        net = make_network(5, max_leaves=8)
        oracle = AnalyticCovarianceOracle(net)
        rho = RecoveryConfig(rho=0.5 * net.min_link_variance())
        tree = tree_from_edges(net.source, [], [])
        for peer in reversed(net.clients):
            attach_peer(tree, oracle, peer, rho)
        assert trees_topologically_equal(tree, net.truth)


class TestRemovePeer:
    def test_router_left_with_one_child_is_spliced(self):
        tree = tree_from_edges(
            "s",
            [("s", "r1"), ("r1", "a"), ("r1", "b"), ("s", "c")],
            ["a", "b", "c"],
            {"r1": 1.0},
        )
        remove_peer(tree, "a")
        assert tree.parent["b"] == "s"
        assert "r1" not in tree
        tree.check_invariants()

    def test_router_with_remaining_siblings_stays(self):
        tree = tree_from_edges(
            "s",
            [("s", "r1"), ("r1", "a"), ("r1", "b"), ("r1", "c")],
            ["a", "b", "c"],
            {"r1": 1.0},
        )
        remove_peer(tree, "a")
        assert sorted(tree.children["r1"]) == ["b", "c"]

    def test_unknown_or_router(self):
        with pytest.raises(InputError):
            remove_peer(two_leaf_tree(), "r1")
        with pytest.raises(InputError):
            remove_peer(two_leaf_tree(), "zz")

    def test_remove_then_reattach(self, make_network):
        for seed in range(30):
            net = make_network(seed, max_leaves=8)
            tree, rho = static_without(net, None)
            leaving = net.clients[0]
            remove_peer(tree, leaving)
            attach_peer(
                tree, AnalyticCovarianceOracle(net), leaving, RecoveryConfig(rho=rho)
            )
            assert trees_topologically_equal(tree, net.truth), f"semilla {seed}"
