"""Tests de la recuperación estática del árbol de enrutamiento."""

import pytest

from src.domain.accuracy.tomography_accuracy import tomography_accuracy
from src.domain.errors import InputError
from src.domain.measurement.measurement_model import CovarianceMatrix
from src.domain.tomography.dfs_ordering import dfs_order
from src.domain.tomography.routing_tree_model import (
    tree_from_edges,
    trees_topologically_equal,
)
from src.domain.tomography.static_recovery import (
    CaseTag,
    RecoveryConfig,
    attach_via_ancestor,
    classify_case,
    find_attachment_router,
    recover_tree,
    select_rho,
)
from src.infrastructure.simulation.topology_generator import analytic_covariance_matrix


def chain():
    """s → r1(2) → r2(5) → r3(9) → x"""
    return tree_from_edges(
        "s",
        [("s", "r1"), ("r1", "r2"), ("r2", "r3"), ("r3", "x")],
        ["x"],
        {"r1": 2.0, "r2": 5.0, "r3": 9.0},
    )


def recover_noiseless(net, fraction=0.5, use_tol=True):
    cov = analytic_covariance_matrix(net)
    rho = fraction * net.min_link_variance()
    order = dfs_order(cov, tol=rho if use_tol else 0.0)
    return recover_tree(net.source, order, cov, RecoveryConfig(rho=rho))


class TestClassifyCase:
    def test_within_rho_is_same_set(self):
        assert classify_case(5.0, 5.1, 0.5) is CaseTag.SAME_SET
        assert classify_case(5.1, 5.0, 0.5) is CaseTag.SAME_SET

    def test_deeper(self):
        assert classify_case(6.0, 5.0, 0.5) is CaseTag.DEEPER

    def test_shallower(self):
        assert classify_case(0.5, 5.0, 0.5) is CaseTag.SHALLOWER

    def test_exact_boundary_goes_deeper_or_shallower(self):
        assert classify_case(6.0, 5.0, 1.0) is CaseTag.DEEPER
        assert classify_case(4.0, 5.0, 1.0) is CaseTag.SHALLOWER

    def test_rho_must_be_positive(self):
        with pytest.raises(InputError):
            classify_case(1.0, 1.0, 0.0)


class TestFindAttachmentRouter:
    def test_exact_match(self):
        tree = chain()
        assert find_attachment_router(tree, "x", 5.0, 0.5) == ("r2", True)

    def test_between_two_routers(self):
        tree = chain()
        assert find_attachment_router(tree, "x", 4.0, 0.5) == ("r2", False)

    def test_falls_back_to_root(self):
        tree = chain()
        assert find_attachment_router(tree, "x", 0.0, 0.5) == ("s", True)

    def test_requires_a_leaf(self):
        with pytest.raises(InputError):
            find_attachment_router(chain(), "r2", 1.0, 0.5)

    def test_hidden_router_is_inserted(self):
        tree = chain()
        anchor = attach_via_ancestor(tree, "y", "x", 4.0, 0.5)
        assert tree.parent["y"] == anchor
        assert tree.label(anchor) == 4.0
        assert tree.parent[anchor] == "r1"
        assert tree.parent["r2"] == anchor


class TestRecoverTree:
    def test_single_leaf(self):
        cov = CovarianceMatrix(receivers=("a",), values=[[1.0]])
        tree = recover_tree("s", ["a"], cov, RecoveryConfig(rho=0.1))
        assert tree.children["s"] == ["a"]

    def test_two_leaves_sharing_a_router(self):
        cov = CovarianceMatrix(receivers=("a", "b"), values=[[3.0, 2.0], [2.0, 3.0]])
        tree = recover_tree("s", ["a", "b"], cov, RecoveryConfig(rho=0.5))
        (router,) = tree.routers()
        assert tree.label(router) == 2.0
        assert sorted(tree.children[router]) == ["a", "b"]

    def test_two_leaves_below_rho_hang_from_source(self):
        cov = CovarianceMatrix(receivers=("a", "b"), values=[[3.0, 0.1], [0.1, 3.0]])
        tree = recover_tree("s", ["a", "b"], cov, RecoveryConfig(rho=0.5))
        assert tree.routers() == []
        assert sorted(tree.children["s"]) == ["a", "b"]

    def test_rejects_bad_input(self):
        cov = CovarianceMatrix(receivers=("a", "b"), values=[[3.0, 2.0], [2.0, 3.0]])
        with pytest.raises(InputError):
            recover_tree("s", [], cov, RecoveryConfig(rho=0.5))
        with pytest.raises(InputError):
            recover_tree("s", ["a", "a"], cov, RecoveryConfig(rho=0.5))
        with pytest.raises(InputError):
            recover_tree("s", ["a", "zz"], cov, RecoveryConfig(rho=0.5))
        with pytest.raises(InputError):
            recover_tree("a", ["a", "b"], cov, RecoveryConfig(rho=0.5))

    @pytest.mark.parametrize("use_tol", [True, False], ids=["tol-rho", "tol-0"])
    @pytest.mark.parametrize("fraction", [0.01, 0.25, 0.5, 0.75, 0.99])
    def test_exact_on_noiseless_networks(self, make_network, fraction, use_tol):
        for seed in range(100):
            net = make_network(seed)
            recovered = recover_noiseless(net, fraction, use_tol)
            assert trees_topologically_equal(recovered, net.truth), f"semilla {seed}"
            assert tomography_accuracy(recovered, net.truth, net.clients) == 1.0

    def test_labels_are_monotone(self, make_network):
        for seed in range(20):
            recover_noiseless(make_network(seed)).check_invariants()

    def test_scaling_covariances_and_rho_together(self, make_network):
        for seed in range(20):
            net = make_network(seed)
            cov = analytic_covariance_matrix(net)
            rho = 0.5 * net.min_link_variance()
            order = dfs_order(cov, tol=rho)
            base = recover_tree(net.source, order, cov, RecoveryConfig(rho=rho))
            scaled = recover_tree(
                net.source, order, cov.scaled(3.0), RecoveryConfig(rho=3.0 * rho)
            )
            assert trees_topologically_equal(base, scaled)


class TestSelectRho:
    def test_half_of_smallest_gap(self):
        cov = CovarianceMatrix(
            receivers=("a", "b", "c"),
            values=[[4.0, 1.0, 2.0], [1.0, 4.0, 3.5], [2.0, 3.5, 4.0]],
        )
        assert select_rho(cov) == pytest.approx(0.5)

    def test_floor_when_all_equal(self):
        cov = CovarianceMatrix(
            receivers=("a", "b", "c"),
            values=[[4.0, 1.0, 1.0], [1.0, 4.0, 1.0], [1.0, 1.0, 4.0]],
        )
        assert select_rho(cov, floor=0.2) == 0.2

    def test_floor_bounds_tiny_gaps(self):
        cov = CovarianceMatrix(
            receivers=("a", "b", "c"),
            values=[[4.0, 1.0, 1.001], [1.0, 4.0, 1.0], [1.001, 1.0, 4.0]],
        )
        assert select_rho(cov, floor=0.05) == 0.05
