"""Fixtures compartidos: redes de referencia pequeñas y árboles aleatorios."""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import pytest

from src.domain.tomography.routing_tree_model import RoutingTree
from src.infrastructure.simulation.simulator_config import SimulatorConfig
from src.infrastructure.simulation.topology_generator import (
    LinkParams,
    SimulatedNetwork,
    generate_topology,
)

# (padre, hijo, varianza en ms²)
Edge = Tuple[str, str, float]


def network_from_edges(
    edges: Sequence[Edge],
    source: str = "src",
    base_delay_us: int = 20_000,
    loss: Optional[dict] = None,
) -> SimulatedNetwork:
    """Red a mano: los hijos que nunca son padres son clientes."""
    loss = loss or {}
    parents = {parent for parent, _, _ in edges}
    truth = RoutingTree(root=source)
    link_params = {}
    for parent, child, var in edges:
        link_params[(parent, child)] = LinkParams(
            base_delay_us=base_delay_us,
            delay_var_ms2=var,
            loss_prob=loss.get(child, 0.0),
        )
        if child in parents:
            truth.add_router(parent, truth.label(parent) + var, router_id=child)
        else:
            truth.add_leaf(parent, child)
    return SimulatedNetwork(
        truth=truth,
        link_params=link_params,
        source=source,
        clients=tuple(sorted(truth.leaves)),
        n_routers=len(truth.routers()),
        n_graph_links=len(edges),
    )


def random_network(seed: int, max_leaves: int = 10) -> SimulatedNetwork:
    """Árbol aleatorio l-ario con todas las hojas como clientes y varianzas ≥ 0.5."""
    rng = np.random.default_rng(seed)
    config = SimulatorConfig(
        n_hosts=int(rng.integers(3, max_leaves + 2)),
        n_routers=int(rng.integers(1, 8)),
        topology_model="random_lary",
        lary_degree=3,
        client_fraction=1.0,
        seed=seed,
        link_delay_var_ms2=(0.5, 2.0),
        bg_rate=0.0,
    )
    return generate_topology(config)


def random_routing_tree(rng: np.random.Generator, leaves: List[str]) -> RoutingTree:
    """Árbol arbitrario (sin simulador) para probar la métrica."""
    tree = RoutingTree(root="src")
    internal = [tree.root]
    for leaf in leaves:
        anchor = internal[int(rng.integers(len(internal)))]
        if rng.random() < 0.5:
            anchor = tree.add_router(anchor, tree.label(anchor) + 1.0)
            internal.append(anchor)
        tree.add_leaf(anchor, leaf)
    return tree


@pytest.fixture
def build_network():
    return network_from_edges


@pytest.fixture
def make_network():
    return random_network


@pytest.fixture
def make_tree():
    return random_routing_tree


@pytest.fixture
def fig2_network() -> SimulatedNetwork:
    """Fuente → f → s → {a, b} con tramo compartido de 4 ms² y un tercer host c."""
    return network_from_edges(
        [
            ("src", "core-f", 1.5),
            ("core-f", "core-s", 2.5),
            ("core-s", "ha", 1.0),
            ("core-s", "hb", 0.7),
            ("core-f", "hc", 0.3),
        ]
    )
