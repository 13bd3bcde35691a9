"""
Generador de topologías de referencia.
Conecta los routers según el modelo elegido (Waxman incremental, Waxman plano de
networkx o árbol aleatorio l-ario), cuelga cada host de un router aleatorio,
elige una fuente y calcula el árbol de caminos mínimos hacia los clientes.
El árbol resultante, con sus parámetros de enlace, es la verdad de referencia.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict

from src.domain.errors import InputError, MeasurementGapError, TopologyGenerationError
from src.domain.measurement.measurement_model import CovarianceMatrix
from src.domain.tomography.routing_tree_model import RoutingTree
from src.framework.config import Config

from .simulator_config import SimulatorConfig

Link = Tuple[str, str]


class LinkParams(BaseModel):
    """Parámetros efectivos de un enlace dirigido del árbol."""

    base_delay_us: int
    delay_var_ms2: float
    load_factor: float = 1.0
    utilization: float = 0.0
    decouple_var_ms2: float = 0.0
    loss_prob: float = 0.0


class SimulatedNetwork(BaseModel):
    """Árbol de verdad con los parámetros de cada enlace."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    truth: RoutingTree
    link_params: Dict[Link, LinkParams]
    source: str
    clients: Tuple[str, ...]
    n_routers: int
    n_graph_links: int

    def links(self) -> List[Link]:
        """Enlaces del árbol en orden determinista."""
        return sorted(self.link_params)

    def path_variance(self, client: str) -> float:
        """Varianza total del retardo extremo a extremo (compartida + propia)."""
        total = 0.0
        for link in self.truth.path_links(client):
            params = self.link_params[link]
            total += params.delay_var_ms2 + params.decouple_var_ms2
        return total

    def min_link_variance(self) -> float:
        """V_min: menor varianza de enlace del árbol de verdad."""
        return min(params.delay_var_ms2 for params in self.link_params.values())


def _host_ids(n_hosts: int) -> List[str]:
    return [f"h{i:03d}" for i in range(n_hosts)]


def _router_ids(n_routers: int) -> List[str]:
    return [f"core-{i:03d}" for i in range(n_routers)]


def _waxman_incremental(config: SimulatorConfig, rng: np.random.Generator) -> nx.Graph:
    """Crecimiento tipo BRITE: cada router nuevo se une a m routers existentes."""
    routers = _router_ids(config.n_routers)
    graph = nx.Graph()
    graph.add_nodes_from(routers)
    positions = rng.random((config.n_routers, 2))
    scale = config.waxman_alpha * math.sqrt(2)
    for i in range(1, config.n_routers):
        distances = np.linalg.norm(positions[:i] - positions[i], axis=1)
        weights = config.waxman_beta * np.exp(-distances / scale)
        weights = weights / weights.sum()
        size = min(config.waxman_links, i)
        for j in rng.choice(i, size=size, replace=False, p=weights):
            graph.add_edge(routers[i], routers[int(j)])
    return graph


def _waxman_flat(config: SimulatorConfig, rng: np.random.Generator) -> nx.Graph:
    """Modelo de Waxman clásico (puede quedar desconectado)."""
    graph = nx.waxman_graph(
        config.n_routers,
        beta=config.waxman_beta,
        alpha=config.waxman_alpha,
        seed=int(rng.integers(2**31 - 1)),
    )
    mapping = dict(zip(range(config.n_routers), _router_ids(config.n_routers)))
    return nx.relabel_nodes(graph, mapping)


def _random_lary(config: SimulatorConfig, rng: np.random.Generator) -> nx.Graph:
    """Árbol aleatorio de routers con como mucho l hijos por router."""
    routers = _router_ids(config.n_routers)
    graph = nx.Graph()
    graph.add_nodes_from(routers)
    fanout = {routers[0]: 0}
    for router in routers[1:]:
        candidates = sorted(
            r for r, used in fanout.items() if used < config.lary_degree
        )
        parent = candidates[int(rng.integers(len(candidates)))]
        graph.add_edge(parent, router)
        fanout[parent] += 1
        fanout[router] = 0
    return graph


_ROUTER_GRAPHS = {
    "waxman": _waxman_incremental,
    "waxman_flat": _waxman_flat,
    "random_lary": _random_lary,
}


def _connected_router_graph(
    config: SimulatorConfig, rng: np.random.Generator
) -> nx.Graph:
    builder = _ROUTER_GRAPHS[config.topology_model]
    for _ in range(Config.TOPOLOGY_RETRIES):
        graph = builder(config, rng)
        if nx.is_connected(graph):
            return graph
    raise TopologyGenerationError(
        f"Grafo de routers desconectado tras {Config.TOPOLOGY_RETRIES} intentos "
        f"(modelo {config.topology_model})"
    )


def generate_topology(config: SimulatorConfig) -> SimulatedNetwork:
    """
    Genera la red de referencia de forma determinista a partir de la semilla.

    Returns:
        SimulatedNetwork: Árbol fuente→clientes con parámetros de enlace
    """
    rng = np.random.default_rng(config.seed)
    graph = _connected_router_graph(config, rng)
    routers = _router_ids(config.n_routers)
    hosts = _host_ids(config.n_hosts)

    for host in hosts:
        graph.add_edge(host, routers[int(rng.integers(config.n_routers))])

    low, high = config.link_base_delay_us
    var_low, var_high = config.link_delay_var_ms2
    load_low, load_high = config.bg_load_factor
    raw: Dict[frozenset, Tuple[int, float, float]] = {}
    for u, v in sorted(tuple(sorted(edge)) for edge in graph.edges):
        delay = int(rng.integers(low, high + 1))
        raw[frozenset((u, v))] = (
            delay,
            float(rng.uniform(var_low, var_high)),
            float(rng.uniform(load_low, load_high)),
        )
        graph.edges[u, v]["delay"] = delay

    source = hosts[int(rng.integers(config.n_hosts))]
    others = [h for h in hosts if h != source]
    n_clients = min(len(others), max(1, round(config.client_fraction * config.n_hosts)))
    clients = sorted(str(c) for c in rng.choice(others, size=n_clients, replace=False))

    paths = nx.single_source_dijkstra_path(graph, source, weight="delay")
    truth = RoutingTree(root=source)
    for client in clients:
        path = paths[client]
        for parent, child in zip(path, path[1:]):
            if child in truth:
                continue
            if child == client:
                truth.add_leaf(parent, child)
            else:
                _, intrinsic, load = raw[frozenset((parent, child))]
                label = truth.label(parent) + _shared_variance(config, intrinsic, load)
                truth.add_router(parent, label, router_id=child)

    # La carga propia de la sesión depende de cuántos clientes cuelgan del enlace
    link_params: Dict[Link, LinkParams] = {}
    for child, parent in truth.parent.items():
        base, intrinsic, load = raw[frozenset((parent, child))]
        downstream = len(truth.leaf_descendants(child))
        link_params[(parent, child)] = _effective_params(
            config, base, intrinsic, load, downstream
        )

    return SimulatedNetwork(
        truth=truth,
        link_params=link_params,
        source=source,
        clients=tuple(clients),
        n_routers=config.n_routers,
        n_graph_links=graph.number_of_edges(),
    )


def _shared_variance(config: SimulatorConfig, intrinsic: float, load: float) -> float:
    return intrinsic + config.bg_var_per_mbps * config.bg_rate_mbps * load


def link_utilization(config: SimulatorConfig, load: float, downstream: int) -> float:
    """
    Fracción del ancho de banda ocupada en un enlace: tráfico de fondo más la
    propia sesión (un paquete por cliente aguas abajo en cada intervalo δ).
    """
    background_bps = config.bg_rate * 8 * load
    return (background_bps + config.session_bps_per_client * downstream) / (
        config.bandwidth_bps
    )


def _effective_params(
    config: SimulatorConfig, base: int, intrinsic: float, load: float, downstream: int
) -> LinkParams:
    """Aplica la carga del enlace: más varianza compartida y, si hay congestión,
    jitter independiente por paquete y pérdidas."""
    utilization = link_utilization(config, load, downstream)
    excess = max(0.0, (utilization - config.congestion_threshold)) / (
        1 - config.congestion_threshold
    )
    return LinkParams(
        base_delay_us=base,
        delay_var_ms2=_shared_variance(config, intrinsic, load),
        load_factor=load,
        utilization=utilization,
        decouple_var_ms2=config.congestion_jitter_var_ms2 * excess,
        loss_prob=min(
            0.99, config.link_loss_prob + config.congestion_loss_prob * excess
        ),
    )


def _require_client(net: SimulatedNetwork, node: str) -> None:
    if node not in net.truth.leaves:
        raise InputError(f"Cliente desconocido: {node}")


def analytic_covariance(net: SimulatedNetwork, i: str, j: str) -> float:
    """Suma de varianzas de los enlaces compartidos por los caminos a i y a j."""
    _require_client(net, i)
    _require_client(net, j)
    if i == j:
        raise InputError("analytic_covariance necesita dos clientes distintos")
    branch = net.truth.lca(i, j)
    return sum(
        net.link_params[link].delay_var_ms2 for link in net.truth.path_links(branch)
    )


def analytic_covariance_matrix(
    net: SimulatedNetwork, receivers: Optional[Sequence[str]] = None
) -> CovarianceMatrix:
    """Matriz sin ruido; la diagonal incluye el jitter independiente de congestión."""
    receivers = list(receivers or net.clients)
    size = len(receivers)
    values = np.zeros((size, size))
    for a in range(size):
        _require_client(net, receivers[a])
        values[a, a] = net.path_variance(receivers[a])
        for b in range(a + 1, size):
            values[a, b] = values[b, a] = analytic_covariance(
                net, receivers[a], receivers[b]
            )
    return CovarianceMatrix(receivers=tuple(receivers), values=values)


class AnalyticCovarianceOracle:
    """Oráculo sin ruido para la incorporación dinámica en tests y diagnósticos."""

    def __init__(self, net: SimulatedNetwork):
        """Guarda la red de referencia."""
        self.net = net

    def __call__(self, a: str, b: str) -> float:
        """σ²_{a,b} exacta; un par desconocido es MeasurementGapError."""
        try:
            return analytic_covariance(self.net, a, b)
        except InputError as exc:
            raise MeasurementGapError(a, b, str(exc)) from exc
