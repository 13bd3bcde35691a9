"""
Cadena de inferencia compartida por los casos de uso:
matriz de covarianzas → ϱ → orden DFS → recuperación estática → puntuación.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from src.domain.accuracy.tomography_accuracy import score_trees
from src.domain.measurement.delay_correlation import build_covariance_matrix
from src.domain.measurement.measurement_model import CovarianceMatrix, MeasurementLog
from src.domain.tomography.dfs_ordering import dfs_order
from src.domain.tomography.routing_tree_model import (
    RoutingTree,
    trees_topologically_equal,
)
from src.domain.tomography.static_recovery import (
    RecoveryConfig,
    recover_tree,
    select_rho,
)
from src.infrastructure.simulation.session_simulator import simulate_session
from src.infrastructure.simulation.simulator_config import SimulatorConfig
from src.infrastructure.simulation.topology_generator import generate_topology
from src.infrastructure.storage.report_writer import covariance_summary, tree_to_dict

from .scenario_config import RecoverySettings


class InferenceResult(BaseModel):
    """Árbol recuperado junto con lo necesario para reproducirlo."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    tree: RoutingTree
    cov: CovarianceMatrix
    order: List[str]
    rho: float


def resolve_rho(cov: CovarianceMatrix, settings: RecoverySettings) -> float:
    """ϱ explícito si lo hay; si no, la heurística con suelo."""
    if settings.rho is not None:
        return settings.rho
    return select_rho(cov, settings.rho_floor)


def infer_tree(
    source: str, cov: CovarianceMatrix, settings: RecoverySettings
) -> InferenceResult:
    """Ordena las hojas y recupera el árbol a partir de una matriz ya estimada."""
    rho = resolve_rho(cov, settings)
    order = dfs_order(cov, tol=rho)
    tree = recover_tree(source, order, cov, RecoveryConfig(rho=rho))
    return InferenceResult(tree=tree, cov=cov, order=order, rho=rho)


def infer_from_log(
    log: MeasurementLog,
    settings: RecoverySettings,
    source: Optional[str] = None,
    receivers: Optional[List[str]] = None,
) -> InferenceResult:
    """Estima la matriz sobre los receptores (ordenados) y recupera el árbol."""
    receivers = sorted(receivers or log.receivers)
    cov = build_covariance_matrix(log, receivers)
    return infer_tree(source or log.source or "source", cov, settings)


def run_static_once(
    simulator: SimulatorConfig, settings: RecoverySettings
) -> Dict[str, Any]:
    """
    Una ejecución completa con la semilla de `simulator`.
    Función de módulo para poder enviarla a un ProcessPoolExecutor.
    """
    net = generate_topology(simulator)
    log = simulate_session(net, simulator)
    result = infer_from_log(log, settings, source=net.source)
    report = score_trees(result.tree, net.truth, net.clients)
    lost = sum(log.n_pairs - log.received_count(r) for r in log.receivers)
    return {
        "seed": simulator.seed,
        "p": report.p,
        "p_distinct": report.p_distinct,
        "rho": result.rho,
        "n_leaves": report.n_leaves,
        "lost_arrivals": lost,
        "truth_equal": trees_topologically_equal(result.tree, net.truth),
        "cov_summary": covariance_summary(result.cov),
        "tree": tree_to_dict(result.tree),
    }
