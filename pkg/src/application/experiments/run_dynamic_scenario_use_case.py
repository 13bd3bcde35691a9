"""
Caso de uso del experimento de crecimiento dinámico.
Se recupera el árbol inicial de forma estática y después cada peer nuevo se
incorpora con attach_peer, puntuando contra la verdad restringida a los
clientes activos en cada punto de control.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.domain.accuracy.tomography_accuracy import score_trees
from src.domain.errors import ScenarioConfigError
from src.domain.measurement.delay_correlation import (
    CovarianceOracle,
    LogCovarianceOracle,
)
from src.domain.tomography.dynamic_recovery import attach_peer, remove_peer
from src.domain.tomography.static_recovery import RecoveryConfig
from src.framework.config import Config
from src.framework.logger import get_logger
from src.infrastructure.simulation.session_simulator import simulate_session
from src.infrastructure.simulation.topology_generator import (
    AnalyticCovarianceOracle,
    SimulatedNetwork,
    analytic_covariance_matrix,
    generate_topology,
)
from src.infrastructure.storage.report_writer import tree_to_dict, write_json_report

from .scenario_config import DynamicSettings, ScenarioConfig
from .tomography_pipeline import infer_tree

logger = get_logger(__name__)


def plan_membership(
    net: SimulatedNetwork, settings: DynamicSettings, seed: int
) -> Tuple[List[str], List[str]]:
    """
    Clientes iniciales y orden de incorporación.

    Raises:
        ScenarioConfigError: El calendario nombra un host desconocido o ya presente
    """
    rng = np.random.default_rng([seed, 2])
    pool = list(net.clients)
    n_initial = max(
        2, round(settings.initial_client_fraction * settings.initial_hosts)
    )

    if settings.join_schedule is not None:
        seen = set()
        for host in settings.join_schedule:
            if host == net.source or host in seen:
                raise ScenarioConfigError(
                    f"join_schedule: el host {host} ya está en la red"
                )
            if host not in pool:
                raise ScenarioConfigError(f"join_schedule: host desconocido {host}")
            seen.add(host)
        candidates = [h for h in pool if h not in seen]
        size = min(n_initial, len(candidates))
        initial = rng.choice(candidates, size=size, replace=False)
        return sorted(str(h) for h in initial), list(settings.join_schedule)

    order = [str(h) for h in rng.permutation(pool)]
    initial_hosts = order[: settings.initial_hosts - 1]
    joiners = order[settings.initial_hosts - 1 :]
    initial = rng.choice(
        initial_hosts, size=min(n_initial, len(initial_hosts)), replace=False
    )
    return sorted(str(h) for h in initial), joiners


def run_dynamic_once(
    config: ScenarioConfig, seed: int
) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """Curva de precisión de una semilla y el árbol final."""
    settings = config.dynamic
    simulator = config.simulator.model_copy(
        update={
            "seed": seed,
            "n_hosts": settings.initial_hosts + settings.n_joins,
            "client_fraction": 1.0,
        }
    )
    net = generate_topology(simulator)
    clients, joiners = plan_membership(net, settings, seed)

    if settings.oracle == "analytic":
        oracle: CovarianceOracle = AnalyticCovarianceOracle(net)
        cov = analytic_covariance_matrix(net, clients)
    else:
        log = simulate_session(net, simulator)
        oracle = LogCovarianceOracle(log)
        cov = oracle.matrix(clients)

    result = infer_tree(net.source, cov, config.recovery)
    tree = result.tree
    recovery = RecoveryConfig(rho=result.rho)
    active = set(clients)
    rng = np.random.default_rng([seed, 3])

    def checkpoint(step: int, joined: int, left: int) -> Dict[str, Any]:
        """Puntúa el árbol actual sobre los clientes activos."""
        report = score_trees(tree, net.truth, active)
        return {
            "step": step,
            "joined": joined,
            "left": left,
            "n_clients": len(active),
            "network_size": settings.initial_hosts + net.n_routers + joined - left,
            "p": report.p,
            "p_distinct": report.p_distinct,
        }

    curve = [checkpoint(0, 0, 0)]
    left = 0
    for step, peer in enumerate(joiners, 1):
        attach_peer(tree, oracle, peer, recovery)
        active.add(peer)
        leaving_now = settings.leave_every and step % settings.leave_every == 0
        if leaving_now and len(active) > 3:
            leaving = sorted(active)[int(rng.integers(len(active)))]
            remove_peer(tree, leaving)
            active.discard(leaving)
            left += 1
        if step % settings.score_every == 0 or step == len(joiners):
            curve.append(checkpoint(step, step, left))
    return curve, tree_to_dict(tree)


class RunDynamicScenarioUseCase:
    """Orquesta el crecimiento dinámico para cada semilla del escenario."""

    def __init__(self, workers: Optional[int] = None):
        """Inicializa el caso de uso con el número de procesos."""
        self.workers = workers or Config.WORKERS

    def execute(
        self, config: ScenarioConfig, out_path: Optional[str] = None
    ) -> Dict[str, Any]:
        """
        Ejecuta el experimento dinámico.

        Returns:
            dict: Reporte con la curva de cada semilla y la curva media
        """
        if config.dynamic is None:
            raise ScenarioConfigError("El escenario no tiene sección 'dynamic'")
        settings = config.dynamic
        logger.info(
            f"🚀 Escenario dinámico '{config.name}': {settings.initial_hosts} hosts "
            f"iniciales + {settings.n_joins} incorporaciones"
        )

        seeds = sorted(config.seeds)
        if self.workers > 1 and len(seeds) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                results = list(
                    executor.map(run_dynamic_once, [config] * len(seeds), seeds)
                )
        else:
            results = [run_dynamic_once(config, seed) for seed in seeds]

        runs = []
        final_tree = None
        for seed, (curve, final_tree) in zip(seeds, results):
            logger.info(
                f"📈 Semilla {seed}: p {curve[0]['p']:.4f} → {curve[-1]['p']:.4f}"
            )
            runs.append({"seed": seed, "curve": curve})

        report = {
            "config": config.model_dump(mode="json"),
            "runs": runs,
            "summary": {"mean_curve": _mean_curve(runs)},
            "final_tree": final_tree,
        }
        if out_path:
            write_json_report(report, out_path)
            logger.info(f"✅ Reporte guardado en '{out_path}'")
        return report


def _mean_curve(runs: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    steps = [point["step"] for point in runs[0]["curve"]]
    mean = []
    for index, step in enumerate(steps):
        points = [run["curve"][index] for run in runs]
        mean.append(
            {
                "step": step,
                "network_size": float(np.mean([p["network_size"] for p in points])),
                "mean_p": float(np.mean([p["p"] for p in points])),
                "mean_p_distinct": float(np.mean([p["p_distinct"] for p in points])),
            }
        )
    return mean
