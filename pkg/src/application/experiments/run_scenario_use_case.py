"""
Caso de uso para ejecutar un escenario estático o un barrido de parámetros.
Cada semilla recorre generar → simular → estimar → ordenar → recuperar →
puntuar; las semillas se reparten entre procesos y el reporte se ensambla
ordenado por semilla.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np

from src.framework.config import Config
from src.framework.logger import get_logger
from src.infrastructure.simulation.simulator_config import SimulatorConfig
from src.infrastructure.storage.report_writer import write_json_report

from .scenario_config import RecoverySettings, ScenarioConfig
from .tomography_pipeline import run_static_once

logger = get_logger(__name__)


def summarize_runs(runs: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Media y error estándar de p sobre las ejecuciones."""
    p = np.array([run["p"] for run in runs], dtype=np.float64)
    p_distinct = np.array([run["p_distinct"] for run in runs], dtype=np.float64)
    stderr = float(p.std(ddof=1) / np.sqrt(p.size)) if p.size > 1 else 0.0
    return {
        "n_runs": int(p.size),
        "mean_p": float(p.mean()),
        "stderr": stderr,
        "min_p": float(p.min()),
        "max_p": float(p.max()),
        "mean_p_distinct": float(p_distinct.mean()),
        "exact_recoveries": int(sum(run["truth_equal"] for run in runs)),
    }


class RunScenarioUseCase:
    """
    Caso de uso principal de los experimentos estáticos.
    Orquesta las ejecuciones por semilla y compone el reporte JSON.
    """

    def __init__(self, workers: Optional[int] = None):
        """Inicializa el caso de uso con el número de procesos."""
        self.workers = workers or Config.WORKERS

    def execute(
        self, config: ScenarioConfig, out_path: Optional[str] = None
    ) -> Dict[str, Any]:
        """
        Ejecuta el escenario (o el barrido si la configuración lo define).

        Args:
            config: Escenario validado
            out_path: Ruta del reporte JSON (opcional)

        Returns:
            dict: Reporte con config, ejecuciones y resumen
        """
        if config.sweep:
            report = self._execute_sweep(config)
        else:
            logger.info(
                f"🚀 Escenario '{config.name}': {len(config.seeds)} semillas, "
                f"{config.simulator.n_hosts} hosts, "
                f"{config.simulator.n_routers} routers"
            )
            runs = self._run_seeds(config.simulator, config.recovery, config.seeds)
            summary = summarize_runs(runs)
            logger.info(
                f"🎯 p medio = {summary['mean_p']:.4f} ± {summary['stderr']:.4f}"
            )
            report = {
                "config": config.model_dump(mode="json"),
                "runs": runs,
                "summary": summary,
            }

        if out_path:
            write_json_report(report, out_path)
            logger.info(f"✅ Reporte guardado en '{out_path}'")
        return report

    def _execute_sweep(self, config: ScenarioConfig) -> Dict[str, Any]:
        points = list(config.sweep_points())
        logger.info(f"🔄 Barrido '{config.name}': {len(points)} puntos")
        rows = []
        for index, point in enumerate(points, 1):
            simulator, recovery = config.point_settings(point)
            runs = self._run_seeds(simulator, recovery, config.seeds)
            summary = summarize_runs(runs)
            logger.info(
                f"📊 Punto {index}/{len(points)} {point}: "
                f"p medio = {summary['mean_p']:.4f}"
            )
            # Los árboles completos solo van en los reportes de escenario simple
            compact = [{k: v for k, v in run.items() if k != "tree"} for run in runs]
            rows.append({"params": point, "runs": compact, "summary": summary})
        return {"config": config.model_dump(mode="json"), "points": rows}

    def _run_seeds(
        self,
        simulator: SimulatorConfig,
        recovery: RecoverySettings,
        seeds: List[int],
    ) -> List[Dict[str, Any]]:
        configs = [simulator.model_copy(update={"seed": seed}) for seed in seeds]
        if self.workers > 1 and len(configs) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                runs = list(
                    executor.map(run_static_once, configs, [recovery] * len(configs))
                )
        else:
            runs = []
            for sim in configs:
                runs.append(run_static_once(sim, recovery))
                logger.debug(f"   semilla {sim.seed}: p = {runs[-1]['p']:.4f}")
        if recovery.rho is None:
            chosen = sorted({round(run["rho"], 6) for run in runs})
            logger.warning(f"⚠️ ϱ elegido automáticamente: {chosen}")
        lossy = [run["seed"] for run in runs if run["lost_arrivals"]]
        if lossy:
            logger.warning(f"⚠️ Llegadas perdidas en las semillas {sorted(lossy)}")
        return sorted(runs, key=lambda run: run["seed"])
