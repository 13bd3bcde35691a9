"""
Punto de entrada de la aplicación que usa casos de uso.
"""

import argparse
import os
import sys
from typing import List, Optional

from src.domain.errors import EXIT_DATA_ERROR, ScenarioConfigError, TomographyError
from src.framework.config import Config
from src.framework.logger import get_logger

logger = get_logger("tomography")

HELP_TEXT = """🛰️ Tomografía pasiva P2P por correlación de retardos (DCE)

Uso:
  python main.py <comando> [opciones]

Comandos disponibles:
  simulate --config C [--seed N] [--out DIR]
           Genera el log NDJSON de una sesión y el árbol de verdad
  estimate --log L [--out F]
           Estima la matriz de covarianzas del log
  recover  --log L [--config C] [--rho R] [--source S] [--out F]
           Recupera el árbol de enrutamiento (orden DFS + ϱ)
  join     --tree T [--log L | --cov M] [--peer ID]... [--leave ID]... [--rho R]
           Incorpora o retira peers de un árbol existente
  score    --tree T --truth V [--out F]
           Calcula la precisión p frente a la verdad
  e2e      --config C [--seed N] [--out F]
           Ejecuta un escenario estático o dinámico completo
  sweep    --config C [--seed N] [--out F]
           Ejecuta un barrido de parámetros
  help     Muestra esta ayuda

Códigos de salida: 0 ok, 2 configuración, 3 datos, 4 invariante interno."""


def build_parser() -> argparse.ArgumentParser:
    """Un subcomando por operación; la ayuda propia la imprime `help`."""
    parser = argparse.ArgumentParser(prog="main.py", add_help=False)
    commands = parser.add_subparsers(dest="command")

    simulate = commands.add_parser("simulate")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--out")

    estimate = commands.add_parser("estimate")
    estimate.add_argument("--log", required=True)
    estimate.add_argument("--out")

    recover = commands.add_parser("recover")
    recover.add_argument("--log", required=True)
    recover.add_argument("--config")
    recover.add_argument("--rho", type=float)
    recover.add_argument("--source")
    recover.add_argument("--out")

    join = commands.add_parser("join")
    join.add_argument("--tree", required=True)
    join.add_argument("--log")
    join.add_argument("--cov")
    join.add_argument("--peer", action="append", default=[])
    join.add_argument("--leave", action="append", default=[])
    join.add_argument("--rho", type=float)
    join.add_argument("--out")

    score = commands.add_parser("score")
    score.add_argument("--tree", required=True)
    score.add_argument("--truth", required=True)
    score.add_argument("--out")

    for name in ("e2e", "sweep"):
        scenario = commands.add_parser(name)
        scenario.add_argument("--config", required=True)
        scenario.add_argument("--seed", type=int)
        scenario.add_argument("--out")

    commands.add_parser("help")
    return parser


def _load_tree(path: str):
    from src.infrastructure.storage.report_writer import read_json, tree_from_dict

    data = read_json(path)
    return tree_from_dict(data.get("tree", data)), data


def _settings(args):
    from src.application.experiments.scenario_config import (
        RecoverySettings,
        load_scenario_config,
    )

    settings = RecoverySettings()
    if getattr(args, "config", None):
        settings = load_scenario_config(args.config).recovery
    if args.rho is not None:
        settings = RecoverySettings(rho=args.rho, rho_floor=settings.rho_floor)
    return settings


def cmd_simulate(args) -> None:
    """Escribe el log NDJSON de una semilla y su árbol de verdad."""
    from src.application.experiments.scenario_config import load_scenario_config
    from src.infrastructure.simulation.session_simulator import simulate_session
    from src.infrastructure.simulation.topology_generator import generate_topology
    from src.infrastructure.storage.measurement_log_io import export_log
    from src.infrastructure.storage.report_writer import tree_to_dict, write_json_report

    config = load_scenario_config(args.config)
    seed = args.seed if args.seed is not None else config.seeds[0]
    simulator = config.simulator.model_copy(update={"seed": seed})
    out_dir = args.out or Config.LOGS_DIR

    logger.info(f"🧪 Simulando '{config.name}' con semilla {seed}...")
    net = generate_topology(simulator)
    log = simulate_session(net, simulator)
    stem = os.path.join(out_dir, f"{config.name}-seed{seed}")
    export_log(log, f"{stem}.ndjson")
    write_json_report(
        {
            "config": simulator.model_dump(mode="json"),
            "source": net.source,
            "clients": list(net.clients),
            "tree": tree_to_dict(net.truth),
        },
        f"{stem}-truth.json",
    )
    logger.info(f"✅ Log: {stem}.ndjson ({len(net.clients)} clientes)")
    logger.info(f"✅ Verdad: {stem}-truth.json")


def cmd_estimate(args) -> None:
    """Guarda la matriz de covarianzas de un log con su resumen."""
    from src.domain.measurement.delay_correlation import build_covariance_matrix
    from src.infrastructure.storage.measurement_log_io import import_log
    from src.infrastructure.storage.report_writer import (
        covariance_summary,
        covariance_to_dict,
        write_json_report,
    )

    log = import_log(args.log)
    cov = build_covariance_matrix(log, sorted(log.receivers))
    out = args.out or os.path.join(Config.REPORTS_DIR, "covariance.json")
    write_json_report(
        {"covariance": covariance_to_dict(cov), "summary": covariance_summary(cov)},
        out,
    )
    logger.info(f"✅ Matriz {len(cov.receivers)}x{len(cov.receivers)} en '{out}'")


def cmd_recover(args) -> None:
    """Recupera el árbol de un log (orden DFS + recuperación estática)."""
    from src.application.experiments.tomography_pipeline import infer_from_log
    from src.infrastructure.storage.measurement_log_io import import_log
    from src.infrastructure.storage.report_writer import tree_to_dict, write_json_report

    log = import_log(args.log)
    result = infer_from_log(log, _settings(args), source=args.source)
    out = args.out or os.path.join(Config.REPORTS_DIR, "recovered.json")
    write_json_report(
        {"rho": result.rho, "order": result.order, "tree": tree_to_dict(result.tree)},
        out,
    )
    logger.info(
        f"🌳 Árbol con {len(result.tree.leaves)} hojas y "
        f"{len(result.tree.routers())} routers (ϱ = {result.rho:.4f}) en '{out}'"
    )


def _join_oracle(args):
    """Oráculo de covarianzas para `join`: el log NDJSON o la matriz de `estimate`."""
    from src.domain.measurement.delay_correlation import (
        LogCovarianceOracle,
        MatrixCovarianceOracle,
    )
    from src.infrastructure.storage.measurement_log_io import import_log
    from src.infrastructure.storage.report_writer import covariance_from_dict, read_json

    if args.log and args.cov:
        raise ScenarioConfigError("join acepta --log o --cov, no ambos")
    if args.cov:
        return MatrixCovarianceOracle(covariance_from_dict(read_json(args.cov)))
    if args.log:
        return LogCovarianceOracle(import_log(args.log))
    raise ScenarioConfigError("join --peer necesita --log o --cov")


def cmd_join(args) -> None:
    """Retira los peers de --leave y luego incorpora los de --peer."""
    from src.domain.tomography.dynamic_recovery import attach_peer, remove_peer
    from src.domain.tomography.static_recovery import RecoveryConfig, select_rho
    from src.infrastructure.storage.report_writer import tree_to_dict, write_json_report

    tree, data = _load_tree(args.tree)
    for leaving in args.leave:
        remove_peer(tree, leaving)
        logger.info(f"👋 {leaving} abandona la red")

    rho = args.rho if args.rho is not None else data.get("rho")
    if args.peer:
        oracle = _join_oracle(args)
        if rho is None:
            rho = select_rho(oracle.matrix(sorted(tree.leaves)), Config.RHO_FLOOR)
        for peer in args.peer:
            attach_peer(tree, oracle, peer, RecoveryConfig(rho=rho))
            logger.info(f"🤝 {peer} incorporado bajo {tree.parent[peer]}")

    out = args.out or args.tree
    write_json_report({"rho": rho, "tree": tree_to_dict(tree)}, out)
    logger.info(f"✅ Árbol actualizado en '{out}'")


def cmd_score(args) -> None:
    """Puntúa un árbol recuperado frente al de verdad."""
    from src.domain.accuracy.tomography_accuracy import score_trees
    from src.infrastructure.storage.report_writer import write_json_report

    recovered, _ = _load_tree(args.tree)
    truth, _ = _load_tree(args.truth)
    report = score_trees(recovered, truth, recovered.leaves)
    logger.info(
        f"🎯 p = {report.p:.4f} (ternas distintas: {report.p_distinct:.4f}, "
        f"{report.n_leaves} hojas)"
    )
    if args.out:
        write_json_report(report.model_dump(), args.out)


def cmd_scenario(args) -> None:
    """Ejecuta `e2e` o `sweep` según el tipo de escenario."""
    from src.application.experiments.run_dynamic_scenario_use_case import (
        RunDynamicScenarioUseCase,
    )
    from src.application.experiments.run_scenario_use_case import RunScenarioUseCase
    from src.application.experiments.scenario_config import load_scenario_config

    config = load_scenario_config(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seeds": [args.seed]})
    if args.command == "sweep" and not config.sweep:
        raise ScenarioConfigError("El escenario no define 'sweep'")
    if args.command == "e2e" and config.sweep:
        raise ScenarioConfigError("Usa 'sweep' para escenarios con barrido")

    out = args.out or os.path.join(Config.REPORTS_DIR, f"{config.name}.json")
    if config.kind == "dynamic":
        RunDynamicScenarioUseCase().execute(config, out)
    else:
        RunScenarioUseCase().execute(config, out)


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "recover": cmd_recover,
    "join": cmd_join,
    "score": cmd_score,
    "e2e": cmd_scenario,
    "sweep": cmd_scenario,
}


def _output_folders(args) -> List[str]:
    """Carpeta destino de --out (simulate la recibe tal cual; el resto un fichero)."""
    out = getattr(args, "out", None)
    if not out:
        return []
    folder = out if args.command == "simulate" else os.path.dirname(out)
    return [folder] if folder else []


def main(argv: Optional[List[str]] = None) -> int:
    """Función principal que orquesta la aplicación."""
    args = build_parser().parse_args(argv)

    if args.command in (None, "help"):
        print(HELP_TEXT)
        return 0

    from src.shared.create_proyect_structure import create_project_structure

    create_project_structure(extra_folders=_output_folders(args))
    try:
        COMMANDS[args.command](args)
    except TomographyError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except (FileNotFoundError, IsADirectoryError) as e:
        logger.error(f"❌ No se pudo leer el fichero: {e}")
        return EXIT_DATA_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
