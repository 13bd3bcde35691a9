"""
Simulador de sesiones de pares de paquetes.
Para cada índice k el emisor lanza una ráfaga con un paquete por cliente; el
jitter de cada enlace se sortea una vez por k y lo comparten todos los clientes
cuyo camino atraviesa ese enlace. Eso es lo que genera covarianza en los tramos
compartidos.
"""

import numpy as np

from src.domain.measurement.measurement_model import LOST, MeasurementLog

from .simulator_config import SimulatorConfig
from .topology_generator import SimulatedNetwork

_US_PER_MS = 1_000.0


def _sender_schedule(config: SimulatorConfig, rng: np.random.Generator) -> np.ndarray:
    """t_f(k): k·δ en modo fijo, intervalos uniformes en [δ/2, 3δ/2] si no."""
    n = config.n_pairs
    delta = config.pair_interval_us
    if config.interval_mode == "fixed":
        return np.arange(n, dtype=np.int64) * delta
    low = max(1, delta // 2)
    high = max(low, delta + delta // 2)
    gaps = rng.integers(low, high + 1, size=n - 1)
    return np.concatenate([[0], np.cumsum(gaps)]).astype(np.int64)


def _link_jitter(
    std_us: np.ndarray,
    sender: np.ndarray,
    tau_us: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Jitter gaussiano (n, L); con τ > 0 sigue un AR(1) de varianza estacionaria."""
    noise = rng.standard_normal((sender.size, std_us.size))
    if tau_us > 0 and sender.size > 1:
        phi = np.exp(-np.diff(sender) / tau_us)
        innovation = np.sqrt(1.0 - phi**2)
        for k in range(1, sender.size):
            noise[k] = phi[k - 1] * noise[k - 1] + innovation[k - 1] * noise[k]
    return noise * std_us


def simulate_session(net: SimulatedNetwork, config: SimulatorConfig) -> MeasurementLog:
    """
    Genera el log de una sesión de n_pairs ráfagas sobre la red de referencia.

    Args:
        net: Red con el árbol de verdad y los parámetros de enlace
        config: Parámetros de la sesión (δ, tamaño de paquete, semilla...)

    Returns:
        MeasurementLog: Envíos y llegadas enteros en µs; pérdidas como LOST
    """
    rng = np.random.default_rng([config.seed, 1])
    clients = list(net.clients)
    links = net.links()
    column = {link: idx for idx, link in enumerate(links)}
    params = [net.link_params[link] for link in links]

    incidence = np.zeros((len(clients), len(links)))
    for row, client in enumerate(clients):
        for link in net.truth.path_links(client):
            incidence[row, column[link]] = 1.0

    base = np.array([p.base_delay_us for p in params], dtype=np.float64)
    fixed_link = base + config.transmission_us
    std_us = np.sqrt([p.delay_var_ms2 for p in params]) * _US_PER_MS
    decouple_var = incidence @ np.array([p.decouple_var_ms2 for p in params])
    decouple_std = np.sqrt(decouple_var) * _US_PER_MS
    survival = np.prod(
        np.where(incidence > 0, 1.0 - np.array([p.loss_prob for p in params]), 1.0),
        axis=1,
    )

    sender = _sender_schedule(config, rng)
    jitter = _link_jitter(std_us, sender, config.jitter_correlation_us, rng)
    # Retardo de enlace truncado en cero
    jitter = np.maximum(jitter, -fixed_link)
    delays = (fixed_link + jitter) @ incidence.T
    if np.any(decouple_std > 0):
        delays += rng.standard_normal(delays.shape) * decouple_std
    delays = np.maximum(delays, 0.0)

    offsets = np.zeros(len(clients), dtype=np.int64)
    if config.clock_offset_max_us > 0:
        offsets = rng.integers(0, config.clock_offset_max_us + 1, size=len(clients))

    arrivals = sender[:, None] + np.rint(delays).astype(np.int64) + offsets
    lost = rng.random(arrivals.shape) >= survival
    arrivals[lost] = LOST

    return MeasurementLog(
        receivers=tuple(clients),
        sender_ts=sender,
        arrivals={client: arrivals[:, idx] for idx, client in enumerate(clients)},
        interval_mode=config.interval_mode,
        interval_us=config.pair_interval_us,
        source=net.source,
    )
