"""
Estimación de correlación de retardos (DCE).
Convierte las marcas de llegada de cada receptor en la serie normalizada
δ'(k) = (t_a(k) - t_a(k0)) - (t_f(k) - t_f(k0)) y estima la covarianza muestral
entre pares de receptores. Los desfases constantes de reloj de cada receptor
se cancelan, por lo que no hace falta sincronización.
"""

from typing import Dict, Iterable, List, Protocol, Sequence, Tuple

import numpy as np

from ..errors import (
    InputError,
    InsufficientDataError,
    InvariantViolationError,
    MeasurementGapError,
)
from .measurement_model import (
    LOST,
    US2_PER_MS2,
    CovarianceMatrix,
    DelaySeries,
    MeasurementLog,
)

# Cota para sumar productos enteros en int64 sin desbordar
_INT64_SAFE = 2**62


class CovarianceOracle(Protocol):
    """Proveedor de σ²_{x,y} (ms²) para cualquier par de hojas."""

    def __call__(self, a: str, b: str) -> float: ...


def align_pairs(log: MeasurementLog, receivers: Iterable[str]) -> np.ndarray:
    """Índices k en los que todos los receptores pedidos tienen llegada."""
    receivers = list(receivers)
    unknown = [r for r in receivers if r not in log.arrivals]
    if unknown:
        raise InputError(f"Receptores fuera del log: {unknown}")
    mask = np.ones(log.n_pairs, dtype=bool)
    for receiver in receivers:
        mask &= log.present(receiver)
    aligned = np.flatnonzero(mask)
    if aligned.size < 2:
        raise InsufficientDataError(
            f"Solo {aligned.size} pares comunes para {sorted(receivers)}"
        )
    return aligned


def normalize_series(
    log: MeasurementLog, receiver: str, aligned: np.ndarray
) -> DelaySeries:
    """
    Serie δ'(k) sobre los índices alineados; el primero actúa como par 0.

    En modo fijo el avance del emisor es (k - k0)·δ; en modo con marcas de
    tiempo se lee de sender_ts.
    """
    aligned = np.asarray(aligned, dtype=np.int64)
    times = log.arrivals[receiver][aligned]
    if np.any(times == LOST):
        raise InvariantViolationError(
            f"{receiver} no tiene llegada en todos los índices alineados"
        )
    k0 = aligned[0]
    delta_a = times - times[0]
    if log.interval_mode == "fixed":
        delta_f = (aligned - k0) * np.int64(log.interval_us)
    else:
        delta_f = log.sender_ts[aligned] - log.sender_ts[k0]
    return DelaySeries(receiver=receiver, indices=aligned, values=delta_a - delta_f)


def estimate_covariance(sa: DelaySeries, sb: DelaySeries) -> float:
    """
    Covarianza muestral (divisor n - 1) entre dos series alineadas, en ms².

    Las series enteras se suman de forma exacta, así que desplazarlas por una
    constante no cambia el resultado ni en el último bit. No se recorta a cero.
    """
    if not np.array_equal(sa.indices, sb.indices):
        raise InputError(
            f"Las series de {sa.receiver} y {sb.receiver} no están alineadas"
        )
    n = len(sa)
    if n < 2:
        raise InsufficientDataError(
            f"Se necesitan al menos 2 muestras ({sa.receiver}, {sb.receiver})"
        )
    a, b = sa.values, sb.values
    if np.issubdtype(a.dtype, np.integer) and np.issubdtype(b.dtype, np.integer):
        return _integer_covariance(a.astype(np.int64), b.astype(np.int64))
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    da = a - a.mean()
    db = b - b.mean()
    return float(np.sum(da * db)) / (n - 1) / US2_PER_MS2


def _integer_covariance(a: np.ndarray, b: np.ndarray) -> float:
    """n·Σab - Σa·Σb con enteros de Python; una sola división final."""
    n = a.size
    a = a - a[0]
    b = b - b[0]
    bound = int(np.abs(a).max()) * int(np.abs(b).max()) * n
    if bound < _INT64_SAFE:
        sum_ab = int(np.dot(a, b))
    else:
        sum_ab = sum(int(x) * int(y) for x, y in zip(a, b))
    numerator = n * sum_ab - int(a.sum()) * int(b.sum())
    return numerator / (n * (n - 1) * int(US2_PER_MS2))


def correlation_coefficient(sa: DelaySeries, sb: DelaySeries) -> float:
    """Coeficiente normalizado σ_ab / (σ_a σ_b); 0 si alguna serie es constante."""
    cov = estimate_covariance(sa, sb)
    var_a = estimate_covariance(sa, sa)
    var_b = estimate_covariance(sb, sb)
    if var_a <= 0 or var_b <= 0:
        return 0.0
    return cov / float(np.sqrt(var_a * var_b))


def pair_covariance(log: MeasurementLog, a: str, b: str) -> float:
    """σ²_{a,b} con alineación propia del par (máximo de datos por par)."""
    try:
        aligned = align_pairs(log, {a, b})
    except InsufficientDataError as exc:
        raise InsufficientDataError(f"Par ({a}, {b}): {exc}") from exc
    return estimate_covariance(
        normalize_series(log, a, aligned), normalize_series(log, b, aligned)
    )


def build_covariance_matrix(
    log: MeasurementLog, receivers: Sequence[str]
) -> CovarianceMatrix:
    """Matriz simétrica de covarianzas; la diagonal es la varianza de cada serie."""
    receivers = list(receivers)
    if len(receivers) < 2:
        raise InputError("Se necesitan al menos 2 receptores")
    if len(set(receivers)) != len(receivers):
        raise InputError("Receptores duplicados")
    unknown = [r for r in receivers if r not in log.arrivals]
    if unknown:
        raise InputError(f"Receptores fuera del log: {unknown}")

    size = len(receivers)
    values = np.zeros((size, size), dtype=np.float64)
    complete = all(log.present(r).all() for r in receivers)

    if complete:
        aligned = np.arange(log.n_pairs)
        if aligned.size < 2:
            raise InsufficientDataError("El log tiene menos de 2 pares")
        series = [normalize_series(log, r, aligned) for r in receivers]
        for i in range(size):
            for j in range(i, size):
                values[i, j] = values[j, i] = estimate_covariance(
                    series[i], series[j]
                )
    else:
        for i in range(size):
            for j in range(i, size):
                values[i, j] = values[j, i] = pair_covariance(
                    log, receivers[i], receivers[j]
                )
    return CovarianceMatrix(receivers=tuple(receivers), values=values)


class LogCovarianceOracle:
    """Covarianzas bajo demanda a partir de un log, con caché por par."""

    def __init__(self, log: MeasurementLog):
        """Guarda el log; las covarianzas se calculan al pedirlas."""
        self.log = log
        self._cache: Dict[Tuple[str, str], float] = {}

    def __call__(self, a: str, b: str) -> float:
        """σ²_{a,b} estimada con los índices en que ambos recibieron."""
        key = (a, b) if a <= b else (b, a)
        if key not in self._cache:
            if a not in self.log.arrivals or b not in self.log.arrivals:
                raise MeasurementGapError(a, b, "receptor fuera del log")
            try:
                self._cache[key] = pair_covariance(self.log, a, b)
            except InsufficientDataError as exc:
                raise MeasurementGapError(a, b, str(exc)) from exc
        return self._cache[key]

    def matrix(self, receivers: List[str]) -> CovarianceMatrix:
        """Matriz completa sobre los receptores pedidos."""
        return build_covariance_matrix(self.log, receivers)


class MatrixCovarianceOracle:
    """Adaptador de una CovarianceMatrix al protocolo de oráculo."""

    def __init__(self, cov: CovarianceMatrix):
        """Envuelve una matriz ya estimada."""
        self.cov = cov

    def __call__(self, a: str, b: str) -> float:
        """Entrada (a, b) de la matriz."""
        try:
            return self.cov.get(a, b)
        except InputError as exc:
            raise MeasurementGapError(a, b, str(exc)) from exc

    def matrix(self, receivers: List[str]) -> CovarianceMatrix:
        """Submatriz sobre los receptores pedidos."""
        return self.cov.submatrix(receivers)
