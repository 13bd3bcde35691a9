"""
Modelos de datos de medición: log de pares de paquetes, series de retardo
normalizadas y matriz de covarianzas entre receptores.
Los tiempos son enteros en microsegundos; las covarianzas se reportan en ms².
"""

from typing import Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    PrivateAttr,
    field_validator,
    model_validator,
)

from ..errors import InputError

# Marca de paquete perdido en los arrays de llegada
LOST = -1

# µs² → ms²
US2_PER_MS2 = 1_000_000.0


class MeasurementLog(BaseModel):
    """Registro de una sesión: envíos t_f(k) y llegadas t_a(k) por receptor."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    receivers: Tuple[str, ...]
    sender_ts: np.ndarray
    arrivals: Dict[str, np.ndarray]
    interval_mode: Literal["fixed", "timestamped"] = "fixed"
    interval_us: Optional[int] = None
    source: Optional[str] = None

    @field_validator("sender_ts", mode="before")
    @classmethod
    def _as_int_array(cls, value):
        return np.asarray(value, dtype=np.int64)

    @field_validator("arrivals", mode="before")
    @classmethod
    def _as_int_arrays(cls, value):
        return {r: np.asarray(t, dtype=np.int64) for r, t in dict(value).items()}

    @model_validator(mode="after")
    def _check_invariants(self) -> "MeasurementLog":
        """Valida monotonía del emisor, intervalo fijo y causalidad."""
        sender = np.asarray(self.sender_ts)
        if sender.ndim != 1 or sender.size == 0:
            raise InputError("sender_ts debe ser un vector no vacío")
        if np.any(np.diff(sender) <= 0):
            raise InputError("sender_ts debe ser estrictamente creciente")
        if self.interval_mode == "fixed":
            if not self.interval_us or self.interval_us <= 0:
                raise InputError("El modo fijo requiere interval_us > 0")
            expected = sender[0] + np.arange(sender.size) * self.interval_us
            if not np.array_equal(sender, expected):
                raise InputError("En modo fijo t_f(k) - t_f(0) debe ser k·δ")
        if set(self.arrivals) != set(self.receivers):
            raise InputError("arrivals no cubre exactamente los receptores")
        for receiver, times in self.arrivals.items():
            if times.shape != sender.shape:
                raise InputError(f"Longitud de llegadas incorrecta para {receiver}")
            present = times != LOST
            if np.any(times[present] < sender[present]):
                k = int(np.argmax(present & (times < sender)))
                raise InputError(
                    f"Causalidad violada: {receiver} llega antes del envío en k={k}"
                )
        return self

    @property
    def n_pairs(self) -> int:
        """Número de índices k enviados."""
        return int(self.sender_ts.size)

    def present(self, receiver: str) -> np.ndarray:
        """Máscara booleana de pares recibidos por `receiver`."""
        if receiver not in self.arrivals:
            raise InputError(f"Receptor desconocido: {receiver}")
        return self.arrivals[receiver] != LOST

    def arrival(self, receiver: str, k: int) -> Optional[int]:
        """t_a(k) en µs, o None si el paquete se perdió."""
        value = int(self.arrivals[receiver][k])
        return None if value == LOST else value

    def received_count(self, receiver: str) -> int:
        """Paquetes recibidos por `receiver`."""
        return int(self.present(receiver).sum())


class DelaySeries(BaseModel):
    """Serie δ'(k) de un receptor sobre un conjunto de índices alineado."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    receiver: str
    indices: np.ndarray
    values: np.ndarray

    @field_validator("indices", mode="before")
    @classmethod
    def _as_index_array(cls, value):
        return np.asarray(value, dtype=np.int64)

    @field_validator("values", mode="before")
    @classmethod
    def _as_value_array(cls, value):
        return np.asarray(value)

    @model_validator(mode="after")
    def _check_shape(self) -> "DelaySeries":
        if self.indices.shape != self.values.shape:
            raise InputError("indices y values deben tener la misma longitud")
        return self

    def __len__(self) -> int:
        return int(self.values.size)


class CovarianceMatrix(BaseModel):
    """Matriz simétrica de σ²_{a,b} (ms²) sobre receptores ordenados."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    receivers: Tuple[str, ...]
    values: np.ndarray
    _index: Dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("values", mode="before")
    @classmethod
    def _as_float_matrix(cls, value):
        return np.asarray(value, dtype=np.float64)

    @model_validator(mode="after")
    def _check_symmetry(self) -> "CovarianceMatrix":
        n = len(self.receivers)
        if self.values.shape != (n, n):
            raise InputError(f"La matriz debe ser {n}x{n}")
        if not np.array_equal(self.values, self.values.T):
            raise InputError("La matriz de covarianzas no es simétrica")
        if np.any(np.diag(self.values) < 0):
            raise InputError("La diagonal (varianzas) no puede ser negativa")
        return self

    @property
    def index(self) -> Dict[str, int]:
        """Posición de cada receptor en la matriz."""
        if not self._index:
            self._index = {r: i for i, r in enumerate(self.receivers)}
        return self._index

    def get(self, a: str, b: str) -> float:
        """σ²_{a,b} en ms²."""
        index = self.index
        if a not in index or b not in index:
            missing = a if a not in index else b
            raise InputError(f"Receptor ausente en la matriz: {missing}")
        return float(self.values[index[a], index[b]])

    def submatrix(self, receivers) -> "CovarianceMatrix":
        """Restringe la matriz a un subconjunto ordenado de receptores."""
        index = self.index
        missing = [r for r in receivers if r not in index]
        if missing:
            raise InputError(f"Receptores ausentes en la matriz: {missing}")
        idx = [index[r] for r in receivers]
        return CovarianceMatrix(
            receivers=tuple(receivers), values=self.values[np.ix_(idx, idx)].copy()
        )

    def scaled(self, factor: float) -> "CovarianceMatrix":
        """Misma matriz multiplicada por `factor`."""
        return CovarianceMatrix(receivers=self.receivers, values=self.values * factor)

    def off_diagonal(self) -> np.ndarray:
        """Valores del triángulo superior estricto."""
        return self.values[np.triu_indices(len(self.receivers), k=1)]
