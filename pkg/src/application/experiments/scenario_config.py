"""
Modelos del fichero de escenario (JSON) y su carga validada.
Un escenario fija la red simulada, las semillas explícitas, el umbral ϱ y,
opcionalmente, un barrido cartesiano o un experimento de crecimiento dinámico.
"""

import itertools
import json
from typing import Any, Dict, Iterator, List, Literal, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from src.domain.errors import ScenarioConfigError
from src.framework.config import Config
from src.infrastructure.simulation.simulator_config import SimulatorConfig


class RecoverySettings(BaseModel):
    """ϱ fijo o, si se omite, elegido por la heurística sobre la matriz estimada."""

    model_config = ConfigDict(extra="forbid")

    rho: Optional[float] = Field(None, gt=0)
    rho_floor: float = Field(default_factory=lambda: Config.RHO_FLOOR, gt=0)


class SweepAxis(BaseModel):
    """Eje del barrido: un campo del simulador (o "rho") y sus valores."""

    model_config = ConfigDict(extra="forbid")

    field: str
    values: List[Any] = Field(min_length=1)

    @field_validator("field")
    @classmethod
    def _known_field(cls, value: str) -> str:
        if value != "rho" and value not in SimulatorConfig.model_fields:
            raise ValueError(f"campo de barrido desconocido: {value}")
        if value == "seed":
            raise ValueError("la semilla se fija en 'seeds', no en el barrido")
        return value


class DynamicSettings(BaseModel):
    """Crecimiento por incorporaciones sucesivas sobre un árbol inicial."""

    model_config = ConfigDict(extra="forbid")

    initial_hosts: int = Field(150, ge=3)
    joins: int = Field(0, ge=0)
    join_schedule: Optional[List[str]] = None
    initial_client_fraction: float = Field(0.7, gt=0, le=1)
    leave_every: int = Field(0, ge=0, description="0 = sin salidas")
    score_every: int = Field(1, ge=1)
    oracle: Literal["log", "analytic"] = "log"

    @property
    def n_joins(self) -> int:
        """Incorporaciones del experimento (calendario explícito o `joins`)."""
        if self.join_schedule is not None:
            return len(self.join_schedule)
        return self.joins


class ScenarioConfig(BaseModel):
    """Escenario completo; se incrusta resuelto en cada reporte."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    kind: Literal["static", "dynamic"] = "static"
    seeds: List[int] = Field(min_length=1)
    simulator: SimulatorConfig = Field(default_factory=SimulatorConfig)
    recovery: RecoverySettings = Field(default_factory=RecoverySettings)
    sweep: List[SweepAxis] = Field(default_factory=list)
    dynamic: Optional[DynamicSettings] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioConfig":
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds contiene semillas repetidas")
        if self.kind == "dynamic" and self.dynamic is None:
            raise ValueError("un escenario 'dynamic' necesita la sección 'dynamic'")
        if self.kind == "dynamic" and self.sweep:
            raise ValueError("el barrido solo existe en escenarios estáticos")
        fields = [axis.field for axis in self.sweep]
        if len(set(fields)) != len(fields):
            raise ValueError("sweep repite un mismo campo")
        for point in self.sweep_points():
            try:
                self.point_settings(point)
            except ValidationError as e:
                raise ValueError(f"punto de barrido {point}: {_describe(e)}") from e
        return self

    def sweep_points(self) -> Iterator[Dict[str, Any]]:
        """Producto cartesiano de los ejes, en el orden declarado."""
        names = [axis.field for axis in self.sweep]
        for combo in itertools.product(*(axis.values for axis in self.sweep)):
            yield dict(zip(names, combo))

    def point_settings(self, point: Dict[str, Any]):
        """Simulador y recuperación con los valores de un punto del barrido."""
        overrides = {k: v for k, v in point.items() if k != "rho"}
        simulator = SimulatorConfig.model_validate(
            {**self.simulator.model_dump(), **overrides}
        )
        recovery = self.recovery
        if "rho" in point:
            recovery = RecoverySettings(rho=point["rho"], rho_floor=recovery.rho_floor)
        return simulator, recovery


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<raíz>"
    return f"campo '{location}': {first['msg']}"


def parse_scenario_config(data: Dict[str, Any]) -> ScenarioConfig:
    """Valida un diccionario; los errores nombran el campo problemático."""
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ScenarioConfigError(f"Escenario inválido, {_describe(e)}") from e


def load_scenario_config(config_file: str) -> ScenarioConfig:
    """
    Lee y valida un fichero de escenario JSON.

    Raises:
        ScenarioConfigError: Fichero ausente, JSON inválido o campo incorrecto
    """
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ScenarioConfigError(
            f"No existe el fichero de escenario {config_file}"
        ) from e
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(
            f"JSON inválido en {config_file} (línea {e.lineno}): {e.msg}"
        ) from e
    return parse_scenario_config(data)
