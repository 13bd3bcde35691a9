"""Tests del experimento de crecimiento dinámico."""

import pytest

from src.application.experiments.run_dynamic_scenario_use_case import (
    RunDynamicScenarioUseCase,
    plan_membership,
    run_dynamic_once,
)
from src.application.experiments.scenario_config import (
    DynamicSettings,
    parse_scenario_config,
)
from src.domain.errors import ScenarioConfigError
from src.infrastructure.simulation.simulator_config import SimulatorConfig
from src.infrastructure.simulation.topology_generator import generate_topology


def dynamic_scenario(**dynamic):
    return parse_scenario_config(
        {
            "name": "grow",
            "kind": "dynamic",
            "seeds": [1, 2],
            "simulator": {"n_routers": 6, "n_pairs": 300},
            "recovery": {"rho": 0.5},
            "dynamic": {"initial_hosts": 10, "oracle": "analytic", **dynamic},
        }
    )


@pytest.fixture
def grown_network():
    return generate_topology(
        SimulatorConfig(n_hosts=14, n_routers=6, client_fraction=1.0, seed=1)
    )


class TestPlanMembership:
    def test_sizes(self, grown_network):
        settings = DynamicSettings(initial_hosts=10, joins=4)
        initial, joiners = plan_membership(grown_network, settings, seed=1)
        assert len(initial) == 7
        assert len(joiners) == 4
        assert not set(initial) & set(joiners)
        assert grown_network.source not in initial + joiners

    def test_explicit_schedule(self, grown_network):
        schedule = list(grown_network.clients[:3])
        settings = DynamicSettings(initial_hosts=10, join_schedule=schedule)
        initial, joiners = plan_membership(grown_network, settings, seed=1)
        assert joiners == schedule
        assert not set(initial) & set(schedule)

    def test_schedule_cannot_name_the_source(self, grown_network):
        settings = DynamicSettings(
            initial_hosts=10, join_schedule=[grown_network.source]
        )
        with pytest.raises(ScenarioConfigError):
            plan_membership(grown_network, settings, seed=1)

    def test_schedule_rejects_duplicates_and_unknown_hosts(self, grown_network):
        host = grown_network.clients[0]
        with pytest.raises(ScenarioConfigError):
            plan_membership(
                grown_network,
                DynamicSettings(initial_hosts=10, join_schedule=[host, host]),
                seed=1,
            )
        with pytest.raises(ScenarioConfigError):
            plan_membership(
                grown_network,
                DynamicSettings(initial_hosts=10, join_schedule=["h999"]),
                seed=1,
            )


class TestRunDynamicOnce:
    def test_zero_joins_is_a_single_checkpoint(self):
        curve, tree = run_dynamic_once(dynamic_scenario(joins=0), seed=1)
        assert len(curve) == 1
        assert curve[0]["step"] == 0
        assert curve[0]["n_clients"] == 7
        assert tree["kind"] == "root"

    def test_noiseless_growth_stays_exact(self):
        curve, _ = run_dynamic_once(dynamic_scenario(joins=5), seed=3)
        assert [point["step"] for point in curve] == [0, 1, 2, 3, 4, 5]
        assert all(point["p"] == 1.0 for point in curve)
        assert curve[-1]["n_clients"] == 12

    def test_departures(self):
        curve, _ = run_dynamic_once(
            dynamic_scenario(joins=6, leave_every=2, score_every=3), seed=2
        )
        assert [point["step"] for point in curve] == [0, 3, 6]
        assert curve[-1]["left"] == 3
        assert curve[-1]["n_clients"] == 7 + 6 - 3
        assert all(point["p"] == 1.0 for point in curve)

    def test_log_oracle(self):
        curve, _ = run_dynamic_once(dynamic_scenario(joins=3, oracle="log"), seed=1)
        assert len(curve) == 4
        assert all(0.0 <= point["p"] <= 1.0 for point in curve)


class TestRunDynamicScenarioUseCase:
    def test_report(self, tmp_path):
        out = tmp_path / "grow.json"
        report = RunDynamicScenarioUseCase(workers=1).execute(
            dynamic_scenario(joins=4, score_every=2), str(out)
        )
        assert [run["seed"] for run in report["runs"]] == [1, 2]
        assert [p["step"] for p in report["summary"]["mean_curve"]] == [0, 2, 4]
        assert report["final_tree"]["kind"] == "root"
        assert out.exists()

    def test_requires_dynamic_section(self):
        config = parse_scenario_config({"name": "x", "seeds": [1]})
        with pytest.raises(ScenarioConfigError):
            RunDynamicScenarioUseCase(workers=1).execute(config)
