"""Tests de lectura y escritura de logs NDJSON."""

import json

import numpy as np
import pytest

from src.domain.errors import LogFormatError
from src.domain.measurement.measurement_model import LOST
from src.infrastructure.simulation.session_simulator import simulate_session
from src.infrastructure.simulation.simulator_config import SimulatorConfig
from src.infrastructure.storage.measurement_log_io import export_log, import_log


def write_lines(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record if isinstance(record, str) else json.dumps(record))
            f.write("\n")
    return str(path)


def send(k, ts):
    return {"type": "send", "k": k, "ts_us": ts}


def recv(receiver, k, ts):
    return {"type": "recv", "receiver": receiver, "k": k, "ts_us": ts}


class TestRoundTrip:
    def test_simulated_log_survives_export(self, tmp_path, build_network):
        edges = [("src", "core-a", 1.0), ("core-a", "ha", 1.0), ("core-a", "hb", 0.5)]
        net = build_network(edges, loss={"hb": 0.2})
        log = simulate_session(net, SimulatorConfig(n_pairs=300, seed=5))
        path = export_log(log, str(tmp_path / "logs" / "session.ndjson"))

        loaded = import_log(path)
        assert loaded.receivers == log.receivers
        assert loaded.source == "src"
        assert loaded.interval_mode == "fixed"
        assert loaded.interval_us == 30_000
        assert np.array_equal(loaded.sender_ts, log.sender_ts)
        for receiver in log.receivers:
            assert np.array_equal(loaded.arrivals[receiver], log.arrivals[receiver])
        assert np.any(loaded.arrivals["hb"] == LOST)

    def test_header_comes_first(self, tmp_path, fig2_network):
        log = simulate_session(fig2_network, SimulatorConfig(n_pairs=5))
        path = export_log(log, str(tmp_path / "s.ndjson"))
        with open(path, encoding="utf-8") as f:
            header = json.loads(f.readline())
        assert header["type"] == "session"
        assert header["receivers"] == ["ha", "hb", "hc"]


class TestImportLog:
    def test_without_header_infers_fixed_interval(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson",
            [
                send(0, 0),
                recv("b", 0, 15),
                recv("a", 0, 12),
                send(1, 30),
                recv("a", 1, 40),
            ],
        )
        log = import_log(path)
        assert log.receivers == ("b", "a")
        assert log.interval_mode == "fixed"
        assert log.interval_us == 30
        assert log.arrival("b", 1) is None
        assert log.source is None

    def test_uneven_sends_are_timestamped(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson",
            [send(0, 0), send(1, 40), send(2, 70), recv("a", 0, 10), recv("a", 2, 95)],
        )
        log = import_log(path)
        assert log.interval_mode == "timestamped"
        assert log.received_count("a") == 2

    def test_blank_lines_are_ignored(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 0), "", send(1, 5), recv("a", 1, 9)]
        )
        assert import_log(path).n_pairs == 2

    def test_causality_violation_names_line(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 100), send(1, 130), recv("a", 1, 120)]
        )
        with pytest.raises(LogFormatError) as info:
            import_log(path)
        assert info.value.line_number == 3

    def test_duplicate_send(self, tmp_path):
        path = write_lines(tmp_path / "a.ndjson", [send(0, 0), send(0, 10)])
        with pytest.raises(LogFormatError) as info:
            import_log(path)
        assert info.value.line_number == 2

    def test_duplicate_arrival(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 0), recv("a", 0, 5), recv("a", 0, 6)]
        )
        with pytest.raises(LogFormatError, match="duplicada") as info:
            import_log(path)
        assert info.value.line_number == 3

    def test_malformed_json(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 0), recv("a", 0, 5), "{oops"]
        )
        with pytest.raises(LogFormatError) as info:
            import_log(path)
        assert info.value.line_number == 3

    @pytest.mark.parametrize(
        "record",
        [
            {"type": "send", "k": -1, "ts_us": 0},
            {"type": "send", "k": True, "ts_us": 0},
            {"type": "send", "k": 0, "ts_us": 1.5},
            {"type": "recv", "k": 0, "ts_us": 3},
            {"type": "ping", "k": 0},
            {"k": 0, "ts_us": 0},
        ],
    )
    def test_invalid_records(self, tmp_path, record):
        path = write_lines(tmp_path / "a.ndjson", [send(0, 0), record])
        with pytest.raises(LogFormatError) as info:
            import_log(path)
        assert info.value.line_number == 2

    def test_late_header(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson",
            [send(0, 0), {"type": "session", "interval_mode": "fixed"}],
        )
        with pytest.raises(LogFormatError, match="session"):
            import_log(path)

    def test_missing_send(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 0), send(2, 60), recv("a", 0, 1)]
        )
        with pytest.raises(LogFormatError, match="Faltan"):
            import_log(path)

    def test_non_increasing_sends(self, tmp_path):
        path = write_lines(
            tmp_path / "a.ndjson", [send(0, 50), send(1, 50), recv("a", 0, 60)]
        )
        with pytest.raises(LogFormatError) as info:
            import_log(path)
        assert info.value.line_number == 2

    def test_header_interval_must_match_sends(self, tmp_path):
        header = {"type": "session", "interval_mode": "fixed", "interval_us": 30}
        path = write_lines(
            tmp_path / "a.ndjson", [header, send(0, 0), send(1, 45), recv("a", 0, 5)]
        )
        with pytest.raises(LogFormatError):
            import_log(path)

    def test_empty_file(self, tmp_path):
        path = write_lines(tmp_path / "a.ndjson", [])
        with pytest.raises(LogFormatError):
            import_log(path)
