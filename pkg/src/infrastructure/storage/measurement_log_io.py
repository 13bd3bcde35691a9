"""
Lectura y escritura de logs de medición en NDJSON.

Formato (una línea por registro, tiempos enteros en µs):
    {"type": "session", "interval_mode": "fixed", "interval_us": 30000,
     "source": "h000", "receivers": ["h001", ...]}     (opcional, primera línea)
    {"type": "send", "k": 0, "ts_us": 0}
    {"type": "recv", "receiver": "h001", "k": 0, "ts_us": 15230}

Sin cabecera, los receptores son los que aparecen en algún "recv" y el modo se
deduce: fijo si los envíos están equiespaciados, con marcas de tiempo si no.
Una llegada ausente es una pérdida.
"""

import json
import os
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from src.domain.errors import InputError, LogFormatError
from src.domain.measurement.measurement_model import LOST, MeasurementLog


def _parse_line(raw: str, line_number: int) -> Optional[dict]:
    text = raw.strip()
    if not text:
        return None
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise LogFormatError(f"JSON inválido ({e.msg})", line_number) from e
    if not isinstance(record, dict) or "type" not in record:
        raise LogFormatError("Registro sin campo 'type'", line_number)
    return record


def _int_field(record: dict, name: str, line_number: int) -> int:
    value = record.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise LogFormatError(f"'{name}' debe ser un entero", line_number)
    if value < 0:
        raise LogFormatError(f"'{name}' no puede ser negativo", line_number)
    return value


def import_log(log_file: str) -> MeasurementLog:
    """
    Lee y valida un log NDJSON.

    Raises:
        LogFormatError: Línea malformada, k duplicado, (receptor, k) duplicado,
            envíos no crecientes o llegada anterior al envío (con número de línea)
    """
    header: Optional[dict] = None
    sends: Dict[int, Tuple[int, int]] = {}
    recvs: Dict[Tuple[str, int], Tuple[int, int]] = {}
    receiver_order: List[str] = []

    with open(log_file, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, 1):
            record = _parse_line(raw, line_number)
            if record is None:
                continue
            kind = record["type"]
            if kind == "session":
                if header is not None or sends or recvs:
                    raise LogFormatError(
                        "La cabecera 'session' debe ser el primer registro",
                        line_number,
                    )
                header = record
            elif kind == "send":
                k = _int_field(record, "k", line_number)
                ts = _int_field(record, "ts_us", line_number)
                if k in sends:
                    raise LogFormatError(f"Envío duplicado para k={k}", line_number)
                sends[k] = (ts, line_number)
            elif kind == "recv":
                receiver = record.get("receiver")
                if not isinstance(receiver, str) or not receiver:
                    raise LogFormatError("'receiver' debe ser un texto", line_number)
                k = _int_field(record, "k", line_number)
                ts = _int_field(record, "ts_us", line_number)
                if (receiver, k) in recvs:
                    raise LogFormatError(
                        f"Llegada duplicada ({receiver}, k={k})", line_number
                    )
                if receiver not in receiver_order:
                    receiver_order.append(receiver)
                recvs[(receiver, k)] = (ts, line_number)
            else:
                raise LogFormatError(
                    f"Tipo de registro desconocido: {kind}", line_number
                )

    if not sends:
        raise LogFormatError("El log no contiene registros 'send'")
    n_pairs = max(sends) + 1
    missing = sorted(set(range(n_pairs)) - set(sends))
    if missing:
        raise LogFormatError(f"Faltan envíos para k={missing[:5]}")

    sender = np.array([sends[k][0] for k in range(n_pairs)], dtype=np.int64)
    for k in range(1, n_pairs):
        if sender[k] <= sender[k - 1]:
            raise LogFormatError(f"t_f no crece estrictamente en k={k}", sends[k][1])

    receivers = list(header.get("receivers", [])) if header else []
    for receiver in receiver_order:
        if receiver not in receivers:
            receivers.append(receiver)
    if not receivers:
        raise LogFormatError("El log no contiene receptores")

    arrivals = {r: np.full(n_pairs, LOST, dtype=np.int64) for r in receivers}
    for (receiver, k), (ts, line_number) in recvs.items():
        if k not in sends:
            raise LogFormatError(f"Llegada para k={k} sin envío", line_number)
        if ts < sender[k]:
            raise LogFormatError(
                f"Causalidad violada: {receiver} llega antes del envío en k={k}",
                line_number,
            )
        arrivals[receiver][k] = ts

    mode, interval = _interval_of(header, sender)
    try:
        return MeasurementLog(
            receivers=tuple(receivers),
            sender_ts=sender,
            arrivals=arrivals,
            interval_mode=mode,
            interval_us=interval,
            source=header.get("source") if header else None,
        )
    except (InputError, ValidationError) as e:
        raise LogFormatError(str(e)) from e


def _interval_of(
    header: Optional[dict], sender: np.ndarray
) -> Tuple[str, Optional[int]]:
    if header and "interval_mode" in header:
        return header["interval_mode"], header.get("interval_us")
    gaps = np.diff(sender)
    if gaps.size and np.all(gaps == gaps[0]):
        return "fixed", int(gaps[0])
    return "timestamped", None


def export_log(log: MeasurementLog, log_file: str) -> str:
    """Escribe el log en NDJSON con cabecera y devuelve la ruta."""
    directory = os.path.dirname(log_file)
    if directory:
        os.makedirs(directory, exist_ok=True)

    header = {
        "type": "session",
        "interval_mode": log.interval_mode,
        "interval_us": log.interval_us,
        "receivers": list(log.receivers),
    }
    if log.source is not None:
        header["source"] = log.source
    with open(log_file, "w", encoding="utf-8") as f:
        f.write(json.dumps(header) + "\n")
        for k in range(log.n_pairs):
            send = {"type": "send", "k": k, "ts_us": int(log.sender_ts[k])}
            f.write(json.dumps(send) + "\n")
            for receiver in log.receivers:
                ts = int(log.arrivals[receiver][k])
                if ts == LOST:
                    continue
                record = {"type": "recv", "receiver": receiver, "k": k, "ts_us": ts}
                f.write(json.dumps(record) + "\n")
    return log_file
