from typing import Dict, List
from pathlib import Path
import logging

import pandas as pd

from gesture_radar.schemas.report import DetectionEventRow, RunReport, SliderTraceRow

logger = logging.getLogger(__name__)

TRACE_FILE = "trace.csv"
EVENTS_FILE = "events.csv"
TRACE_COLUMNS = list(SliderTraceRow.model_fields)
EVENT_COLUMNS = list(DetectionEventRow.model_fields)


def trace_frame(report: RunReport) -> pd.DataFrame:
    rows = [row.model_dump() for row in report.trace]
    # Int64 keeps "no tap" as an empty cell instead of turning the column into floats
    return pd.DataFrame(rows, columns=TRACE_COLUMNS).astype({"tap": "Int64"})


def events_frame(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in report.events], columns=EVENT_COLUMNS)


def export_report(report: RunReport, out_dir) -> Dict[str, Path]:
    """Write trace.csv and events.csv (header-only when empty) into out_dir"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"trace": out_dir / TRACE_FILE, "events": out_dir / EVENTS_FILE}
    trace_frame(report).to_csv(paths["trace"], index=False)
    events_frame(report).to_csv(paths["events"], index=False)
    logger.info(f"Exported {len(report.trace)} trace rows and {len(report.events)} events to {out_dir}")
    return paths


def read_trace_csv(path) -> List[SliderTraceRow]:
    df = pd.read_csv(path, dtype={"tap": "Int64"})
    return [
        SliderTraceRow(
            time=row.time,
            level=row.level,
            enabled=bool(row.enabled),
            present=bool(row.present),
            tap=None if pd.isna(row.tap) else int(row.tap),
        )
        for row in df.itertuples(index=False)
    ]


def read_events_csv(path) -> List[DetectionEventRow]:
    df = pd.read_csv(path)
    return [DetectionEventRow(**record) for record in df.to_dict(orient="records")]
