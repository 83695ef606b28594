from .recording import TapRecording, read_recording, write_recording
from .pipeline_service import GesturePipeline, run_pipeline
from .calibration_service import CalibrationResult, calibrate
from .export_service import export_report, read_events_csv, read_trace_csv

__all__ = [
    "TapRecording",
    "read_recording",
    "write_recording",
    "GesturePipeline",
    "run_pipeline",
    "CalibrationResult",
    "calibrate",
    "export_report",
    "read_events_csv",
    "read_trace_csv",
]
