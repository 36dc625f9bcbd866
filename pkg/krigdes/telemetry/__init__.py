"""可观测模块"""

from krigdes.telemetry.logger import ProgressLogger, RestartLog, SearchTelemetry

__all__ = ["ProgressLogger", "RestartLog", "SearchTelemetry"]
