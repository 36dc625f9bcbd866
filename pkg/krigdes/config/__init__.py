"""配置模块"""

from krigdes.config.settings import (
    AnnealConfig,
    CandidatesConfig,
    IncrDecrConfig,
    ModelConfig,
    OutputConfig,
    SearchSettings,
    Settings,
    StudyConfig,
    TaskConfig,
    TrendConfig,
    get_settings,
    init_settings,
)

__all__ = [
    "AnnealConfig",
    "CandidatesConfig",
    "IncrDecrConfig",
    "ModelConfig",
    "OutputConfig",
    "SearchSettings",
    "Settings",
    "StudyConfig",
    "TaskConfig",
    "TrendConfig",
    "get_settings",
    "init_settings",
]
