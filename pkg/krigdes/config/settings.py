"""运行配置定义"""

import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import json5

from krigdes.utils.errors import ConfigError

logger = logging.getLogger(__name__)

TASKS = ("optimize", "increment", "reduce", "efficiency", "study", "variance-map", "validate")
CRITERIA = ("gv", "g", "v", "mes")
METHODS = ("anneal", "exhaustive", "incr_decr")


@dataclass
class CandidatesConfig:
    """候选集合：规则格点或 CSV，二选一"""
    grid_n: Optional[int] = None        # 每轴点数
    grid_d: int = 2
    grid_spacing: float = 1.0
    csv_path: str = ""
    coord_columns: Optional[List[str]] = None
    id_column: str = "id"
    max_points: int = 100_000


@dataclass
class ModelConfig:
    """Matérn 协方差模型"""
    sigma2: float = 1.0
    phi: float = 1.0
    kappa: float = 0.5
    nugget: float = 0.0
    aniso_angle: Optional[float] = None  # 弧度
    aniso_ratio: Optional[float] = None  # >= 1


@dataclass
class TrendConfig:
    """趋势与克里金类型"""
    variant: str = "ordinary"           # simple / ordinary / universal
    basis: str = "constant"             # constant / linear / quadratic / monomials / external_drift
    monomials: Optional[List[List[int]]] = None
    covariate: str = ""                 # external_drift 使用的协变量列名
    known_mean: Union[float, List[float]] = 0.0  # simple 克里金的已知均值：常数或按候选点排列的向量


@dataclass
class TaskConfig:
    """任务参数"""
    name: str = "optimize"
    criterion: str = "gv"
    method: str = "anneal"              # anneal / exhaustive / incr_decr
    k: Optional[int] = None
    l: Optional[int] = None
    design: Optional[List[int]] = None  # 候选点 id
    designs: Optional[Dict[str, List[int]]] = None
    removals: Optional[int] = None      # reduce：移除点数，缺省一直减到 k_min
    k_min: Optional[int] = None         # reduce：最小设计大小，缺省 p+1


@dataclass
class AnnealConfig:
    """模拟退火参数"""
    t0: Optional[float] = None          # 缺省由随机交换的准则差估计
    cooling: float = 0.9
    moves_per_temperature: int = 50
    spread_samples: int = 50
    patience: int = 1                   # 连续多少个温度平台无改进即停止
    polish: bool = True                 # 结束后做确定性交换精修


@dataclass
class IncrDecrConfig:
    """增量-减量迭代参数"""
    k_start: Optional[int] = None       # 缺省为 p
    l: Optional[int] = None             # 增量阶段每步的点数，缺省 k_target - k_start（一次到位）
    k1: Optional[int] = None            # 减量后保留点数，缺省 max(p, k_target - 2)
    rounds: int = 20
    random_subsets: int = 50            # 组合数超过上限时随机抽取的保留子集数


@dataclass
class SearchSettings:
    """搜索参数"""
    seed: int = 0
    max_outer_iters: int = 500
    restarts: int = 4
    neighborhood_radius: float = 2.0    # 格距
    nearest_r: int = 8                  # 不规则集合的近邻数
    workers: int = 1
    exhaustive_cap: int = 200_000
    increment_cap: int = 10_000         # 增量选择穷举的组合数上限
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    incr_decr: IncrDecrConfig = field(default_factory=IncrDecrConfig)


@dataclass
class StudyConfig:
    """(κ, φ) 参数研究"""
    kappas: List[float] = field(default_factory=lambda: [0.25, 0.5, 1.0, 1.5, 2.0, 2.5])
    phis: List[float] = field(default_factory=lambda: [0.1, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0])
    design_size: int = 9
    criteria: List[str] = field(default_factory=lambda: ["gv", "g", "v"])
    scale_unit_gv: bool = False
    incremental_start: str = "plausible"  # plausible / optimal
    incremental_k_start: int = 6
    incremental_l: int = 6
    max_combos: Optional[int] = None


@dataclass
class OutputConfig:
    """输出路径"""
    out_dir: str = "output"
    result_name: str = "result.json"
    variance_map: bool = False
    progress_log: bool = True


_SECTIONS = {
    "candidates": CandidatesConfig,
    "model": ModelConfig,
    "trend": TrendConfig,
    "task": TaskConfig,
    "search": SearchSettings,
    "study": StudyConfig,
    "output": OutputConfig,
}


def _build_section(name: str, cls, data: Any):
    if not isinstance(data, dict):
        raise ConfigError(f"配置节 [{name}] 必须是对象，实际为 {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"配置节 [{name}] 中有未知字段: {unknown}（可用: {sorted(known)}）")
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"配置节 [{name}] 解析失败: {e}") from e


@dataclass
class Settings:
    """全局配置"""
    candidates: CandidatesConfig = field(default_factory=CandidatesConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    trend: TrendConfig = field(default_factory=TrendConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    search: SearchSettings = field(default_factory=SearchSettings)
    study: StudyConfig = field(default_factory=StudyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    config_path: Optional[Path] = None

    @classmethod
    def from_dict(cls, config_data: Dict[str, Any], config_path: Optional[Path] = None) -> "Settings":
        """从字典构造；未知节、未知字段都报 ConfigError"""
        if not isinstance(config_data, dict):
            raise ConfigError("配置文件顶层必须是对象")
        unknown = sorted(set(config_data) - set(_SECTIONS))
        if unknown:
            raise ConfigError(f"未知的配置节: {unknown}（可用: {sorted(_SECTIONS)}）")

        settings = cls(config_path=config_path)
        for name, section_cls in _SECTIONS.items():
            if name not in config_data:
                continue
            data = dict(config_data[name]) if isinstance(config_data[name], dict) else config_data[name]
            if name == "search" and isinstance(data, dict):
                anneal = data.pop("anneal", {})
                incr_decr = data.pop("incr_decr", {})
                section = _build_section(name, section_cls, data)
                section.anneal = _build_section("search.anneal", AnnealConfig, anneal)
                section.incr_decr = _build_section("search.incr_decr", IncrDecrConfig, incr_decr)
            else:
                section = _build_section(name, section_cls, data)
            setattr(settings, name, section)
        return settings

    @classmethod
    def from_file(cls, config_path: str) -> "Settings":
        """从配置文件加载（JSON，允许 JSON5 注释）"""
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"配置文件不存在: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                config_data = json5.load(f)
        except ValueError as e:
            raise ConfigError(f"配置文件解析失败 {path}: {e}") from e
        settings = cls.from_dict(config_data, config_path=path)
        logger.info(f"Loaded config from {path} (task={settings.task.name})")
        return settings

    def resolve_path(self, value: str) -> Path:
        """相对路径按配置文件所在目录解析"""
        path = Path(value)
        if path.is_absolute() or self.config_path is None:
            return path
        candidate = self.config_path.parent / path
        return candidate if candidate.exists() else path

    def validate(self) -> "Settings":
        """检查任务所需字段与取值范围"""
        cand = self.candidates
        has_grid = cand.grid_n is not None
        has_csv = bool(cand.csv_path)
        if self.task.name not in ("validate", "study") and has_grid == has_csv:
            raise ConfigError("[candidates] 必须且只能指定 grid_n 或 csv_path 之一")
        if has_grid and (not isinstance(cand.grid_n, int) or cand.grid_n < 2):
            raise ConfigError(f"[candidates] grid_n 必须是 >= 2 的整数，当前为 {cand.grid_n}")

        task = self.task
        if task.name not in TASKS:
            raise ConfigError(f"[task] 未知任务: {task.name}（可选: {', '.join(TASKS)}）")
        if task.criterion.lower() not in CRITERIA:
            raise ConfigError(f"[task] 未知准则: {task.criterion}（可选: {', '.join(CRITERIA)}）")
        if task.method not in METHODS:
            raise ConfigError(f"[task] 未知搜索方法: {task.method}（可选: {', '.join(METHODS)}）")
        if task.name == "optimize" and task.k is None:
            raise ConfigError("[task] optimize 需要设计大小 k")
        if task.name in ("increment", "variance-map", "reduce") and not task.design:
            raise ConfigError(f"[task] {task.name} 需要初始设计 design（候选点 id 列表）")
        if task.name == "increment" and (task.l is None or task.l < 1):
            raise ConfigError("[task] increment 需要增量大小 l >= 1")
        if task.name == "efficiency" and (not task.designs or len(task.designs) < 2):
            raise ConfigError("[task] efficiency 需要至少两个设计 designs")

        search = self.search
        if not 0 < search.anneal.cooling < 1:
            raise ConfigError(f"[search.anneal] cooling 必须在 (0, 1) 内，当前为 {search.anneal.cooling}")
        if search.max_outer_iters < 1:
            raise ConfigError(f"[search] max_outer_iters 必须 >= 1，当前为 {search.max_outer_iters}")
        if search.restarts < 1:
            raise ConfigError(f"[search] restarts 必须 >= 1，当前为 {search.restarts}")
        if search.workers < 1:
            raise ConfigError(f"[search] workers 必须 >= 1，当前为 {search.workers}")
        if search.anneal.moves_per_temperature < 1:
            raise ConfigError("[search.anneal] moves_per_temperature 必须 >= 1")

        for name in self.study.criteria:
            if name.lower() not in CRITERIA:
                raise ConfigError(f"[study] 未知准则: {name}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """完整的解析后配置（写入结果文件）"""
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}


# 全局配置单例
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """获取全局配置"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def init_settings(config_path: Optional[str] = None) -> Settings:
    """初始化全局配置"""
    global _settings
    if config_path:
        _settings = Settings.from_file(config_path)
    else:
        _settings = Settings()
    return _settings
