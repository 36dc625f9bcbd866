"""异常定义

CLI 根据异常类型映射退出码：
- ConfigError → 2
- NumericalError（含 SingularModelError）→ 3
- ValidationFailure → 4
"""

from typing import Optional


class KrigdesError(Exception):
    """krigdes 所有异常的基类"""

    exit_code: int = 1


class ConfigError(KrigdesError, ValueError):
    """配置文件缺失字段、类型错误或取值非法"""

    exit_code = 2


class CapacityError(KrigdesError, ValueError):
    """候选点数或枚举规模超过配置上限"""

    exit_code = 2


class CandidateParseError(KrigdesError, ValueError):
    """候选点 CSV 解析失败"""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class DesignError(KrigdesError, ValueError):
    """设计下标越界、重复或与目标点重叠"""

    exit_code = 2


class TrendError(KrigdesError, ValueError):
    """趋势项不可识别（k < p、F 秩亏）或外部漂移协变量缺失"""

    exit_code = 2


class CriterionMismatchError(KrigdesError, ValueError):
    """比较了不同类型（或不同 m）的准则值"""

    exit_code = 2


class NumericalError(KrigdesError, ArithmeticError):
    """数值计算失败"""

    exit_code = 3


class SingularModelError(NumericalError):
    """加 jitter 升级到上限后协方差矩阵仍不正定"""


class UntrackedStateError(NumericalError):
    """StageState 未跟踪 logdet 时请求链式更新"""


class ValidationFailure(KrigdesError):
    """oracle 校验超出容差"""

    exit_code = 4
