"""
krigdes - 克里金最优采样设计

GV / G / V / MES 准则下的最优与增量设计，增量评估代价与预测点数无关。
"""

__version__ = "0.1.0"
