"""oracle 校验与研究结果的聚合、落盘与报告"""
