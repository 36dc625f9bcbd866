"""校验与参数研究脚本。"""
