"""krigdes 校验模块。"""
