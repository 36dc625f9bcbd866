"""CLI入口模块"""
