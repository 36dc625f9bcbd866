"""配置测试"""

import json

import pytest

from krigdes.config.settings import (
    AnnealConfig,
    SearchSettings,
    Settings,
    get_settings,
    init_settings,
)
from krigdes.utils.errors import ConfigError


class TestSearchSettings:
    """SearchSettings测试"""

    def test_default_config(self):
        """测试默认配置"""
        config = SearchSettings()

        assert config.seed == 0
        assert config.restarts == 4
        assert config.anneal.cooling == 0.9
        assert config.incr_decr.k1 is None


class TestSettings:
    """Settings测试"""

    def test_default_settings(self):
        """测试默认配置"""
        settings = Settings()

        assert settings.model is not None
        assert settings.search is not None
        assert settings.task.name == "optimize"

    def test_settings_from_file(self, tmp_path):
        """测试从文件加载配置（允许注释）"""
        path = tmp_path / "config.json"
        path.write_text(
            """{
  // 4x4 格点
  "candidates": {"grid_n": 4},
  "model": {"phi": 2.0, "kappa": 1.5},
  "task": {"name": "optimize", "k": 3},
  "search": {"seed": 7, "anneal": {"cooling": 0.8}, "incr_decr": {"k1": 2}}
}""",
            encoding="utf-8",
        )

        settings = Settings.from_file(str(path))

        assert settings.candidates.grid_n == 4
        assert settings.model.kappa == 1.5
        assert settings.search.seed == 7
        assert isinstance(settings.search.anneal, AnnealConfig)
        assert settings.search.anneal.cooling == 0.8
        assert settings.search.incr_decr.k1 == 2
        assert settings.validate() is settings

    def test_unknown_field(self):
        """测试未知字段报错"""
        with pytest.raises(ConfigError):
            Settings.from_dict({"model": {"range": 1.0}})
        with pytest.raises(ConfigError):
            Settings.from_dict({"llm": {}})
        with pytest.raises(ConfigError):
            Settings.from_dict({"model": 3})

    def test_missing_file(self, tmp_path):
        """测试配置文件不存在"""
        with pytest.raises(ConfigError):
            Settings.from_file(str(tmp_path / "none.json"))

    def test_bad_json(self, tmp_path):
        """测试解析失败"""
        path = tmp_path / "bad.json"
        path.write_text("{ not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            Settings.from_file(str(path))

    def test_to_dict(self):
        """测试导出为字典"""
        data = Settings().to_dict()
        assert set(data) == {"candidates", "model", "trend", "task", "search", "study", "output"}
        assert data["search"]["anneal"]["cooling"] == 0.9
        json.dumps(data)

    def test_resolve_path(self, tmp_path):
        """测试相对路径按配置文件目录解析"""
        (tmp_path / "data.csv").write_text("id,x\n", encoding="utf-8")
        settings = Settings(config_path=tmp_path / "config.json")
        assert settings.resolve_path("data.csv") == tmp_path / "data.csv"


class TestValidate:
    """配置校验测试"""

    def _settings(self, **task):
        settings = Settings.from_dict({"candidates": {"grid_n": 4}, "task": task})
        return settings

    def test_candidate_source(self):
        """测试必须且只能有一种候选来源"""
        with pytest.raises(ConfigError):
            Settings.from_dict({"task": {"k": 3}}).validate()
        with pytest.raises(ConfigError):
            Settings.from_dict({"candidates": {"grid_n": 4, "csv_path": "a.csv"}, "task": {"k": 3}}).validate()
        Settings.from_dict({"task": {"name": "validate"}}).validate()

    def test_task_requirements(self):
        """测试各任务的必填字段"""
        with pytest.raises(ConfigError):
            self._settings(name="optimize").validate()
        with pytest.raises(ConfigError):
            self._settings(name="increment", design=[0, 1]).validate()
        with pytest.raises(ConfigError):
            self._settings(name="reduce").validate()
        with pytest.raises(ConfigError):
            self._settings(name="efficiency", designs={"a": [0, 1]}).validate()
        self._settings(name="increment", design=[0, 1], l=2).validate()

    def test_enums(self):
        """测试未知任务、准则与方法"""
        with pytest.raises(ConfigError):
            self._settings(name="fit", k=3).validate()
        with pytest.raises(ConfigError):
            self._settings(k=3, criterion="d").validate()
        with pytest.raises(ConfigError):
            self._settings(k=3, method="genetic").validate()

    def test_search_ranges(self):
        """测试搜索参数范围"""
        settings = self._settings(k=3)
        settings.search.anneal.cooling = 1.0
        with pytest.raises(ConfigError):
            settings.validate()
        settings = self._settings(k=3)
        settings.search.workers = 0
        with pytest.raises(ConfigError):
            settings.validate()

    def test_config_error_is_value_error(self):
        """测试 ConfigError 同时是 ValueError（退出码 2）"""
        assert issubclass(ConfigError, ValueError)
        assert ConfigError.exit_code == 2


class TestGlobalSettings:
    """全局配置测试"""

    def test_init_and_get(self, tmp_path):
        """测试初始化全局配置"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"search": {"seed": 11}}), encoding="utf-8")
        settings = init_settings(str(path))
        assert get_settings() is settings
        assert settings.search.seed == 11
        assert init_settings().search.seed == 0
