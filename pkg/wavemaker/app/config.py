from __future__ import annotations

import os
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="", extra="ignore")

    # 样本级线程池（evaluate / phase-diagram 的并发度）
    HALFLINE_THREADS: int = int(os.getenv("HALFLINE_THREADS", str(min(8, os.cpu_count() or 1))))

    # 围道求积默认容差
    QUAD_REL_TOL: float = float(os.getenv("QUAD_REL_TOL", "1e-10"))
    QUAD_ABS_TOL: float = float(os.getenv("QUAD_ABS_TOL", "1e-12"))
    QUAD_REMOVABLE_TOL: float = float(os.getenv("QUAD_REMOVABLE_TOL", "1e-3"))
    QUAD_MAX_NODES: int = int(os.getenv("QUAD_MAX_NODES", "400000"))

    # 有限差分参考解（oracle）的默认网格
    ORACLE_X_MAX: float = float(os.getenv("ORACLE_X_MAX", "40.0"))
    ORACLE_NX: int = int(os.getenv("ORACLE_NX", "800"))

    # 默认运行配置文件（YAML/JSON），命令行参数优先
    HALFLINE_CONFIG: str | None = os.getenv("HALFLINE_CONFIG") or None

    # Logging（LOG_DIR 为空时只写 stderr）
    LOG_DIR: str = os.getenv("LOG_DIR", "")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_RETENTION_DAYS: int = int(os.getenv("LOG_RETENTION_DAYS", "10"))

    # Metrics
    ENABLE_METRICS: bool = os.getenv("ENABLE_METRICS", "false").lower() in ("1", "true", "yes")


settings = Settings()
