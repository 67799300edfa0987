"""Service configuration: JSON file with environment-variable overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .analysis.series import DetectorConfig

ENV_PREFIX = "CRIMELINK_"


@dataclass
class ServiceConfig:
    store_dir: str = "./store"
    schema_path: str | None = None  # None -> bundled burglary schema
    templates_path: str | None = None
    static_dir: str | None = None  # built frontend assets, served at /
    host: str = "127.0.0.1"
    port: int = 8000
    token_ttl_seconds: float = 3600.0
    detector_enabled: bool = True
    detector: DetectorConfig = field(default_factory=DetectorConfig)


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    doc: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))

    det = doc.get("detector", {})
    cfg = ServiceConfig(
        store_dir=doc.get("store_dir", "./store"),
        schema_path=doc.get("schema_path"),
        templates_path=doc.get("templates_path"),
        static_dir=doc.get("static_dir"),
        host=doc.get("host", "127.0.0.1"),
        port=int(doc.get("port", 8000)),
        token_ttl_seconds=float(doc.get("token_ttl_seconds", 3600.0)),
        detector_enabled=bool(doc.get("detector_enabled", True)),
        detector=DetectorConfig(
            s_min=float(det.get("s_min", 0.6)),
            d_max_km=float(det.get("d_max_km", 50.0)),
            w_days=float(det.get("w_days", 30.0)),
            metric=det.get("metric", "jaccard"),
        ),
    )

    def override(name: str, cast, current):
        raw = env.get(ENV_PREFIX + name)
        return cast(raw) if raw is not None else current

    cfg.store_dir = override("STORE_DIR", str, cfg.store_dir)
    cfg.schema_path = override("SCHEMA_PATH", str, cfg.schema_path)
    cfg.templates_path = override("TEMPLATES_PATH", str, cfg.templates_path)
    cfg.static_dir = override("STATIC_DIR", str, cfg.static_dir)
    cfg.host = override("HOST", str, cfg.host)
    cfg.port = override("PORT", int, cfg.port)
    cfg.token_ttl_seconds = override("TOKEN_TTL", float, cfg.token_ttl_seconds)
    cfg.detector_enabled = override(
        "DETECTOR_ENABLED", lambda v: v.lower() not in ("0", "false", "no"), cfg.detector_enabled
    )
    cfg.detector = DetectorConfig(
        s_min=override("DETECTOR_S_MIN", float, cfg.detector.s_min),
        d_max_km=override("DETECTOR_D_MAX_KM", float, cfg.detector.d_max_km),
        w_days=override("DETECTOR_W_DAYS", float, cfg.detector.w_days),
        metric=override("DETECTOR_METRIC", str, cfg.detector.metric),
    )
    return cfg
