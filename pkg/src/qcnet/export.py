"""Plain-text output helpers: JSON matrices, CSV headers, provenance and manifests.

Every file written through :class:`OutputDir` carries the tool version and
a hash of the configuration that produced it, and is listed in
``manifest.json``. JSON is written with sorted keys and ``repr`` floats so
reruns are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = ["VERSION", "config_hash", "matrix_record", "covariance_record", "OutputDir", "dumps"]

VERSION = "0.1.0"
TOOL = "qcnet"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1, default=_plain) + "\n"


def config_hash(config) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON config."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_plain)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def matrix_record(M, **meta):
    """JSON-ready record of a phase-space matrix in qq..pp layout."""
    M = np.asarray(M, dtype=float)
    return {"layout": "qqpp", "shape": list(M.shape), "data": M.tolist(), **meta}


def covariance_record(state, **meta):
    return {"layout": "qqpp", "vacuum": 0.5, "mean": state.mean.tolist(), "cov": state.cov.tolist(), **meta}


class OutputDir:
    """Directory of experiment outputs with provenance and a manifest."""

    def __init__(self, path, config):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.hash = config_hash(config)
        self.files = []

    @property
    def provenance(self):
        return {"tool": TOOL, "version": VERSION, "config_hash": self.hash}

    def _record(self, name, config):
        self.files.append({"file": name, "config": config if config is not None else self.config})

    def json(self, name, record, config=None):
        rec = dict(record)
        rec["provenance"] = self.provenance
        (self.path / name).write_text(dumps(rec))
        self._record(name, config)
        return self.path / name

    def csv(self, name, text, config=None):
        header = f"# tool={TOOL} version={VERSION} config_hash={self.hash}\n"
        (self.path / name).write_text(header + text)
        self._record(name, config)
        return self.path / name

    def write_manifest(self):
        manifest = {"provenance": self.provenance, "config": self.config, "files": self.files}
        (self.path / "manifest.json").write_text(dumps(manifest))
        return self.path / "manifest.json"
