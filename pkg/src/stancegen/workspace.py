"""Workspace layout and stage manifests.

Every stage writes its artifacts into ``<workspace>/<stage>/`` plus a
manifest recording the parameters, seed, and content hashes of its inputs
and outputs. A resumed run skips a stage when its manifest still matches,
so re-running a pipeline is cheap and every artifact stays traceable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

ARTIFACT_VERSION = 1


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def params_digest(params: Mapping) -> str:
    return hashlib.sha256(json.dumps(params, sort_keys=True, default=str).encode()).hexdigest()


@dataclass
class Manifest:
    stage: str
    seed: int
    params: dict
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    artifact_version: int = ARTIFACT_VERSION

    def to_json_dict(self) -> dict:
        return {
            "stage": self.stage,
            "seed": self.seed,
            "params": self.params,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "artifact_version": self.artifact_version,
        }

    @classmethod
    def from_json_dict(cls, d) -> "Manifest":
        return cls(
            stage=d["stage"],
            seed=d["seed"],
            params=d["params"],
            inputs=d.get("inputs", {}),
            outputs=d.get("outputs", {}),
            artifact_version=d.get("artifact_version", 0),
        )


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def stage_dir(self, stage: str) -> Path:
        path = self.root / stage
        path.mkdir(parents=True, exist_ok=True)
        return path

    def manifest_path(self, stage: str) -> Path:
        manifests = self.root / "manifests"
        manifests.mkdir(parents=True, exist_ok=True)
        return manifests / f"{stage}.json"

    def read_manifest(self, stage: str) -> Optional[Manifest]:
        path = self.manifest_path(stage)
        if not path.exists():
            return None
        return Manifest.from_json_dict(json.loads(path.read_text(encoding="utf-8")))

    def write_manifest(self, manifest: Manifest) -> None:
        self.manifest_path(manifest.stage).write_text(
            json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )

    def hash_inputs(self, paths) -> dict[str, str]:
        return {str(p): file_sha256(p) for p in paths}

    def stage_is_fresh(self, stage: str, seed: int, params: Mapping, input_paths) -> bool:
        """True when the stored manifest matches params/seed/input hashes and
        every recorded output still exists with its recorded hash."""
        manifest = self.read_manifest(stage)
        if manifest is None or manifest.artifact_version != ARTIFACT_VERSION:
            return False
        if manifest.seed != seed or manifest.params != dict(params):
            return False
        current = {str(p): file_sha256(p) for p in input_paths if Path(p).exists()}
        if manifest.inputs != current:
            return False
        for out_path, digest in manifest.outputs.items():
            if not Path(out_path).exists() or file_sha256(out_path) != digest:
                return False
        return True
