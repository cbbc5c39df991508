"""Pipeline configuration and the run manifest."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..dists import FAMILY_ORDER, Family
from ..errors import SchemaError

VERSION = "0.1.0"

DEFAULT_COSTS = [5.0, 10.0, 15.0]
DEFAULT_LEVELS = [round(0.1 * i, 1) for i in range(10)]


@dataclass
class PipelineConfig:
    """Everything a pipeline run needs, resolvable at startup."""

    manifest: Path
    output_dir: Path
    families: list[Family] = field(
        default_factory=lambda: [f for f in FAMILY_ORDER if f is not Family.JSUO]
    )
    window: int | None = None
    horizon: int | None = None
    costs: list[float] = field(default_factory=lambda: list(DEFAULT_COSTS))
    levels: list[float] = field(default_factory=lambda: list(DEFAULT_LEVELS))
    alpha: float = 0.05
    max_missing: int = 200
    seed: int = 0
    jobs: int = 1
    split_train: float = 0.6
    split_validation: float = 0.2

    @classmethod
    def from_file(cls, path: Path, overrides: dict | None = None) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise SchemaError(f"config file missing: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        raw.update(overrides or {})
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path = Path(".")) -> "PipelineConfig":
        if "manifest" not in raw or "output_dir" not in raw:
            raise SchemaError("config requires 'manifest' and 'output_dir'")
        families = raw.get("families")
        if families:
            families = [Family.from_string(f) for f in families]
        else:
            families = [f for f in FAMILY_ORDER if f is not Family.JSUO]
        cfg = cls(
            manifest=(base / raw["manifest"]).resolve(),
            output_dir=(base / raw["output_dir"]).resolve(),
            families=families,
            window=raw.get("window"),
            horizon=raw.get("horizon"),
            costs=[float(c) for c in raw.get("costs", DEFAULT_COSTS)],
            levels=[float(b) for b in raw.get("levels", DEFAULT_LEVELS)],
            alpha=float(raw.get("alpha", 0.05)),
            max_missing=int(raw.get("max_missing", 200)),
            seed=int(raw.get("seed", 0)),
            jobs=int(raw.get("jobs", 1)),
            split_train=float(raw.get("split_train", 0.6)),
            split_validation=float(raw.get("split_validation", 0.2)),
        )
        if not cfg.manifest.exists():
            raise SchemaError(f"dataset manifest not found: {cfg.manifest}")
        return cfg

    def snapshot(self) -> dict:
        d = asdict(self)
        d["manifest"] = str(self.manifest)
        d["output_dir"] = str(self.output_dir)
        d["families"] = [f.value for f in self.families]
        return d


def hash_inputs(paths: list[Path], extra: dict) -> str:
    """Content hash of input files plus the relevant config subset."""
    h = hashlib.sha256()
    for p in sorted(str(p) for p in paths):
        path = Path(p)
        h.update(path.name.encode())
        if path.exists():
            h.update(path.read_bytes())
        else:
            h.update(b"<missing>")
    h.update(json.dumps(extra, sort_keys=True, default=str).encode())
    return h.hexdigest()


class RunManifest:
    """Stage ledger: hashes, timings and per-spread status."""

    def __init__(self, output_dir: Path):
        self.path = Path(output_dir) / "run_manifest.json"
        if self.path.exists():
            self.data = json.loads(self.path.read_text())
        else:
            self.data = {"version": VERSION, "stages": {}}

    def stage_is_current(self, stage: str, input_hash: str, outputs: list[Path]) -> bool:
        entry = self.data["stages"].get(stage)
        if not entry or entry.get("hash") != input_hash:
            return False
        return all(Path(p).exists() for p in entry.get("outputs", [])) and all(
            Path(p).exists() for p in outputs
        )

    def record(
        self,
        stage: str,
        input_hash: str,
        outputs: list[Path],
        elapsed: float,
        spread_status: dict[int, str] | None = None,
        extra: dict | None = None,
    ) -> None:
        entry = {
            "hash": input_hash,
            "outputs": [str(p) for p in outputs],
            "elapsed_s": round(elapsed, 3),
            "completed_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
        }
        if spread_status is not None:
            entry["spread_status"] = {str(k): v for k, v in sorted(spread_status.items())}
        if extra:
            entry.update(extra)
        self.data["stages"][stage] = entry
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True))

    def stage_hash(self, stage: str) -> str:
        entry = self.data["stages"].get(stage)
        return entry["hash"] if entry else ""
