"""Run manifests: enough to re-execute a command and reproduce its outputs."""
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from sfmaxent.errors import DataFormatError, OutputError

MANIFEST_NAME = 'manifest.json'


def _json_default(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, (set, tuple)):
        return list(value)
    if hasattr(value, 'value'):
        return value.value
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def finite_json(value: Any) -> Any:
    """Copy of value with non-finite floats spelled 'inf', '-inf' or 'nan'."""
    if hasattr(value, 'tolist') and not isinstance(value, float):
        value = value.tolist()
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, dict):
        return {key: finite_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set)):
        return [finite_json(item) for item in value]
    return value


def dump_json(payload: Any, path: Path) -> Path:
    """Write strict JSON: sorted keys, two-space indent and no bare Infinity or NaN."""
    text = json.dumps(finite_json(payload), indent=2, sort_keys=True, allow_nan=False, default=_json_default)
    try:
        path.write_text(text + '\n', encoding='utf-8')
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    return path


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any]
    seed: int
    tool_version: str
    outputs: List[str] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, out_dir: Path) -> Path:
        return dump_json(self.to_dict(), Path(out_dir) / MANIFEST_NAME)

    @classmethod
    def read(cls, path: Path) -> 'RunManifest':
        try:
            data = json.loads(Path(path).read_text(encoding='utf-8'))
        except OSError as e:
            raise OutputError(f"cannot read manifest {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise DataFormatError(f"manifest {path} is not valid JSON: {e.msg}", line=e.lineno) from e
        missing = {'command', 'config', 'seed', 'tool_version'} - data.keys()
        if missing:
            raise DataFormatError(f"manifest {path} lacks {sorted(missing)}")
        return cls(**data)
