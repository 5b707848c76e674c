"""Plain-text run configuration: one `key = value` per line, `#` comments."""
import logging
from pathlib import Path
from typing import Any, Dict, TextIO, Union

from sfmaxent.errors import ConfigurationError, OutputError

logger = logging.getLogger(__name__)

_TRUE = {'true', 'yes', 'on'}
_FALSE = {'false', 'no', 'off'}


def coerce(raw: str) -> Any:
    """int, float or bool when the text parses as one, else the stripped string."""
    text = raw.strip()
    lowered = text.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_key_value(stream: TextIO, source: str = '<stream>') -> Dict[str, Any]:
    """`key = value` lines with `#` comments; values are coerced to bool, int, float or str."""
    values = {}
    for lineno, line in enumerate(stream, start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {content!r}")
        key, raw = content.split('=', 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"{source}:{lineno}: empty key")
        values[key] = coerce(raw)
    return values


def load_key_value(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, encoding='utf-8') as stream:
            values = parse_key_value(stream, str(path))
    except OSError as e:
        raise OutputError(f"cannot read config {path}: {e}") from e
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values
