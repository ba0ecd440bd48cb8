"""Reading TOML and JSON input documents."""

import hashlib
import json
import re
import sys
from pathlib import Path
from typing import Dict, Optional

from flowlab.config import INPUT_MAX_SIZE_BYTES
from flowlab.errors import InputError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_TOML_POSITION = re.compile(r"line (\d+), column (\d+)")


def file_digest(path: Path) -> str:
    """SHA-256 hex digest of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_text(path: Path, max_size: int = INPUT_MAX_SIZE_BYTES) -> str:
    path = Path(path)
    try:
        size = path.stat().st_size
    except OSError as e:
        raise InputError(f"cannot read input: {e.strerror}", str(path)) from e
    if size > max_size:
        raise InputError(f"input is {size} bytes, above the {max_size} byte limit", str(path))
    try:
        return path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise InputError("input is not UTF-8 text", str(path)) from e


def parse_toml(text: str, source: Optional[str] = None) -> Dict[str, object]:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, "lineno", None)
        column = getattr(e, "colno", None)
        if line is None:
            match = _TOML_POSITION.search(str(e))
            if match:
                line, column = int(match.group(1)), int(match.group(2))
        message = str(getattr(e, "msg", None) or e).split(" (at ")[0]
        raise InputError(f"invalid TOML: {message}", source, line, column) from e


def parse_json(text: str, source: Optional[str] = None) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e.msg}", source, e.lineno, e.colno) from e


def load_document(path: Path) -> Dict[str, object]:
    """Load a ``.toml`` or ``.json`` document as a table.

    Raises:
        InputError: If the file is missing, too large, malformed or not a table
    """
    path = Path(path)
    text = read_text(path)
    if path.suffix.lower() == ".json":
        payload = parse_json(text, str(path))
    else:
        payload = parse_toml(text, str(path))
    if not isinstance(payload, dict):
        raise InputError("top level must be a table", str(path))
    return payload
