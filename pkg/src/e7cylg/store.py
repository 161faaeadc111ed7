"""Read-only access to the JSON fixtures, with an optional override directory.

Fixtures live at ``fixtures/<module>/<name>.json`` inside the package.  An
override directory with the same layout shadows individual files; anything
it does not contain falls back to the packaged copy.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator

__all__ = ["FixtureMissing", "read_fixture", "fixture_path", "list_fixtures", "set_fixture_dir", "fixture_dir",
           "on_change"]


class FixtureMissing(FileNotFoundError):
    pass


_override: Path | None = None
_listeners: list[Callable[[], None]] = []


def on_change(fn: Callable[[], None]) -> Callable[[], None]:
    """Register a cache-clearing callback run whenever the override changes."""
    _listeners.append(fn)
    return fn


def set_fixture_dir(path: str | Path | None) -> None:
    global _override
    _override = None if path is None else Path(path)
    for fn in _listeners:
        fn()


@contextmanager
def fixture_dir(path: str | Path | None) -> Iterator[None]:
    old = _override
    set_fixture_dir(path)
    try:
        yield
    finally:
        set_fixture_dir(old)


def fixture_path(module: str, name: str):
    rel = f"{module}/{name}.json"
    if _override is not None and (_override / rel).is_file():
        return _override / rel
    return resources.files("e7cylg").joinpath("fixtures", module, f"{name}.json")


def read_fixture(module: str, name: str, missing_ok: bool = False) -> dict:
    path = fixture_path(module, name)
    if not path.is_file():
        if missing_ok:
            return {}
        raise FixtureMissing(f"{module}/{name}")
    return json.loads(path.read_text())


def list_fixtures() -> list[tuple[str, str]]:
    """(module, name) of every packaged fixture."""
    root = resources.files("e7cylg").joinpath("fixtures")
    out = []
    for mod in sorted(root.iterdir(), key=lambda p: p.name):
        if mod.is_dir():
            out.extend((mod.name, f.name[:-5]) for f in sorted(mod.iterdir(), key=lambda p: p.name)
                       if f.name.endswith(".json"))
    return out
