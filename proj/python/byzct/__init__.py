"""Byzantine colorless-task engine.

Tasks and configs are accepted as dicts, JSON strings, or paths to JSON
files. Results come back as plain dicts.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Mapping, Optional, Union

from . import _byzct
from ._byzct import BudgetExceeded, ConfigError, TaskLoadError

__all__ = [
    "BudgetExceeded",
    "ConfigError",
    "TaskLoadError",
    "check",
    "explore",
    "explore_exhaustive",
    "normalize_task",
    "run",
    "skeleton",
    "subdivide",
]

Source = Union[str, os.PathLike, Mapping[str, Any]]


def _text(source: Source) -> tuple[str, str]:
    """Returns (json text, directory that relative paths resolve against)."""
    if isinstance(source, Mapping):
        return json.dumps(source), os.getcwd()
    path = os.fspath(source)
    if isinstance(source, os.PathLike) or (not path.lstrip().startswith("{") and os.path.exists(path)):
        with open(path, encoding="utf-8") as f:
            return f.read(), os.path.dirname(os.path.abspath(path))
    return path, os.getcwd()


def check(task: Source, n_plus_1: int, t: Optional[int] = None, *, core_size: Optional[int] = None,
          max_subdiv: int = 2, budget: int = _byzct.DEFAULT_SIMPLEX_BUDGET) -> dict:
    """Solvability verdict. Give exactly one of ``t`` and ``core_size``."""
    if (t is None) == (core_size is None):
        raise ValueError("give exactly one of t and core_size")
    resilience = t if t is not None else core_size - 1
    return json.loads(_byzct.check(_text(task)[0], n_plus_1, resilience, max_subdiv, budget))


def run(config: Source, *, seed: Optional[int] = None, max_steps: int = 2_000_000) -> dict:
    text, base = _text(config)
    return json.loads(_byzct.run(text, base, seed, max_steps))


def explore(config: Source, seeds: Iterable[int] = range(1, 101), *, max_steps: int = 2_000_000) -> dict:
    text, base = _text(config)
    return json.loads(_byzct.explore(text, base, list(seeds), max_steps))


def explore_exhaustive(config: Source, *, max_messages: int = 12) -> dict:
    text, base = _text(config)
    return json.loads(_byzct.explore_exhaustive(text, base, max_messages))


def subdivide(task: Source, *, which: str = "input", times: int = 1,
              budget: int = _byzct.DEFAULT_SIMPLEX_BUDGET) -> dict:
    return json.loads(_byzct.subdivide(_text(task)[0], which, times, budget))


def skeleton(task: Source, level: int, *, which: str = "input") -> dict:
    return json.loads(_byzct.skeleton(_text(task)[0], which, level))


def normalize_task(task: Source) -> dict:
    """The task with every simplex of I listed in ``delta``."""
    return json.loads(_byzct.normalize_task(_text(task)[0]))
