"""Select the kernel implementation at import time.

``COEXSIM_BACKEND`` may be ``auto`` (default: compiled if it imports, else
numpy), ``compiled`` (fail if the extension is missing) or ``python``.
"""

import importlib
import os
from types import ModuleType

from . import _kernels_py

_NAMES = {"compiled": "coexsim._kernels", "python": "coexsim._kernels_py"}


def load(name: str) -> ModuleType:
    """Import a specific backend by name (``compiled`` or ``python``)."""
    if name not in _NAMES:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_NAMES)}")
    return importlib.import_module(_NAMES[name])


def available() -> list[str]:
    names = ["python"]
    try:
        load("compiled")
    except ImportError:
        return names
    return ["compiled"] + names


def _select() -> tuple[str, ModuleType]:
    choice = os.environ.get("COEXSIM_BACKEND", "auto").strip().lower()
    if choice == "python":
        return "python", _kernels_py
    if choice not in ("auto", "compiled"):
        raise ImportError(f"COEXSIM_BACKEND must be auto, compiled or python, got {choice!r}")
    try:
        return "compiled", load("compiled")
    except ImportError:
        if choice == "compiled":
            raise
        return "python", _kernels_py


BACKEND, kernels = _select()
