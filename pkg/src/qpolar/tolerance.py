"""Numeric tolerance defaults, overridable for a dynamic extent."""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    trace: float = 1e-12
    norm: float = 1e-12
    positivity: float = -1e-10
    imag: float = 1e-10


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "qpolar_tolerances", default=Tolerances()
)


def current() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def tolerances(**overrides: float):
    """Temporarily override tolerance fields, e.g. ``with tolerances(trace=1e-8): ...``."""
    token = _current.set(dataclasses.replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
