"""Lyapunov certificates and simulation for switched linear hyperbolic systems."""

import json

from ._core import (
    Certificate,
    Error,
    SwitchedSystem,
    check_certificate,
    dwell_time_bound,
    make_certificate,
    validate_dwell,
)
from . import _core


def _dump(value):
    return value if isinstance(value, str) else json.dumps(value)


def load_system(spec):
    """Builds a SwitchedSystem from a dict or a JSON string."""
    return SwitchedSystem.from_json(_dump(spec))


def certify(system, variant="CommonSignFixed", options=None):
    return _core.certify(system, variant, "" if options is None else _dump(options))


def simulate(system, signal, n_x=201, cfl=0.9, certificate=None):
    return _core.simulate(system, _dump(signal), n_x, cfl, certificate)


def signal_ok(signal, tau_D, N0):
    return validate_dwell(_dump(signal), tau_D, N0)


__all__ = [
    "Certificate",
    "Error",
    "SwitchedSystem",
    "certify",
    "check_certificate",
    "dwell_time_bound",
    "load_system",
    "make_certificate",
    "signal_ok",
    "simulate",
]
