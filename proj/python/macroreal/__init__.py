"""Macrorealism conditions for sequential quantum measurements, and
invasiveness overlaps of coarse-grained measurements."""

import json as _json

from . import _core
from ._core import (
    EXACT_THRESHOLD,
    InstrumentError,
    OverlapError,
    ScenarioError,
    coherent_delta_overlap,
    coherent_x_overlap,
    commutators,
    fock_overlap,
    lgi_max_search,
    mz_lgi_value,
    nsit_operator_residual,
    quadrature_overlap,
    ring_overlap,
)

__all__ = [
    "EXACT_THRESHOLD",
    "InstrumentError",
    "OverlapError",
    "ScenarioError",
    "check_conditions",
    "coherent_delta_overlap",
    "coherent_x_overlap",
    "commutators",
    "fock_overlap",
    "lgi_max_search",
    "mr012",
    "mz_lgi_value",
    "mz_scenario",
    "nsit_operator_residual",
    "quadrature_overlap",
    "ring_overlap",
    "sweep",
    "verify_table1",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else _json.dumps(scenario)


def mz_scenario(r1, r2, phi, q, c=None):
    """Interferometer scenario as a JSON-compatible dict (mixed state unless c is given)."""
    return _json.loads(_core.mz_scenario_json(r1, r2, phi, q, c))


def check_conditions(scenario, tol=EXACT_THRESHOLD):
    """Condition reports for a scenario dict or JSON string."""
    return _json.loads(_core.conditions_json(_text(scenario), tol))


def mr012(scenario, tol=EXACT_THRESHOLD):
    return _json.loads(_core.mr012_json(_text(scenario), tol))


def verify_table1(mix=True, sup=True, tol=EXACT_THRESHOLD):
    """Summary of the numeric-vs-closed-form check on the standard lattice."""
    return _json.loads(_core.verify_table1_json(mix, sup, tol))


def sweep(count=10000, seed=1):
    return _json.loads(_core.sweep_json(count, seed))
