"""Pinch-capability evaluation for five-finger hand models.

Thin wrapper over the C++ core: forward kinematics, grid enumeration and the four pinch
detectors. Reports come back as plain dicts with the same keys as the CLI's JSON files.
"""

import json

from ._core import (
    ConfigError,
    ContractViolation,
    DegenerateGeometry,
    DomainError,
    HandModel,
    IoError,
    format_ratio_pct,
    reference_values,
)
from . import _core

__all__ = [
    "ConfigError",
    "ContractViolation",
    "DegenerateGeometry",
    "DomainError",
    "HandModel",
    "IoError",
    "format_ratio_pct",
    "reference_values",
    "run",
    "summary_csv",
]


def run(model, detector, res=1, epsilon=1e-5, delta="bucket", sampling="min-inclusive",
        strategy="binned", workers=1, spans=None):
    """Run one detector ("align", "align-no-thumb", "lateral" or "tip") and return its report."""
    if isinstance(model, int):
        model = HandModel(model)
    text = _core.run_json(model, detector, res, epsilon, str(delta), sampling, strategy, workers,
                          None if spans is None else [float(s) for s in spans])
    return json.loads(text)


def summary_csv(reports):
    """Summary CSV text for a list of reports returned by run()."""
    return _core.summary_csv([json.dumps(r) for r in reports])
