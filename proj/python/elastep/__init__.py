"""Python bindings for the elastep finite element library."""

import json

try:
    from . import _elastep as _core
except ImportError:  # build tree: the extension sits next to, not inside, the package
    import _elastep as _core

SolverError = _core.SolverError
version = _core.version
mesh = _core.mesh
space_dim = _core.space_dim
bielastic_eigenvalues = _core.bielastic_eigenvalues
transmission_eigenvalues = _core.transmission_eigenvalues
eig_order = _core.eig_order
source_order = _core.source_order


def run_example(example_id, **options):
    """Run a built-in example; returns a dict with kind, metadata and rows."""
    report = json.loads(_core.run_example_json(example_id, **options))
    for row in report["rows"]:
        if "value_re" in row:
            row["value"] = complex(row["value_re"], row["value_im"])
    return report


__all__ = [
    "SolverError",
    "bielastic_eigenvalues",
    "eig_order",
    "mesh",
    "run_example",
    "source_order",
    "space_dim",
    "transmission_eigenvalues",
    "version",
]
