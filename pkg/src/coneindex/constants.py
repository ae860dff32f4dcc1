"""Pinned numerical tolerances.

Every tolerance used by the library has its default here so that acceptance
runs are reproducible.  The CLI may override them through ``--config``; bump
``TOLERANCES_VERSION`` whenever a default changes.
"""

TOLERANCES_VERSION = "1"

TOLERANCES: dict[str, float] = {
    # relative gap for grouping discrete eigenvalues into one multiplicity class
    "eigen_cluster": 1e-6,
    # |mu + (n-2)^2/4| <= log_case * (1 + |mu|) selects the repeated-root branch
    "log_case": 1e-9,
    # absolute gap for merging real parts of indicial roots
    "root_merge": 1e-9,
    # minimum absolute distance between a weight and any indicial real part
    "tau_on_root": 1e-9,
    # shift applied to sweep weights that land on an indicial real part
    "sweep_nudge": 1e-6,
}


def merged_tolerances(overrides: dict[str, float] | None = None) -> dict[str, float]:
    """Return the defaults updated with ``overrides``; unknown names raise."""
    out = dict(TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in TOLERANCES:
            raise KeyError(f"unknown tolerance {key!r}; known: {sorted(TOLERANCES)}")
        value = float(value)
        if not value > 0:
            raise ValueError(f"tolerance {key!r} must be positive, got {value}")
        out[key] = value
    return out
