"""Named hyperparameter bundles for the two benchmark expression datasets.

The aggregate-regularized methods were tuned per dataset with two
candidate gamma scales each — a large per-dataset value (1000 / 0.1)
and a method-wide 1e-4 — so both ship as distinct named presets rather
than picking one.
"""

from .errors import ConfigurationError

PRESETS: dict[str, dict] = {
    "coad-plpca": {
        "method": "plpca_full",
        "alpha": 1e-5,
        "beta": 0.5,
        "gamma": 1e-4,
        "n_filtrations": 6,
        "zeta": [0.5, 3, 1, 2, 2, 1],
    },
    "coad-plpca-gamma1000": {
        "method": "plpca_full",
        "alpha": 1e-5,
        "beta": 0.5,
        "gamma": 1000.0,
        "n_filtrations": 6,
        "zeta": [0.5, 3, 1, 2, 2, 1],
    },
    "multisource-plpca": {
        "method": "plpca_full",
        "alpha": 1e-4,
        "beta": 0.5,
        "gamma": 1e-4,
        "n_filtrations": 6,
        "zeta": [0.5, 0, 0, 3, 0, 6],
    },
    "multisource-plpca-gamma0.1": {
        "method": "plpca_full",
        "alpha": 1e-4,
        "beta": 0.5,
        "gamma": 0.1,
        "n_filtrations": 6,
        "zeta": [0.5, 0, 0, 3, 0, 6],
    },
    "coad-plpca-simple": {
        "method": "plpca_simple",
        "alpha": 1e-5,
        "beta": 0.5,
        "gamma": 1000.0,
        "n_filtrations": 6,
        "zeta": [2, 3, 0, 0, 2, 1],
    },
    "multisource-plpca-simple": {
        "method": "plpca_simple",
        "alpha": 1e-4,
        "beta": 0.5,
        "gamma": 0.1,
        "n_filtrations": 6,
        "zeta": [0.5, 0, 0, 3, 2, 6],
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ConfigurationError(f"unknown preset {name!r}; known presets: {known}")
    return dict(PRESETS[name])
