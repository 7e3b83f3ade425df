"""Shared fixtures: the 10-sample gap design and small synthetic manifolds."""

import numpy as np
import pytest

from podirom.snapshots import CoefficientFunction, SyntheticManifoldSpec, generate_multi_field_set


def gap_design() -> np.ndarray:
    """Ten equispaced 1-D parameters over [3, 3.8] and [4.2, 5], step 0.2,
    leaving a gap around 4.0 for held-out evaluation."""
    return np.concatenate(
        [np.linspace(3.0, 3.8, 5), np.linspace(4.2, 5.0, 5)]
    ).reshape(-1, 1)


def linear_manifold_specs(n_dof: int = 300) -> dict[str, SyntheticManifoldSpec]:
    """Rank-2 manifolds with linear-in-parameter coefficients, one per field.

    Both coefficient rows carry comparable energy so a 0.99 energy threshold
    keeps both modes.
    """
    samples = gap_design()
    rows = {
        "p": ((-4.0, 1.5), (9.0, -2.0)),
        "wss": ((-6.5, 1.8), (7.0, -1.5)),
        "ux": ((6.0, -1.9), (-8.2, 1.6)),
    }
    return {
        label: SyntheticManifoldSpec(
            n_dof=n_dof,
            coefficient_functions=(
                CoefficientFunction("polynomial", pair[0]),
                CoefficientFunction("polynomial", pair[1]),
            ),
            parameter_samples=samples,
            seed=100 + index,
        )
        for index, (label, pair) in enumerate(rows.items())
    }


@pytest.fixture
def linear_manifold():
    """(snapshot set, exact evaluators) for the rank-2 linear manifolds."""
    return generate_multi_field_set(linear_manifold_specs())
