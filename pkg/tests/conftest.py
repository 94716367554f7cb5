import os
from pathlib import Path

import numpy as np
import pytest

from ptim.diffusion import ThresholdAssignment, run_lt, run_pt
from ptim.graph import DirectedGraph, weighted_cascade

DATASET_DIR = Path(os.environ.get("PTIM_DATASET_DIR", Path(__file__).parent.parent / "datasets"))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load from cache) every diffusion kernel once, so timing
    assertions measure the algorithms rather than JIT startup."""
    g = DirectedGraph.from_edges(2, [(0, 1)])
    w = weighted_cascade(g)
    theta = ThresholdAssignment(np.array([1.0, 0.5]))
    run_lt(g, w, theta, [0])
    run_pt(g, w, theta, [0], 0.5)
    from ptim.diffusion import ModelSpec, estimate_spread

    estimate_spread(g, w, ModelSpec.lt(), [0], 2, 0)
    estimate_spread(g, w, ModelSpec.pt(0.5), [0], 2, 0)


@pytest.fixture
def facebook_path() -> Path:
    path = DATASET_DIR / "facebook_combined.txt"
    if not path.exists():
        pytest.skip(
            f"Facebook dataset not present at {path} "
            "(place the SNAP facebook_combined.txt there to enable this check)"
        )
    return path
