import numpy as np
import pytest

from chordscan import recognition, shapes
from chordscan.sampling import SamplerConfig


@pytest.fixture(scope="session")
def builtin_dictionary():
    """Calibrated five-shape dictionary shared by recognition/acceptance tests."""
    return [
        recognition.calibrate(
            shapes.builtin(name),
            m_lines=1000,
            replicates=100,
            config=SamplerConfig(seed=9000 + i),
            name=name,
        )
        for i, name in enumerate(shapes.BUILTIN_NAMES)
    ]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
