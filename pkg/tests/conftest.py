import numpy as np
import pytest

from binarymr import ExposureScale, SummaryDataset, VariantAssociation


def make_dataset(rng, k, scale=ExposureScale.LOG_ODDS, slope=0.4):
    """Random well-conditioned dataset with true ratio ``slope``."""
    bx = rng.uniform(0.1, 0.6, k) * rng.choice([-1.0, 1.0], k)
    sx = rng.uniform(0.02, 0.1, k)
    sy = rng.uniform(0.02, 0.1, k)
    by = slope * bx + rng.normal(0.0, 0.02, k)
    variants = tuple(
        VariantAssociation(f"rs{i}", bx[i], sx[i], by[i], sy[i], scale) for i in range(k)
    )
    return SummaryDataset(variants, scale)


@pytest.fixture
def rng():
    return np.random.default_rng(18127)
