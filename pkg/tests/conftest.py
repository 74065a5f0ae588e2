import numpy as np
import pytest

from panowarp import CuboidScene, PanoDims, render_panorama


@pytest.fixture(scope="session")
def box_room():
    """4x4x3 room, camera at the exact room center."""
    return CuboidScene(4.0, 4.0, 3.0, (0.0, 0.0, 1.5))


@pytest.fixture(scope="session")
def box_view(box_room):
    """Small render of the centered room, shared across tests."""
    return render_panorama(box_room, dims=PanoDims(128, 64))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
