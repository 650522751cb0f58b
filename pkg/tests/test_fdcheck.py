import pytest

from substatic import ADS0, DSS, EUCLID, SCHW3
from substatic.fdcheck import curvature_fd, curvature_mismatch


@pytest.mark.parametrize("model, s", [(SCHW3, 2.0), (SCHW3, 3.5), (ADS0, 1.7), (DSS, 0.5), (EUCLID, 1.0)])
def test_closed_form_curvature_matches_fd(model, s):
    assert max(curvature_mismatch(model, s).values()) < 1e-5


def test_fd_ricci_is_diagonal():
    assert curvature_fd(SCHW3, 2.0)["ricci_mixed"] < 1e-6
