import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from substatic import ADS0, EUCLID, SCHW3
from substatic.errors import DomainError, GraphError
from substatic.hypersurface import (
    RadialGraph,
    area,
    cosine_coefficients,
    cosine_eval,
    graph_from_function,
    graph_geometry,
    mean_curvature_fd_check,
    perturbed_graph,
    read_graph_csv,
    sphere_graph,
    weighted_volume,
    write_graph_csv,
)


def off_centre_sphere(R, d, nodes=65):
    # Euclidean sphere of radius R centred on the axis at distance d from the origin
    return graph_from_function(EUCLID, lambda th: d * np.cos(th) + np.sqrt(R**2 - (d * np.sin(th)) ** 2), nodes)


def test_cosine_series_round_trip():
    theta = np.linspace(0, np.pi, 33)
    u = 2 + 0.3 * np.cos(theta) - 0.1 * np.cos(3 * theta)
    a = cosine_coefficients(u)
    np.testing.assert_allclose(a[[0, 1, 3]], [2, 0.3, -0.1], atol=1e-14)
    np.testing.assert_allclose(cosine_eval(a, theta), u, atol=1e-14)
    np.testing.assert_allclose(cosine_eval(a, theta, 1), -0.3 * np.sin(theta) + 0.3 * np.sin(3 * theta), atol=1e-13)


def test_schwarzschild_sphere_values():
    g = sphere_graph(SCHW3, 2.0)
    geo = graph_geometry(SCHW3, g)
    np.testing.assert_allclose(geo.H, math.sqrt(0.5), atol=1e-14)
    np.testing.assert_allclose(geo.traceless_defect, 0.0, atol=1e-14)
    assert area(SCHW3, g) == pytest.approx(16 * math.pi, rel=1e-13)
    assert weighted_volume(SCHW3, g) == pytest.approx(28 * math.pi / 3, rel=1e-13)


def test_ads_sphere_mean_curvature():
    geo = graph_geometry(ADS0, sphere_graph(ADS0, 2.0))
    # c_cross = -1 cross-section: H = 2 sqrt(s^2 - 1)/s
    np.testing.assert_allclose(geo.H, 2 * math.sqrt(3) / 2, atol=1e-13)


def test_off_centre_euclidean_sphere():
    R, d = 1.0, 0.3
    g = off_centre_sphere(R, d)
    geo = graph_geometry(EUCLID, g)
    np.testing.assert_allclose(geo.H, 2 / R, atol=1e-10)
    np.testing.assert_allclose(geo.traceless_defect, 0.0, atol=1e-9)
    assert area(EUCLID, g) == pytest.approx(4 * math.pi * R**2, rel=1e-10)
    assert weighted_volume(EUCLID, g) == pytest.approx(4 * math.pi * R**3 / 3, rel=1e-10)


def test_normal_components_unit():
    g = perturbed_graph(SCHW3, 2.0, {1: 0.2, 2: 0.1})
    geo = graph_geometry(SCHW3, g)
    np.testing.assert_allclose(geo.nu_radial**2 + geo.nu_angular**2, 1.0, atol=1e-12)


def test_domain_and_graph_errors():
    with pytest.raises(DomainError):
        sphere_graph(SCHW3, 0.9)
    with pytest.raises(DomainError):
        perturbed_graph(SCHW3, 3.9, {1: 0.2})
    with pytest.raises(GraphError):
        RadialGraph([1.0, 2.0])
    with pytest.raises(GraphError):
        graph_geometry(ADS0, perturbed_graph(ADS0, 2.0, {1: 0.1}))
    rough = RadialGraph(2 + 0.01 * (-1.0) ** np.arange(17))
    with pytest.raises(GraphError):
        graph_geometry(SCHW3, rough)


def test_csv_round_trip(tmp_path):
    g = perturbed_graph(SCHW3, 2.0, {2: 0.1})
    write_graph_csv(g, tmp_path / "g.csv")
    back = read_graph_csv(tmp_path / "g.csv")
    assert back.digest() == g.digest()


def test_first_variation_of_area():
    g = perturbed_graph(SCHW3, 2.0, {1: 0.15, 3: 0.05})
    assert mean_curvature_fd_check(SCHW3, g) < 1e-7
    assert mean_curvature_fd_check(SCHW3, g, bump=lambda th: 1 + np.cos(2 * th)) < 1e-7


@given(amp=st.floats(-0.3, 0.3), k=st.integers(1, 4))
def test_first_variation_property(amp, k):
    g = perturbed_graph(SCHW3, 2.2, {k: amp})
    assert mean_curvature_fd_check(SCHW3, g) < 1e-6


@given(R=st.floats(0.5, 2.0), frac=st.floats(0.0, 0.6))
def test_euclidean_sphere_property(R, frac):
    geo = graph_geometry(EUCLID, off_centre_sphere(R, frac * R, 97))
    np.testing.assert_allclose(geo.H, 2 / R, rtol=1e-8)
