import numpy as np
import pytest

from tailkit.grids import (
    GeometricGrid,
    as_grid_array,
    bounded_tail_nodes,
    endpoint_clustered_nodes,
    geometric_nodes,
)


class TestGeometricGrid:
    def test_defaults(self):
        g = GeometricGrid()
        assert g.x0 == 10.0
        assert g.ratio == 1.5
        assert g.count == 40

    def test_values_shape_and_growth(self):
        v = GeometricGrid(x0=2.0, ratio=2.0, count=6).values()
        np.testing.assert_allclose(v, [2, 4, 8, 16, 32, 64], rtol=1e-14)

    def test_validation(self):
        with pytest.raises(Exception):
            GeometricGrid(ratio=1.0)
        with pytest.raises(Exception):
            GeometricGrid(x0=0.0)
        with pytest.raises(Exception):
            GeometricGrid(count=1)


class TestNodeBuilders:
    def test_geometric_nodes_endpoints(self):
        v = geometric_nodes(1.0, 100.0, 5)
        assert v[0] == pytest.approx(1.0)
        assert v[-1] == pytest.approx(100.0)
        assert v.size == 5
        ratios = v[1:] / v[:-1]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)

    def test_endpoint_clustered_monotone(self):
        v = endpoint_clustered_nodes(0.01, 1.0, 1.0, 64)
        assert np.all(np.diff(v) > 0)
        assert v[0] >= 0.01 and v[-1] <= 1.0
        # clustering: spacing shrinks toward the endpoint
        assert (v[-1] - v[-2]) < (v[1] - v[0])

    def test_endpoint_clustered_validation(self):
        with pytest.raises(ValueError):
            endpoint_clustered_nodes(0.0, 1.0, 1.0, 64)

    def test_bounded_tail_monotone(self):
        v = bounded_tail_nodes(0.01, 1.0, 1.0, 64)
        assert np.all(np.diff(v) > 0)


class TestAsGridArray:
    def test_accepts_grid_object(self):
        v = as_grid_array(GeometricGrid(x0=1.0, ratio=2.0, count=4))
        np.testing.assert_allclose(v, [1, 2, 4, 8])

    def test_accepts_sequences(self):
        np.testing.assert_allclose(as_grid_array([1.0, 2.0, 3.0]),
                                   [1.0, 2.0, 3.0])
        np.testing.assert_allclose(as_grid_array(np.array([5.0, 7.0])),
                                   [5.0, 7.0])

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            as_grid_array([3.0, 1.0, 2.0])

    def test_none_gives_default_grid(self):
        np.testing.assert_allclose(as_grid_array(None),
                                   GeometricGrid().values())
