"""Risk functionals, partition schemes, and exceedance cell counts."""

import numpy as np
import pytest

from tailtest import (DomainError, RngStream, Sample, count_cells,
                      make_angular_partition, make_max_partition,
                      make_min_partition, risk_functional)


class TestRiskFunctionals:
    @pytest.mark.parametrize("kind", ["max", "min", "euclidean", "sum"])
    def test_homogeneity(self, kind):
        r = risk_functional(kind)
        rng = RngStream(31)
        x = rng.uniform((500, 3)) * 10.0
        t = rng.uniform(500) * 99.0 + 0.01
        base = r(x)
        scaled = r(x * t[:, None])
        assert np.all(np.abs(scaled - t * base) <= 1e-12 * t * base)

    def test_values(self):
        x = np.array([[3.0, 4.0]])
        assert risk_functional("max")(x)[0] == 4.0
        assert risk_functional("min")(x)[0] == 3.0
        assert risk_functional("euclidean")(x)[0] == pytest.approx(5.0)
        assert risk_functional("sum")(x)[0] == pytest.approx(7.0)

    def test_scalar_input(self):
        assert risk_functional("max")(np.array([1.0, 2.0])) == 2.0

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            risk_functional("median")


class TestMaxPartition:
    def test_cells_d2(self):
        part = make_max_partition(2)
        assert part.num_cells == 3
        # {1} has code 1, {2} code 2, {1,2} code 3
        assert part.classify(np.array([1.5, 0.7])) == 1
        assert part.classify(np.array([0.7, 1.5])) == 2
        assert part.classify(np.array([1.5, 1.5])) == 3

    def test_labels(self):
        assert make_max_partition(2).cell_labels == ["{1}", "{2}", "{1,2}"]

    def test_d3_exhaustive(self):
        part = make_max_partition(3)
        assert part.num_cells == 7
        rng = RngStream(32)
        pts = rng.uniform((10_000, 3)) * 3.0
        pts = pts[pts.max(axis=1) > 1.0]
        cells = part.classify(pts)
        assert ((cells >= 1) & (cells <= 7)).all()
        assert np.bincount(cells, minlength=8)[1:].sum() == len(pts)

    def test_dimension_error(self):
        with pytest.raises(DomainError):
            make_max_partition(1)


class TestMinPartition:
    def test_cells_d2(self):
        part = make_min_partition(2)
        assert part.num_cells == 4
        # empty set has code 1
        assert part.classify(np.array([1.5, 1.5])) == 1
        assert part.classify(np.array([3.0, 1.2])) == 2
        assert part.classify(np.array([1.2, 3.0])) == 3
        assert part.classify(np.array([3.0, 3.0])) == 4

    def test_grid_covers_all_cells(self):
        part = make_min_partition(2)
        grid = np.linspace(1.01, 4.0, 30)
        pts = np.array([[a, b] for a in grid for b in grid])
        cells = part.classify(pts)
        assert set(np.unique(cells)) == {1, 2, 3, 4}

    def test_dimension_error(self):
        with pytest.raises(DomainError):
            make_min_partition(1)


class TestAngularPartition:
    def test_boundary_angle_in_lower_cell(self):
        part = make_angular_partition("euclidean", 4)
        # angle pi/4 sits on the second boundary, so the half-open wedge
        # (pi/8, pi/4] takes it.
        assert part.classify(np.array([2.0, 2.0])) == 2

    def test_axis_point_in_first_cell(self):
        part = make_angular_partition("euclidean", 4)
        assert part.classify(np.array([2.0, 0.0])) == 1

    def test_five_wedges(self):
        part = make_angular_partition("euclidean", 5)
        assert part.num_cells == 5
        angles = np.linspace(0.01, np.pi / 2 - 0.01, 500)
        pts = 2.0 * np.column_stack([np.cos(angles), np.sin(angles)])
        cells = part.classify(pts)
        assert set(np.unique(cells)) == {1, 2, 3, 4, 5}
        assert np.all(np.diff(cells) >= 0)

    def test_cone_stability(self):
        part = make_angular_partition("sum", 7)
        rng = RngStream(33)
        pts = rng.uniform((10_000, 2)) * 5.0
        pts = pts[part.risk(pts) > 1.0]
        assert np.array_equal(part.classify(pts), part.classify(3.0 * pts))

    def test_custom_angles(self):
        part = make_angular_partition("euclidean", 2, angles=[0.0, 0.3, np.pi / 2])
        assert part.classify(np.array([2.0, 0.1])) == 1
        assert part.classify(np.array([0.1, 2.0])) == 2
        with pytest.raises(DomainError):
            make_angular_partition("euclidean", 2, angles=[0.0, 0.3, 1.0])

    def test_rejects_max_risk(self):
        with pytest.raises(DomainError):
            make_angular_partition("max", 4)

    def test_rejects_higher_dim_points(self):
        part = make_angular_partition("euclidean", 3)
        with pytest.raises(DomainError):
            part.classify(np.ones((5, 3)))


def brute_force_cells(data, partition, k_n):
    """Independent O(n*K) oracle: sort risks, pick top k_n, test each point
    against each cell membership predicate one at a time."""
    r = np.array([partition.risk(row) for row in data])
    order = np.argsort(r, kind="stable")
    n = len(data)
    u = r[order[n - k_n - 1]]
    chosen = order[n - k_n:]
    counts = np.zeros(partition.num_cells, dtype=int)
    for i in chosen:
        counts[partition.classify(data[i] / u) - 1] += 1
    return u, counts


class TestCountCells:
    def test_degenerate_single_cell(self):
        # All exceedances on the diagonal of a max partition.
        diag = np.linspace(1, 10, 20)
        data = np.column_stack([diag, diag])
        sample = Sample(data, "pareto")
        cells = count_cells(sample, make_max_partition(2), 5)
        assert cells.probs[2] == 1.0
        assert cells.counts.sum() == 5

    def test_probabilities_sum_to_one(self):
        rng = RngStream(34)
        data = 1.0 / (1.0 - rng.uniform((2000, 2)))
        cells = count_cells(Sample(data, "pareto"), make_angular_partition("euclidean", 5), 200)
        assert cells.probs.sum() == pytest.approx(1.0, abs=1e-15)
        assert cells.counts.sum() == 200
        assert cells.k_n == 200

    @pytest.mark.parametrize("scheme", ["max", "min", "euclidean"])
    def test_matches_brute_force(self, scheme):
        rng = RngStream(35)
        for trial in range(25):
            n = int(10 + (rng.uniform() * 40))
            data = 1.0 / (1.0 - rng.uniform((n, 2)))
            if scheme == "max":
                part = make_max_partition(2)
            elif scheme == "min":
                part = make_min_partition(2)
            else:
                part = make_angular_partition("euclidean", 4)
            k_n = max(1, int(rng.uniform() * (n - 1)))
            cells = count_cells(Sample(data, "pareto"), part, k_n)
            u, counts = brute_force_cells(data, part, k_n)
            assert cells.threshold == u
            assert np.array_equal(cells.counts, counts)

    def test_threshold_doubling_invariance(self):
        rng = RngStream(36)
        data = 1.0 / (1.0 - rng.uniform((500, 2)))
        for part in (make_max_partition(2), make_min_partition(2),
                     make_angular_partition("euclidean", 4)):
            base = count_cells(Sample(data, "pareto"), part, 60)
            doubled = count_cells(Sample(2.0 * data, "pareto"), part, 60)
            assert np.array_equal(base.counts, doubled.counts)
            assert doubled.threshold == pytest.approx(2.0 * base.threshold)

    def test_ties_at_threshold_keep_exact_count(self):
        # Six rows share the same risk value across the order-statistic cut.
        data = np.array([[2.0, 1.0]] * 6 + [[5.0, 1.0], [1.5, 1.0], [1.2, 1.0]])
        sample = Sample(data, "pareto")
        cells = count_cells(sample, make_max_partition(2), 4)
        assert cells.counts.sum() == 4

    def test_k_range_validation(self):
        data = np.ones((10, 2)) + np.arange(10)[:, None]
        with pytest.raises(DomainError):
            count_cells(Sample(data, "pareto"), make_max_partition(2), 10)
        with pytest.raises(DomainError):
            count_cells(Sample(data, "pareto"), make_max_partition(2), 0)

    def test_requires_standardized_sample(self):
        with pytest.raises(DomainError):
            count_cells(Sample(np.ones((10, 2))), make_max_partition(2), 3)

    def test_exhaustiveness_large(self):
        # 1e5 random points of the exceedance region, each classified exactly once.
        rng = RngStream(37)
        pts = rng.uniform((100_000, 2)) * 4.0
        for part in (make_max_partition(2), make_min_partition(2),
                     make_angular_partition("euclidean", 5),
                     make_angular_partition("sum", 3)):
            inside = pts[part.risk(pts) > 1.0]
            cells = part.classify(inside)
            assert cells.shape == (len(inside),)
            assert ((cells >= 1) & (cells <= part.num_cells)).all()
