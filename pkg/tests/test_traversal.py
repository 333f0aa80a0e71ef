import numpy as np
import pytest

from linemark.detect import SeedSet
from linemark.traversal import (
    TraversalParams,
    benchmark_traversal,
    circledat,
    circledat_multi,
    neighborhood_offsets,
    sliding_window_collect,
    write_benchmark_csv,
)

from oracles import bfs_reachable_white


def random_mask(rng, max_side=64):
    w = int(rng.integers(8, max_side + 1))
    h = int(rng.integers(8, max_side + 1))
    density = rng.uniform(0.05, 0.6)
    return (rng.random((h, w)) < density).astype(np.uint8) * 255


def random_white_seed(rng, mask):
    ys, xs = np.nonzero(mask == 255)
    if xs.size == 0:
        return None
    k = int(rng.integers(0, xs.size))
    return (int(xs[k]), int(ys[k]))


class TestOffsets:
    def test_square_count_and_order(self):
        offs = neighborhood_offsets(1)
        assert len(offs) == 8
        assert offs[0] == (-1, -1) and offs[-1] == (1, 1)
        assert (0, 0) not in offs

    def test_disk_subset(self):
        square = set(neighborhood_offsets(3))
        disk = set(neighborhood_offsets(3, disk_mode=True))
        assert disk < square
        assert (3, 3) in square and (3, 3) not in disk
        assert (3, 0) in disk

    def test_theta_must_be_positive(self):
        with pytest.raises(ValueError):
            TraversalParams(theta=0)


class TestCircledat:
    def test_all_black_collects_nothing(self):
        mask = np.zeros((5, 5), dtype=np.uint8)
        result = circledat(mask, (2, 2), TraversalParams(theta=1))
        assert result.pixels == []
        assert result.visit_count == 1  # only the seed was pushed

    def test_isolated_seed_visits_all_neighbors(self):
        mask = np.zeros((5, 5), dtype=np.uint8)
        mask[2, 2] = 255
        result = circledat(mask, (2, 2), TraversalParams(theta=1))
        assert result.pixels == [(2, 2)]
        assert result.visit_count == 9  # seed plus its 8 offsets

    def test_gap_of_two_bridged_only_at_theta_two(self):
        mask = np.zeros((5, 5), dtype=np.uint8)
        mask[0, 0] = 255
        mask[0, 2] = 255
        two = circledat(mask, (0, 0), TraversalParams(theta=2))
        one = circledat(mask, (0, 0), TraversalParams(theta=1))
        assert two.as_set() == {(0, 0), (2, 0)}
        assert one.as_set() == {(0, 0)}

    def test_c_curve_with_break(self):
        # three-quarter ring with a 3 px break; theta=3 crosses it
        mask = np.zeros((40, 40), dtype=np.uint8)
        cx, cy, r = 20, 20, 12
        for deg in range(0, 360):
            if 40 <= deg < 80:
                continue  # the break
            x = int(round(cx + r * np.cos(np.radians(deg))))
            y = int(round(cy + r * np.sin(np.radians(deg))))
            mask[y, x] = 255
        seed = (cx + r, cy)
        got = circledat(mask, seed, TraversalParams(theta=3)).as_set()
        assert got == bfs_reachable_white(mask, seed, 3)
        assert got == {tuple(p[::-1]) for p in np.argwhere(mask == 255)}

    def test_oracle_equivalence_random(self, rng):
        thetas = (1, 2, 3, 5)
        checked = 0
        while checked < 60:
            mask = random_mask(rng)
            seed = random_white_seed(rng, mask)
            if seed is None:
                continue
            theta = thetas[checked % 4]
            got = circledat(mask, seed, TraversalParams(theta=theta)).as_set()
            assert got == bfs_reachable_white(mask, seed, theta)
            checked += 1

    def test_disk_mode_oracle(self, rng):
        checked = 0
        while checked < 12:
            mask = random_mask(rng, max_side=40)
            seed = random_white_seed(rng, mask)
            if seed is None:
                continue
            got = circledat(mask, seed, TraversalParams(theta=2, disk_mode=True)).as_set()
            assert got == bfs_reachable_white(mask, seed, 2, disk=True)
            checked += 1

    def test_disk_mode_is_tighter(self):
        # theta=1 disk has no diagonal offsets
        mask = np.zeros((4, 4), dtype=np.uint8)
        mask[0, 0] = 255
        mask[1, 1] = 255
        square = circledat(mask, (0, 0), TraversalParams(theta=1)).as_set()
        disk = circledat(mask, (0, 0), TraversalParams(theta=1, disk_mode=True)).as_set()
        assert square == {(0, 0), (1, 1)}
        assert disk == {(0, 0)}

    def test_deterministic_collection_order(self, rng):
        mask = random_mask(rng)
        seed = random_white_seed(rng, mask)
        a = circledat(mask, seed, TraversalParams(theta=2))
        b = circledat(mask, seed, TraversalParams(theta=2))
        assert a.pixels == b.pixels

    def test_visit_bound_and_purity(self, rng):
        for _ in range(10):
            mask = random_mask(rng)
            seed = random_white_seed(rng, mask)
            if seed is None:
                continue
            theta = int(rng.integers(1, 4))
            result = circledat(mask, seed, TraversalParams(theta=theta))
            h, w = mask.shape
            bound = min(w * h, len(result.pixels) * (2 * theta + 1) ** 2 + 1)
            assert result.visit_count <= bound
            assert len(set(result.pixels)) == len(result.pixels)
            for x, y in result.pixels:
                assert mask[y, x] == 255

    def test_monotone_in_theta(self, rng):
        for _ in range(8):
            mask = random_mask(rng, max_side=48)
            seed = random_white_seed(rng, mask)
            if seed is None:
                continue
            prev = set()
            for theta in (1, 2, 3):
                got = circledat(mask, seed, TraversalParams(theta=theta)).as_set()
                assert prev <= got
                prev = got

    def test_gap_bridging_law_exhaustive(self):
        # two pixels at Chebyshev distance d connect iff d <= theta
        for d in range(1, 11):
            for dx, dy in ((d, 0), (0, d), (d, d), (d, max(0, d - 1))):
                if max(dx, dy) != d:
                    continue
                mask = np.zeros((24, 24), dtype=np.uint8)
                mask[0, 0] = 255
                mask[dy, dx] = 255
                for theta in range(1, 11):
                    got = circledat(mask, (0, 0), TraversalParams(theta=theta)).as_set()
                    if d <= theta:
                        assert got == {(0, 0), (dx, dy)}, (d, theta, dx, dy)
                    else:
                        assert got == {(0, 0)}, (d, theta, dx, dy)

    def test_seed_out_of_bounds(self):
        with pytest.raises(ValueError):
            circledat(np.zeros((4, 4), np.uint8), (4, 0), TraversalParams(theta=1))

    def test_theta_larger_than_mask(self):
        with pytest.raises(ValueError):
            circledat(np.zeros((4, 4), np.uint8), (0, 0), TraversalParams(theta=5))


class TestCircledatMulti:
    def test_same_component_idempotent(self):
        mask = np.zeros((10, 10), dtype=np.uint8)
        mask[4, 2:8] = 255
        single = circledat(mask, (2, 4), TraversalParams(theta=1)).as_set()
        double = circledat_multi(mask, SeedSet(seeds=[(2, 4), (7, 4)]), TraversalParams(theta=1))
        assert double.as_set() == single

    def test_disjoint_components_union(self):
        mask = np.zeros((20, 20), dtype=np.uint8)
        mask[2, 2:5] = 255
        mask[15, 10:14] = 255
        params = TraversalParams(theta=1)
        union = circledat_multi(mask, [(2, 2), (10, 15)], params).as_set()
        expected = bfs_reachable_white(mask, (2, 2), 1) | bfs_reachable_white(mask, (10, 15), 1)
        assert union == expected

    def test_empty_seed_list(self):
        result = circledat_multi(np.zeros((5, 5), np.uint8), [], TraversalParams(theta=1))
        assert result.pixels == [] and result.visit_count == 0

    def test_order_independent_set(self, rng):
        mask = random_mask(rng, max_side=40)
        seeds = [random_white_seed(rng, mask) for _ in range(3)]
        seeds = [s for s in seeds if s is not None]
        if not seeds:
            pytest.skip("empty random mask")
        params = TraversalParams(theta=2)
        forward = circledat_multi(mask, seeds, params).as_set()
        backward = circledat_multi(mask, seeds[::-1], params).as_set()
        assert forward == backward
        assert len(set(circledat_multi(mask, seeds, params).pixels)) == len(forward)


class TestSlidingWindow:
    def test_all_black(self):
        result = sliding_window_collect(np.zeros((7, 9), np.uint8))
        assert result.pixels == []
        assert result.visit_count == 63

    def test_collects_every_white(self, rng):
        mask = (rng.random((15, 11)) < 0.3).astype(np.uint8) * 255
        result = sliding_window_collect(mask)
        assert len(result.pixels) == int((mask == 255).sum())
        assert result.visit_count == 15 * 11
        assert result.as_set() == {tuple(p[::-1]) for p in np.argwhere(mask == 255)}

    def test_superset_of_circledat(self, rng):
        for _ in range(5):
            mask = random_mask(rng, max_side=40)
            sw = sliding_window_collect(mask).as_set()
            seed = random_white_seed(rng, mask)
            if seed is None:
                continue
            cd = circledat(mask, seed, TraversalParams(theta=2)).as_set()
            assert cd <= sw


@pytest.fixture(scope="module")
def small_report():
    mask = np.zeros((256, 256), dtype=np.uint8)
    mask[40:200, 100:104] = 255  # thin connected bar, ~1% white
    return benchmark_traversal([mask], TraversalParams(theta=3), runs=5), mask


class TestBenchmark:

    def test_two_rows_with_table_columns(self, small_report):
        report, _ = small_report
        assert [r.algorithm for r in report.rows] == ["SW Search", "CIRCLEDAT"]
        assert [r.complexity for r in report.rows] == ["O(m x n)", "O(k)"]
        assert all(r.median_ms >= 0 for r in report.rows)

    def test_sparse_visit_contrast(self, small_report):
        report, mask = small_report
        sw, cd = report.row("SW Search"), report.row("CIRCLEDAT")
        assert sw.visits == mask.size
        white = int((mask == 255).sum())
        assert cd.visits <= white * 49 + 1
        assert cd.visits < 0.05 * mask.size

    def test_dense_visits_bounded_by_size(self):
        mask = np.full((64, 64), 255, dtype=np.uint8)
        report = benchmark_traversal([mask], TraversalParams(theta=1), runs=1)
        assert report.row("CIRCLEDAT").visits <= mask.size

    def test_csv_columns(self, small_report, tmp_path):
        report, _ = small_report
        write_benchmark_csv(report, tmp_path / "bench.csv")
        lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
        assert lines[0] == "algorithm,complexity,median_ms,visits"
        assert len(lines) == 3

    def test_needs_masks(self):
        with pytest.raises(ValueError):
            benchmark_traversal([], TraversalParams(theta=1))
