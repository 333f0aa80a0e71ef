import numpy as np
import pytest
from PIL import Image, ImageDraw
from scipy import ndimage

from linemark.errors import PointAtInfinityError, SingularHomographyError
from linemark.frames import Frame, Roi, make_roi
from linemark.geometry import (
    compute_homography,
    invert_homography,
    map_point,
    map_points,
    roi_homography,
    unwarp_mask,
    warp_roi,
)

RECT = np.array([[0, 0], [99, 0], [99, 99], [0, 99]], dtype=np.float64)
TRAPEZOID = np.array([[100, 200], [540, 200], [620, 470], [20, 470]], dtype=np.float64)


def random_quad_pair(rng):
    """A random valid (convex, well-separated) src quad and dst rectangle."""
    w = rng.uniform(80, 600)
    h = rng.uniform(80, 400)
    dst = np.array([[0, 0], [w, 0], [w, h], [0, h]])
    base = np.array([[100, 100], [500, 100], [500, 400], [100, 400]], dtype=np.float64)
    jitter = rng.uniform(-70, 70, size=(4, 2))
    src = base + jitter
    return src, dst


def is_convex(q):
    crosses = []
    for k in range(4):
        a = q[(k + 1) % 4] - q[k]
        b = q[(k + 2) % 4] - q[(k + 1) % 4]
        crosses.append(a[0] * b[1] - a[1] * b[0])
    return all(c > 1e-6 for c in crosses) or all(c < -1e-6 for c in crosses)


class TestComputeHomography:
    def test_fixed_points_force_identity(self):
        m = compute_homography(RECT, RECT)
        assert np.allclose(m, np.eye(3), atol=1e-9)

    def test_translation(self):
        src = RECT + np.array([10.0, 5.0])
        m = compute_homography(src, RECT)
        assert np.allclose(m, [[1, 0, 10], [0, 1, 5], [0, 0, 1]], atol=1e-9)
        for d, s in zip(RECT, src):
            assert np.allclose(map_point(m, d), s, atol=1e-9)

    def test_generic_trapezoid_residuals(self):
        dst = np.array([[0, 0], [399, 0], [399, 299], [0, 299]], dtype=np.float64)
        m = compute_homography(TRAPEZOID, dst)
        for d, s in zip(dst, TRAPEZOID):
            mapped = np.asarray(map_point(m, d))
            assert np.max(np.abs(mapped - s)) < 1e-9

    def test_normalized_scale_entry(self, rng):
        for _ in range(20):
            src, dst = random_quad_pair(rng)
            if not (is_convex(src) and is_convex(dst)):
                continue
            m = compute_homography(src, dst)
            assert m[2, 2] == 1.0

    def test_singular_correspondence(self):
        collinear = np.array([[0, 0], [10, 0], [20, 0], [30, 0]], dtype=np.float64)
        with pytest.raises(SingularHomographyError):
            compute_homography(TRAPEZOID, collinear)


class TestMapPoint:
    def test_identity(self):
        assert map_point(np.eye(3), (17, 23)) == (17.0, 23.0)

    def test_translation(self):
        m = np.array([[1.0, 0, 10], [0, 1, 5], [0, 0, 1]])
        assert map_point(m, (0, 0)) == (10.0, 5.0)

    def test_projective_hand_computed(self):
        # denominator 1*1 + 0*0 + 1 = 2; numerators (1, 0) -> (0.5, 0.0)
        m = np.array([[1.0, 0, 0], [0, 1, 0], [1, 0, 1]])
        x, y = map_point(m, (1, 0))
        assert x == pytest.approx((1 * 1 + 0 * 0 + 0) / 2, abs=0)
        assert y == pytest.approx(0.0, abs=0)

    def test_point_at_infinity(self):
        m = np.array([[1.0, 0, 0], [0, 1, 0], [-1, 0, 1]])
        with pytest.raises(PointAtInfinityError):
            map_point(m, (1, 0))

    def test_inverse_consistency(self, rng):
        for _ in range(200):
            src, dst = random_quad_pair(rng)
            if not (is_convex(src) and is_convex(dst)):
                continue
            m = compute_homography(src, dst)
            minv = invert_homography(m)
            p = rng.uniform(0, 400, size=2)
            q = map_point(m, p)
            back = np.asarray(map_point(minv, q))
            assert np.max(np.abs(back - p)) < 1e-6

    def test_composition(self, rng):
        for _ in range(50):
            src1, dst1 = random_quad_pair(rng)
            src2, dst2 = random_quad_pair(rng)
            if not all(map(is_convex, (src1, dst1, src2, dst2))):
                continue
            m1 = compute_homography(src1, dst1)
            m2 = compute_homography(src2, dst2)
            p = rng.uniform(50, 350, size=2)
            chained = map_point(m2, map_point(m1, p))
            direct = map_point(m2 @ m1, p)
            assert np.max(np.abs(np.asarray(chained) - direct)) < 1e-6


class TestWarpRoi:
    def test_axis_aligned_crop_is_exact(self, random_frame, square_roi):
        warped = warp_roi(random_frame, square_roi)
        assert np.array_equal(warped.image, random_frame.data[5:25, 5:25])

    def test_nearest_matches_crop(self, random_frame, square_roi):
        warped = warp_roi(random_frame, square_roi, interpolation="nearest")
        assert np.array_equal(warped.image, random_frame.data[5:25, 5:25])

    def test_uniform_color_constancy(self):
        img = np.full((480, 640, 3), (13, 200, 77), dtype=np.uint8)
        roi = make_roi(TRAPEZOID, 300, 200)
        warped = warp_roi(Frame(data=img), roi)
        assert np.array_equal(np.unique(warped.image.reshape(-1, 3), axis=0), [[13, 200, 77]])

    def test_unknown_interpolation(self, random_frame, square_roi):
        with pytest.raises(ValueError):
            warp_roi(random_frame, square_roi, interpolation="cubic")

    def test_out_of_frame_samples_are_black(self):
        img = np.full((50, 50, 3), 200, dtype=np.uint8)
        # src quad extends past the frame edge on the right
        roi = Roi(src=np.array([[30, 10], [70, 10], [70, 40], [30, 40]], float),
                  dst_width=41, dst_height=31)
        warped = warp_roi(Frame(data=img), roi)
        assert np.all(warped.image[:, -5:] == 0)
        assert np.all(warped.image[:, :5] == 200)

    def test_checkerboard_round_trip_loss_budget(self):
        # warp then inverse-warp; frozen regression bound: >= 95% of interior
        # pixels within +/-2 per channel (measured: ~0.96 with 96 px squares)
        w, h = 640, 480
        yy, xx = np.mgrid[0:h, 0:w]
        checker = (((xx // 96) + (yy // 96)) % 2 * 255).astype(np.uint8)
        img = np.stack([checker] * 3, axis=-1)
        roi = make_roi(TRAPEZOID, 900, 423)
        warped = warp_roi(Frame(data=img), roi)
        minv = invert_homography(warped.homography)
        frame_rect = np.array([[0, 0], [w - 1, 0], [w - 1, h - 1], [0, h - 1]], float)
        back_roi = Roi(src=map_points(minv, frame_rect), dst_width=w, dst_height=h)
        back = warp_roi(warped.image, back_roi).image

        hull = Image.new("L", (w, h), 0)
        ImageDraw.Draw(hull).polygon([tuple(p) for p in TRAPEZOID], fill=1)
        interior = ndimage.binary_erosion(np.asarray(hull, bool), np.ones((9, 9)))
        diff = np.abs(back.astype(int) - img.astype(int)).max(axis=-1)
        assert (diff[interior] <= 2).mean() >= 0.95


class TestUnwarpMask:
    def test_identity_roi(self, square_roi):
        mask = np.zeros((20, 20), dtype=np.uint8)
        mask[4, 3] = 255  # (x=3, y=4) in mask space
        pts = unwarp_mask(mask, make_roi([(0, 0), (19, 0), (19, 19), (0, 19)], 20, 20), (20, 20))
        assert pts.tolist() == [[3, 4]]

    def test_empty_mask(self):
        roi = make_roi([(0, 0), (19, 0), (19, 19), (0, 19)], 20, 20)
        assert unwarp_mask(np.zeros((20, 20), np.uint8), roi, (20, 20)).shape == (0, 2)

    def test_translation_by_hand(self):
        # src rectangle shifted by (+10, +5): sampling matrix is that
        # translation, so mask (0, 0) lands on frame (10, 5)
        roi = make_roi([(10, 5), (29, 5), (29, 24), (10, 24)], 20, 20)
        mask = np.zeros((20, 20), dtype=np.uint8)
        mask[0, 0] = 255
        pts = unwarp_mask(mask, roi, (64, 48))
        assert pts.tolist() == [[10, 5]]

    def test_deduplicates_and_sorts(self):
        # squeeze a 20-wide mask into a 10-wide src span: neighbors collide
        roi = make_roi([(0, 0), (9, 0), (9, 19), (0, 19)], 20, 20)
        mask = np.full((20, 20), 255, dtype=np.uint8)
        pts = unwarp_mask(mask, roi, (64, 48))
        assert len(np.unique(pts, axis=0)) == len(pts)
        order = np.lexsort((pts[:, 0], pts[:, 1]))
        assert np.array_equal(order, np.arange(len(pts)))

    def test_shape_mismatch(self, square_roi):
        with pytest.raises(ValueError):
            unwarp_mask(np.zeros((5, 5), np.uint8), square_roi, (64, 48))


def test_roi_homography_mapping_direction():
    roi = make_roi(TRAPEZOID, 400, 300)
    m = roi_homography(roi)
    # dst corners map onto the trapezoid vertices
    for corner, vertex in zip(roi.dst_corners, roi.src):
        assert np.allclose(map_point(m, corner), vertex, atol=1e-9)
