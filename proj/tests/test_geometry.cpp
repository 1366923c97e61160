#include <doctest.h>

#include <cmath>

#include "rbox/geometry.hpp"
#include "rbox/rng.hpp"

using namespace rbox;

namespace {

RotatedBox2D fuzz_box(CounterRng& rng, double ext_min = 2.0, double ext_max = 50.0) {
    return {rng.uniform(-50, 50), rng.uniform(-50, 50),     rng.uniform(ext_min, ext_max),
            rng.uniform(ext_min, ext_max), rng.uniform(-90, 90), AngleConvention::LongEdge};
}

bool same_vertex_set(const ConvexPolygon& poly, const std::vector<Point2>& expected,
                     double tol = 1e-9) {
    if (poly.size() != expected.size()) return false;
    for (const Point2& e : expected) {
        bool found = false;
        for (const Point2& v : poly.vertices())
            if (std::abs(v.x - e.x) <= tol && std::abs(v.y - e.y) <= tol) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("box vertices: axis-aligned, translated, rotated") {
    const ConvexPolygon unit = box2d_vertices({0, 0, 2, 2, 0});
    CHECK(same_vertex_set(unit, {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}));

    const ConvexPolygon moved = box2d_vertices({5, 5, 2, 2, 0});
    CHECK(same_vertex_set(moved, {{6, 6}, {4, 6}, {4, 4}, {6, 4}}));

    const double r = std::sqrt(2.0);
    const ConvexPolygon diag = box2d_vertices({0, 0, 2, 2, 45});
    CHECK(same_vertex_set(diag, {{r, 0}, {0, r}, {-r, 0}, {0, -r}}));

    const Point2 c = polygon_centroid(box2d_vertices({3, -1, 6, 2, 30}));
    CHECK(std::abs(c.x - 3.0) <= 1e-9);
    CHECK(std::abs(c.y + 1.0) <= 1e-9);
}

TEST_CASE("box vertices reject bad extents") {
    CHECK_THROWS_AS(box2d_vertices({0, 0, -1, 2, 0}), InvalidBoxError);
    CHECK_THROWS_AS(box2d_vertices({0, 0, 2, 0, 0}), InvalidBoxError);
    CHECK_THROWS_AS(box2d_vertices({std::nan(""), 0, 2, 2, 0}), InvalidBoxError);
}

TEST_CASE("convex clip: idempotence, partial overlap, disjoint") {
    const ConvexPolygon p = box2d_vertices({0, 0, 1, 1, 0});
    const ConvexPolygon self = convex_clip(p, p);
    CHECK(same_vertex_set(self, p.vertices()));

    const ConvexPolygon shifted = box2d_vertices({0.5, 0, 1, 1, 0});
    CHECK(polygon_area(convex_clip(p, shifted)) == doctest::Approx(0.5).epsilon(1e-12));

    const ConvexPolygon far = box2d_vertices({10, 10, 1, 1, 0});
    CHECK(polygon_area(convex_clip(p, far)) == 0.0);
}

TEST_CASE("polygon area basics") {
    CHECK(polygon_area(box2d_vertices({0.5, 0.5, 1, 1, 0})) == doctest::Approx(1.0));
    CHECK(polygon_area(ConvexPolygon{}) == 0.0);
    CHECK(polygon_area(ConvexPolygon({{0, 0}, {2, 0}, {0, 2}})) == doctest::Approx(2.0));
}

TEST_CASE("clip output never exceeds inputs; containment returns subject") {
    for (int i = 0; i < 300; ++i) {
        CounterRng rng(11, static_cast<std::uint64_t>(i));
        const ConvexPolygon a = box2d_vertices(fuzz_box(rng));
        const ConvexPolygon b = box2d_vertices(fuzz_box(rng));
        const double inter = polygon_area(convex_clip(a, b));
        CHECK(inter <= std::min(polygon_area(a), polygon_area(b)) + 1e-9);
    }
    const RotatedBox2D small{1, 1, 2, 2, 30};
    const RotatedBox2D big{0, 0, 50, 50, 10};
    const ConvexPolygon kept = convex_clip(box2d_vertices(small), box2d_vertices(big));
    CHECK(polygon_area(kept) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("skew iou 2d spot values") {
    CHECK(skew_iou_2d({0, 0, 2, 2, 0}, {1, 0, 2, 2, 0}) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(skew_iou_2d({0, 0, 4, 2, 0}, {0, 0, 4, 2, 90}) ==
          doctest::Approx(1.0 / 3).epsilon(1e-12));
    // Concentric squares at 45 degrees: octagon overlap, IoU = 8(sqrt2-1)/(8-8(sqrt2-1)).
    const double expected = 8 * (std::sqrt(2.0) - 1) / (8 - 8 * (std::sqrt(2.0) - 1));
    CHECK(skew_iou_2d({0, 0, 2, 2, 0}, {0, 0, 2, 2, 45}) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(rasterized_iou({0, 0, 2, 2, 0}, {0, 0, 2, 2, 45}, 2000) - expected) <= 5e-3);
}

TEST_CASE("skew iou 3d spot values") {
    const RotatedBox3D a{0, 0, 0, 4, 2, 2, 0};
    CHECK(skew_iou_3d(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    const RotatedBox3D lower{0, 0, 0, 4, 2, 2, 0};
    const RotatedBox3D upper{0, 0, 1, 4, 2, 2, 0};  // half vertical overlap
    CHECK(skew_iou_3d(lower, upper) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    const RotatedBox3D crossed{0, 0, 0, 4, 2, 2, 90};
    CHECK(skew_iou_3d(a, crossed) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("rasterized iou trivial cases") {
    const RotatedBox2D b{2, 3, 7, 4, 20};
    CHECK(rasterized_iou(b, b, 200) == doctest::Approx(1.0));
    CHECK(rasterized_iou({0, 0, 2, 2, 0}, {10, 0, 2, 2, 0}, 200) == 0.0);
    CHECK_THROWS(rasterized_iou(b, b, 50));
}

TEST_CASE("canonicalize conventions") {
    const RotatedBox2D b{0, 0, 2, 4, -30, AngleConvention::OpenCV};
    const RotatedBox2D le = canonicalize(b, AngleConvention::LongEdge);
    CHECK(le.w == doctest::Approx(4.0));
    CHECK(le.h == doctest::Approx(2.0));
    CHECK(le.theta == doctest::Approx(60.0));
    CHECK(in_convention_range(le));
    CHECK(skew_iou_2d(b, le) == doctest::Approx(1.0).epsilon(1e-9));

    const RotatedBox2D already{0, 0, 4, 2, -30, AngleConvention::LongEdge};
    const RotatedBox2D same = canonicalize(already, AngleConvention::LongEdge);
    CHECK(same.w == already.w);
    CHECK(same.h == already.h);
    CHECK(same.theta == already.theta);

    const RotatedBox2D square{1, 2, 3, 3, 15, AngleConvention::LongEdge};
    const RotatedBox2D sq_oc = canonicalize(square, AngleConvention::OpenCV);
    CHECK(in_convention_range(sq_oc));
    CHECK(skew_iou_2d(square, sq_oc) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("skew iou invariances over fuzzed pairs") {
    for (int i = 0; i < 250; ++i) {
        CounterRng rng(21, static_cast<std::uint64_t>(i));
        RotatedBox2D a = fuzz_box(rng);
        RotatedBox2D b = fuzz_box(rng);
        b.x = a.x + rng.uniform(-30, 30);
        b.y = a.y + rng.uniform(-30, 30);
        const double iou = skew_iou_2d(a, b);
        CHECK(iou >= 0.0);
        CHECK(iou <= 1.0);
        CHECK(skew_iou_2d(b, a) == doctest::Approx(iou).epsilon(1e-9));
        CHECK(skew_iou_2d(a, a) == doctest::Approx(1.0).epsilon(1e-9));

        // rigid motion
        const double phi = rng.uniform(-180, 180);
        const double tx = rng.uniform(-20, 20), ty = rng.uniform(-20, 20);
        auto moved = [&](const RotatedBox2D& o) {
            const double rad = phi * kDegToRad;
            RotatedBox2D m = o;
            m.x = std::cos(rad) * o.x - std::sin(rad) * o.y + tx;
            m.y = std::sin(rad) * o.x + std::cos(rad) * o.y + ty;
            m.theta = o.theta + phi;
            return m;
        };
        CHECK(skew_iou_2d(moved(a), moved(b)) == doctest::Approx(iou).epsilon(1e-9));

        // uniform scale
        const double s = rng.uniform(0.1, 10.0);
        auto scaled = [&](const RotatedBox2D& o) {
            return RotatedBox2D{s * o.x, s * o.y, s * o.w, s * o.h, o.theta, o.convention};
        };
        CHECK(skew_iou_2d(scaled(a), scaled(b)) == doctest::Approx(iou).epsilon(1e-9));

        // canonicalization does not move the point set
        CHECK(skew_iou_2d(canonicalize(a, AngleConvention::OpenCV), b) ==
              doctest::Approx(iou).epsilon(1e-9));
    }
}

TEST_CASE("exact iou agrees with the pixel-counting oracle") {
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(31, static_cast<std::uint64_t>(i));
        RotatedBox2D a = fuzz_box(rng);
        RotatedBox2D b = fuzz_box(rng);
        b.x = a.x + rng.uniform(-40, 40);
        b.y = a.y + rng.uniform(-40, 40);
        CHECK(std::abs(skew_iou_2d(a, b) - rasterized_iou(a, b, 1000)) <= 5e-3);
    }
}
