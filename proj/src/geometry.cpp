#include "rbox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rbox {

namespace {

// Inclusive half-plane test; collinear points count as inside so that
// clipping a polygon by itself returns the same vertex set.
constexpr double kInsideEps = 1e-9;

// Intersections below this area are geometric noise, reported as empty.
constexpr double kAreaFloor = 1e-12;

double shoelace(const std::vector<Point2>& pts) {
    const std::size_t n = pts.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = pts[i];
        const Point2& q = pts[(i + 1) % n];
        acc += cross(p, q);
    }
    return 0.5 * acc;
}

/// theta reduced to [-90, 90) modulo the box's half-turn symmetry.
double reduce_half_turn(double theta) {
    double t = std::fmod(theta + 90.0, 180.0);
    if (t < 0.0) t += 180.0;
    return t - 90.0;
}

}  // namespace

void validate_box(const RotatedBox2D& b) {
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
        !std::isfinite(b.h) || !std::isfinite(b.theta))
        throw InvalidBoxError("2-D box has a non-finite field");
    if (!(b.w > 0.0) || !(b.h > 0.0))
        throw InvalidBoxError("2-D box extents must be positive");
}

void validate_box(const RotatedBox3D& b) {
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.z) ||
        !std::isfinite(b.w) || !std::isfinite(b.h) || !std::isfinite(b.l) ||
        !std::isfinite(b.theta))
        throw InvalidBoxError("3-D box has a non-finite field");
    if (!(b.w > 0.0) || !(b.h > 0.0) || !(b.l > 0.0))
        throw InvalidBoxError("3-D box extents must be positive");
}

bool in_convention_range(const RotatedBox2D& b) {
    if (b.convention == AngleConvention::OpenCV)
        return b.theta >= -90.0 && b.theta < 0.0;
    return b.theta >= -90.0 && b.theta < 90.0 && b.w >= b.h;
}

RotatedBox2D canonicalize(const RotatedBox2D& b, AngleConvention target) {
    validate_box(b);
    RotatedBox2D r = b;
    r.convention = target;
    r.theta = reduce_half_turn(b.theta);
    if (target == AngleConvention::OpenCV) {
        if (r.theta >= 0.0) {
            std::swap(r.w, r.h);
            r.theta -= 90.0;
        }
    } else {
        if (r.w < r.h) {
            std::swap(r.w, r.h);
            r.theta = reduce_half_turn(r.theta + 90.0);
        }
    }
    return r;
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() >= 3 && shoelace(vertices_) < 0.0)
        std::reverse(vertices_.begin(), vertices_.end());
}

ConvexPolygon box2d_vertices(const RotatedBox2D& b) {
    validate_box(b);
    const double rad = b.theta * kDegToRad;
    const Point2 u = {std::cos(rad), std::sin(rad)};
    const Point2 v = {-u.y, u.x};
    const Point2 c = {b.x, b.y};
    const Point2 du = 0.5 * b.w * u;
    const Point2 dv = 0.5 * b.h * v;
    return ConvexPolygon({c + du + dv, c - du + dv, c - du - dv, c + du - dv});
}

ConvexPolygon convex_clip(const ConvexPolygon& subject, const ConvexPolygon& clip) {
    if (subject.empty() || clip.empty()) return {};
    std::vector<Point2> out = subject.vertices();
    const std::vector<Point2>& cv = clip.vertices();
    std::vector<Point2> in;
    for (std::size_t e = 0; e < cv.size() && !out.empty(); ++e) {
        const Point2 a = cv[e];
        const Point2 dir = cv[(e + 1) % cv.size()] - a;
        in.swap(out);
        out.clear();
        double dprev = cross(dir, in.back() - a);
        Point2 prev = in.back();
        for (const Point2& cur : in) {
            const double dcur = cross(dir, cur - a);
            if (dprev >= -kInsideEps) {
                out.push_back(prev);
                if (dcur < -kInsideEps) {
                    const double t = dprev / (dprev - dcur);
                    out.push_back(prev + t * (cur - prev));
                }
            } else if (dcur >= -kInsideEps) {
                const double t = dprev / (dprev - dcur);
                out.push_back(prev + t * (cur - prev));
            }
            prev = cur;
            dprev = dcur;
        }
    }
    return ConvexPolygon(std::move(out));
}

double polygon_area(const ConvexPolygon& poly) {
    return std::abs(shoelace(poly.vertices()));
}

Point2 polygon_centroid(const ConvexPolygon& poly) {
    const std::vector<Point2>& pts = poly.vertices();
    if (pts.size() < 3) return {};
    double a2 = 0.0;
    Point2 c{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2& p = pts[i];
        const Point2& q = pts[(i + 1) % pts.size()];
        const double w = cross(p, q);
        a2 += w;
        c.x += w * (p.x + q.x);
        c.y += w * (p.y + q.y);
    }
    if (a2 == 0.0) return pts[0];
    return {c.x / (3.0 * a2), c.y / (3.0 * a2)};
}

double skew_iou_2d(const RotatedBox2D& a, const RotatedBox2D& b) {
    const ConvexPolygon pa = box2d_vertices(a);
    const ConvexPolygon pb = box2d_vertices(b);
    const double area_a = polygon_area(pa);
    const double area_b = polygon_area(pb);
    double inter = polygon_area(convex_clip(pa, pb));
    if (inter < kAreaFloor) return 0.0;
    inter = std::min(inter, std::min(area_a, area_b));
    return inter / (area_a + area_b - inter);
}

double skew_iou_3d(const RotatedBox3D& a, const RotatedBox3D& b) {
    validate_box(a);
    validate_box(b);
    const RotatedBox2D fa{a.x, a.y, a.w, a.h, a.theta, AngleConvention::OpenCV};
    const RotatedBox2D fb{b.x, b.y, b.w, b.h, b.theta, AngleConvention::OpenCV};
    const double bev = polygon_area(convex_clip(box2d_vertices(fa), box2d_vertices(fb)));
    const double z_lo = std::max(a.z - 0.5 * a.l, b.z - 0.5 * b.l);
    const double z_hi = std::min(a.z + 0.5 * a.l, b.z + 0.5 * b.l);
    double inter = bev * std::max(0.0, z_hi - z_lo);
    if (inter < kAreaFloor) return 0.0;
    const double va = a.w * a.h * a.l;
    const double vb = b.w * b.h * b.l;
    inter = std::min(inter, std::min(va, vb));
    return inter / (va + vb - inter);
}

namespace {

struct Interval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool empty() const { return lo > hi; }
};

// Restrict x to the band |a*x + b| <= m.
void apply_band(double a, double b, double m, Interval& iv) {
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) > m) iv = {1.0, 0.0};
        return;
    }
    double lo = (-m - b) / a;
    double hi = (m - b) / a;
    if (lo > hi) std::swap(lo, hi);
    iv.lo = std::max(iv.lo, lo);
    iv.hi = std::min(iv.hi, hi);
}

// x-interval of the box's interior on the horizontal line at height y.
Interval box_row_interval(const RotatedBox2D& b, double y) {
    const double rad = b.theta * kDegToRad;
    const double c = std::cos(rad), s = std::sin(rad);
    Interval iv;
    iv.lo = -std::numeric_limits<double>::infinity();
    iv.hi = std::numeric_limits<double>::infinity();
    // u.(p - c) in [-w/2, w/2], v.(p - c) in [-h/2, h/2]
    apply_band(c, s * (y - b.y) - c * b.x, 0.5 * b.w, iv);
    apply_band(-s, c * (y - b.y) + s * b.x, 0.5 * b.h, iv);
    return iv;
}

long count_centers(const Interval& iv, double x0, double dx, int n) {
    if (iv.empty()) return 0;
    // centers at x0 + (i + 0.5) dx, i in [0, n)
    long lo = static_cast<long>(std::ceil((iv.lo - x0) / dx - 0.5));
    long hi = static_cast<long>(std::floor((iv.hi - x0) / dx - 0.5));
    lo = std::max(lo, 0L);
    hi = std::min(hi, static_cast<long>(n) - 1L);
    return std::max(0L, hi - lo + 1L);
}

}  // namespace

double rasterized_iou(const RotatedBox2D& a, const RotatedBox2D& b, int grid_n) {
    if (grid_n < 100) throw std::invalid_argument("rasterized_iou requires grid_n >= 100");
    const ConvexPolygon pa = box2d_vertices(a);
    const ConvexPolygon pb = box2d_vertices(b);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const ConvexPolygon* p : {&pa, &pb}) {
        for (const Point2& v : p->vertices()) {
            xmin = std::min(xmin, v.x);
            xmax = std::max(xmax, v.x);
            ymin = std::min(ymin, v.y);
            ymax = std::max(ymax, v.y);
        }
    }
    const double dx = (xmax - xmin) / grid_n;
    const double dy = (ymax - ymin) / grid_n;
    if (dx <= 0.0 || dy <= 0.0) return 0.0;
    long ca = 0, cb = 0, cab = 0;
    for (int iy = 0; iy < grid_n; ++iy) {
        const double y = ymin + (iy + 0.5) * dy;
        const Interval ia = box_row_interval(a, y);
        const Interval ib = box_row_interval(b, y);
        ca += count_centers(ia, xmin, dx, grid_n);
        cb += count_centers(ib, xmin, dx, grid_n);
        Interval ii;
        ii.lo = std::max(ia.lo, ib.lo);
        ii.hi = std::min(ia.hi, ib.hi);
        if (!ia.empty() && !ib.empty()) cab += count_centers(ii, xmin, dx, grid_n);
    }
    const long uni = ca + cb - cab;
    if (uni <= 0) return 0.0;
    return static_cast<double>(cab) / static_cast<double>(uni);
}

}  // namespace rbox
