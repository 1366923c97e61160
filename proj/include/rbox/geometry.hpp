#pragma once

// Exact rotated-box geometry: vertex extraction, convex clipping, exact
// 2-D SkewIoU and yaw-only 3-D IoU, plus a pixel-counting IoU that serves
// as an independent oracle for the exact path. Everything here is plain
// double; gradients live entirely in the Gaussian-based pipeline.

#include <cstdint>
#include <vector>

#include "rbox/errors.hpp"

namespace rbox {

inline constexpr double kDegToRad = 0.017453292519943295;

enum class AngleConvention : std::uint8_t {
    OpenCV,    // theta in [-90, 0)
    LongEdge,  // theta in [-90, 90), w >= h
};

/// Rotated rectangle (x, y, w, h, theta). theta is degrees, counter-clockwise
/// about the center; w extends along the rotated x axis, h along the rotated y.
struct RotatedBox2D {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    double theta = 0.0;
    AngleConvention convention = AngleConvention::OpenCV;
};

/// Yaw-only 3-D box: footprint (w, h) rotated by theta about z, extent l along z.
struct RotatedBox3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 0.0;
    double h = 0.0;
    double l = 0.0;
    double theta = 0.0;
};

void validate_box(const RotatedBox2D& b);  // throws InvalidBoxError
void validate_box(const RotatedBox3D& b);

/// Whether theta (and w >= h for LongEdge) lies in the tagged convention's range.
bool in_convention_range(const RotatedBox2D& b);

/// Equivalent box (same point set) with theta in the target convention's range.
RotatedBox2D canonicalize(const RotatedBox2D& b, AngleConvention target);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

/// Vertex list in counter-clockwise order; construction re-orients if needed.
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const { return vertices_; }
    bool empty() const { return vertices_.size() < 3; }
    std::size_t size() const { return vertices_.size(); }

private:
    std::vector<Point2> vertices_;
};

ConvexPolygon box2d_vertices(const RotatedBox2D& b);

/// Intersection of two convex polygons (half-plane clipping, inclusive eps).
ConvexPolygon convex_clip(const ConvexPolygon& subject, const ConvexPolygon& clip);

double polygon_area(const ConvexPolygon& poly);
Point2 polygon_centroid(const ConvexPolygon& poly);

/// Exact intersection-over-union of two rotated boxes.
double skew_iou_2d(const RotatedBox2D& a, const RotatedBox2D& b);

/// Volume IoU of two yaw-only 3-D boxes: BEV polygon intersection x z overlap.
double skew_iou_3d(const RotatedBox3D& a, const RotatedBox3D& b);

/// Pixel-counting IoU over a grid_n x grid_n grid spanning both boxes.
/// Converges to skew_iou_2d as grid_n grows; used as an independent oracle.
double rasterized_iou(const RotatedBox2D& a, const RotatedBox2D& b, int grid_n);

}  // namespace rbox
