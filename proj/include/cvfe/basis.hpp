#pragma once

#include "cvfe/types.hpp"

#include <array>
#include <vector>

namespace cvfe {

/// Positive-weight rule on the reference triangle {x,y >= 0, x+y <= 1}.
struct TriangleRule {
    std::vector<Point> points;
    std::vector<double> weights; ///< sum to 1/2
    int exact_degree = 0;
};

/// Positive-weight rule on the unit segment [0,1].
struct SegmentRule {
    std::vector<double> points;
    std::vector<double> weights; ///< sum to 1
    int exact_degree = 0;
};

/// Degree 1 is the centroid rule, degree 2 the three-point edge-interior rule,
/// higher degrees use collapsed (Duffy) Gauss-Legendre products.
const TriangleRule& triangle_rule(int degree);
/// Gauss-Legendre with ceil((degree+1)/2) points.
const SegmentRule& segment_rule(int degree);

inline constexpr int kMaxTriangleDegree = 8;
inline constexpr int kMaxSegmentDegree = 5;

/// Local MINI basis in the order (phi~_1, phi~_2, phi~_3, phi_E).
///
/// phi_E = 27 xy(1-x-y) is normalized to one at the centroid and the vertex
/// functions are the P1 hats minus a third of the bubble, so the four
/// functions are nodal at {vertices, centroid} and sum to one.
struct ReferenceBasisEval {
    std::array<double, 4> values{};
    std::array<Vector2, 4> gradients{};
};

ReferenceBasisEval eval_reference(const Point& xi);

/// x = origin + jacobian * xi, mapping the reference triangle onto (a,b,c).
struct AffineMap {
    Point origin = Point::Zero();
    Matrix2 jacobian = Matrix2::Identity();
    Matrix2 inverse_transpose = Matrix2::Identity();
    double det = 1.0;

    static AffineMap from_triangle(const Point& a, const Point& b, const Point& c);
    static AffineMap from_triangle(const std::array<Point, 3>& p) { return from_triangle(p[0], p[1], p[2]); }

    Point to_physical(const Point& xi) const { return origin + jacobian * xi; }
    Point to_reference(const Point& x) const { return inverse_transpose.transpose() * (x - origin); }
};

struct PhysicalBasisEval {
    std::array<double, 4> values{};
    std::array<Vector2, 4> gradients{};
};

PhysicalBasisEval eval_physical(const AffineMap& map, const Point& x);
PhysicalBasisEval eval_physical(const std::array<Point, 3>& element, const Point& x);

/// Barycentric P1 values at a physical point (the pressure basis).
std::array<double, 3> p1_values(const AffineMap& map, const Point& x);
/// Constant P1 gradients of the three hat functions.
std::array<Vector2, 3> p1_gradients(const AffineMap& map);

} // namespace cvfe
