#include "cvfe/basis.hpp"

#include <Eigen/LU>

#include <cmath>

namespace cvfe {

namespace {

constexpr double kInsideTolerance = 1e-12;

ReferenceBasisEval eval_reference_unchecked(const Point& xi)
{
    const double x = xi.x(), y = xi.y();
    const double l0 = 1.0 - x - y;

    ReferenceBasisEval r;
    const double bubble = 27.0 * x * y * l0;
    const Vector2 grad_bubble(27.0 * y * (l0 - x), 27.0 * x * (l0 - y));

    r.values = {l0 - bubble / 3.0, x - bubble / 3.0, y - bubble / 3.0, bubble};
    r.gradients = {Vector2(-1.0, -1.0) - grad_bubble / 3.0, Vector2(1.0, 0.0) - grad_bubble / 3.0,
                   Vector2(0.0, 1.0) - grad_bubble / 3.0, grad_bubble};
    return r;
}

} // namespace

ReferenceBasisEval eval_reference(const Point& xi)
{
    if (xi.x() < -kInsideTolerance || xi.y() < -kInsideTolerance || xi.x() + xi.y() > 1.0 + kInsideTolerance)
        throw std::invalid_argument("eval_reference: point outside the reference triangle");
    return eval_reference_unchecked(xi);
}

AffineMap AffineMap::from_triangle(const Point& a, const Point& b, const Point& c)
{
    AffineMap map;
    map.origin = a;
    map.jacobian.col(0) = b - a;
    map.jacobian.col(1) = c - a;
    map.det = map.jacobian.determinant();
    if (!(map.det > 0.0))
        throw std::invalid_argument("AffineMap: degenerate or clockwise element");
    map.inverse_transpose = map.jacobian.inverse().transpose();
    return map;
}

PhysicalBasisEval eval_physical(const AffineMap& map, const Point& x)
{
    const Point xi = map.to_reference(x);
    if (xi.x() < -1e-9 || xi.y() < -1e-9 || xi.x() + xi.y() > 1.0 + 1e-9)
        throw std::invalid_argument("eval_physical: point outside the element");
    const auto ref = eval_reference_unchecked(xi);
    PhysicalBasisEval out;
    out.values = ref.values;
    for (int i = 0; i < 4; ++i)
        out.gradients[i] = map.inverse_transpose * ref.gradients[i];
    return out;
}

PhysicalBasisEval eval_physical(const std::array<Point, 3>& element, const Point& x)
{
    return eval_physical(AffineMap::from_triangle(element), x);
}

std::array<double, 3> p1_values(const AffineMap& map, const Point& x)
{
    const Point xi = map.to_reference(x);
    return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

std::array<Vector2, 3> p1_gradients(const AffineMap& map)
{
    return {map.inverse_transpose * Vector2(-1.0, -1.0), map.inverse_transpose * Vector2(1.0, 0.0),
            map.inverse_transpose * Vector2(0.0, 1.0)};
}

} // namespace cvfe
