#include "cvfe/schemes.hpp"

namespace cvfe {

namespace {

constexpr int kVolumeDegree = 6;

} // namespace

ElementCoefficients gather(const GridDiscretization& disc, Index element, const Vector& solution)
{
    ElementCoefficients c;
    const auto loc = disc.element_locations(element);
    for (int a = 0; a < 4; ++a)
        c.velocity[a] = Vector2(solution[DofMap::velocity_dof(loc[a], 0)], solution[DofMap::velocity_dof(loc[a], 1)]);
    for (int b = 0; b < 3; ++b)
        c.pressure[b] = solution[disc.dofs.pressure_dof(loc[b])];
    return c;
}

FluxMatrix momentum_flux_matrix(const std::vector<QuadPoint>& quad, const Vector2& n, const AffineMap& map,
                                double viscosity)
{
    FluxMatrix out;
    for (const auto& qp : quad) {
        const auto basis = eval_physical(map, qp.point);
        const auto p1 = p1_values(map, qp.point);
        for (int a = 0; a < 4; ++a) {
            const Vector2& g = basis.gradients[a];
            const double g_dot_n = g.dot(n);
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i) {
                    // (2 D(phi e_k) n)_i = delta_ik (g.n) + g_i n_k
                    const double sym = (i == k ? g_dot_n : 0.0) + g[i] * n[k];
                    out.velocity(i, 2 * a + k) -= qp.weight * viscosity * sym;
                }
        }
        for (int b = 0; b < 3; ++b)
            for (int i = 0; i < 2; ++i)
                out.pressure(i, b) += qp.weight * p1[b] * n[i];
    }
    return out;
}

LocalVelocityRow mass_flux_row(const std::vector<QuadPoint>& quad, const Vector2& n, const AffineMap& map)
{
    LocalVelocityRow row = LocalVelocityRow::Zero();
    for (const auto& qp : quad) {
        const auto basis = eval_physical(map, qp.point);
        for (int a = 0; a < 4; ++a)
            for (int k = 0; k < 2; ++k)
                row(2 * a + k) += qp.weight * basis.values[a] * n[k];
    }
    return row;
}

Vector2 momentum_flux(const std::vector<QuadPoint>& quad, const Vector2& n, const AffineMap& map,
                      const ElementCoefficients& coeffs, double viscosity)
{
    Vector2 flux = Vector2::Zero();
    for (const auto& qp : quad) {
        const auto basis = eval_physical(map, qp.point);
        const auto p1 = p1_values(map, qp.point);
        Matrix2 grad = Matrix2::Zero(); // grad(i,j) = d v_i / d x_j
        for (int a = 0; a < 4; ++a)
            grad += coeffs.velocity[a] * basis.gradients[a].transpose();
        double p = 0.0;
        for (int b = 0; b < 3; ++b)
            p += coeffs.pressure[b] * p1[b];
        const Matrix2 strain = 0.5 * (grad + grad.transpose());
        flux += qp.weight * (-2.0 * viscosity * strain * n + p * n);
    }
    return flux;
}

double mass_flux(const std::vector<QuadPoint>& quad, const Vector2& n, const AffineMap& map,
                 const ElementCoefficients& coeffs)
{
    double flux = 0.0;
    for (const auto& qp : quad) {
        const auto basis = eval_physical(map, qp.point);
        Vector2 v = Vector2::Zero();
        for (int a = 0; a < 4; ++a)
            v += basis.values[a] * coeffs.velocity[a];
        flux += qp.weight * v.dot(n);
    }
    return flux;
}

Vector2 momentum_flux(const SubControlVolumeFace& face, const AffineMap& map, const ElementCoefficients& coeffs,
                      double viscosity)
{
    return momentum_flux(face.quad_points, face.unit_normal, map, coeffs, viscosity);
}

double mass_flux(const SubControlVolumeFace& face, const AffineMap& map, const ElementCoefficients& coeffs)
{
    return mass_flux(face.quad_points, face.unit_normal, map, coeffs);
}

GalerkinElement galerkin_element(const std::array<Point, 3>& element, const StokesProblem& problem)
{
    const AffineMap map = AffineMap::from_triangle(element);
    const auto& rule = triangle_rule(kVolumeDegree);
    const double mu = problem.viscosity;
    GalerkinElement out;

    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Point x = map.to_physical(rule.points[q]);
        const double w = rule.weights[q] * map.det;
        const auto ref = eval_reference(rule.points[q]);
        std::array<Vector2, 4> grads;
        for (int a = 0; a < 4; ++a)
            grads[a] = map.inverse_transpose * ref.gradients[a];
        const std::array<double, 3> p1{1.0 - rule.points[q].x() - rule.points[q].y(), rule.points[q].x(),
                                       rule.points[q].y()};
        const Vector2 f = problem.body_force ? problem.body_force(x) : Vector2::Zero();
        const double g = problem.mass_source ? problem.mass_source(x) : 0.0;

        for (int t = 0; t < 4; ++t) {
            const Vector2& gt = grads[t];
            for (int kt = 0; kt < 2; ++kt) {
                const int row = 2 * t + kt;
                for (int a = 0; a < 4; ++a) {
                    const Vector2& ga = grads[a];
                    for (int ka = 0; ka < 2; ++ka) {
                        // 2 mu D(phi_a e_ka) : D(phi_t e_kt) = mu (delta g_a.g_t + g_a[kt] g_t[ka])
                        const double dd = (ka == kt ? ga.dot(gt) : 0.0) + ga[kt] * gt[ka];
                        out.A(row, 2 * a + ka) += w * mu * dd;
                    }
                }
                for (int b = 0; b < 3; ++b)
                    out.B(row, b) -= w * p1[b] * gt[kt];
                out.f(row) += w * f[kt] * ref.values[t];
            }
        }
        for (int b = 0; b < 3; ++b) {
            for (int a = 0; a < 4; ++a)
                for (int k = 0; k < 2; ++k)
                    out.C(b, 2 * a + k) += w * p1[b] * grads[a][k];
            out.g(b) += w * g * p1[b];
        }
    }
    return out;
}

BubbleRows bubble_fem_row(const std::array<Point, 3>& element, const StokesProblem& problem)
{
    const auto local = galerkin_element(element, problem);
    BubbleRows rows;
    rows.velocity = local.A.bottomRows<2>();
    rows.pressure = local.B.bottomRows<2>();
    rows.rhs = local.f.bottomRows<2>();
    return rows;
}

namespace {

template <class Field, class Result>
Result integrate_fan(const std::vector<Point>& polygon, const Point& center, const Field& field, int degree, Result zero)
{
    const auto& rule = triangle_rule(degree);
    const double scale = std::abs(polygon_area(polygon));
    Result sum = zero;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % polygon.size()];
        const double area = signed_area(center, a, b);
        if (std::abs(area) <= 1e-14 * scale)
            continue;
        const Vector2 e1 = a - center, e2 = b - center;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Point x = center + rule.points[q].x() * e1 + rule.points[q].y() * e2;
            sum += (2.0 * area * rule.weights[q]) * field(x);
        }
    }
    return sum;
}

} // namespace

Vector2 integrate_polygon(const std::vector<Point>& polygon, const Point& center, const VectorField& field, int degree)
{
    if (!field)
        return Vector2::Zero();
    return integrate_fan(polygon, center, field, degree, Vector2(Vector2::Zero()));
}

double integrate_polygon(const std::vector<Point>& polygon, const Point& center, const ScalarField& field, int degree)
{
    if (!field)
        return 0.0;
    return integrate_fan(polygon, center, field, degree, 0.0);
}

Vector2 integrate_traction(const BoundarySegment& segment, const TractionField& traction)
{
    Vector2 sum = Vector2::Zero();
    if (!traction)
        return sum;
    for (const auto& qp : segment.quad_points)
        sum += qp.weight * traction(qp.point, segment.unit_normal);
    return sum;
}

} // namespace cvfe
