#pragma once

// Independent evaluation of CVFE rows through the divergence theorem:
//   row_K(psi) = sum_E [ int_{K cap E} div F_E(psi) dx - int_{dE cap K, interior} F_E(psi) n_E ds ]
// with F = -2 mu D(v) + p I for momentum rows and F = v for mass rows.
// Basis values, gradients and Hessians come from barycentric formulas here,
// not from the library, and integrals use subdivided quadratic-exact rules.

#include "cvfe/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace oracle {

using cvfe::Index;
using cvfe::Point;
using cvfe::Vector2;
using cvfe::Matrix2;

struct Element {
    std::array<Point, 3> p;
    double area2 = 0.0; // twice the signed area
    std::array<Vector2, 3> g;

    explicit Element(const std::array<Point, 3>& pts) : p(pts)
    {
        area2 = (p[1].x() - p[0].x()) * (p[2].y() - p[0].y()) - (p[2].x() - p[0].x()) * (p[1].y() - p[0].y());
        for (int i = 0; i < 3; ++i) {
            const Point& a = p[(i + 1) % 3];
            const Point& b = p[(i + 2) % 3];
            g[i] = Vector2(a.y() - b.y(), b.x() - a.x()) / area2;
        }
    }

    std::array<double, 3> lambda(const Point& x) const
    {
        std::array<double, 3> l;
        for (int i = 0; i < 3; ++i) {
            const Point& a = p[(i + 1) % 3];
            const Point& b = p[(i + 2) % 3];
            l[i] = ((a.x() - x.x()) * (b.y() - x.y()) - (b.x() - x.x()) * (a.y() - x.y())) / area2;
        }
        return l;
    }

    // gradients of (phi~0, phi~1, phi~2, phi_E)
    std::array<Vector2, 4> gradients(const Point& x) const
    {
        const auto l = lambda(x);
        const Vector2 gb = 27.0 * (l[1] * l[2] * g[0] + l[0] * l[2] * g[1] + l[0] * l[1] * g[2]);
        return {g[0] - gb / 3.0, g[1] - gb / 3.0, g[2] - gb / 3.0, gb};
    }

    std::array<double, 4> values(const Point& x) const
    {
        const auto l = lambda(x);
        const double b = 27.0 * l[0] * l[1] * l[2];
        return {l[0] - b / 3.0, l[1] - b / 3.0, l[2] - b / 3.0, b};
    }

    std::array<Matrix2, 4> hessians(const Point& x) const
    {
        const auto l = lambda(x);
        Matrix2 h = Matrix2::Zero();
        const int pairs[3][3] = {{0, 1, 2}, {1, 2, 0}, {0, 2, 1}};
        for (const auto& t : pairs)
            h += 27.0 * l[t[2]] * (g[t[0]] * g[t[1]].transpose() + g[t[1]] * g[t[0]].transpose());
        return {-h / 3.0, -h / 3.0, -h / 3.0, h};
    }
};

// local column 2a+k (velocity) or 8+b (pressure): contributions of div F
struct LocalRows {
    Eigen::Matrix<double, 2, 11> momentum = Eigen::Matrix<double, 2, 11>::Zero();
    Eigen::Matrix<double, 1, 8> mass = Eigen::Matrix<double, 1, 8>::Zero();
};

inline LocalRows div_terms(const Element& el, const Point& x, double mu)
{
    LocalRows r;
    const auto gr = el.gradients(x);
    const auto hs = el.hessians(x);
    for (int a = 0; a < 4; ++a) {
        const double lap = hs[a].trace();
        for (int k = 0; k < 2; ++k) {
            // div(-2 mu D(phi e_k))_i = -mu (delta_ik lap phi + d_i d_k phi)
            for (int i = 0; i < 2; ++i)
                r.momentum(i, 2 * a + k) = -mu * ((i == k ? lap : 0.0) + hs[a](i, k));
            r.mass(2 * a + k) = gr[a][k];
        }
    }
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 2; ++i)
            r.momentum(i, 8 + b) = el.g[b][i];
    return r;
}

inline LocalRows flux_terms(const Element& el, const Point& x, const Vector2& n, double mu)
{
    LocalRows r;
    const auto gr = el.gradients(x);
    const auto v = el.values(x);
    const auto l = el.lambda(x);
    for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 2; ++k) {
            for (int i = 0; i < 2; ++i)
                r.momentum(i, 2 * a + k) = -mu * ((i == k ? gr[a].dot(n) : 0.0) + gr[a][i] * n[k]);
            r.mass(2 * a + k) = v[a] * n[k];
        }
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 2; ++i)
            r.momentum(i, 8 + b) = l[b] * n[i];
    return r;
}

// Uniform m x m subdivision of a triangle, edge-midpoint rule (exact for
// quadratics) on each piece.
template <class F>
void integrate_triangle(const Point& a, const Point& b, const Point& c, int m, F&& f)
{
    const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
    const double w = area / (m * m) / 3.0;
    const Vector2 e1 = (b - a) / m, e2 = (c - a) / m;
    auto piece = [&](const Point& p, const Point& q, const Point& r) {
        f(0.5 * (p + q), w);
        f(0.5 * (q + r), w);
        f(0.5 * (r + p), w);
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; i + j < m; ++j) {
            const Point base = a + i * e1 + j * e2;
            piece(base, base + e1, base + e2);
            if (i + j + 1 < m)
                piece(base + e1, base + e1 + e2, base + e2);
        }
}

// Composite Simpson rule on a segment.
template <class F>
void integrate_segment(const Point& a, const Point& b, int panels, F&& f)
{
    const double len = (b - a).norm();
    const double h = len / panels;
    for (int s = 0; s < panels; ++s) {
        const Point p0 = a + (b - a) * (double(s) / panels);
        const Point p1 = a + (b - a) * ((s + 0.5) / panels);
        const Point p2 = a + (b - a) * (double(s + 1) / panels);
        f(p0, h / 6.0);
        f(p1, 4.0 * h / 6.0);
        f(p2, h / 6.0);
    }
}

struct DenseRows {
    Eigen::MatrixXd momentum; // (2 * velocity locations) x (velocity dofs + pressure dofs)
    Eigen::MatrixXd mass;     // pressure dofs x velocity dofs
};

inline bool boundary_edge(const cvfe::Mesh& mesh, Index va, Index vb)
{
    for (const auto& f : mesh.boundary_facets)
        if ((f.vertices[0] == va && f.vertices[1] == vb) || (f.vertices[0] == vb && f.vertices[1] == va))
            return true;
    return false;
}

inline void accumulate(const cvfe::GridDiscretization& disc, const cvfe::ControlVolumeSet& set, Index row_block,
                       bool momentum, double mu, Eigen::MatrixXd& out)
{
    const Index nvel = disc.dofs.num_velocity_dofs();
    for (const auto& scv : set.scvs) {
        const Index e = scv.element;
        const Element el(disc.mesh.element_points(e));
        const auto loc = disc.element_locations(e);
        const auto& tri = disc.mesh.triangles[e];
        LocalRows acc;
        auto add = [&acc](const LocalRows& r, double w) {
            acc.momentum += w * r.momentum;
            acc.mass += w * r.mass;
        };

        Point center = Point::Zero();
        for (const auto& q : scv.polygon)
            center += q;
        center /= static_cast<double>(scv.polygon.size());
        const std::size_t n = scv.polygon.size();
        for (std::size_t i = 0; i < n; ++i)
            integrate_triangle(center, scv.polygon[i], scv.polygon[(i + 1) % n], 6,
                               [&](const Point& x, double w) { add(div_terms(el, x, mu), w); });

        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = scv.polygon[i];
            const Point& b = scv.polygon[(i + 1) % n];
            const auto la = el.lambda(a), lb = el.lambda(b);
            for (int k = 0; k < 3; ++k) {
                if (std::abs(la[k]) > 1e-12 || std::abs(lb[k]) > 1e-12)
                    continue;
                if (boundary_edge(disc.mesh, tri[(k + 1) % 3], tri[(k + 2) % 3]))
                    continue;
                const Vector2 normal = -el.g[k].normalized();
                integrate_segment(a, b, 8, [&](const Point& x, double w) { add(flux_terms(el, x, normal, mu), -w); });
            }
        }

        const Index r = set.cvs[scv.cv].location;
        for (int a = 0; a < 4; ++a)
            for (int k = 0; k < 2; ++k) {
                const Index col = cvfe::DofMap::velocity_dof(loc[a], k);
                if (momentum)
                    for (int i = 0; i < 2; ++i)
                        out(row_block + 2 * r + i, col) += acc.momentum(i, 2 * a + k);
                else
                    out(row_block + r, col) += acc.mass(2 * a + k);
            }
        if (momentum)
            for (int b = 0; b < 3; ++b)
                for (int i = 0; i < 2; ++i)
                    out(row_block + 2 * r + i, nvel + loc[b]) += acc.momentum(i, 8 + b);
    }
}

/// Dense rows for every velocity CV (momentum) and every pressure box (mass).
/// Rows of locations without a control volume stay zero.
inline DenseRows cvfe_rows(const cvfe::GridDiscretization& disc, double mu)
{
    const Index nvel = disc.dofs.num_velocity_dofs();
    const Index np = disc.dofs.num_pressure_dofs();
    DenseRows rows;
    rows.momentum = Eigen::MatrixXd::Zero(nvel, nvel + np);
    rows.mass = Eigen::MatrixXd::Zero(np, nvel);
    accumulate(disc, disc.velocity_cvs, 0, true, mu, rows.momentum);
    accumulate(disc, disc.pressure_cvs, 0, false, mu, rows.mass);
    return rows;
}

} // namespace oracle
