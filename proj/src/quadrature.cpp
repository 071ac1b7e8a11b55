#include "cvfe/basis.hpp"

#include <cmath>
#include <numbers>

namespace cvfe {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

SegmentRule make_segment_rule(int degree)
{
    const int n = (degree + 2) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    SegmentRule rule;
    rule.exact_degree = 2 * n - 1;
    for (int i = 0; i < n; ++i) {
        rule.points.push_back(0.5 * (x[i] + 1.0));
        rule.weights.push_back(0.5 * w[i]);
    }
    return rule;
}

TriangleRule make_triangle_rule(int degree)
{
    TriangleRule rule;
    if (degree <= 1) {
        rule.points = {Point(1.0 / 3.0, 1.0 / 3.0)};
        rule.weights = {0.5};
        rule.exact_degree = 1;
        return rule;
    }
    if (degree == 2) {
        rule.points = {Point(1.0 / 6.0, 1.0 / 6.0), Point(2.0 / 3.0, 1.0 / 6.0), Point(1.0 / 6.0, 2.0 / 3.0)};
        rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        rule.exact_degree = 2;
        return rule;
    }
    // x = s, y = t (1 - s), dx dy = (1 - s) ds dt; the s-direction carries one extra degree
    const int n = (degree + 3) / 2;
    std::vector<double> gx, gw;
    gauss_legendre(n, gx, gw);
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (gx[i] + 1.0);
        for (int j = 0; j < n; ++j) {
            const double t = 0.5 * (gx[j] + 1.0);
            rule.points.emplace_back(s, t * (1.0 - s));
            rule.weights.push_back(0.25 * gw[i] * gw[j] * (1.0 - s));
        }
    }
    rule.exact_degree = 2 * n - 2;
    return rule;
}

} // namespace

const TriangleRule& triangle_rule(int degree)
{
    static const auto rules = [] {
        std::vector<TriangleRule> r;
        for (int d = 0; d <= kMaxTriangleDegree; ++d)
            r.push_back(make_triangle_rule(d));
        return r;
    }();
    if (degree < 1 || degree > kMaxTriangleDegree)
        throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
    return rules[static_cast<std::size_t>(degree)];
}

const SegmentRule& segment_rule(int degree)
{
    static const auto rules = [] {
        std::vector<SegmentRule> r;
        for (int d = 0; d <= kMaxSegmentDegree; ++d)
            r.push_back(make_segment_rule(d));
        return r;
    }();
    if (degree < 0 || degree > kMaxSegmentDegree)
        throw std::invalid_argument("segment_rule: unsupported degree " + std::to_string(degree));
    return rules[static_cast<std::size_t>(degree)];
}

} // namespace cvfe
