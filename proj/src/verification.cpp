#include "cvfe/verification.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace cvfe {

namespace {

constexpr int kErrorDegree = 8;
constexpr double kRateErrorFloor = 1e-12;

// Donea-Huerta building blocks: h(u) = u^2 (1-u)^2 and its derivatives
double dh0(double u) { return u * u * (1.0 - u) * (1.0 - u); }
double dh1(double u) { return 2.0 * u - 6.0 * u * u + 4.0 * u * u * u; }
double dh2(double u) { return 2.0 - 12.0 * u + 12.0 * u * u; }
double dh3(double u) { return -12.0 + 24.0 * u; }

// Bercovier-Engelman: X(u) = u^2 (u-1)^2, Y(u) = u (u-1)(2u-1), X' = 2Y
double be_x(double u) { return u * u * (u - 1.0) * (u - 1.0); }
double be_y(double u) { return u * (u - 1.0) * (2.0 * u - 1.0); }
double be_dy(double u) { return 6.0 * u * u - 6.0 * u + 1.0; }
double be_g(double x, double y)
{
    return 256.0 * (be_x(x) * (12.0 * y - 6.0) + be_y(y) * (12.0 * x * x - 12.0 * x + 2.0));
}

} // namespace

Vector2 ManufacturedCase::traction(const Point& x, const Vector2& normal) const
{
    const Matrix2 grad = velocity_gradient(x);
    const Matrix2 stress = viscosity * (grad + grad.transpose()) - pressure(x) * Matrix2::Identity();
    return -stress * normal;
}

StokesProblem ManufacturedCase::problem() const
{
    StokesProblem p;
    p.viscosity = viscosity;
    p.body_force = body_force;
    p.dirichlet_data = velocity;
    p.neumann_traction = [self = *this](const Point& x, const Vector2& n) { return self.traction(x, n); };
    return p;
}

void ManufacturedCase::apply_layout(Mesh& mesh) const
{
    for (const auto& [marker, kind] : bc_layout)
        mesh.set_boundary_kind(marker, kind);
}

std::map<int, BoundaryKind> mixed_layout()
{
    return {{side::left, BoundaryKind::Dirichlet},
            {side::bottom, BoundaryKind::Dirichlet},
            {side::right, BoundaryKind::Neumann},
            {side::top, BoundaryKind::Neumann}};
}

ManufacturedCase donea_huerta(double viscosity)
{
    ManufacturedCase c;
    c.name = "donea-huerta";
    c.viscosity = viscosity;
    c.bc_layout = mixed_layout();
    c.velocity = [](const Point& p) {
        return Vector2(dh0(p.x()) * dh1(p.y()), -dh0(p.y()) * dh1(p.x()));
    };
    c.velocity_gradient = [](const Point& p) {
        const double x = p.x(), y = p.y();
        Matrix2 g;
        g << dh1(x) * dh1(y), dh0(x) * dh2(y), -dh0(y) * dh2(x), -dh1(y) * dh1(x);
        return g;
    };
    c.pressure = [](const Point& p) { return p.x() * (1.0 - p.x()); };
    c.body_force = [mu = viscosity](const Point& p) {
        const double x = p.x(), y = p.y();
        const double vx_xx = dh2(x) * dh1(y), vx_yy = dh0(x) * dh3(y), vx_xy = dh1(x) * dh2(y);
        const double vy_yy = -dh2(y) * dh1(x), vy_xx = -dh0(y) * dh3(x), vy_xy = -dh1(y) * dh2(x);
        return Vector2(-2.0 * mu * vx_xx - mu * vx_yy - mu * vy_xy + (1.0 - 2.0 * x),
                       -2.0 * mu * vy_yy - mu * vy_xx - mu * vx_xy);
    };
    return c;
}

ManufacturedCase bercovier_engelman()
{
    ManufacturedCase c;
    c.name = "bercovier-engelman";
    c.viscosity = 1.0;
    c.bc_layout = mixed_layout();
    c.velocity = [](const Point& p) {
        const double x = p.x(), y = p.y();
        return Vector2(-256.0 * be_x(x) * be_y(y), 256.0 * be_x(y) * be_y(x));
    };
    c.velocity_gradient = [](const Point& p) {
        const double x = p.x(), y = p.y();
        Matrix2 g;
        g << -512.0 * be_y(x) * be_y(y), -256.0 * be_x(x) * be_dy(y), 256.0 * be_x(y) * be_dy(x),
            512.0 * be_y(y) * be_y(x);
        return g;
    };
    c.pressure = [](const Point& p) { return (p.x() - 0.5) * (p.y() - 0.5); };
    c.body_force = [](const Point& p) {
        const double x = p.x(), y = p.y();
        return Vector2(be_g(x, y) + (y - 0.5), -be_g(y, x) + (x - 0.5));
    };
    return c;
}

ManufacturedCase shear_flow(double viscosity)
{
    ManufacturedCase c;
    c.name = "shear-flow";
    c.viscosity = viscosity;
    c.bc_layout = mixed_layout();
    c.velocity = [](const Point& p) { return Vector2(p.y(), 0.0); };
    c.velocity_gradient = [](const Point&) {
        Matrix2 g;
        g << 0.0, 1.0, 0.0, 0.0;
        return g;
    };
    c.pressure = [](const Point&) { return 0.0; };
    c.body_force = [](const Point&) { return Vector2(0.0, 0.0); };
    return c;
}

ManufacturedCase case_from_name(const std::string& name)
{
    if (name == "donea-huerta")
        return donea_huerta();
    if (name == "bercovier-engelman")
        return bercovier_engelman();
    if (name == "shear-flow")
        return shear_flow();
    throw ConfigurationError("unknown case '" + name + "'");
}

ErrorNorms error_norms(const GridDiscretization& disc, const Vector& solution, const ManufacturedCase& mcase)
{
    const auto& rule = triangle_rule(kErrorDegree);
    double p2 = 0.0, v2 = 0.0, g2 = 0.0;
    for (Index e = 0; e < disc.mesh.num_elements(); ++e) {
        const auto& map = disc.maps[e];
        const auto coeffs = gather(disc, e, solution);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Point& xi = rule.points[q];
            const Point x = map.to_physical(xi);
            const double w = rule.weights[q] * map.det;
            const auto basis = eval_reference(xi);
            Vector2 v = Vector2::Zero();
            Matrix2 grad = Matrix2::Zero();
            for (int a = 0; a < 4; ++a) {
                v += basis.values[a] * coeffs.velocity[a];
                grad += coeffs.velocity[a] * (map.inverse_transpose * basis.gradients[a]).transpose();
            }
            const double p = (1.0 - xi.x() - xi.y()) * coeffs.pressure[0] + xi.x() * coeffs.pressure[1] +
                             xi.y() * coeffs.pressure[2];
            p2 += w * std::pow(p - mcase.pressure(x), 2);
            v2 += w * (v - mcase.velocity(x)).squaredNorm();
            g2 += w * (grad - mcase.velocity_gradient(x)).squaredNorm();
        }
    }
    return {std::sqrt(p2), std::sqrt(v2), std::sqrt(v2 + g2)};
}

CaseSolution solve_case(const Mesh& mesh, const ManufacturedCase& mcase, SchemeKind scheme,
                        const SolverOptions& options)
{
    Mesh marked = mesh;
    mcase.apply_layout(marked);
    CaseSolution out;
    out.disc = build(marked, scheme);
    const auto problem = mcase.problem();
    out.system = assemble(out.disc, problem);
    out.report = solve(out.disc, out.system, mcase.viscosity, options);
    return out;
}

bool ConvergenceReport::all_converged() const
{
    return std::all_of(levels.begin(), levels.end(), [](const ConvergenceLevel& l) { return l.converged; });
}

std::optional<double> convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    if (!(e_coarse > kRateErrorFloor) || !(e_fine > kRateErrorFloor) || !(h_coarse > 0.0) || !(h_fine > 0.0) ||
        h_coarse == h_fine)
        return std::nullopt;
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<ConvergenceRates> convergence_rates(const std::vector<ConvergenceLevel>& levels)
{
    std::vector<ConvergenceRates> rates(levels.size());
    for (std::size_t k = 1; k < levels.size(); ++k) {
        const auto& c = levels[k - 1];
        const auto& f = levels[k];
        rates[k].l2_p = convergence_rate(c.errors.l2_p, f.errors.l2_p, c.h_p, f.h_p);
        rates[k].l2_v = convergence_rate(c.errors.l2_v, f.errors.l2_v, c.h_v, f.h_v);
        rates[k].h1_v = convergence_rate(c.errors.h1_v, f.errors.h1_v, c.h_v, f.h_v);
    }
    return rates;
}

Mesh structured_level(int level, const StudyOptions& options)
{
    const int n = options.base_cells << level;
    const Mesh base = generate_structured(n, n);
    if (options.distortion == 0.0)
        return base;
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        try {
            return distort(base, options.distortion, options.seed + static_cast<std::uint64_t>(level) + 1000 * attempt);
        } catch (const DistortionFailure&) {
            spdlog::debug("distortion of level {} failed, retrying with a new seed", level);
        }
    }
    throw DistortionFailure("structured_level: could not distort level " + std::to_string(level));
}

ConvergenceReport run_convergence(const ManufacturedCase& mcase, SchemeKind scheme, const StudyOptions& options)
{
    const int count = options.mesh_files.empty() ? options.levels : static_cast<int>(options.mesh_files.size());
    if (count < 1)
        throw ConfigurationError("run_convergence: at least one level is required");

    ConvergenceReport report;
    report.case_name = mcase.name;
    report.scheme = scheme;
    for (int k = 0; k < count; ++k) {
        Mesh mesh;
        if (options.mesh_files.empty()) {
            mesh = structured_level(k, options);
        } else {
            mesh = read_msh(options.mesh_files[static_cast<std::size_t>(k)]);
            mark_rectangle_sides(mesh);
        }
        SolverOptions solver = options.solver;
        solver.seed = options.seed + static_cast<std::uint64_t>(k);
        const auto result = solve_case(mesh, mcase, scheme, solver);

        ConvergenceLevel level;
        const auto s = stats(result.disc.mesh, scheme);
        level.h_p = s.h_p;
        level.h_v = s.h_v;
        level.errors = error_norms(result.disc, result.report.solution, mcase);
        level.iterations = result.report.iterations;
        level.converged = result.report.converged;
        spdlog::info("{} {} level {}: h_p={:.4e} L2_p={:.3e} L2_v={:.3e} H1_v={:.3e} it={}", mcase.name,
                     to_string(scheme), k, level.h_p, level.errors.l2_p, level.errors.l2_v, level.errors.h1_v,
                     level.iterations);
        report.levels.push_back(level);
        if (options.on_level)
            options.on_level(k, result);
    }
    report.rates = convergence_rates(report.levels);
    return report;
}

ConservationAudit conservation_audit(const GridDiscretization& disc, const Vector& solution,
                                     const StokesProblem& problem)
{
    ConservationAudit audit;
    std::vector<ElementCoefficients> coeffs;
    coeffs.reserve(disc.mesh.triangles.size());
    for (Index e = 0; e < disc.mesh.num_elements(); ++e)
        coeffs.push_back(gather(disc, e, solution));

    const auto& boxes = disc.pressure_cvs;
    std::vector<double> face_flux(boxes.faces.size());
    for (std::size_t f = 0; f < boxes.faces.size(); ++f) {
        const auto& face = boxes.faces[f];
        face_flux[f] = mass_flux(face, disc.maps[face.element], coeffs[face.element]);
        audit.max_face_flux = std::max(audit.max_face_flux, std::abs(face_flux[f]));
    }
    audit.mass_residuals = Vector::Zero(boxes.size());
    for (const auto& cv : boxes.cvs) {
        double r = 0.0;
        for (const auto& [f, sign] : cv.faces)
            r += sign * face_flux[f];
        for (Index s : cv.boundary_segments) {
            const auto& seg = boxes.boundary_segments[s];
            const double flux = mass_flux(seg.quad_points, seg.unit_normal, disc.maps[seg.element], coeffs[seg.element]);
            audit.max_face_flux = std::max(audit.max_face_flux, std::abs(flux));
            r += flux;
        }
        for (Index s : cv.scvs)
            r -= integrate_polygon(boxes.scvs[s].polygon, boxes.scvs[s].dof_location, problem.mass_source);
        audit.mass_residuals(cv.location) = r;
    }

    if (disc.scheme == SchemeKind::Fem)
        return audit;

    const auto& set = disc.velocity_cvs;
    std::vector<Vector2> face_force(set.faces.size());
    for (std::size_t f = 0; f < set.faces.size(); ++f) {
        const auto& face = set.faces[f];
        face_force[f] = momentum_flux(face, disc.maps[face.element], coeffs[face.element], problem.viscosity);
        audit.max_face_force = std::max(audit.max_face_force, face_force[f].norm());
    }
    for (const auto& cv : set.cvs) {
        if (cv.kind != CvKind::Vertex || !cv.in_partition || disc.dirichlet_vertex[cv.location])
            continue;
        Vector2 r = Vector2::Zero();
        for (const auto& [f, sign] : cv.faces)
            r += sign * face_force[f];
        for (Index s : cv.boundary_segments) {
            const auto& seg = set.boundary_segments[s];
            if (seg.kind == BoundaryKind::Neumann)
                r += integrate_traction(seg, problem.neumann_traction);
            else
                r += momentum_flux(seg.quad_points, seg.unit_normal, disc.maps[seg.element], coeffs[seg.element],
                                   problem.viscosity);
        }
        for (Index s : cv.scvs)
            r -= integrate_polygon(set.scvs[s].polygon, set.scvs[s].dof_location, problem.body_force);
        audit.momentum_cvs.push_back(cv.location);
        audit.momentum_residuals.push_back(r);
    }
    return audit;
}

double region_mass_balance(const GridDiscretization& disc, const Vector& solution, const StokesProblem& problem,
                           const std::vector<Index>& vertices)
{
    const std::unordered_set<Index> region(vertices.begin(), vertices.end());
    const auto& boxes = disc.pressure_cvs;
    double balance = 0.0;
    for (const auto& face : boxes.faces) {
        const bool in = region.count(face.inside_cv) > 0;
        const bool out = face.outside_cv && region.count(*face.outside_cv) > 0;
        if (in == out)
            continue;
        const double flux = mass_flux(face, disc.maps[face.element], gather(disc, face.element, solution));
        balance += in ? flux : -flux;
    }
    for (const auto& seg : boxes.boundary_segments)
        if (region.count(seg.cv))
            balance += mass_flux(seg.quad_points, seg.unit_normal, disc.maps[seg.element],
                                 gather(disc, seg.element, solution));
    for (const auto& scv : boxes.scvs)
        if (region.count(scv.cv))
            balance -= integrate_polygon(scv.polygon, scv.dof_location, problem.mass_source);
    return balance;
}

} // namespace cvfe
