#include "cvfe/solver.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <random>

namespace cvfe {

SparseMatrix assemble_pressure_mass(const GridDiscretization& disc, double viscosity)
{
    if (!(viscosity > 0.0))
        throw ConfigurationError("assemble_pressure_mass: viscosity must be positive");
    const double scale = 1.0 / (2.0 * viscosity);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(9 * disc.mesh.triangles.size());
    for (Index e = 0; e < disc.mesh.num_elements(); ++e) {
        const auto& tri = disc.mesh.triangles[e];
        const double w = scale * disc.mesh.element_area(e) / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.emplace_back(tri[i], tri[j], (i == j ? 2.0 : 1.0) * w);
    }
    SparseMatrix m(disc.dofs.num_pressure_dofs(), disc.dofs.num_pressure_dofs());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Vector random_initial_guess(const GridDiscretization& disc, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Vector x(disc.dofs.num_dofs());
    for (Index i = 0; i < x.size(); ++i)
        x(i) = uniform(rng);
    for (Index v = 0; v < disc.dofs.num_vertices; ++v)
        if (disc.dirichlet_vertex[v])
            x(DofMap::velocity_dof(v, 0)) = x(DofMap::velocity_dof(v, 1)) = 0.0;
    return x;
}

BlockPreconditioner::BlockPreconditioner(const SaddleSystem& system, const SparseMatrix& pressure_mass)
    : nv_(system.num_velocity_dofs()), np_(system.num_pressure_dofs()), C_(system.C)
{
    if (pressure_mass.rows() != np_ || pressure_mass.cols() != np_)
        throw SolverError("BlockPreconditioner: pressure mass matrix has the wrong size");

    SparseMatrix a = system.A;
    a.makeCompressed();
    a_factor_.compute(a);
    if (a_factor_.info() != Eigen::Success)
        throw SolverError("BlockPreconditioner: LU factorization of A failed: " + a_factor_.lastErrorMessage());

    SparseMatrix s = pressure_mass;
    if (system.pinned_pressure) {
        // the pinned row of J is the identity; mirror that in S
        const Index pin = *system.pinned_pressure;
        s.prune([pin](Index r, Index c, double) { return r != pin && c != pin; });
        s.coeffRef(pin, pin) = 1.0;
    }
    s_factor_.compute(s);
    if (s_factor_.info() != Eigen::Success)
        throw SolverError("BlockPreconditioner: factorization of the pressure mass matrix failed");
}

Vector BlockPreconditioner::apply(const Vector& r) const
{
    Vector y(nv_ + np_);
    y.head(nv_) = a_factor_.solve(r.head(nv_));
    y.tail(np_) = s_factor_.solve(r.tail(np_) - C_ * y.head(nv_));
    return y;
}

SolveReport gmres_solve(const LinearOperator& op, const LinearOperator& precond, const Vector& rhs, const Vector& x0,
                        double reduction, int max_iter)
{
    SolveReport report;
    report.solution = x0;

    Vector r = precond(rhs - op(x0));
    const double beta = r.norm();
    report.residual_history.push_back(beta);
    if (!std::isfinite(beta))
        throw SolverError("gmres_solve: non-finite initial residual");
    if (beta == 0.0) {
        report.converged = true;
        return report;
    }
    const double target = beta / reduction;

    std::vector<Vector> basis;
    basis.push_back(r / beta);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(max_iter), sn = Eigen::VectorXd::Zero(max_iter);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(max_iter + 1);
    g(0) = beta;

    int k = 0;
    double residual = beta;
    while (k < max_iter) {
        Vector w = precond(op(basis[k]));
        // modified Gram-Schmidt, two passes
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= k; ++i) {
                const double d = basis[i].dot(w);
                h(i, k) += d;
                w -= d * basis[i];
            }
        h(k + 1, k) = w.norm();

        for (int i = 0; i < k; ++i) {
            const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
            h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
            h(i, k) = t;
        }
        const double denom = std::hypot(h(k, k), h(k + 1, k));
        const double breakdown_norm = h(k + 1, k);
        if (denom == 0.0)
            throw SolverError("gmres_solve: Arnoldi breakdown with singular Hessenberg matrix");
        cs(k) = h(k, k) / denom;
        sn(k) = h(k + 1, k) / denom;
        h(k, k) = denom;
        h(k + 1, k) = 0.0;
        g(k + 1) = -sn(k) * g(k);
        g(k) = cs(k) * g(k);

        ++k;
        residual = std::abs(g(k));
        report.residual_history.push_back(residual);
        spdlog::trace("gmres iteration {}: preconditioned residual {:.3e}", k, residual);
        if (residual <= target || breakdown_norm <= 1e-14 * beta)
            break;
        basis.push_back(w / breakdown_norm);
    }

    Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i)
        report.solution += y(i) * basis[i];

    report.iterations = k;
    report.final_relative_residual = residual / beta;
    report.converged = residual <= target;
    if (!report.converged)
        spdlog::warn("gmres_solve: no convergence after {} iterations (relative residual {:.3e})", k,
                     report.final_relative_residual);
    return report;
}

SolveReport gmres_solve(const SaddleSystem& system, const BlockPreconditioner& precond, const Vector& x0,
                        double reduction, int max_iter)
{
    const SparseMatrix j = system.matrix();
    return gmres_solve([&j](const Vector& x) -> Vector { return j * x; },
                       [&precond](const Vector& x) { return precond.apply(x); }, system.rhs(), x0, reduction,
                       max_iter);
}

SolveReport solve(const GridDiscretization& disc, const SaddleSystem& system, double viscosity,
                  const SolverOptions& options)
{
    const SparseMatrix j = system.matrix();
    const Vector b = system.rhs();
    const BlockPreconditioner precond(system, assemble_pressure_mass(disc, viscosity));
    const LinearOperator op = [&j](const Vector& x) -> Vector { return j * x; };
    const LinearOperator prec = [&precond](const Vector& x) { return precond.apply(x); };

    SolveReport report = gmres_solve(op, prec, b, random_initial_guess(disc, options.seed), options.reduction, options.max_iter);
    for (int sweep = 0; sweep < options.refinement_sweeps; ++sweep) {
        const Vector defect = b - j * report.solution;
        if (defect.norm() == 0.0)
            break;
        const auto correction = gmres_solve(op, prec, defect, Vector::Zero(b.size()), options.reduction,
                                            options.max_iter);
        report.solution += correction.solution;
    }
    report.true_residual = (b - j * report.solution).norm();
    spdlog::debug("solve: {} iterations, relative preconditioned residual {:.3e}, true residual {:.3e}",
                  report.iterations, report.final_relative_residual, report.true_residual);
    return report;
}

} // namespace cvfe
