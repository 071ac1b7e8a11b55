#pragma once

#include "cvfe/schemes.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cstdint>
#include <functional>
#include <memory>

namespace cvfe {

/// (2 mu)^-1 times the P1 pressure mass matrix.
SparseMatrix assemble_pressure_mass(const GridDiscretization& disc, double viscosity);

/// Uniform on [-1, 1], with Dirichlet velocity entries set to zero.
Vector random_initial_guess(const GridDiscretization& disc, std::uint64_t seed);

using LinearOperator = std::function<Vector(const Vector&)>;

/// Block lower-triangular preconditioner
///   y_v = A^-1 r_v,  y_p = S^-1 (r_p - C y_v)
/// with exact sparse factorizations of A and of the scaled pressure mass S.
class BlockPreconditioner {
  public:
    BlockPreconditioner(const SaddleSystem& system, const SparseMatrix& pressure_mass);

    Vector apply(const Vector& r) const;
    Vector operator()(const Vector& r) const { return apply(r); }

    Index size() const { return nv_ + np_; }

  private:
    Index nv_ = 0;
    Index np_ = 0;
    SparseMatrix C_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> a_factor_;
    Eigen::SimplicialLDLT<SparseMatrix> s_factor_;
};

struct SolveReport {
    Vector solution;
    int iterations = 0;
    double final_relative_residual = 0.0; ///< preconditioned residual over its initial value
    bool converged = false;
    std::vector<double> residual_history; ///< preconditioned residual norms, starting with the initial one
    double true_residual = 0.0;           ///< ||J x - b|| after refinement
};

/// Full (non-restarted) left-preconditioned GMRES. Minimizes ||P(b - J x)||
/// over the Krylov space and stops once it drops by `reduction` relative
/// to the initial preconditioned residual.
SolveReport gmres_solve(const LinearOperator& op, const LinearOperator& precond, const Vector& rhs, const Vector& x0,
                        double reduction = 1e10, int max_iter = 500);
SolveReport gmres_solve(const SaddleSystem& system, const BlockPreconditioner& precond, const Vector& x0,
                        double reduction = 1e10, int max_iter = 500);

struct SolverOptions {
    double reduction = 1e10;
    int max_iter = 500;
    std::uint64_t seed = 1;
    /// Defect-correction sweeps run after the main solve; each re-solves
    /// J d = b - J x with the same preconditioned GMRES and adds d.
    int refinement_sweeps = 2;
};

/// Preconditioner setup, seeded initial guess, GMRES and refinement.
/// `iterations` reports the main solve only.
SolveReport solve(const GridDiscretization& disc, const SaddleSystem& system, double viscosity,
                  const SolverOptions& options = {});

} // namespace cvfe
