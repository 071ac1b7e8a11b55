#pragma once

#include "cvfe/solver.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace cvfe {

using GradientField = std::function<Matrix2(const Point&)>; ///< (i,j) = d v_i / d x_j

/// Closed-form Stokes solution on the unit square together with its forcing.
struct ManufacturedCase {
    std::string name;
    double viscosity = 1.0;
    VectorField velocity;
    GradientField velocity_gradient;
    ScalarField pressure;
    VectorField body_force;
    std::map<int, BoundaryKind> bc_layout; ///< side marker -> kind

    /// -(2 mu D(v) - p I) n from the exact fields.
    Vector2 traction(const Point& x, const Vector2& normal) const;
    StokesProblem problem() const;
    /// Marks the sides of a unit-square mesh according to bc_layout.
    void apply_layout(Mesh& mesh) const;
};

/// Dirichlet on the left and bottom sides, Neumann on the right and top.
std::map<int, BoundaryKind> mixed_layout();

ManufacturedCase donea_huerta(double viscosity = 1.0);
ManufacturedCase bercovier_engelman();
/// v = (y, 0), p = 0, f = 0; lies in the discrete space.
ManufacturedCase shear_flow(double viscosity = 1.0);
ManufacturedCase case_from_name(const std::string& name);

struct ErrorNorms {
    double l2_p = 0.0;
    double l2_v = 0.0;
    double h1_v = 0.0; ///< full norm: L2 part plus gradient part
};

ErrorNorms error_norms(const GridDiscretization& disc, const Vector& solution, const ManufacturedCase& mcase);

/// Mesh, discretization, assembled system and solution of one case.
struct CaseSolution {
    GridDiscretization disc;
    SaddleSystem system;
    SolveReport report;
};

CaseSolution solve_case(const Mesh& mesh, const ManufacturedCase& mcase, SchemeKind scheme,
                        const SolverOptions& options = {});

struct ConvergenceLevel {
    double h_p = 0.0;
    double h_v = 0.0;
    ErrorNorms errors;
    int iterations = 0;
    bool converged = false;
};

struct ConvergenceRates {
    std::optional<double> l2_p;
    std::optional<double> l2_v;
    std::optional<double> h1_v;
};

struct ConvergenceReport {
    std::string case_name;
    SchemeKind scheme = SchemeKind::Overlapping;
    std::vector<ConvergenceLevel> levels;
    std::vector<ConvergenceRates> rates; ///< rates[k] compares level k with k-1; rates[0] is empty
    bool all_converged() const;
};

/// log(e_{k-1}/e_k) / log(h_{k-1}/h_k). Empty when either error is at
/// round-off level (<= 1e-12), where the ratio carries no information.
std::optional<double> convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);
std::vector<ConvergenceRates> convergence_rates(const std::vector<ConvergenceLevel>& levels);

struct StudyOptions {
    int levels = 5;
    int base_cells = 10; ///< cells per side on the coarsest structured level
    double distortion = 0.2;
    std::uint64_t seed = 42;
    SolverOptions solver;
    /// When non-empty, these meshes replace the structured family (one level each).
    std::vector<std::filesystem::path> mesh_files;
    std::function<void(int level, const CaseSolution&)> on_level;
};

/// Structured level k has base_cells * 2^k cells per side, distorted with seed + k.
Mesh structured_level(int level, const StudyOptions& options);

ConvergenceReport run_convergence(const ManufacturedCase& mcase, SchemeKind scheme, const StudyOptions& options);

struct ConservationAudit {
    Vector mass_residuals;              ///< per pressure box
    double max_face_flux = 0.0;         ///< largest |mass flux| over box faces and boundary segments
    std::vector<Index> momentum_cvs;    ///< velocity CV locations audited
    std::vector<Vector2> momentum_residuals;
    double max_face_force = 0.0;        ///< largest |momentum flux| over velocity CV faces
};

/// Re-evaluates every box mass balance and every vertex-CV momentum balance
/// in the partition (Dirichlet-replaced rows excluded) from the solution.
ConservationAudit conservation_audit(const GridDiscretization& disc, const Vector& solution,
                                     const StokesProblem& problem);

/// Net outflow minus source over a union of pressure boxes, from the faces on its boundary.
double region_mass_balance(const GridDiscretization& disc, const Vector& solution, const StokesProblem& problem,
                           const std::vector<Index>& vertices);

} // namespace cvfe
