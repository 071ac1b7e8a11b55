#pragma once

#include "cvfe/geometry.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>

namespace cvfe {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

using VectorField = std::function<Vector2(const Point&)>;
using ScalarField = std::function<double(const Point&)>;
/// Traction t_N = -(2 mu D(v) - p I) n as a function of position and outward normal.
using TractionField = std::function<Vector2(const Point&, const Vector2&)>;

struct StokesProblem {
    double viscosity = 1.0;
    VectorField body_force;        ///< f; empty means zero
    ScalarField mass_source;       ///< g in div v = g; empty means zero
    VectorField dirichlet_data;    ///< v_D on Dirichlet facets; empty means zero
    TractionField neumann_traction; ///< t_N on Neumann facets; empty means zero
};

/// J = [[A, B], [C, 0]] with Dirichlet rows of A replaced by unit rows.
struct SaddleSystem {
    SparseMatrix A; ///< momentum rows x velocity dofs
    SparseMatrix B; ///< momentum rows x pressure dofs
    SparseMatrix C; ///< mass rows x velocity dofs
    Vector rhs_momentum;
    Vector rhs_mass;
    std::vector<std::pair<Index, double>> dirichlet_rows; ///< (velocity dof, prescribed value)
    std::optional<Index> pinned_pressure;                 ///< mass row replaced by p_i = rhs_mass(i)

    Index num_velocity_dofs() const { return A.rows(); }
    Index num_pressure_dofs() const { return C.rows(); }
    Index size() const { return num_velocity_dofs() + num_pressure_dofs(); }

    SparseMatrix matrix() const;
    Vector rhs() const;
};

struct AssemblyOptions {
    /// Replace rows of Dirichlet vertices by unit rows. When false, every
    /// control-volume balance is kept and Dirichlet-boundary fluxes enter the
    /// matrix (the raw Petrov-Galerkin operator).
    bool enforce_dirichlet = true;
    /// Required when no Neumann boundary exists: pressure is then fixed at this vertex.
    std::optional<std::pair<Index, double>> pin_pressure;
};

/// Values of the discrete solution restricted to one element.
struct ElementCoefficients {
    std::array<Vector2, 4> velocity{Vector2::Zero(), Vector2::Zero(), Vector2::Zero(), Vector2::Zero()}; ///< (v0, v1, v2, bubble)
    std::array<double, 3> pressure{};
};

ElementCoefficients gather(const GridDiscretization& disc, Index element, const Vector& solution);

/// Local velocity unknowns are ordered 2*a + k for basis a in (v0,v1,v2,bubble), component k.
using LocalVelocityRow = Eigen::Matrix<double, 1, 8>;

struct FluxMatrix {
    Eigen::Matrix<double, 2, 8> velocity = Eigen::Matrix<double, 2, 8>::Zero();
    Eigen::Matrix<double, 2, 3> pressure = Eigen::Matrix<double, 2, 3>::Zero();
};

/// Linear map from element coefficients to int_sigma (-2 mu D(v_h) + p_h I) n.
FluxMatrix momentum_flux_matrix(const std::vector<QuadPoint>& quad, const Vector2& normal, const AffineMap& map,
                                double viscosity);
/// Linear map from element velocity coefficients to int_sigma v_h . n.
LocalVelocityRow mass_flux_row(const std::vector<QuadPoint>& quad, const Vector2& normal, const AffineMap& map);

/// Direct evaluation of the momentum flux of the discrete fields over a face.
Vector2 momentum_flux(const SubControlVolumeFace& face, const AffineMap& map, const ElementCoefficients& coeffs,
                      double viscosity);
double mass_flux(const SubControlVolumeFace& face, const AffineMap& map, const ElementCoefficients& coeffs);
Vector2 momentum_flux(const std::vector<QuadPoint>& quad, const Vector2& normal, const AffineMap& map,
                      const ElementCoefficients& coeffs, double viscosity);
double mass_flux(const std::vector<QuadPoint>& quad, const Vector2& normal, const AffineMap& map,
                 const ElementCoefficients& coeffs);

/// Element Galerkin contributions with the MINI basis as test functions:
/// (2 mu D(v), D(w)) - (p, div w) = (f, w) and (div v, q) = (g, q).
struct GalerkinElement {
    Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 3> B = Eigen::Matrix<double, 8, 3>::Zero();
    Eigen::Matrix<double, 3, 8> C = Eigen::Matrix<double, 3, 8>::Zero();
    Eigen::Matrix<double, 8, 1> f = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 3, 1> g = Eigen::Matrix<double, 3, 1>::Zero();
};

GalerkinElement galerkin_element(const std::array<Point, 3>& element, const StokesProblem& problem);

/// Galerkin rows for the two bubble test functions phi_E e_x, phi_E e_y.
struct BubbleRows {
    Eigen::Matrix<double, 2, 8> velocity = Eigen::Matrix<double, 2, 8>::Zero();
    Eigen::Matrix<double, 2, 3> pressure = Eigen::Matrix<double, 2, 3>::Zero();
    Vector2 rhs = Vector2::Zero();
};

BubbleRows bubble_fem_row(const std::array<Point, 3>& element, const StokesProblem& problem);

/// Integral of a field over a star-shaped polygon, fanned from `center`.
Vector2 integrate_polygon(const std::vector<Point>& polygon, const Point& center, const VectorField& field,
                          int degree = 6);
double integrate_polygon(const std::vector<Point>& polygon, const Point& center, const ScalarField& field,
                         int degree = 6);
/// Integral of t_N over a boundary segment.
Vector2 integrate_traction(const BoundarySegment& segment, const TractionField& traction);

SaddleSystem assemble(const GridDiscretization& disc, const StokesProblem& problem,
                      const AssemblyOptions& options = {});

/// Nodal interpolant: vertex values, and the field value at each centroid for the bubble dofs.
Vector interpolate(const GridDiscretization& disc, const VectorField& velocity, const ScalarField& pressure);

} // namespace cvfe
