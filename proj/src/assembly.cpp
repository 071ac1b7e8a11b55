#include "cvfe/schemes.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace cvfe {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Builder {
    const GridDiscretization& disc;
    const StokesProblem& problem;
    const AssemblyOptions& options;
    Index nvel;
    Index np;
    Triplets a, b, c;
    Vector rhs_v, rhs_p;
    std::vector<char> momentum_skip;

    Builder(const GridDiscretization& d, const StokesProblem& pr, const AssemblyOptions& o)
        : disc(d), problem(pr), options(o), nvel(d.dofs.num_velocity_dofs()), np(d.dofs.num_pressure_dofs()),
          rhs_v(Vector::Zero(nvel)), rhs_p(Vector::Zero(np)), momentum_skip(static_cast<std::size_t>(nvel), 0)
    {
        if (options.enforce_dirichlet)
            for (Index v = 0; v < d.dofs.num_vertices; ++v)
                if (d.dirichlet_vertex[v])
                    momentum_skip[DofMap::velocity_dof(v, 0)] = momentum_skip[DofMap::velocity_dof(v, 1)] = 1;
    }

    bool skip(Index row) const { return momentum_skip[row] != 0; }

    void add_momentum(Index location, Index element, const FluxMatrix& flux, double sign)
    {
        const auto loc = disc.element_locations(element);
        for (int i = 0; i < 2; ++i) {
            const Index row = DofMap::velocity_dof(location, i);
            if (skip(row))
                continue;
            for (int a_ = 0; a_ < 4; ++a_)
                for (int k = 0; k < 2; ++k)
                    a.emplace_back(row, DofMap::velocity_dof(loc[a_], k), sign * flux.velocity(i, 2 * a_ + k));
            for (int b_ = 0; b_ < 3; ++b_)
                b.emplace_back(row, loc[b_], sign * flux.pressure(i, b_));
        }
    }

    void add_mass(Index vertex, Index element, const LocalVelocityRow& row, double sign)
    {
        const auto loc = disc.element_locations(element);
        for (int a_ = 0; a_ < 4; ++a_)
            for (int k = 0; k < 2; ++k)
                c.emplace_back(vertex, DofMap::velocity_dof(loc[a_], k), sign * row(2 * a_ + k));
    }

    void cv_momentum_rows(bool include_bubbles)
    {
        const auto& set = disc.velocity_cvs;
        const double mu = problem.viscosity;
        for (const auto& cv : set.cvs) {
            if (cv.kind == CvKind::Bubble && !include_bubbles)
                continue;
            const Index l = cv.location;
            if (skip(DofMap::velocity_dof(l, 0)))
                continue;
            for (const auto& [f, sign] : cv.faces) {
                const auto& face = set.faces[f];
                add_momentum(l, face.element,
                             momentum_flux_matrix(face.quad_points, face.unit_normal, disc.maps[face.element], mu),
                             sign);
            }
            Vector2 source = Vector2::Zero();
            for (Index s : cv.scvs) {
                const auto& scv = set.scvs[s];
                source += integrate_polygon(scv.polygon, scv.dof_location, problem.body_force);
            }
            for (Index s : cv.boundary_segments) {
                const auto& seg = set.boundary_segments[s];
                if (seg.kind == BoundaryKind::Neumann)
                    source -= integrate_traction(seg, problem.neumann_traction);
                else
                    add_momentum(l, seg.element,
                                 momentum_flux_matrix(seg.quad_points, seg.unit_normal, disc.maps[seg.element], mu),
                                 1.0);
            }
            rhs_v.segment<2>(DofMap::velocity_dof(l, 0)) += source;
        }
    }

    void hybrid_bubble_rows()
    {
        for (Index e = 0; e < disc.mesh.num_elements(); ++e) {
            const auto rows = bubble_fem_row(disc.mesh.element_points(e), problem);
            const auto loc = disc.element_locations(e);
            for (int i = 0; i < 2; ++i) {
                const Index row = DofMap::velocity_dof(loc[3], i);
                for (int a_ = 0; a_ < 4; ++a_)
                    for (int k = 0; k < 2; ++k)
                        a.emplace_back(row, DofMap::velocity_dof(loc[a_], k), rows.velocity(i, 2 * a_ + k));
                for (int b_ = 0; b_ < 3; ++b_)
                    b.emplace_back(row, loc[b_], rows.pressure(i, b_));
                rhs_v(row) += rows.rhs(i);
            }
        }
    }

    void galerkin_rows()
    {
        for (Index e = 0; e < disc.mesh.num_elements(); ++e) {
            const auto local = galerkin_element(disc.mesh.element_points(e), problem);
            const auto loc = disc.element_locations(e);
            for (int t = 0; t < 4; ++t)
                for (int kt = 0; kt < 2; ++kt) {
                    const Index row = DofMap::velocity_dof(loc[t], kt);
                    if (skip(row))
                        continue;
                    for (int a_ = 0; a_ < 4; ++a_)
                        for (int k = 0; k < 2; ++k)
                            a.emplace_back(row, DofMap::velocity_dof(loc[a_], k), local.A(2 * t + kt, 2 * a_ + k));
                    for (int b_ = 0; b_ < 3; ++b_)
                        b.emplace_back(row, loc[b_], local.B(2 * t + kt, b_));
                    rhs_v(row) += local.f(2 * t + kt);
                }
            for (int q = 0; q < 3; ++q) {
                for (int a_ = 0; a_ < 4; ++a_)
                    for (int k = 0; k < 2; ++k)
                        c.emplace_back(loc[q], DofMap::velocity_dof(loc[a_], k), local.C(q, 2 * a_ + k));
                rhs_p(loc[q]) += local.g(q);
            }
        }
        if (!problem.neumann_traction)
            return;
        for (const auto& seg : disc.pressure_cvs.boundary_segments) {
            if (seg.kind != BoundaryKind::Neumann)
                continue;
            const auto& map = disc.maps[seg.element];
            const auto& tri = disc.mesh.triangles[seg.element];
            for (const auto& qp : seg.quad_points) {
                const Vector2 t = problem.neumann_traction(qp.point, seg.unit_normal);
                const auto lambda = p1_values(map, qp.point);
                for (int v = 0; v < 3; ++v)
                    for (int k = 0; k < 2; ++k) {
                        const Index row = DofMap::velocity_dof(tri[v], k);
                        if (!skip(row))
                            rhs_v(row) -= qp.weight * t[k] * lambda[v];
                    }
            }
        }
    }

    void box_mass_rows()
    {
        const auto& set = disc.pressure_cvs;
        for (const auto& cv : set.cvs) {
            const Index v = cv.location;
            for (const auto& [f, sign] : cv.faces) {
                const auto& face = set.faces[f];
                add_mass(v, face.element, mass_flux_row(face.quad_points, face.unit_normal, disc.maps[face.element]),
                         sign);
            }
            for (Index s : cv.boundary_segments) {
                const auto& seg = set.boundary_segments[s];
                add_mass(v, seg.element, mass_flux_row(seg.quad_points, seg.unit_normal, disc.maps[seg.element]), 1.0);
            }
            for (Index s : cv.scvs) {
                const auto& scv = set.scvs[s];
                rhs_p(v) += integrate_polygon(scv.polygon, scv.dof_location, problem.mass_source);
            }
        }
    }
};

SparseMatrix from_triplets(Index rows, Index cols, const Triplets& t)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.prune(0.0);
    return m;
}

} // namespace

SparseMatrix SaddleSystem::matrix() const
{
    const Index nv = num_velocity_dofs();
    Triplets t;
    t.reserve(static_cast<std::size_t>(A.nonZeros() + B.nonZeros() + C.nonZeros() + 1));
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < B.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(B, k); it; ++it)
            t.emplace_back(it.row(), nv + it.col(), it.value());
    for (int k = 0; k < C.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(C, k); it; ++it)
            t.emplace_back(nv + it.row(), it.col(), it.value());
    if (pinned_pressure)
        t.emplace_back(nv + *pinned_pressure, nv + *pinned_pressure, 1.0);
    return from_triplets(size(), size(), t);
}

Vector SaddleSystem::rhs() const
{
    Vector out(size());
    out << rhs_momentum, rhs_mass;
    return out;
}

SaddleSystem assemble(const GridDiscretization& disc, const StokesProblem& problem, const AssemblyOptions& options)
{
    const bool has_neumann = std::any_of(disc.mesh.boundary_facets.begin(), disc.mesh.boundary_facets.end(),
                                         [&](const BoundaryFacet& f) {
                                             return disc.mesh.kind_of(f.marker) == BoundaryKind::Neumann;
                                         });
    if (options.enforce_dirichlet && !has_neumann && !options.pin_pressure)
        throw ConfigurationError("assemble: pure Dirichlet problem needs a pinned pressure");

    Builder builder(disc, problem, options);
    switch (disc.scheme) {
    case SchemeKind::NonOverlapping:
    case SchemeKind::Overlapping:
        builder.cv_momentum_rows(true);
        builder.box_mass_rows();
        break;
    case SchemeKind::Hybrid:
        builder.cv_momentum_rows(false);
        builder.hybrid_bubble_rows();
        builder.box_mass_rows();
        break;
    case SchemeKind::Fem:
        builder.galerkin_rows();
        break;
    }

    SaddleSystem sys;
    sys.rhs_momentum = std::move(builder.rhs_v);
    sys.rhs_mass = std::move(builder.rhs_p);

    if (options.enforce_dirichlet) {
        for (Index v = 0; v < disc.dofs.num_vertices; ++v) {
            if (!disc.dirichlet_vertex[v])
                continue;
            const Vector2 value = problem.dirichlet_data ? problem.dirichlet_data(disc.mesh.vertices[v]) : Vector2::Zero();
            for (int k = 0; k < 2; ++k) {
                const Index row = DofMap::velocity_dof(v, k);
                builder.a.emplace_back(row, row, 1.0);
                sys.rhs_momentum(row) = value[k];
                sys.dirichlet_rows.emplace_back(row, value[k]);
            }
        }
    }

    if (options.pin_pressure) {
        const auto [vertex, value] = *options.pin_pressure;
        if (vertex < 0 || vertex >= builder.np)
            throw ConfigurationError("assemble: pinned pressure vertex out of range");
        std::erase_if(builder.c, [v = vertex](const Eigen::Triplet<double>& t) { return t.row() == v; });
        sys.rhs_mass(vertex) = value;
        sys.pinned_pressure = vertex;
    }

    sys.A = from_triplets(builder.nvel, builder.nvel, builder.a);
    sys.B = from_triplets(builder.nvel, builder.np, builder.b);
    sys.C = from_triplets(builder.np, builder.nvel, builder.c);
    spdlog::debug("assembled {} system: {} velocity dofs, {} pressure dofs, {} nonzeros in A",
                  to_string(disc.scheme), builder.nvel, builder.np, sys.A.nonZeros());
    return sys;
}

Vector interpolate(const GridDiscretization& disc, const VectorField& velocity, const ScalarField& pressure)
{
    Vector x = Vector::Zero(disc.dofs.num_dofs());
    for (Index v = 0; v < disc.dofs.num_vertices; ++v) {
        const Point& p = disc.mesh.vertices[v];
        if (velocity)
            x.segment<2>(DofMap::velocity_dof(v, 0)) = velocity(p);
        if (pressure)
            x(disc.dofs.pressure_dof(v)) = pressure(p);
    }
    if (velocity)
        for (Index e = 0; e < disc.dofs.num_elements; ++e)
            x.segment<2>(DofMap::velocity_dof(disc.dofs.bubble_location(e), 0)) = velocity(disc.mesh.centroid(e));
    return x;
}

} // namespace cvfe
