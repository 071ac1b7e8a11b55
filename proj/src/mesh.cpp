#include "cvfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace cvfe {

std::string to_string(SchemeKind scheme)
{
    switch (scheme) {
    case SchemeKind::NonOverlapping: return "nonoverlapping";
    case SchemeKind::Overlapping: return "overlapping";
    case SchemeKind::Hybrid: return "hybrid";
    case SchemeKind::Fem: return "fem";
    }
    throw ConfigurationError("unknown scheme");
}

SchemeKind scheme_from_string(const std::string& name)
{
    if (name == "nonoverlapping" || name == "nov")
        return SchemeKind::NonOverlapping;
    if (name == "overlapping" || name == "ov")
        return SchemeKind::Overlapping;
    if (name == "hybrid" || name == "hy")
        return SchemeKind::Hybrid;
    if (name == "fem")
        return SchemeKind::Fem;
    throw ConfigurationError("unknown scheme '" + name + "'");
}

std::array<Point, 3> Mesh::element_points(Index e) const
{
    const auto& t = triangles[static_cast<std::size_t>(e)];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
}

double Mesh::element_area(Index e) const
{
    const auto p = element_points(e);
    return signed_area(p[0], p[1], p[2]);
}

Point Mesh::centroid(Index e) const
{
    const auto p = element_points(e);
    return (p[0] + p[1] + p[2]) / 3.0;
}

double Mesh::domain_area() const
{
    double sum = 0.0;
    for (Index e = 0; e < num_elements(); ++e)
        sum += element_area(e);
    return sum;
}

BoundaryKind Mesh::kind_of(int marker) const
{
    const auto it = markers.find(marker);
    if (it == markers.end())
        throw InvalidMesh("boundary marker " + std::to_string(marker) + " has no boundary kind");
    return it->second;
}

namespace {

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

} // namespace

MeshTopology build_topology(const Mesh& mesh)
{
    MeshTopology topo;
    const Index nv = mesh.num_vertices();
    std::unordered_map<std::uint64_t, Index> edge_index;
    edge_index.reserve(static_cast<std::size_t>(3 * mesh.num_elements()));
    topo.element_edges.resize(mesh.triangles.size());

    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles[e];
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= nv)
                throw InvalidMesh("element " + std::to_string(e) + " references a missing vertex");
        if (!(mesh.element_area(e) > 0.0))
            throw InvalidMesh("element " + std::to_string(e) + " has non-positive area");
        for (int k = 0; k < 3; ++k) {
            const Index a = t[k], b = t[(k + 1) % 3];
            const auto [it, inserted] = edge_index.try_emplace(edge_key(a, b), static_cast<Index>(topo.edges.size()));
            if (inserted) {
                topo.edges.push_back({{a, b}, {e, -1}});
            }
            else {
                auto& edge = topo.edges[it->second];
                if (edge.elements[1] != -1)
                    throw InvalidMesh("edge (" + std::to_string(a) + "," + std::to_string(b) + ") shared by more than two elements");
                if (edge.vertices[0] != b)
                    throw InvalidMesh("inconsistent orientation across edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
                edge.elements[1] = e;
            }
            topo.element_edges[e][k] = it->second;
        }
    }

    std::vector<char> facet_seen(topo.edges.size(), 0);
    topo.facet_element.reserve(mesh.boundary_facets.size());
    topo.facet_local_edge.reserve(mesh.boundary_facets.size());
    for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
        const auto& facet = mesh.boundary_facets[f];
        const auto it = edge_index.find(edge_key(facet.vertices[0], facet.vertices[1]));
        if (it == edge_index.end())
            throw InvalidMesh("boundary facet " + std::to_string(f) + " is not a mesh edge");
        const auto& edge = topo.edges[it->second];
        if (edge.elements[1] != -1)
            throw InvalidMesh("boundary facet " + std::to_string(f) + " is an interior edge");
        if (facet_seen[it->second]++)
            throw InvalidMesh("boundary facet " + std::to_string(f) + " listed twice");
        if (!mesh.markers.contains(facet.marker))
            throw InvalidMesh("boundary facet " + std::to_string(f) + " has unmapped marker " + std::to_string(facet.marker));
        const Index e = edge.elements[0];
        int local = -1;
        for (int k = 0; k < 3; ++k)
            if (topo.element_edges[e][k] == it->second)
                local = k;
        topo.facet_element.push_back(e);
        topo.facet_local_edge.push_back(local);
    }

    for (std::size_t i = 0; i < topo.edges.size(); ++i)
        if (topo.edges[i].elements[1] == -1 && !facet_seen[i])
            throw InvalidMesh("boundary edge (" + std::to_string(topo.edges[i].vertices[0]) + "," +
                              std::to_string(topo.edges[i].vertices[1]) + ") carries no boundary facet");

    std::vector<char> used(static_cast<std::size_t>(nv), 0);
    for (const auto& t : mesh.triangles)
        for (Index v : t)
            used[v] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end())
        throw InvalidMesh("mesh contains vertices not referenced by any element");
    return topo;
}

void validate(const Mesh& mesh) { (void)build_topology(mesh); }

Mesh generate_structured(int nx, int ny, const Rectangle& domain)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("generate_structured: cell counts must be positive");
    const Vector2 extent = domain.upper - domain.lower;
    if (!(extent.x() > 0.0) || !(extent.y() > 0.0))
        throw std::invalid_argument("generate_structured: degenerate rectangle");

    Mesh mesh;
    const auto id = [nx](int i, int j) { return static_cast<Index>(j) * (nx + 1) + i; };
    mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            // exact end points so boundary coordinates are bit-identical to the rectangle
            const double x = i == nx ? domain.upper.x() : domain.lower.x() + extent.x() * i / nx;
            const double y = j == ny ? domain.upper.y() : domain.lower.y() + extent.y() * j / ny;
            mesh.vertices.emplace_back(x, y);
        }

    mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }

    for (int i = 0; i < nx; ++i) {
        mesh.boundary_facets.push_back({{id(i, 0), id(i + 1, 0)}, side::bottom});
        mesh.boundary_facets.push_back({{id(i + 1, ny), id(i, ny)}, side::top});
    }
    for (int j = 0; j < ny; ++j) {
        mesh.boundary_facets.push_back({{id(0, j + 1), id(0, j)}, side::left});
        mesh.boundary_facets.push_back({{id(nx, j), id(nx, j + 1)}, side::right});
    }
    for (int marker : {side::left, side::right, side::bottom, side::top})
        mesh.markers[marker] = BoundaryKind::Dirichlet;
    mesh.marker_names = {{side::left, "left"}, {side::right, "right"}, {side::bottom, "bottom"}, {side::top, "top"}};
    return mesh;
}

Mesh distort(const Mesh& mesh, double fraction, std::uint64_t seed)
{
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("distort: fraction must lie in [0,1)");
    const Index nv = mesh.num_vertices();

    std::vector<char> on_boundary(static_cast<std::size_t>(nv), 0);
    for (const auto& facet : mesh.boundary_facets)
        on_boundary[facet.vertices[0]] = on_boundary[facet.vertices[1]] = 1;

    std::vector<double> shortest(static_cast<std::size_t>(nv), std::numeric_limits<double>::infinity());
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const Index a = t[k], b = t[(k + 1) % 3];
            const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
            shortest[a] = std::min(shortest[a], len);
            shortest[b] = std::min(shortest[b], len);
        }

    Mesh out = mesh;
    if (fraction == 0.0)
        return out;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Index v = 0; v < nv; ++v) {
        if (on_boundary[v])
            continue;
        const double scale = fraction * shortest[v];
        const double dx = unit(rng);
        const double dy = unit(rng);
        out.vertices[v] += scale * Vector2(dx, dy);
    }

    for (Index e = 0; e < out.num_elements(); ++e)
        if (!(out.element_area(e) > 0.0))
            throw DistortionFailure("distort: element " + std::to_string(e) + " inverted (seed " + std::to_string(seed) + ")");
    return out;
}

void mark_rectangle_sides(Mesh& mesh, const Rectangle& domain)
{
    const double tol = 1e-10 * std::max((domain.upper - domain.lower).norm(), 1.0);
    for (auto& facet : mesh.boundary_facets) {
        const Point mid = 0.5 * (mesh.vertices[facet.vertices[0]] + mesh.vertices[facet.vertices[1]]);
        if (std::abs(mid.x() - domain.lower.x()) < tol)
            facet.marker = side::left;
        else if (std::abs(mid.x() - domain.upper.x()) < tol)
            facet.marker = side::right;
        else if (std::abs(mid.y() - domain.lower.y()) < tol)
            facet.marker = side::bottom;
        else if (std::abs(mid.y() - domain.upper.y()) < tol)
            facet.marker = side::top;
        else
            throw InvalidMesh("mark_rectangle_sides: facet midpoint not on the rectangle boundary");
    }
    mesh.markers.clear();
    for (int marker : {side::left, side::right, side::bottom, side::top})
        mesh.markers[marker] = BoundaryKind::Dirichlet;
    mesh.marker_names = {{side::left, "left"}, {side::right, "right"}, {side::bottom, "bottom"}, {side::top, "top"}};
}

MeshStats stats(const Mesh& mesh, SchemeKind /*scheme*/)
{
    // every scheme uses the MINI layout: pressure at vertices, velocity at vertices and centroids
    MeshStats s;
    s.num_vertices = mesh.num_vertices();
    s.num_elements = mesh.num_elements();
    s.domain_area = mesh.domain_area();
    s.h_p = std::sqrt(s.domain_area / static_cast<double>(s.num_vertices));
    s.h_v = std::sqrt(s.domain_area / static_cast<double>(s.num_vertices + s.num_elements));
    return s;
}

} // namespace cvfe
