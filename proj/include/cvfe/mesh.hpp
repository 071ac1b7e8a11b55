#pragma once

#include "cvfe/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cvfe {

enum class BoundaryKind { Dirichlet, Neumann };

struct BoundaryFacet {
    std::array<Index, 2> vertices;
    int marker = 0;
};

/// Conforming triangulation of a polygonal 2D domain.
///
/// Triangles are stored counterclockwise. Boundary facets carry an integer
/// marker; `markers` maps every marker in use to the boundary-condition kind.
struct Mesh {
    std::vector<Point> vertices;
    std::vector<std::array<Index, 3>> triangles;
    std::vector<BoundaryFacet> boundary_facets;
    std::map<int, BoundaryKind> markers;
    std::map<int, std::string> marker_names;

    Index num_vertices() const { return static_cast<Index>(vertices.size()); }
    Index num_elements() const { return static_cast<Index>(triangles.size()); }

    std::array<Point, 3> element_points(Index e) const;
    double element_area(Index e) const;
    Point centroid(Index e) const;
    double domain_area() const;

    BoundaryKind kind_of(int marker) const;
    void set_boundary_kind(int marker, BoundaryKind kind) { markers[marker] = kind; }
};

/// Side markers assigned by generate_structured and mark_rectangle_sides.
namespace side {
inline constexpr int left = 1;
inline constexpr int right = 2;
inline constexpr int bottom = 3;
inline constexpr int top = 4;
} // namespace side

struct Rectangle {
    Point lower{0.0, 0.0};
    Point upper{1.0, 1.0};
};

struct MeshStats {
    Index num_vertices = 0;
    Index num_elements = 0;
    double h_p = 0.0;
    double h_v = 0.0;
    double domain_area = 0.0;
};

/// Edge-based connectivity derived from a mesh.
struct MeshTopology {
    struct Edge {
        std::array<Index, 2> vertices;
        std::array<Index, 2> elements{-1, -1}; ///< second entry is -1 on the boundary
    };
    std::vector<Edge> edges;
    /// element_edges[e][k] is the edge between local vertices k and (k+1)%3
    std::vector<std::array<Index, 3>> element_edges;
    /// facet_element[f] is the element owning boundary facet f, facet_local_edge[f] its local edge
    std::vector<Index> facet_element;
    std::vector<int> facet_local_edge;
};

/// Builds edge connectivity and checks every mesh invariant; throws InvalidMesh.
MeshTopology build_topology(const Mesh& mesh);
void validate(const Mesh& mesh);

/// nx*ny cells, each split along the lower-left to upper-right diagonal.
/// All four sides default to Dirichlet.
Mesh generate_structured(int nx, int ny, const Rectangle& domain = {});

/// Moves every interior vertex by an independent uniform vector with
/// per-coordinate magnitude at most fraction times its shortest incident edge.
/// Boundary vertices are untouched. Throws DistortionFailure on inversion.
Mesh distort(const Mesh& mesh, double fraction, std::uint64_t seed);

/// ASCII MSH 2.2 reader (triangles plus tagged boundary lines).
Mesh read_msh(const std::filesystem::path& path);

/// Re-marks all boundary facets of a rectangle-shaped mesh by side.
void mark_rectangle_sides(Mesh& mesh, const Rectangle& domain = {});

MeshStats stats(const Mesh& mesh, SchemeKind scheme);

} // namespace cvfe
