#pragma once

#include "cvfe/basis.hpp"
#include "cvfe/mesh.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace cvfe {

struct QuadPoint {
    Point point;
    double weight; ///< includes the segment length
};

struct SubControlVolume {
    Index cv = -1;
    Index element = -1;
    std::vector<Point> polygon; ///< counterclockwise
    double volume = 0.0;
    Point dof_location = Point::Zero();
};

/// Element-local piece of a control-volume boundary lying inside the element.
/// The normal points from `inside_cv` towards `outside_cv`. One-sided faces
/// (the medial edges of overlapping bubble volumes) have no outside volume.
struct SubControlVolumeFace {
    Index element = -1;
    Index inside_cv = -1;
    std::optional<Index> outside_cv;
    std::array<Point, 2> segment;
    double length = 0.0;
    Vector2 unit_normal = Vector2::Zero();
    std::vector<QuadPoint> quad_points;
};

/// Part of a control-volume boundary on the domain boundary (half a facet).
struct BoundarySegment {
    Index cv = -1;
    Index element = -1;
    Index facet = -1;
    int marker = 0;
    BoundaryKind kind = BoundaryKind::Dirichlet;
    std::array<Point, 2> segment;
    double length = 0.0;
    Vector2 unit_normal = Vector2::Zero(); ///< outward from the domain
    std::vector<QuadPoint> quad_points;
};

enum class CvKind { Vertex, Bubble };

struct ControlVolume {
    CvKind kind = CvKind::Vertex;
    Index location = -1; ///< dof location: vertex id, or num_vertices + element id
    Point dof_location = Point::Zero();
    double volume = 0.0;
    bool in_partition = true; ///< member of the partitioning subset
    std::vector<Index> scvs;
    std::vector<std::pair<Index, double>> faces; ///< (face id, +1 inside / -1 outside)
    std::vector<Index> boundary_segments;
};

/// Control volumes, indexed by dof location.
struct ControlVolumeSet {
    std::vector<ControlVolume> cvs;
    std::vector<SubControlVolume> scvs;
    std::vector<SubControlVolumeFace> faces;
    std::vector<BoundarySegment> boundary_segments;

    Index size() const { return static_cast<Index>(cvs.size()); }
    /// Rebuilds the per-CV face and segment lists from the flat arrays.
    void link();
};

/// Velocity dofs are interleaved by component per location: 2*location + c.
/// Locations are the vertices followed by one centroid per element.
struct DofMap {
    Index num_vertices = 0;
    Index num_elements = 0;

    Index num_velocity_locations() const { return num_vertices + num_elements; }
    Index num_velocity_dofs() const { return 2 * num_velocity_locations(); }
    Index num_pressure_dofs() const { return num_vertices; }
    Index num_dofs() const { return num_velocity_dofs() + num_pressure_dofs(); }

    Index bubble_location(Index element) const { return num_vertices + element; }
    static Index velocity_dof(Index location, int component) { return 2 * location + component; }
    Index pressure_dof(Index vertex) const { return num_velocity_dofs() + vertex; }
};

struct GridDiscretization {
    Mesh mesh;
    MeshTopology topology;
    SchemeKind scheme = SchemeKind::Overlapping;
    DofMap dofs;
    ControlVolumeSet pressure_cvs;
    ControlVolumeSet velocity_cvs;
    std::vector<AffineMap> maps;
    std::vector<char> dirichlet_vertex; ///< vertex lies on a Dirichlet facet

    /// (v0, v1, v2, bubble) locations of element e.
    std::array<Index, 4> element_locations(Index e) const;
    bool has_bubble_cvs() const { return velocity_cvs.size() > dofs.num_vertices; }
};

struct BubbleControlVolume {
    SubControlVolume scv;
    std::array<SubControlVolumeFace, 3> faces;
};

/// Vertex-centred dual boxes (midpoint-centroid construction).
ControlVolumeSet build_boxes(const Mesh& mesh, const MeshTopology& topology);
/// Medial triangle of an element; faces carry outward normals.
BubbleControlVolume build_bubble_cv(const std::array<Point, 3>& element);
/// Corner triangles for vertices plus medial triangles for bubbles; tiles the domain.
ControlVolumeSet build_nonoverlapping(const Mesh& mesh, const MeshTopology& topology);
GridDiscretization build(const Mesh& mesh, SchemeKind scheme);

/// Gauss points on a segment exact to `degree`, weights scaled by its length.
std::vector<QuadPoint> segment_quadrature(const Point& a, const Point& b, int degree);

double polygon_area(const std::vector<Point>& polygon);

} // namespace cvfe
