#include "cvfe/geometry.hpp"

#include <cmath>

namespace cvfe {

namespace {

constexpr int kFaceQuadratureDegree = 3;     // two Gauss points
constexpr int kBoundaryQuadratureDegree = 5; // three Gauss points, traction data

Vector2 normal_towards(const Point& a, const Point& b, const Vector2& direction)
{
    const Vector2 t = b - a;
    Vector2 n(t.y(), -t.x());
    n.normalize();
    return n.dot(direction) >= 0.0 ? n : Vector2(-n);
}

SubControlVolumeFace make_face(Index element, Index inside, std::optional<Index> outside, const Point& a,
                               const Point& b, const Vector2& towards_outside)
{
    SubControlVolumeFace face;
    face.element = element;
    face.inside_cv = inside;
    face.outside_cv = outside;
    face.segment = {a, b};
    face.length = (b - a).norm();
    face.unit_normal = normal_towards(a, b, towards_outside);
    face.quad_points = segment_quadrature(a, b, kFaceQuadratureDegree);
    return face;
}

std::array<Point, 3> edge_midpoints(const std::array<Point, 3>& p)
{
    return {0.5 * (p[0] + p[1]), 0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0])};
}

void add_boundary_segments(const Mesh& mesh, const MeshTopology& topo, ControlVolumeSet& set)
{
    for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
        const Index e = topo.facet_element[f];
        const int k = topo.facet_local_edge[f];
        const auto& tri = mesh.triangles[e];
        const Index va = tri[k], vb = tri[(k + 1) % 3];
        const Point& a = mesh.vertices[va];
        const Point& b = mesh.vertices[vb];
        const Point m = 0.5 * (a + b);
        const Vector2 d = b - a;
        const Vector2 outward = Vector2(d.y(), -d.x()).normalized();
        const int marker = mesh.boundary_facets[f].marker;
        const BoundaryKind kind = mesh.kind_of(marker);
        for (const auto& [cv, p, q] : {std::tuple{va, a, m}, std::tuple{vb, m, b}}) {
            BoundarySegment seg;
            seg.cv = cv;
            seg.element = e;
            seg.facet = static_cast<Index>(f);
            seg.marker = marker;
            seg.kind = kind;
            seg.segment = {p, q};
            seg.length = (q - p).norm();
            seg.unit_normal = outward;
            seg.quad_points = segment_quadrature(p, q, kBoundaryQuadratureDegree);
            set.boundary_segments.push_back(std::move(seg));
        }
    }
}

void init_vertex_cvs(const Mesh& mesh, ControlVolumeSet& set, Index count)
{
    set.cvs.resize(static_cast<std::size_t>(count));
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        auto& cv = set.cvs[v];
        cv.kind = CvKind::Vertex;
        cv.location = v;
        cv.dof_location = mesh.vertices[v];
    }
}

} // namespace

std::vector<QuadPoint> segment_quadrature(const Point& a, const Point& b, int degree)
{
    const auto& rule = segment_rule(degree);
    const double length = (b - a).norm();
    std::vector<QuadPoint> out;
    out.reserve(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q)
        out.push_back({a + rule.points[q] * (b - a), rule.weights[q] * length});
    return out;
}

double polygon_area(const std::vector<Point>& polygon)
{
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    return 0.5 * twice;
}

void ControlVolumeSet::link()
{
    for (auto& cv : cvs) {
        cv.scvs.clear();
        cv.faces.clear();
        cv.boundary_segments.clear();
        cv.volume = 0.0;
    }
    for (std::size_t s = 0; s < scvs.size(); ++s) {
        auto& cv = cvs[scvs[s].cv];
        cv.scvs.push_back(static_cast<Index>(s));
        cv.volume += scvs[s].volume;
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        cvs[faces[f].inside_cv].faces.emplace_back(static_cast<Index>(f), 1.0);
        if (faces[f].outside_cv)
            cvs[*faces[f].outside_cv].faces.emplace_back(static_cast<Index>(f), -1.0);
    }
    for (std::size_t s = 0; s < boundary_segments.size(); ++s)
        cvs[boundary_segments[s].cv].boundary_segments.push_back(static_cast<Index>(s));
}

std::array<Index, 4> GridDiscretization::element_locations(Index e) const
{
    const auto& t = mesh.triangles[e];
    return {t[0], t[1], t[2], dofs.bubble_location(e)};
}

ControlVolumeSet build_boxes(const Mesh& mesh, const MeshTopology& topology)
{
    ControlVolumeSet set;
    init_vertex_cvs(mesh, set, mesh.num_vertices());
    set.scvs.reserve(3 * mesh.triangles.size());
    set.faces.reserve(3 * mesh.triangles.size());

    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles[e];
        const auto p = mesh.element_points(e);
        const auto m = edge_midpoints(p);
        const Point c = (p[0] + p[1] + p[2]) / 3.0;
        for (int i = 0; i < 3; ++i) {
            const int prev = (i + 2) % 3;
            SubControlVolume scv;
            scv.cv = t[i];
            scv.element = e;
            scv.polygon = {p[i], m[i], c, m[prev]};
            scv.volume = polygon_area(scv.polygon);
            scv.dof_location = p[i];
            set.scvs.push_back(std::move(scv));
        }
        for (int k = 0; k < 3; ++k) {
            const int next = (k + 1) % 3;
            set.faces.push_back(make_face(e, t[k], t[next], m[k], c, p[next] - p[k]));
        }
    }
    add_boundary_segments(mesh, topology, set);
    set.link();
    return set;
}

BubbleControlVolume build_bubble_cv(const std::array<Point, 3>& element)
{
    const auto m = edge_midpoints(element);
    const Point c = (element[0] + element[1] + element[2]) / 3.0;
    BubbleControlVolume out;
    out.scv.polygon = {m[0], m[1], m[2]};
    out.scv.volume = polygon_area(out.scv.polygon);
    out.scv.dof_location = c;
    for (int i = 0; i < 3; ++i) {
        // medial edge cutting off corner i
        const int prev = (i + 2) % 3;
        out.faces[i] = make_face(-1, -1, std::nullopt, m[prev], m[i], element[i] - c);
    }
    return out;
}

ControlVolumeSet build_nonoverlapping(const Mesh& mesh, const MeshTopology& topology)
{
    ControlVolumeSet set;
    const Index nv = mesh.num_vertices();
    init_vertex_cvs(mesh, set, nv + mesh.num_elements());
    set.scvs.reserve(4 * mesh.triangles.size());
    set.faces.reserve(3 * mesh.triangles.size());

    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangles[e];
        const auto p = mesh.element_points(e);
        const auto m = edge_midpoints(p);
        const Index bubble = nv + e;

        for (int i = 0; i < 3; ++i) {
            const int prev = (i + 2) % 3;
            SubControlVolume corner;
            corner.cv = t[i];
            corner.element = e;
            corner.polygon = {p[i], m[i], m[prev]};
            corner.volume = polygon_area(corner.polygon);
            corner.dof_location = p[i];
            set.scvs.push_back(std::move(corner));
        }

        auto medial = build_bubble_cv(p);
        medial.scv.cv = bubble;
        medial.scv.element = e;
        auto& cv = set.cvs[bubble];
        cv.kind = CvKind::Bubble;
        cv.location = bubble;
        cv.dof_location = medial.scv.dof_location;
        set.scvs.push_back(std::move(medial.scv));
        for (int i = 0; i < 3; ++i) {
            auto& face = medial.faces[i];
            face.element = e;
            face.inside_cv = bubble;
            face.outside_cv = t[i];
            set.faces.push_back(std::move(face));
        }
    }
    add_boundary_segments(mesh, topology, set);
    set.link();
    return set;
}

GridDiscretization build(const Mesh& mesh, SchemeKind scheme)
{
    GridDiscretization disc;
    disc.mesh = mesh;
    disc.topology = build_topology(mesh);
    disc.scheme = scheme;
    disc.dofs.num_vertices = mesh.num_vertices();
    disc.dofs.num_elements = mesh.num_elements();

    disc.maps.reserve(mesh.triangles.size());
    for (Index e = 0; e < mesh.num_elements(); ++e)
        disc.maps.push_back(AffineMap::from_triangle(mesh.element_points(e)));

    disc.dirichlet_vertex.assign(static_cast<std::size_t>(mesh.num_vertices()), 0);
    for (const auto& facet : mesh.boundary_facets)
        if (mesh.kind_of(facet.marker) == BoundaryKind::Dirichlet)
            disc.dirichlet_vertex[facet.vertices[0]] = disc.dirichlet_vertex[facet.vertices[1]] = 1;

    disc.pressure_cvs = build_boxes(mesh, disc.topology);

    switch (scheme) {
    case SchemeKind::NonOverlapping:
        disc.velocity_cvs = build_nonoverlapping(mesh, disc.topology);
        break;
    case SchemeKind::Overlapping: {
        disc.velocity_cvs = disc.pressure_cvs;
        auto& set = disc.velocity_cvs;
        const Index nv = mesh.num_vertices();
        set.cvs.resize(static_cast<std::size_t>(nv + mesh.num_elements()));
        for (Index e = 0; e < mesh.num_elements(); ++e) {
            auto medial = build_bubble_cv(mesh.element_points(e));
            const Index bubble = nv + e;
            auto& cv = set.cvs[bubble];
            cv.kind = CvKind::Bubble;
            cv.location = bubble;
            cv.dof_location = medial.scv.dof_location;
            cv.in_partition = false;
            medial.scv.cv = bubble;
            medial.scv.element = e;
            set.scvs.push_back(std::move(medial.scv));
            for (auto& face : medial.faces) {
                face.element = e;
                face.inside_cv = bubble;
                set.faces.push_back(std::move(face));
            }
        }
        set.link();
        break;
    }
    case SchemeKind::Hybrid:
    case SchemeKind::Fem:
        disc.velocity_cvs = disc.pressure_cvs;
        break;
    default:
        throw std::invalid_argument("build: unknown scheme");
    }
    return disc;
}

} // namespace cvfe
