#include "cvfe/mesh.hpp"
#include "support/meshes.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

using namespace cvfe;

namespace {

const std::filesystem::path data_dir = CVFE_TEST_DATA_DIR;

std::set<Index> boundary_vertices(const Mesh& mesh)
{
    std::set<Index> out;
    for (const auto& f : mesh.boundary_facets)
        out.insert(f.vertices.begin(), f.vertices.end());
    return out;
}

} // namespace

TEST_CASE("structured grid counts")
{
    const auto one = generate_structured(1, 1);
    CHECK(one.num_vertices() == 4);
    CHECK(one.num_elements() == 2);
    CHECK(one.boundary_facets.size() == 4);

    const auto two = generate_structured(2, 2);
    CHECK(two.num_vertices() == 9);
    CHECK(two.num_elements() == 8);
    CHECK(two.domain_area() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("structured 10x10 element areas")
{
    const auto mesh = generate_structured(10, 10);
    double sum = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        CHECK(std::abs(mesh.element_area(e) - 0.005) < 1e-16);
        sum += mesh.element_area(e);
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    CHECK_NOTHROW(validate(mesh));
}

TEST_CASE("structured grid on a rectangle")
{
    const auto mesh = generate_structured(3, 2, Rectangle{{-1.0, 2.0}, {2.0, 3.0}});
    CHECK(mesh.domain_area() == doctest::Approx(3.0));
    CHECK(mesh.boundary_facets.size() == 10);
    CHECK_NOTHROW(validate(mesh));
}

TEST_CASE("distortion with zero fraction is the identity")
{
    const auto mesh = generate_structured(6, 6);
    const auto moved = distort(mesh, 0.0, 5);
    for (Index v = 0; v < mesh.num_vertices(); ++v)
        CHECK(moved.vertices[v] == mesh.vertices[v]);
}

TEST_CASE("distortion keeps the mesh valid and the boundary fixed")
{
    const auto mesh = generate_structured(10, 10);
    const auto moved = distort(mesh, 0.2, 42);
    for (Index e = 0; e < moved.num_elements(); ++e)
        CHECK(moved.element_area(e) > 0.0);
    CHECK_NOTHROW(validate(moved));
    const auto boundary = boundary_vertices(mesh);
    int interior_moved = 0;
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        if (boundary.count(v)) {
            CHECK(moved.vertices[v].x() == mesh.vertices[v].x());
            CHECK(moved.vertices[v].y() == mesh.vertices[v].y());
        } else {
            // per-coordinate bound: fraction times the shortest incident edge (0.1 here)
            const Vector2 d = moved.vertices[v] - mesh.vertices[v];
            CHECK(std::abs(d.x()) <= 0.2 * 0.1 + 1e-15);
            CHECK(std::abs(d.y()) <= 0.2 * 0.1 + 1e-15);
            interior_moved += d.norm() > 0.0;
        }
    }
    CHECK(interior_moved == 81);
    CHECK(std::abs(moved.domain_area() - 1.0) < 1e-12);
}

TEST_CASE("distortion is deterministic")
{
    const auto mesh = generate_structured(10, 10);
    const auto a = distort(mesh, 0.2, 42);
    const auto b = distort(mesh, 0.2, 42);
    const auto c = distort(mesh, 0.2, 43);
    bool differs = false;
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        CHECK(a.vertices[v] == b.vertices[v]);
        differs = differs || a.vertices[v] != c.vertices[v];
    }
    CHECK(differs);
}

TEST_CASE("distortion rejects out-of-range fractions")
{
    const auto mesh = generate_structured(2, 2);
    CHECK_THROWS_AS(distort(mesh, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(distort(mesh, -0.1, 1), std::invalid_argument);
}

TEST_CASE("validation catches broken meshes")
{
    SUBCASE("clockwise triangle")
    {
        auto mesh = testing_support::two_element_mesh();
        std::swap(mesh.triangles[0][1], mesh.triangles[0][2]);
        CHECK_THROWS_AS(validate(mesh), InvalidMesh);
    }
    SUBCASE("missing boundary facet")
    {
        auto mesh = testing_support::two_element_mesh();
        mesh.boundary_facets.pop_back();
        CHECK_THROWS_AS(validate(mesh), InvalidMesh);
    }
    SUBCASE("facet on an interior edge")
    {
        auto mesh = testing_support::two_element_mesh();
        mesh.boundary_facets.push_back({{0, 2}, 1});
        CHECK_THROWS_AS(validate(mesh), InvalidMesh);
    }
    SUBCASE("unmapped marker")
    {
        auto mesh = testing_support::two_element_mesh();
        mesh.boundary_facets[0].marker = 7;
        CHECK_THROWS_AS(validate(mesh), InvalidMesh);
    }
    SUBCASE("edge shared by three triangles")
    {
        auto mesh = testing_support::two_element_mesh();
        mesh.vertices.push_back({0.5, -1.0});
        mesh.triangles.push_back({0, 4, 2});
        CHECK_THROWS_AS(validate(mesh), InvalidMesh);
    }
}

TEST_CASE("minimal MSH file")
{
    const auto mesh = read_msh(data_dir / "minimal.msh");
    CHECK(mesh.num_vertices() == 3);
    CHECK(mesh.num_elements() == 1);
    CHECK(mesh.boundary_facets.size() == 3);
    CHECK(mesh.kind_of(1) == BoundaryKind::Dirichlet);
    CHECK(mesh.kind_of(2) == BoundaryKind::Neumann);
    CHECK(mesh.domain_area() == doctest::Approx(0.5));
}

TEST_CASE("binary MSH files are rejected")
{
    try {
        read_msh(data_dir / "binary_header.msh");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("binary unsupported") != std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("MSH parse errors carry line numbers")
{
    const auto path = std::filesystem::temp_directory_path() / "cvfe_bad_nodes.msh";
    {
        std::ofstream out(path);
        out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n2\n1 0 0 0\n2 1 0 0.5\n$EndNodes\n";
    }
    try {
        read_msh(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
    }
    CHECK_THROWS_AS(read_msh(data_dir / "does_not_exist.msh"), std::exception);
}

TEST_CASE("Delaunay unit-square MSH file")
{
    for (const char* name : {"unit_square_delaunay.msh", "unit_square_delaunay_16.msh"}) {
        auto mesh = read_msh(data_dir / name);
        CHECK(std::abs(mesh.domain_area() - 1.0) < 1e-10);
        CHECK(mesh.marker_names.at(side::left) == "left");
        mark_rectangle_sides(mesh);
        CHECK_NOTHROW(validate(mesh));
        for (const auto& f : mesh.boundary_facets) {
            const Point m = 0.5 * (mesh.vertices[f.vertices[0]] + mesh.vertices[f.vertices[1]]);
            if (f.marker == side::left)
                CHECK(m.x() == 0.0);
            if (f.marker == side::top)
                CHECK(m.y() == 1.0);
        }
    }
}

TEST_CASE("mesh statistics")
{
    const auto mesh = generate_structured(2, 2);
    const auto s = stats(mesh, SchemeKind::Overlapping);
    CHECK(std::abs(s.h_p - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(s.h_v - 1.0 / std::sqrt(17.0)) < 1e-15);

    const auto wide = generate_structured(2, 2, Rectangle{{0.0, 0.0}, {2.0, 1.0}});
    const auto w = stats(wide, SchemeKind::Fem);
    CHECK(std::abs(w.h_p / s.h_p - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(w.h_v / s.h_v - std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("mesh sizes pair like the finest published level")
{
    // 240 x 240 cells: h_p and h_v round to the published 4.1e-3 and 2.4e-3
    const auto s = stats(generate_structured(240, 240), SchemeKind::Overlapping);
    CHECK(std::round(s.h_p * 1e4) == 41.0);
    CHECK(std::round(s.h_v * 1e4) == 24.0);
}
