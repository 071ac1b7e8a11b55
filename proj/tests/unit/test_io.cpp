#include "cvfe/io.hpp"
#include "support/meshes.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace cvfe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& csv)
{
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            out.push_back(line);
    return out;
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("cvfe_io_" + name);
    fs::remove_all(dir);
    return dir;
}

// numbers inside the first <DataArray Name="name"> element
std::vector<double> data_array(const std::string& xml, const std::string& name)
{
    const auto start = xml.find("Name=\"" + name + "\"");
    REQUIRE(start != std::string::npos);
    const auto open = xml.find('>', start) + 1;
    const auto close = xml.find("</DataArray>", open);
    std::istringstream in(xml.substr(open, close - open));
    std::vector<double> values;
    for (double v; in >> v;)
        values.push_back(v);
    return values;
}

} // namespace

TEST_CASE("CSV layout")
{
    ConvergenceReport report;
    report.case_name = "donea-huerta";
    ConvergenceLevel level;
    level.h_p = 0.1;
    level.h_v = 0.05;
    level.errors = {1e-2, 1e-3, 1e-1};
    level.iterations = 27;
    level.converged = true;
    report.levels = {level};
    report.rates = convergence_rates(report.levels);

    const auto lines = data_lines(format_csv(report));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "h_p,L2_p,rate,h_v,L2_v,rate,H1_v,rate,it");
    CHECK(std::regex_match(lines[1], std::regex("[^,]+,[^,]+,,[^,]+,[^,]+,,[^,]+,,27")));

    level.h_p = 0.05;
    level.h_v = 0.025;
    level.errors = {5e-3, 2.5e-4, 5e-2};
    report.levels.push_back(level);
    report.rates = convergence_rates(report.levels);
    const auto two = data_lines(format_csv(report));
    REQUIRE(two.size() == 3);
    std::vector<std::string> cells;
    std::stringstream row(two[2]);
    for (std::string cell; std::getline(row, cell, ',');)
        cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    CHECK(std::stod(cells[2]) == doctest::Approx(1.0));
    CHECK(std::stod(cells[5]) == doctest::Approx(2.0));
    CHECK(std::stod(cells[7]) == doctest::Approx(1.0));

    const std::string text = format_csv(report);
    CHECK(text.rfind("# ", 0) == 0);
}

TEST_CASE("CSV file round trip")
{
    const auto dir = scratch_dir("csv");
    ConvergenceReport report;
    report.levels.resize(1);
    report.rates = convergence_rates(report.levels);
    write_csv(report, dir / "nested" / "table.csv");
    CHECK(slurp(dir / "nested" / "table.csv") == format_csv(report));
}

TEST_CASE("VTU output on two triangles")
{
    const auto mesh = testing_support::two_element_mesh();
    const auto disc = build(mesh, SchemeKind::Overlapping);
    const Vector x = interpolate(
        disc, [](const Point& p) { return Vector2(p.y(), -p.x()); }, [](const Point&) { return 3.5; });
    const auto path = scratch_dir("vtu") / "two.vtu";
    write_vtu(disc, x, path);
    const std::string xml = slurp(path);
    CHECK(xml.find("NumberOfPoints=\"4\"") != std::string::npos);
    CHECK(xml.find("NumberOfCells=\"2\"") != std::string::npos);

    const auto points = data_array(xml, "Points");
    REQUIRE(points.size() == 12);
    for (Index v = 0; v < 4; ++v) {
        CHECK(points[3 * v] == mesh.vertices[v].x());
        CHECK(points[3 * v + 1] == mesh.vertices[v].y());
    }
    for (double p : data_array(xml, "pressure"))
        CHECK(p == 3.5);
    const auto velocity = data_array(xml, "velocity");
    REQUIRE(velocity.size() == 12);
    CHECK(velocity[3 * 2] == mesh.vertices[2].y());
    CHECK(velocity[3 * 2 + 1] == -mesh.vertices[2].x());
    CHECK(data_array(xml, "bubble_velocity").size() == 6);
    const auto types = data_array(xml, "types");
    CHECK(types == std::vector<double>{5, 5});

    CHECK_THROWS_AS(write_vtu(disc, Vector::Zero(3), path), std::invalid_argument);
}

TEST_CASE("control-volume dump")
{
    const auto disc = build(testing_support::two_element_mesh(), SchemeKind::Overlapping);
    const auto path = scratch_dir("cvs") / "cvs.vtu";
    write_cv_vtu(disc, path);
    const std::string xml = slurp(path);
    const auto cv = data_array(xml, "cv");
    CHECK(cv.size() == disc.velocity_cvs.scvs.size());
}

TEST_CASE("run configuration validation")
{
    RunConfig ok;
    CHECK_NOTHROW(ok.validate());

    RunConfig c = ok;
    c.levels = 0;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = ok;
    c.distortion = 0.6;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = ok;
    c.schemes.clear();
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = ok;
    c.case_name = "custom-msh";
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c.mesh_files = {"square.msh"};
    CHECK_NOTHROW(c.validate());
    c.solution = "unknown";
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = ok;
    c.mesh_files = {"square.msh"};
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = ok;
    c.case_name = "cavity";
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
}

TEST_CASE("run writes tables into a new directory")
{
    RunConfig config;
    config.case_name = "shear-flow";
    config.schemes = {SchemeKind::Overlapping, SchemeKind::Fem};
    config.levels = 1;
    config.base_cells = 3;
    config.emit_vtk = true;
    config.dump_cvs = true;
    config.output_dir = scratch_dir("run") / "deeper";
    CHECK(run(config) == 0);
    CHECK(fs::exists(config.output_dir / "shear-flow_overlapping.csv"));
    CHECK(fs::exists(config.output_dir / "shear-flow_fem.csv"));
    CHECK(fs::exists(config.output_dir / "shear-flow_overlapping_level0.vtu"));
    CHECK(fs::exists(config.output_dir / "shear-flow_overlapping_cvs_level0.vtu"));
    CHECK(data_lines(slurp(config.output_dir / "shear-flow_fem.csv")).size() == 2);
}
