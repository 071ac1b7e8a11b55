#include "cvfe/io.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cvfe {

namespace {

std::string format_rate(const std::optional<double>& rate)
{
    if (!rate)
        return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *rate;
    return os.str();
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::string format_csv(const ConvergenceReport& report)
{
    std::ostringstream os;
    os << "# cvfe_stokes convergence table, format " << kCsvFormatVersion << "\n";
    os << "# case=" << report.case_name << " scheme=" << to_string(report.scheme) << "\n";
    os << "h_p,L2_p,rate,h_v,L2_v,rate,H1_v,rate,it\n";
    os << std::scientific << std::setprecision(6);
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        const auto& l = report.levels[k];
        const ConvergenceRates r = k < report.rates.size() ? report.rates[k] : ConvergenceRates{};
        os << l.h_p << ',' << l.errors.l2_p << ',' << format_rate(r.l2_p) << ',' << l.h_v << ',' << l.errors.l2_v
           << ',' << format_rate(r.l2_v) << ',' << l.errors.h1_v << ',' << format_rate(r.h1_v) << ','
           << l.iterations << '\n';
    }
    return os.str();
}

void write_csv(const ConvergenceReport& report, const std::filesystem::path& path)
{
    const std::string text = format_csv(report);
    {
        auto out = open_output(path);
        out << text;
        close_checked(out, path);
    }
    std::ifstream in(path);
    std::stringstream back;
    back << in.rdbuf();
    if (back.str() != text)
        throw std::runtime_error("verification of " + path.string() + " failed");
}

void write_vtu(const GridDiscretization& disc, const Vector& solution, const std::filesystem::path& path)
{
    const auto& mesh = disc.mesh;
    if (solution.size() != disc.dofs.num_dofs())
        throw std::invalid_argument("write_vtu: solution size does not match the discretization");
    auto out = open_output(path);
    out << "<?xml version=\"1.0\"?>\n"
        << "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
        << "<UnstructuredGrid>\n"
        << "<Piece NumberOfPoints=\"" << mesh.num_vertices() << "\" NumberOfCells=\"" << mesh.num_elements()
        << "\">\n";

    out << "<PointData Vectors=\"velocity\" Scalars=\"pressure\">\n"
        << "<DataArray type=\"Float64\" Name=\"velocity\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (Index v = 0; v < mesh.num_vertices(); ++v)
        out << solution(DofMap::velocity_dof(v, 0)) << ' ' << solution(DofMap::velocity_dof(v, 1)) << " 0\n";
    out << "</DataArray>\n<DataArray type=\"Float64\" Name=\"pressure\" format=\"ascii\">\n";
    for (Index v = 0; v < mesh.num_vertices(); ++v)
        out << solution(disc.dofs.pressure_dof(v)) << '\n';
    out << "</DataArray>\n</PointData>\n";

    out << "<CellData Vectors=\"bubble_velocity\">\n"
        << "<DataArray type=\"Float64\" Name=\"bubble_velocity\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Index l = disc.dofs.bubble_location(e);
        out << solution(DofMap::velocity_dof(l, 0)) << ' ' << solution(DofMap::velocity_dof(l, 1)) << " 0\n";
    }
    out << "</DataArray>\n</CellData>\n";

    out << "<Points>\n<DataArray type=\"Float64\" Name=\"Points\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (const auto& p : mesh.vertices)
        out << p.x() << ' ' << p.y() << " 0\n";
    out << "</DataArray>\n</Points>\n<Cells>\n"
        << "<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
    for (const auto& t : mesh.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
    for (Index e = 0; e < mesh.num_elements(); ++e)
        out << 3 * (e + 1) << '\n';
    out << "</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
    for (Index e = 0; e < mesh.num_elements(); ++e)
        out << "5\n";
    out << "</DataArray>\n</Cells>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
    close_checked(out, path);
}

void write_cv_vtu(const GridDiscretization& disc, const std::filesystem::path& path)
{
    const auto& set = disc.velocity_cvs;
    Index num_points = 0;
    for (const auto& scv : set.scvs)
        num_points += static_cast<Index>(scv.polygon.size());

    auto out = open_output(path);
    out << "<?xml version=\"1.0\"?>\n"
        << "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
        << "<UnstructuredGrid>\n"
        << "<Piece NumberOfPoints=\"" << num_points << "\" NumberOfCells=\"" << set.scvs.size() << "\">\n"
        << "<CellData Scalars=\"cv\">\n<DataArray type=\"Int64\" Name=\"cv\" format=\"ascii\">\n";
    for (const auto& scv : set.scvs)
        out << scv.cv << '\n';
    out << "</DataArray>\n<DataArray type=\"UInt8\" Name=\"kind\" format=\"ascii\">\n";
    for (const auto& scv : set.scvs)
        out << (set.cvs[scv.cv].kind == CvKind::Bubble ? 1 : 0) << '\n';
    out << "</DataArray>\n</CellData>\n"
        << "<Points>\n<DataArray type=\"Float64\" Name=\"Points\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (const auto& scv : set.scvs)
        for (const auto& p : scv.polygon)
            out << p.x() << ' ' << p.y() << " 0\n";
    out << "</DataArray>\n</Points>\n<Cells>\n"
        << "<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
    Index next = 0;
    for (const auto& scv : set.scvs) {
        for (std::size_t i = 0; i < scv.polygon.size(); ++i)
            out << next++ << ' ';
        out << '\n';
    }
    out << "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
    Index offset = 0;
    for (const auto& scv : set.scvs) {
        offset += static_cast<Index>(scv.polygon.size());
        out << offset << '\n';
    }
    out << "</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
    for (std::size_t i = 0; i < set.scvs.size(); ++i)
        out << "7\n";
    out << "</DataArray>\n</Cells>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
    close_checked(out, path);
}

void RunConfig::validate() const
{
    if (levels < 1)
        throw ConfigurationError("levels must be at least 1");
    if (base_cells < 1)
        throw ConfigurationError("base cell count must be at least 1");
    if (!(distortion >= 0.0 && distortion < 0.5))
        throw ConfigurationError("distortion must lie in [0, 0.5)");
    if (schemes.empty())
        throw ConfigurationError("no scheme selected");
    if (case_name == "custom-msh") {
        if (mesh_files.empty())
            throw ConfigurationError("case custom-msh needs at least one --mesh file");
        case_from_name(solution);
    } else {
        case_from_name(case_name);
        if (!mesh_files.empty())
            throw ConfigurationError("--mesh is only valid with case custom-msh");
    }
}

int run(const RunConfig& config)
{
    config.validate();
    const bool custom = config.case_name == "custom-msh";
    const ManufacturedCase mcase = case_from_name(custom ? config.solution : config.case_name);
    std::filesystem::create_directories(config.output_dir);

    StudyOptions study;
    study.levels = config.levels;
    study.base_cells = config.base_cells;
    study.distortion = config.distortion;
    study.seed = config.seed;
    study.mesh_files = config.mesh_files;

    int status = 0;
    for (const SchemeKind scheme : config.schemes) {
        const std::string stem = config.case_name + "_" + to_string(scheme);
        study.on_level = [&](int level, const CaseSolution& result) {
            const std::string suffix = "_level" + std::to_string(level) + ".vtu";
            if (config.emit_vtk)
                write_vtu(result.disc, result.report.solution, config.output_dir / (stem + suffix));
            if (config.dump_cvs)
                write_cv_vtu(result.disc, config.output_dir / (stem + "_cvs" + suffix));
        };
        const auto report = run_convergence(mcase, scheme, study);
        auto named = report;
        named.case_name = config.case_name;
        const auto csv = config.output_dir / (stem + ".csv");
        write_csv(named, csv);
        spdlog::info("wrote {}", csv.string());
        if (!report.all_converged()) {
            spdlog::error("{}: at least one level did not converge", stem);
            status = 3;
        }
    }
    return status;
}

} // namespace cvfe
