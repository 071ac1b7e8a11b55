#include "cvfe/io.hpp"

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include <map>

int main(int argc, char** argv)
{
    spdlog::cfg::load_env_levels();

    CLI::App app{"Convergence studies for the CVFE/MINI Stokes schemes"};
    cvfe::RunConfig config;
    std::string scheme = "overlapping";
    std::vector<std::string> meshes;

    app.add_option("--case", config.case_name, "Test case")
        ->check(CLI::IsMember({"donea-huerta", "bercovier-engelman", "shear-flow", "custom-msh"}));
    app.add_option("--scheme", scheme, "nonoverlapping, overlapping, hybrid, fem or all");
    app.add_option("--levels", config.levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    app.add_option("--base-cells", config.base_cells, "Cells per side on the coarsest level")
        ->check(CLI::PositiveNumber);
    app.add_option("--distortion", config.distortion, "Interior vertex distortion fraction")
        ->check(CLI::Range(0.0, 0.4999));
    app.add_option("--seed", config.seed, "Seed for distortion and initial guesses");
    app.add_option("--out", config.output_dir, "Output directory");
    app.add_option("--mesh", meshes, "MSH 2.2 files, one per level (custom-msh)");
    app.add_option("--solution", config.solution, "Exact solution used with custom-msh")
        ->check(CLI::IsMember({"donea-huerta", "bercovier-engelman", "shear-flow"}));
    app.add_flag("--vtk", config.emit_vtk, "Write a VTU file per level");
    app.add_flag("--dump-cvs", config.dump_cvs, "Write the control-volume polygons per level");
    app.add_flag("--deterministic", config.deterministic_assembly, "Bit-reproducible assembly");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scheme == "all")
            config.schemes = {cvfe::SchemeKind::NonOverlapping, cvfe::SchemeKind::Overlapping,
                              cvfe::SchemeKind::Hybrid, cvfe::SchemeKind::Fem};
        else
            config.schemes = {cvfe::scheme_from_string(scheme)};
        config.mesh_files.assign(meshes.begin(), meshes.end());
        return cvfe::run(config);
    } catch (const cvfe::ConfigurationError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
