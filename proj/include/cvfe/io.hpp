#pragma once

#include "cvfe/verification.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cvfe {

inline constexpr int kCsvFormatVersion = 1;

/// Convergence table with columns h_p, L2_p, rate, h_v, L2_v, rate, H1_v, rate, it.
/// Undefined rates are left empty. Comment lines starting with '#' precede the header.
std::string format_csv(const ConvergenceReport& report);
void write_csv(const ConvergenceReport& report, const std::filesystem::path& path);

/// XML unstructured grid: point data "velocity" and "pressure", cell data "bubble_velocity".
void write_vtu(const GridDiscretization& disc, const Vector& solution, const std::filesystem::path& path);

/// Polygon dump of the velocity control volumes with cell data "cv" and "kind".
void write_cv_vtu(const GridDiscretization& disc, const std::filesystem::path& path);

struct RunConfig {
    std::string case_name = "donea-huerta"; ///< donea-huerta | bercovier-engelman | shear-flow | custom-msh
    std::string solution = "donea-huerta";  ///< exact solution used with custom-msh
    std::vector<SchemeKind> schemes{SchemeKind::Overlapping};
    int levels = 5;
    int base_cells = 10;
    double distortion = 0.2;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "results";
    bool emit_vtk = false;
    bool dump_cvs = false;
    bool deterministic_assembly = false;
    std::vector<std::filesystem::path> mesh_files;

    /// Throws ConfigurationError on invalid combinations.
    void validate() const;
};

/// Runs one convergence study per scheme and writes a CSV for each.
/// Returns 0 on success and 3 when any level failed to converge.
int run(const RunConfig& config);

} // namespace cvfe
