#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cvfe {

using Index = std::int64_t;
using Point = Eigen::Vector2d;
using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

/// Discretization scheme. All four share the MINI trial space and box
/// pressure control volumes; they differ in the velocity test space.
enum class SchemeKind { NonOverlapping, Overlapping, Hybrid, Fem };

std::string to_string(SchemeKind scheme);
SchemeKind scheme_from_string(const std::string& name);

/// Thrown for malformed meshes (orientation, conformity, boundary closure).
class InvalidMesh : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// MSH parse failure; carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
    {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Random distortion produced a non-positive element; retry with another seed.
class DistortionFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double cross(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * cross(b - a, c - a);
}

} // namespace cvfe
