#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ef {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Failure classes map onto the CLI exit codes (1/2/3/4).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ef
