#pragma once

#include <stdexcept>
#include <string>

namespace slipflow {

/// Invalid user input: malformed config, incompatible parameters
/// (e.g. L/eps not an integer). CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometry construction failure: inclusion violating the margin,
/// self-intersecting boundary, mesh quality audit failure.
class GeometryError : public std::runtime_error {
  public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear algebra failure: singular saddle system, factorization breakdown.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A computed quantity violates a mathematical guarantee beyond tolerance
/// (non-SPD permeability, truncation too shallow). CLI exit code 3.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slipflow
