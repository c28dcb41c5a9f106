#pragma once

#include <memory>
#include <vector>

#include "slipflow/curve.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

/// Permeability of the reference cell at one interface slope: the matrix of
/// cell-averaged unit-force velocities, A_ji = int_{Y*} w^j_i dy, together
/// with the two cell fields.  A is symmetric positive definite.
struct PermeabilitySample {
    double x1 = 0.0;
    double gprime = 0.0;
    Mat2 A;
    double eig_lo = 0.0;
    double eig_hi = 0.0;
    MixedField w1;
    MixedField w2;
};

/// Shared discretization for a family of cell solves; one factorization per
/// distinct slope serves both unit forces (and every x1 with that slope).
class CellWorkspace {
  public:
    CellWorkspace(const InclusionSpec& inclusion, double h);

    std::shared_ptr<const FemSpace> space() const { return space_; }

    /// Solve (or fetch) the pair of cell problems at a frozen slope.
    PermeabilitySample at_slope(double gprime) const;

  private:
    std::shared_ptr<const FemSpace> space_;
    mutable std::vector<std::pair<double, PermeabilitySample>> cache_;
};

/// Single cell problem (w^j, pi^j), j in {1,2}, metric frozen at x1.
MixedField solve_cell(const CurveSpec& spec, double x1, int j,
                      const InclusionSpec& inclusion, double h);

/// Permeability sampled over an x1 grid (slopes deduplicated through the
/// workspace cache).  Throws NumericalError when a sample fails the
/// symmetry/SPD quality gate.
std::vector<PermeabilitySample> permeability(const CurveSpec& spec,
                                             const std::vector<double>& x1_grid,
                                             const InclusionSpec& inclusion,
                                             double h);

}  // namespace slipflow
