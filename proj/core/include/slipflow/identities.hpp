#pragma once

#include <string>
#include <vector>

#include "slipflow/curve.hpp"

namespace slipflow {

/// Max-norm residual of one transformation identity over the sample grid.
struct IdentityResidual {
    std::string name;
    double residual = 0.0;
};

struct IdentityReport {
    std::vector<IdentityResidual> entries;
    double max_residual() const;
    const IdentityResidual& operator[](const std::string& name) const;
};

/// Evaluate every transformation identity on fixed manufactured trigonometric
/// fields with analytic derivatives, sampled on a uniform resolution^2 grid of
/// the reference slab [0,L] x [-1,1].  Covers
///   - the operator transformations (gradient, vector Laplacian, divergence,
///     matrix divergence) against chain-rule reference values computed in
///     physical coordinates, and
///   - the algebraic identities between transformed operators (scalar-gradient
///     form, transformed-curl divergence, product rule, curl of a gradient,
///     rotated divergence of a transformed-divergence-free field).
/// All residuals vanish to roundoff when the operator implementations are
/// consistent; they are not discretization errors.
IdentityReport verify_identities(const CurveSpec& spec, int resolution = 64);

/// Same residuals, but with every field derivative replaced by a central
/// finite difference of step h.  Residuals then scale like h^2, which the
/// Richardson check in the tests exercises.
IdentityReport verify_identities_fd(const CurveSpec& spec, int resolution, double h);

}  // namespace slipflow
