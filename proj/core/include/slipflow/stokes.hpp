#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <optional>

#include "slipflow/curve.hpp"
#include "slipflow/fem.hpp"

namespace slipflow {

/// Coefficient field of the transformed operators.  Either follows a curve
/// (g'(x1) sampled at quadrature points) or is frozen at one slope, which is
/// how the parameter-dependent cell and boundary-layer problems see x1.
class Metric {
  public:
    static Metric flat() { return Metric(CurveSpec::flat(), std::nullopt); }
    static Metric from_curve(const CurveSpec& spec) {
        return Metric(spec, std::nullopt);
    }
    static Metric frozen(double gprime) {
        return Metric(CurveSpec::flat(), gprime);
    }

    JacobianSample at(double x1) const {
        return frozen_ ? jacobian_from_slope(*frozen_) : jacobian(spec_, x1);
    }
    double gprime(double x1) const {
        return frozen_ ? *frozen_ : spec_.dg(x1);
    }
    bool constant() const { return frozen_.has_value() || spec_.is_flat(); }
    const CurveSpec& curve() const { return spec_; }

  private:
    Metric(CurveSpec spec, std::optional<double> frozen)
        : spec_(std::move(spec)), frozen_(frozen) {}
    CurveSpec spec_;
    std::optional<double> frozen_;
};

using BodyForce = std::function<Vec2(Vec2)>;
using BoundaryData = std::function<Vec2(Vec2)>;

/// Pressure gauge: zero-mean adds one lumped-weight constraint row; pinned
/// fixes one pressure dof; none relies on a natural boundary to fix the
/// constant (the truncated boundary-layer strip).
enum class Gauge { zero_mean, pinned, none };

struct StokesBC {
    std::vector<BTag> dirichlet_tags;
    BoundaryData value;  ///< nullptr means homogeneous
};

/// Surface traction applied on the interface edges: adds  int_S t(x1).phi ds
/// to the momentum right-hand side (the weak realization of a prescribed
/// interface stress jump).
struct InterfaceSource {
    std::function<Vec2(double)> traction;
};

/// Velocity/pressure pair on a Taylor-Hood space, expanded to one value per
/// entity (periodic slaves carry their master's value).
struct MixedField {
    std::shared_ptr<const FemSpace> space;
    Metric metric = Metric::flat();
    std::vector<double> ux, uy;  ///< per P2 entity
    std::vector<double> p;       ///< per vertex
    double solve_residual = 0.0;

    Vec2 velocity(int t, double l1, double l2, double l3) const;
    /// Jacobian J with J(k,i) = d u_k / d x_i.
    Mat2 velocity_jacobian(int t, double l1, double l2, double l3) const;
    double pressure(int t, double l1, double l2, double l3) const;
    /// Transformed divergence div(F^{-1}u) at a point of element t.
    double transformed_divergence(int t, double l1, double l2, double l3) const;

    void shift_pressure(double c);
};

/// Assembles and factorizes the transformed Stokes saddle system
///   -div(F^{-1}F^{-T} grad u) + F^{-T} grad p = f,   div(F^{-1} u) = 0
/// on a Taylor-Hood space with periodic identification, strong Dirichlet
/// velocity data and the selected pressure gauge.  One factorization serves
/// any number of right-hand sides (body force, interface traction, Dirichlet
/// override).
class StokesSolver {
  public:
    StokesSolver(std::shared_ptr<const FemSpace> space, Metric metric,
                 StokesBC bc, Gauge gauge);
    ~StokesSolver();
    StokesSolver(StokesSolver&&) noexcept;
    StokesSolver& operator=(StokesSolver&&) noexcept;

    MixedField solve(const BodyForce& f,
                     const InterfaceSource* src = nullptr,
                     const BoundaryData* dirichlet_override = nullptr) const;

    const FemSpace& space() const { return *space_; }
    int num_unknowns() const;
    /// Assembled system matrix (reduced dofs; see dof_of_velocity/pressure).
    const Eigen::SparseMatrix<double>& matrix() const;
    int dof_of_velocity(int entity, int comp) const;
    int dof_of_pressure(int vertex) const;

  private:
    struct Impl;
    std::shared_ptr<const FemSpace> space_;
    Metric metric_;
    StokesBC bc_;
    Gauge gauge_;
    std::unique_ptr<Impl> impl_;
};

/// Quadrature evaluation of  integral fn(x, u, J, p) dx  over the mesh
/// (or over one layer band / one region when restricted).
using FieldIntegrand =
    std::function<double(Vec2, Vec2, const Mat2&, double)>;
double integrate(const MixedField& f, const FieldIntegrand& fn,
                 int quad_degree = 6);
double integrate_band(const MixedField& f, int band_label, const FieldIntegrand& fn,
                      int quad_degree = 6);
double integrate_region(const MixedField& f, Region region, const FieldIntegrand& fn,
                        int quad_degree = 6);

/// Line integral over edges with the given tag; for interface edges the
/// trace is taken from the above_s side.  fn(x, tangent_dl, u, J, p).
using EdgeIntegrand =
    std::function<double(Vec2, Vec2, Vec2, const Mat2&, double)>;
double integrate_edges(const MixedField& f, BTag tag, const EdgeIntegrand& fn);

/// Common norms.
double norm_l2_velocity(const MixedField& f);
double norm_h1semi_velocity(const MixedField& f);
double norm_l2_pressure(const MixedField& f);
double mean_pressure(const MixedField& f);
double domain_area(const FemSpace& space);

/// Point evaluation of a field on another mesh (effective-to-microscale
/// comparisons).  Queries outside the mesh snap to the nearest element.
class FieldEvaluator {
  public:
    explicit FieldEvaluator(const MixedField& f);
    Vec2 velocity(Vec2 x) const;
    Mat2 velocity_jacobian(Vec2 x) const;
    double pressure(Vec2 x) const;

  private:
    const MixedField* f_;
    Locator locator_;
};

}  // namespace slipflow
