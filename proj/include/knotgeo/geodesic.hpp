#pragma once

#include "knotgeo/energy.hpp"
#include "knotgeo/variation.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace knotgeo {

struct PhaseState {
    Curve curve;
    TangentField velocity;
    double t = 0.0;
};

struct StateDiagnostics {
    double energy = 0.0;
    double length = 0.0;
    double speed = 0.0;     // ‖V‖_G at the state (flows: G-length of the incoming step)
    double min_separation = 0.0;
    double g_step = 0.0;    // G-length increment from the previous state
};

struct Trajectory {
    std::vector<PhaseState> states;
    std::vector<StateDiagnostics> diag;
    std::vector<Vec> constraint_values;  // constrained runs only
    bool aborted = false;
    std::string note;

    /// max_t |σ(t) - σ(0)| / σ(0).
    double speed_drift() const;
    /// Traversed G-length up to state index (default: whole trajectory).
    double g_length(int upto = -1) const;
    /// max_t |Φ(Γ(t))|_∞ (constrained runs).
    double constraint_drift() const;
};

/// Right-hand side of the geodesic system: (γ̇, V̇) = (V, -A_γ(V)V).
std::pair<TangentField, TangentField> spray(const PhaseState& st, double s);

struct ShootOptions {
    double T = 1.0;
    int steps = 100;
    // Retry a step as two half steps when its speed drift exceeds the
    // tolerance (relative to the launch speed).
    bool adaptive = true;
    double per_step_drift_tol = 1e-8;
    int max_halvings = 6;
    double sep_threshold_factor = 1e-8;
    bool reproject = false;       // constrained runs: per-step Newton projection
    double reproject_tol = 1e-10;
};

/// RK4 integration of the geodesic initial-value problem. Aborts with a
/// partial trajectory when an iterate fails the embeddedness proxy.
Trajectory shoot(const Curve& gamma0, const TangentField& v0, double s,
                 const ShootOptions& opts = {});

/// A finite-dimensional constraint Φ : curves → R^k with its Jacobian rows
/// (as covectors) and the directional second derivative u ↦ D²Φ(u,u).
struct Constraint {
    std::string name;
    int k = 0;
    std::function<Vec(const Curve&)> value;
    std::function<std::vector<Covector>(const Curve&)> jacobian;
    std::function<Vec(const Curve&, const TangentField&)> second_directional;
};

Constraint length_constraint(double L0);
Constraint barycenter_constraint(RowVec b0);

/// Geodesic shooting restricted to Φ = 0. Requires Φ(γ0) ≈ 0; a velocity with
/// DΦ(γ0)V0 ≠ 0 is projected onto the constraint and noted in the result.
Trajectory shoot_constrained(const Curve& gamma0, const TangentField& v0, double s,
                             const Constraint& phi, const ShootOptions& opts = {});

/// K+1 curves on the uniform grid of [0,1]; endpoints are pinned by the ops.
struct DiscretePath {
    std::vector<Curve> curves;
    int segments() const { return static_cast<int>(curves.size()) - 1; }
};

enum class PathMetricRule { Midpoint, Left };

/// (K/2) Σ_k G_{mid(γ^k, γ^{k+1})}(δ^k, δ^k) with δ^k = γ^{k+1} - γ^k.
double path_energy(const DiscretePath& p, double s,
                   PathMetricRule rule = PathMetricRule::Midpoint);

/// Exact gradient of the discrete path energy w.r.t. the interior curves.
/// Entry k-1 pairs with variations of γ^k, k = 1..K-1.
std::vector<Covector> path_energy_gradient(const DiscretePath& p, double s,
                                           PathMetricRule rule = PathMetricRule::Midpoint);

struct ConnectOptions {
    double tol = 1e-6;
    int max_iters = 1000;
    double armijo_c1 = 1e-4;
    int max_backtracks = 40;
    double sep_threshold_factor = 1e-8;
    PathMetricRule rule = PathMetricRule::Midpoint;
    std::optional<DiscretePath> warm_start;
};

struct ConnectResult {
    DiscretePath path;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    double energy = 0.0;
    Vec segment_speeds;  // K·‖δ^k‖_{G(mid)}
    std::string flag;
};

/// Path-energy minimization between fixed endpoints by metric-preconditioned
/// gradient descent with Armijo backtracking. Steps producing a curve below
/// the separation threshold are rejected inside the line search.
ConnectResult connect(const Curve& a, const Curve& b, double s, int K,
                      const ConnectOptions& opts = {});

struct FlowOptions {
    int steps = 100;
    double step0 = 1.0;
    double armijo_c1 = 1e-4;
    int max_backtracks = 40;
    double sep_threshold_factor = 1e-8;
};

/// Metric-preconditioned energy descent γ ← γ - τ J⁻¹ grad E. Monotone in E;
/// stalls are flagged on the returned trajectory.
Trajectory flow(const Curve& gamma0, double s, const FlowOptions& opts = {});

} // namespace knotgeo
