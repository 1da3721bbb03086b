#pragma once

#include "knotgeo/geodesic.hpp"

#include <random>
#include <string>
#include <vector>

namespace knotgeo {

struct RunConfig {
    double s = 1.75;
    std::uint64_t seed = 0x5eed;
    Reduction reduction = Reduction::Ordered;
    double sep_threshold_factor = 1e-8;
    // Central finite differences: step h = fd_step_factor · L, relative
    // tolerance fd_tol with absolute floor fd_floor.
    double fd_step_factor = 1e-5;
    double fd_tol = 1e-6;
    double fd_floor = 1e-10;

    void validate() const { require_exponent(s); }
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double threshold = 0.0;
    std::string details;
};

/// Random smooth embedded closed curve (low-order Fourier modes with decaying
/// coefficients), retried until the embeddedness proxy holds with margin.
/// Deterministic for a given generator state.
Curve random_embedded_curve(int n, int dim, std::mt19937_64& rng);

/// Random tangent field with entries in [-1, 1].
TangentField random_field(int n, int dim, std::mt19937_64& rng);

std::vector<CheckResult> check_identities(const RunConfig& cfg);
std::vector<CheckResult> check_gradients(const RunConfig& cfg);
std::vector<CheckResult> check_geodesic(const RunConfig& cfg);

/// suite ∈ {identities, gradients, geodesic, all}; throws on unknown names.
std::vector<CheckResult> run_checks(const std::string& suite, const RunConfig& cfg);

std::string checks_to_json(const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

} // namespace knotgeo
