#include "knotgeo/check.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace knotgeo;

TEST_CASE("random curve sampler is seed-reproducible and embedded") {
    std::mt19937_64 a(123), b(123);
    const Curve c1 = random_embedded_curve(48, 3, a);
    const Curve c2 = random_embedded_curve(48, 3, b);
    CHECK((c1.vertices() - c2.vertices()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(min_separation(c1) > 0.01 * arc_length(c1));
}

TEST_CASE("identities suite passes and serializes") {
    RunConfig cfg;
    cfg.seed = 31337;
    const auto results = check_identities(cfg);
    for (const auto& r : results) {
        INFO(r.name, " observed=", r.observed, " threshold=", r.threshold);
        CHECK(r.passed);
    }
    const auto parsed = nlohmann::json::parse(checks_to_json(results));
    CHECK(parsed["pass"].get<bool>() == all_passed(results));
    CHECK(parsed["checks"].size() == results.size());
}

TEST_CASE("gradients suite passes") {
    RunConfig cfg;
    cfg.seed = 98765;
    const auto results = check_gradients(cfg);
    for (const auto& r : results) {
        INFO(r.name, " observed=", r.observed, " threshold=", r.threshold);
        CHECK(r.passed);
    }
}

TEST_CASE("unknown suite is rejected") {
    RunConfig cfg;
    CHECK_THROWS_AS(run_checks("bogus", cfg), std::invalid_argument);
}

TEST_CASE("config validates the exponent") {
    RunConfig cfg;
    cfg.s = 2.3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
