#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sinesteer/errors.hpp"
#include "sinesteer/metrics.hpp"
#include "sinesteer/rng.hpp"

using namespace sinesteer;
using metrics::DiffScheme;

TEST_CASE("rmse: identity gives zero") {
    std::vector<double> g = {1.0, -2.5, 3.75, 100.0};
    CHECK(metrics::rmse(g, g) == 0.0);
}

TEST_CASE("rmse: two-term arithmetic") {
    std::vector<double> g = {0.0, 0.0};
    std::vector<double> p = {3.0, 4.0};
    CHECK(std::abs(metrics::rmse(g, p) - std::sqrt(12.5)) < 1e-12);
}

TEST_CASE("rmse: matches a naive loop oracle on a seeded pair") {
    Rng rng(1000);
    std::vector<double> g(1000), p(1000);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = 50.0 * rng.gaussian();
        p[i] = 50.0 * rng.gaussian();
    }
    CHECK(std::abs(metrics::rmse(g, p) - oracles::rmse_loop(g, p)) < 1e-12);
}

TEST_CASE("rmse: symmetry, nonnegativity, offset invariance") {
    Rng rng(6);
    std::vector<double> g(64), p(64);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = rng.gaussian();
        p[i] = rng.gaussian();
    }
    CHECK(metrics::rmse(g, p) == metrics::rmse(p, g));
    CHECK(metrics::rmse(g, p) > 0.0);
    std::vector<double> g2 = g, p2 = p;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g2[i] += 17.5;
        p2[i] += 17.5;
    }
    CHECK(metrics::rmse(g2, p2) == doctest::Approx(metrics::rmse(g, p)).epsilon(1e-12));
}

TEST_CASE("rmse: length mismatch") {
    std::vector<double> g = {1.0, 2.0};
    std::vector<double> p = {1.0};
    try {
        metrics::rmse(g, p);
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LengthMismatch);
    }
}

TEST_CASE("whiteness: constant series is perfectly smooth") {
    std::vector<double> p(40, 3.25);
    CHECK(metrics::whiteness(p, 0.5) == 0.0);
    CHECK(metrics::whiteness(p, 0.5, DiffScheme::Forward) == 0.0);
}

TEST_CASE("whiteness: linear ramp of slope m gives m^2 under both schemes") {
    const double m = -2.5;
    const double dt = 0.5;
    std::vector<double> p;
    for (int i = 0; i < 25; ++i) p.push_back(m * i * dt);
    CHECK(std::abs(metrics::whiteness(p, dt) - m * m) < 1e-12);
    CHECK(std::abs(metrics::whiteness(p, dt, DiffScheme::Forward) - m * m) < 1e-12);
}

TEST_CASE("whiteness: too-short series") {
    std::vector<double> p = {1.0, 2.0};
    try {
        metrics::whiteness(p, 0.5);
        FAIL("expected SeriesTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SeriesTooShort);
    }
}

TEST_CASE("whiteness: offset invariance and quadratic scaling") {
    Rng rng(8);
    std::vector<double> p(100);
    for (double& v : p) v = 10.0 * rng.gaussian();
    const double base = metrics::whiteness(p, 0.5);
    std::vector<double> shifted = p, scaled = p;
    for (double& v : shifted) v += 123.0;
    for (double& v : scaled) v *= 3.0;
    CHECK(metrics::whiteness(shifted, 0.5) == doctest::Approx(base).epsilon(1e-12));
    CHECK(metrics::whiteness(scaled, 0.5) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("whiteness: halving dt quadruples the value") {
    Rng rng(12);
    std::vector<double> p(60);
    for (double& v : p) v = rng.gaussian();
    CHECK(metrics::whiteness(p, 0.25) == doctest::Approx(4.0 * metrics::whiteness(p, 0.5)).epsilon(1e-12));
}
