#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sinesteer/angle_codec.hpp"
#include "sinesteer/rng.hpp"

using namespace sinesteer;
using codec::CodecConfig;

namespace {
const CodecConfig kDefault{95, 190.0};
}

TEST_CASE("encode: phase zero puts the first neuron at sin(0)") {
    auto wave = codec::encode(0.0, kDefault);
    CHECK(wave.size() == 95);
    CHECK(wave[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("encode: extreme right angle pins the first neuron at -1") {
    for (int n : {4, 5, 16, 95}) {
        CodecConfig cfg{n, 190.0};
        auto wave = codec::encode(190.0, cfg);
        CHECK(wave[0] == doctest::Approx(-1.0).epsilon(1e-15));
    }
}

TEST_CASE("encode: phi=90, N=5, phi_max=90 termwise against a scalar sine oracle") {
    CodecConfig cfg{5, 90.0};
    auto wave = codec::encode(90.0, cfg);
    // Y_i = sin(2 pi (i-1)/4 - pi/2), evaluated independently per term
    const double expected[5] = {std::sin(0.0 - M_PI / 2), std::sin(M_PI / 2 - M_PI / 2),
                                std::sin(M_PI - M_PI / 2), std::sin(3 * M_PI / 2 - M_PI / 2),
                                std::sin(2 * M_PI - M_PI / 2)};
    const double frozen[5] = {-1.0, 0.0, 1.0, 0.0, -1.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(wave[i] - expected[i]) < 1e-12);
        CHECK(std::abs(wave[i] - frozen[i]) < 1e-12);
    }
}

TEST_CASE("encode: every element lies in [-1, 1]") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double angle = rng.uniform(-190.0, 190.0);
        for (double v : codec::encode(angle, kDefault)) {
            CHECK(v <= 1.0);
            CHECK(v >= -1.0);
        }
    }
}

TEST_CASE("encode: out-of-range angle is rejected") {
    CHECK_THROWS_AS(codec::encode(190.0001, kDefault), Error);
    try {
        codec::encode(-200.0, kDefault);
        FAIL("expected AngleOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AngleOutOfRange);
    }
}

TEST_CASE("codec config invariants") {
    CHECK_THROWS_AS(codec::encode(0.0, CodecConfig{3, 190.0}), Error);
    CHECK_THROWS_AS(codec::encode(0.0, CodecConfig{95, 0.0}), Error);
    CHECK_NOTHROW(codec::encode(0.0, CodecConfig{4, 1.0}));
}

TEST_CASE("decode: round-trip on a 1 degree grid") {
    for (double angle = -190.0; angle <= 190.0; angle += 1.0) {
        auto result = codec::decode(codec::encode(angle, kDefault), kDefault);
        CHECK(std::abs(result.angle - angle) < 1e-9);
        CHECK(std::abs(result.amplitude - 1.0) < 1e-9);
        CHECK(result.residual_rmse < 1e-9);
    }
}

TEST_CASE("decode: round-trip property across grid sizes") {
    Rng rng(29);
    for (int n : {4, 5, 16, 95}) {
        for (double phi_max : {90.0, 190.0}) {
            CodecConfig cfg{n, phi_max};
            for (int trial = 0; trial < 40; ++trial) {
                const double angle = rng.uniform(-phi_max, phi_max);
                auto result = codec::decode(codec::encode(angle, cfg), cfg);
                CHECK(std::abs(result.angle - angle) < 1e-9);
                CHECK(std::abs(result.amplitude - 1.0) < 1e-9);
                CHECK(result.residual_rmse < 1e-9);
            }
        }
    }
}

TEST_CASE("decode: gain equivariance (phase survives amplitude scaling)") {
    Rng rng(31);
    for (double scale : {2e-6, 0.3, 1.0, 7.0, 1000.0}) {
        const double angle = rng.uniform(-189.0, 189.0);
        auto wave = codec::encode(angle, kDefault);
        for (double& v : wave) v *= scale;
        auto result = codec::fit_wave(wave, kDefault);
        CHECK(std::abs(result.angle - angle) < 1e-7);
        CHECK(result.amplitude == doctest::Approx(scale).epsilon(1e-9));
    }
}

TEST_CASE("decode: all-zero wave is degenerate") {
    std::vector<double> zeros(95, 0.0);
    try {
        codec::decode(zeros, kDefault);
        FAIL("expected DegenerateWave");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateWave);
    }
}

TEST_CASE("decode: phase beyond +-pi/2 is an error, fit_wave is not") {
    // wave with psi = 0.55 pi, i.e. an angle 10% past phi_max
    const int n = kDefault.n_neurons;
    std::vector<double> wave(n);
    for (int i = 0; i < n; ++i) wave[i] = std::sin(2.0 * M_PI * i / (n - 1) - 0.55 * M_PI);
    try {
        codec::decode(wave, kDefault);
        FAIL("expected PhaseOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PhaseOutOfRange);
    }
    auto fit = codec::fit_wave(wave, kDefault);
    CHECK(fit.angle == doctest::Approx(0.55 * 2.0 * 190.0 / 2.0).epsilon(1e-6));  // 209 deg
}

TEST_CASE("decode: noisy wave matches the full brute-force grid oracle") {
    Rng rng(42);
    auto wave = codec::encode(42.0, kDefault);
    for (double& v : wave) v += 0.1 * rng.gaussian();
    const double decoded = codec::decode(wave, kDefault).angle;
    const double oracle = oracles::grid_decode_full(wave, kDefault);
    CHECK(std::abs(decoded - oracle) < 0.1);
}

TEST_CASE("decode: agrees with the grid oracle within one grid step up to sigma 0.3") {
    Rng rng(1234);
    for (double sigma : {0.05, 0.15, 0.3}) {
        for (int trial = 0; trial < 12; ++trial) {
            const double angle = rng.uniform(-150.0, 150.0);
            auto wave = codec::encode(angle, kDefault);
            for (double& v : wave) v += sigma * rng.gaussian();
            const double decoded = codec::fit_wave(wave, kDefault).angle;
            const double oracle = oracles::grid_decode(wave, kDefault);
            CHECK(std::abs(decoded - oracle) <= 0.01 + 1e-9);
        }
    }
}

TEST_CASE("topology: waveform distance grows with angular separation from a common reference") {
    // Fig. 3 motivation; checked along chains sharing a reference angle.
    for (double reference : {-170.0, -60.0, 0.0, 45.0, 120.0}) {
        const auto base = codec::encode(reference, kDefault);
        double previous = -1.0;
        for (double delta = 2.0; reference + delta <= 190.0 && delta <= 120.0; delta += 2.0) {
            const auto other = codec::encode(reference + delta, kDefault);
            const double distance = oracles::rmse_loop(base, other);
            CHECK(distance >= previous - 1e-12);
            previous = distance;
        }
    }
}

TEST_CASE("encode_bins: center bin for zero angle") {
    auto probs = codec::encode_bins(0.0, kDefault);
    CHECK(probs.size() == 95);
    // bin width 4 deg; 0 deg falls in bin 48 (1-based), index 47 here
    CHECK(probs[47] == 1.0);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("encode_bins: boundary angles") {
    auto lo = codec::encode_bins(-190.0, kDefault);
    CHECK(lo[0] == 1.0);
    auto hi = codec::encode_bins(190.0, kDefault);
    CHECK(hi[94] == 1.0);
    // shared edge goes to the higher-index bin: -190 + 4 = -186 is the edge
    // between bins 1 and 2 (1-based)
    auto edge = codec::encode_bins(-186.0, kDefault);
    CHECK(edge[1] == 1.0);
}

TEST_CASE("encode_bins: smoothed distribution is symmetric about the center") {
    auto probs = codec::encode_bins(0.0, kDefault, 80.0);
    double sum = 0.0;
    for (double p : probs) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    for (int k = 1; k <= 47; ++k) CHECK(std::abs(probs[47 - k] - probs[47 + k]) < 1e-12);
}

TEST_CASE("decode_expected: degenerate, uniform, and two-point distributions") {
    for (int bin : {0, 17, 47, 94}) {
        std::vector<double> probs(95, 0.0);
        probs[bin] = 1.0;
        CHECK(codec::decode_expected(probs, kDefault) ==
              doctest::Approx(codec::bin_center(bin, kDefault)).epsilon(1e-12));
    }
    std::vector<double> uniform(95, 1.0 / 95.0);
    CHECK(std::abs(codec::decode_expected(uniform, kDefault)) < 1e-9);

    std::vector<double> two(95, 0.0);
    two[0] = 0.5;
    two[94] = 0.5;
    // centers are -190 + 0.5*4 = -188 and +188; mean 0
    CHECK(codec::bin_center(0, kDefault) == doctest::Approx(-188.0));
    CHECK(codec::bin_center(94, kDefault) == doctest::Approx(188.0));
    CHECK(std::abs(codec::decode_expected(two, kDefault)) < 1e-9);
}

TEST_CASE("decode_expected: invalid distributions are rejected") {
    std::vector<double> probs(95, 1.0 / 95.0);
    probs[0] += 0.01;
    try {
        codec::decode_expected(probs, kDefault);
        FAIL("expected InvalidDistribution");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDistribution);
    }
    std::vector<double> negative(95, 1.0 / 95.0);
    negative[3] = -0.1;
    negative[4] += 0.1 + 1.0 / 95.0;
    CHECK_THROWS_AS(codec::decode_expected(negative, kDefault), Error);
}

TEST_CASE("bins then expected value stays within half a bin width") {
    Rng rng(77);
    const double half_width = codec::bin_width(kDefault) / 2.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double angle = rng.uniform(-190.0, 190.0);
        const auto probs = codec::encode_bins(angle, kDefault);
        const double back = codec::decode_expected(probs, kDefault);
        CHECK(std::abs(back - angle) <= half_width + 1e-12);
    }
}

TEST_CASE("clamp_angle") {
    CHECK(codec::clamp_angle(200.0, kDefault) == 190.0);
    CHECK(codec::clamp_angle(-500.0, kDefault) == -190.0);
    CHECK(codec::clamp_angle(10.0, kDefault) == 10.0);
}
