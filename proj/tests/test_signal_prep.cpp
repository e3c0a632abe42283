#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sinesteer/errors.hpp"
#include "sinesteer/rng.hpp"
#include "sinesteer/signal_prep.hpp"

using namespace sinesteer;
using signal::FrameClock;
using signal::LabeledFrameSeries;
using signal::SensorLog;

namespace {

SensorLog uniform_log(std::size_t n, double rate, double value = 0.0) {
    SensorLog log;
    log.nominal_rate = rate;
    for (std::size_t i = 0; i < n; ++i) {
        log.timestamps.push_back(static_cast<double>(i) / rate);
        log.angles.push_back(value);
    }
    return log;
}

}  // namespace

TEST_CASE("lowpass: constant signal is a fixed point") {
    auto log = uniform_log(200, 100.0, 7.25);
    auto smoothed = signal::lowpass(log, 1.0);
    CHECK(smoothed.timestamps == log.timestamps);
    for (double v : smoothed.angles) CHECK(v == doctest::Approx(7.25).epsilon(1e-15));
}

TEST_CASE("lowpass: impulse response decays geometrically") {
    auto log = uniform_log(50, 100.0, 0.0);
    log.angles[0] = 1.0;
    const double cutoff = 2.0;
    auto smoothed = signal::lowpass(log, cutoff);
    // unroll the recurrence by hand: y_0 = 1, y_t = (1-alpha) y_{t-1}
    const double dt = 0.01;
    const double alpha = dt / (dt + 1.0 / (2.0 * M_PI * cutoff));
    double expected = 1.0;
    CHECK(smoothed.angles[0] == doctest::Approx(expected));
    for (std::size_t i = 1; i < 50; ++i) {
        expected *= (1.0 - alpha);
        CHECK(smoothed.angles[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("lowpass: stays within the input range and preserves length") {
    Rng rng(5);
    auto log = uniform_log(300, 100.0);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (auto& a : log.angles) {
        a = rng.uniform(-30.0, 30.0);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    auto smoothed = signal::lowpass(log, 5.0);
    CHECK(smoothed.angles.size() == log.angles.size());
    for (double v : smoothed.angles) {
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("lowpass: bad cutoffs and empty logs are rejected") {
    auto log = uniform_log(10, 100.0);
    CHECK_THROWS_AS(signal::lowpass(log, 0.0), Error);
    CHECK_THROWS_AS(signal::lowpass(log, 50.0), Error);   // Nyquist
    CHECK_THROWS_AS(signal::lowpass(log, -1.0), Error);
    SensorLog empty;
    try {
        signal::lowpass(empty, 1.0);
        FAIL("expected InvalidInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInput);
    }
}

TEST_CASE("resample: exact at sensor timestamps, linear in between") {
    SensorLog log;
    log.nominal_rate = 10.0;
    log.timestamps = {0.0, 0.1, 0.2, 0.3};
    log.angles = {10.0, 20.0, 5.0, 15.0};
    FrameClock clock;
    clock.rate = 20.0;
    clock.timestamps = {0.1, 0.15, 0.25};
    auto series = signal::resample_to_frames(log, clock);
    CHECK(series.angles[0] == doctest::Approx(20.0));
    CHECK(series.angles[1] == doctest::Approx(12.5));  // midpoint of 20 and 5
    CHECK(series.angles[2] == doctest::Approx(10.0));  // midpoint of 5 and 15
}

TEST_CASE("resample: exact on piecewise-linear signals") {
    SensorLog log;
    log.nominal_rate = 100.0;
    for (int i = 0; i <= 100; ++i) {
        log.timestamps.push_back(i * 0.01);
        log.angles.push_back(3.0 * i * 0.01 - 1.0);  // linear in t
    }
    FrameClock clock;
    clock.rate = 7.0;
    for (int i = 0; i < 7; ++i) clock.timestamps.push_back(0.003 + i * 0.13);
    auto series = signal::resample_to_frames(log, clock);
    for (std::size_t i = 0; i < series.angles.size(); ++i)
        CHECK(series.angles[i] == doctest::Approx(3.0 * series.timestamps[i] - 1.0).epsilon(1e-12));
}

TEST_CASE("resample: frame outside the log span") {
    auto log = uniform_log(10, 100.0);
    FrameClock clock;
    clock.rate = 10.0;
    clock.timestamps = {-0.5};
    try {
        signal::resample_to_frames(log, clock);
        FAIL("expected FrameOutsideLog");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FrameOutsideLog);
    }
}

TEST_CASE("downsample: stride arithmetic") {
    LabeledFrameSeries series;
    for (int i = 0; i < 100; ++i) {
        series.timestamps.push_back(i * 0.05);  // 20 Hz
        series.angles.push_back(static_cast<double>(i));
    }
    auto out = signal::downsample(series, 2.0);
    CHECK(out.angles.size() == 10);
    for (std::size_t i = 0; i < out.angles.size(); ++i) CHECK(out.angles[i] == doctest::Approx(10.0 * i));

    auto same = signal::downsample(series, 20.0);
    CHECK(same.angles == series.angles);

    CHECK_THROWS_AS(signal::downsample(series, 0.0), Error);
    CHECK_THROWS_AS(signal::downsample(series, 40.0), Error);
}

TEST_CASE("downsample composes like a single downsample for integer stride ratios") {
    LabeledFrameSeries series;
    for (int i = 0; i < 240; ++i) {
        series.timestamps.push_back(i * 0.025);  // 40 Hz
        series.angles.push_back(std::sin(i * 0.1));
    }
    auto two_step = signal::downsample(signal::downsample(series, 20.0), 5.0);
    auto direct = signal::downsample(series, 5.0);
    CHECK(two_step.angles == direct.angles);
    CHECK(two_step.timestamps == direct.timestamps);
}

TEST_CASE("pipeline: 100 Hz log -> lowpass -> 20 Hz clock -> 2 Hz series") {
    Rng rng(9);
    SensorLog log;
    log.nominal_rate = 100.0;
    for (int i = 0; i < 1000; ++i) {
        log.timestamps.push_back(i * 0.01);
        log.angles.push_back(rng.gaussian());
    }
    auto smoothed = signal::lowpass(log, 1.0);
    FrameClock clock;
    clock.rate = 20.0;
    const int n_frames = 190;
    for (int i = 0; i < n_frames; ++i) clock.timestamps.push_back(i * 0.05);
    auto series = signal::resample_to_frames(smoothed, clock);
    CHECK(series.angles.size() == static_cast<std::size_t>(n_frames));
    auto sampled = signal::downsample(series, 2.0);
    // every 10th frame starting at 0
    CHECK(sampled.angles.size() == static_cast<std::size_t>((n_frames - 1) / 10 + 1));
}

TEST_CASE("csv round trip for the ingestion formats") {
    SensorLog log;
    log.nominal_rate = 100.0;
    log.timestamps = {0.0, 0.25, 0.5};
    log.angles = {1.5, -2.25, 0.0625};
    const std::string dir = "/tmp/sinesteer_signal_test";
    std::filesystem::create_directories(dir);
    signal::write_labeled_series(dir + "/labels.csv", LabeledFrameSeries{log.timestamps, log.angles});
    auto series = signal::read_labeled_series(dir + "/labels.csv");
    CHECK(series.timestamps == log.timestamps);
    CHECK(series.angles == log.angles);
}
