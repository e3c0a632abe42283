#include "sinesteer/signal_prep.hpp"

#include <algorithm>
#include <cmath>

#include "sinesteer/csv.hpp"
#include "sinesteer/errors.hpp"

namespace sinesteer::signal {

namespace {

void require_strictly_increasing(const std::vector<double>& t, const char* what) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            raise(ErrorCode::InvalidInput, std::string(what) + " timestamps not strictly increasing at index " +
                                               std::to_string(i));
}

}  // namespace

void SensorLog::validate() const {
    if (timestamps.empty()) raise(ErrorCode::InvalidInput, "empty sensor log");
    if (timestamps.size() != angles.size()) raise(ErrorCode::LengthMismatch, "sensor log column lengths differ");
    if (!(nominal_rate > 0.0)) raise(ErrorCode::InvalidRate, "nominal_rate must be > 0");
    require_strictly_increasing(timestamps, "sensor log");
}

void FrameClock::validate() const {
    if (timestamps.empty()) raise(ErrorCode::InvalidInput, "empty frame clock");
    if (!(rate > 0.0)) raise(ErrorCode::InvalidRate, "frame rate must be > 0");
    require_strictly_increasing(timestamps, "frame clock");
}

SensorLog lowpass(const SensorLog& log, double cutoff_hz) {
    log.validate();
    if (!(cutoff_hz > 0.0) || cutoff_hz >= log.nominal_rate / 2.0)
        raise(ErrorCode::InvalidCutoff, "cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, Nyquist)");
    SensorLog out = log;
    const double tau = 1.0 / (2.0 * M_PI * cutoff_hz);
    double y = log.angles.front();
    out.angles[0] = y;
    for (std::size_t i = 1; i < log.angles.size(); ++i) {
        const double dt = log.timestamps[i] - log.timestamps[i - 1];
        const double alpha = dt / (dt + tau);
        y = alpha * log.angles[i] + (1.0 - alpha) * y;
        out.angles[i] = y;
    }
    return out;
}

LabeledFrameSeries resample_to_frames(const SensorLog& log, const FrameClock& clock) {
    log.validate();
    clock.validate();
    LabeledFrameSeries series;
    series.timestamps = clock.timestamps;
    series.angles.reserve(clock.timestamps.size());
    const auto& t = log.timestamps;
    for (double ft : clock.timestamps) {
        if (ft < t.front() || ft > t.back())
            raise(ErrorCode::FrameOutsideLog,
                  "frame time " + std::to_string(ft) + " outside log span [" + std::to_string(t.front()) + ", " +
                      std::to_string(t.back()) + "]");
        auto upper = std::upper_bound(t.begin(), t.end(), ft);
        if (upper == t.begin()) {
            series.angles.push_back(log.angles.front());
            continue;
        }
        std::size_t hi = static_cast<std::size_t>(upper - t.begin());
        if (hi == t.size()) {
            series.angles.push_back(log.angles.back());
            continue;
        }
        std::size_t lo = hi - 1;
        if (t[lo] == ft) {
            series.angles.push_back(log.angles[lo]);
            continue;
        }
        const double u = (ft - t[lo]) / (t[hi] - t[lo]);
        series.angles.push_back(log.angles[lo] + u * (log.angles[hi] - log.angles[lo]));
    }
    return series;
}

LabeledFrameSeries downsample(const LabeledFrameSeries& series, double target_rate_hz) {
    if (series.timestamps.size() < 2) raise(ErrorCode::InvalidInput, "series needs >= 2 frames to infer its rate");
    require_strictly_increasing(series.timestamps, "labeled series");
    const double span = series.timestamps.back() - series.timestamps.front();
    const double source_rate = static_cast<double>(series.timestamps.size() - 1) / span;
    if (!(target_rate_hz > 0.0) || target_rate_hz > source_rate * (1.0 + 1e-9))
        raise(ErrorCode::InvalidRate, "target rate " + std::to_string(target_rate_hz) +
                                          " outside (0, source rate " + std::to_string(source_rate) + "]");
    const std::size_t k = static_cast<std::size_t>(std::llround(source_rate / target_rate_hz));
    LabeledFrameSeries out;
    for (std::size_t i = 0; i < series.timestamps.size(); i += k) {
        out.timestamps.push_back(series.timestamps[i]);
        out.angles.push_back(series.angles[i]);
    }
    return out;
}

SensorLog read_sensor_log(const std::string& path, double nominal_rate) {
    auto table = csv::read_numeric(path);
    if (table.header != std::vector<std::string>{"timestamp_s", "angle_deg"})
        raise(ErrorCode::MalformedFile, path + ": expected header timestamp_s,angle_deg");
    SensorLog log;
    log.nominal_rate = nominal_rate;
    for (const auto& row : table.rows) {
        log.timestamps.push_back(row[0]);
        log.angles.push_back(row[1]);
    }
    log.validate();
    return log;
}

FrameClock read_frame_clock(const std::string& path, double rate) {
    auto table = csv::read_numeric(path);
    if (table.header != std::vector<std::string>{"timestamp_s"})
        raise(ErrorCode::MalformedFile, path + ": expected header timestamp_s");
    FrameClock clock;
    clock.rate = rate;
    for (const auto& row : table.rows) clock.timestamps.push_back(row[0]);
    clock.validate();
    return clock;
}

LabeledFrameSeries read_labeled_series(const std::string& path) {
    auto table = csv::read_numeric(path);
    if (table.header != std::vector<std::string>{"timestamp_s", "angle_deg"})
        raise(ErrorCode::MalformedFile, path + ": expected header timestamp_s,angle_deg");
    LabeledFrameSeries series;
    for (const auto& row : table.rows) {
        series.timestamps.push_back(row[0]);
        series.angles.push_back(row[1]);
    }
    return series;
}

void write_labeled_series(const std::string& path, const LabeledFrameSeries& series) {
    csv::Table table;
    table.header = {"timestamp_s", "angle_deg"};
    for (std::size_t i = 0; i < series.timestamps.size(); ++i)
        table.rows.push_back({series.timestamps[i], series.angles[i]});
    csv::write_numeric(path, table);
}

}  // namespace sinesteer::signal
