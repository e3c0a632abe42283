#pragma once

#include <string>
#include <vector>

namespace sinesteer::signal {

/// Raw steering-wheel sensor log (e.g. CAN at 100 Hz).
struct SensorLog {
    std::vector<double> timestamps;  // seconds, strictly increasing
    std::vector<double> angles;      // degrees
    double nominal_rate = 100.0;     // Hz

    void validate() const;
};

/// Camera frame times the labels get synchronized to.
struct FrameClock {
    std::vector<double> timestamps;  // seconds, strictly increasing
    double rate = 20.0;              // Hz

    void validate() const;
};

/// Per-frame ground-truth angles.
struct LabeledFrameSeries {
    std::vector<double> timestamps;
    std::vector<double> angles;
};

/// Causal single-pole IIR smoother: y_t = alpha x_t + (1 - alpha) y_{t-1}
/// with alpha = dt / (dt + 1/(2 pi cutoff)) per sample interval, y_0 = x_0.
/// Timestamps are unchanged.
SensorLog lowpass(const SensorLog& log, double cutoff_hz);

/// Linear interpolation of the log at each frame time. Every frame time must
/// lie within the log's span.
LabeledFrameSeries resample_to_frames(const SensorLog& log, const FrameClock& clock);

/// Keeps every k-th frame, k = round(source_rate / target_rate), starting at
/// frame 0. Source rate is inferred from the series span.
LabeledFrameSeries downsample(const LabeledFrameSeries& series, double target_rate_hz);

// CSV ingestion formats: sensor log `timestamp_s,angle_deg`; frame clock
// `timestamp_s`; labeled series `timestamp_s,angle_deg`.
SensorLog read_sensor_log(const std::string& path, double nominal_rate);
FrameClock read_frame_clock(const std::string& path, double rate);
LabeledFrameSeries read_labeled_series(const std::string& path);
void write_labeled_series(const std::string& path, const LabeledFrameSeries& series);

}  // namespace sinesteer::signal
