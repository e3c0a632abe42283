#include "sinesteer/angle_codec.hpp"

#include <algorithm>
#include <cmath>

namespace sinesteer::codec {

namespace {

constexpr double kAmplitudeFloor = 1e-6;
constexpr double kPhaseTolerance = 1e-9;

double neuron_phase(int i, int n) {
    return 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1);
}

void require_in_range(double angle_deg, const CodecConfig& config) {
    if (!(std::abs(angle_deg) <= config.phi_max))
        raise(ErrorCode::AngleOutOfRange,
              "angle " + std::to_string(angle_deg) + " exceeds +-" + std::to_string(config.phi_max));
}

}  // namespace

void CodecConfig::validate() const {
    if (n_neurons < 4) raise(ErrorCode::InvalidParams, "n_neurons must be >= 4");
    if (!(phi_max > 0.0)) raise(ErrorCode::InvalidParams, "phi_max must be > 0");
}

std::vector<double> encode(double angle_deg, const CodecConfig& config) {
    config.validate();
    require_in_range(angle_deg, config);
    const double psi = angle_deg * M_PI / (2.0 * config.phi_max);
    std::vector<double> wave(static_cast<std::size_t>(config.n_neurons));
    for (int i = 0; i < config.n_neurons; ++i)
        wave[static_cast<std::size_t>(i)] = std::sin(neuron_phase(i, config.n_neurons) - psi);
    return wave;
}

DecodeResult fit_wave(std::span<const double> wave, const CodecConfig& config) {
    config.validate();
    const int n = config.n_neurons;
    if (wave.size() != static_cast<std::size_t>(n))
        raise(ErrorCode::ShapeMismatch,
              "wave length " + std::to_string(wave.size()) + " != n_neurons " + std::to_string(n));

    // Normal equations for min ||wave - (a sin t - b cos t)||^2.
    double s_ss = 0.0, s_cc = 0.0, s_sc = 0.0, r_s = 0.0, r_c = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = neuron_phase(i, n);
        const double s = std::sin(t);
        const double c = std::cos(t);
        const double w = wave[static_cast<std::size_t>(i)];
        s_ss += s * s;
        s_cc += c * c;
        s_sc += s * c;
        r_s += w * s;
        r_c += w * c;
    }
    const double det = s_ss * s_cc - s_sc * s_sc;
    const double a = (s_cc * r_s - s_sc * r_c) / det;
    const double b = (s_sc * r_s - s_ss * r_c) / det;

    DecodeResult result;
    result.amplitude = std::hypot(a, b);
    if (result.amplitude < kAmplitudeFloor)
        raise(ErrorCode::DegenerateWave,
              "fitted amplitude " + std::to_string(result.amplitude) + " below " + std::to_string(kAmplitudeFloor));

    const double psi = std::atan2(b, a);
    result.angle = 2.0 * config.phi_max * psi / M_PI;

    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = neuron_phase(i, n);
        const double fitted = a * std::sin(t) - b * std::cos(t);
        const double d = wave[static_cast<std::size_t>(i)] - fitted;
        sq += d * d;
    }
    result.residual_rmse = std::sqrt(sq / static_cast<double>(n));
    return result;
}

DecodeResult decode(std::span<const double> wave, const CodecConfig& config) {
    DecodeResult result = fit_wave(wave, config);
    const double psi = result.angle * M_PI / (2.0 * config.phi_max);
    if (std::abs(psi) > M_PI / 2.0 + kPhaseTolerance)
        raise(ErrorCode::PhaseOutOfRange,
              "decoded angle " + std::to_string(result.angle) + " exceeds +-" + std::to_string(config.phi_max));
    return result;
}

double bin_width(const CodecConfig& config) {
    return 2.0 * config.phi_max / static_cast<double>(config.n_neurons);
}

double bin_center(int index, const CodecConfig& config) {
    return -config.phi_max + (static_cast<double>(index) + 0.5) * bin_width(config);
}

int bin_index(double angle_deg, const CodecConfig& config) {
    config.validate();
    require_in_range(angle_deg, config);
    // Half-open bins [edge_i, edge_{i+1}); +phi_max belongs to the last bin.
    int idx = static_cast<int>(std::floor((angle_deg + config.phi_max) / bin_width(config)));
    return std::clamp(idx, 0, config.n_neurons - 1);
}

std::vector<double> encode_bins(double angle_deg, const CodecConfig& config,
                                std::optional<double> smoothing_variance) {
    config.validate();
    require_in_range(angle_deg, config);
    const std::size_t n = static_cast<std::size_t>(config.n_neurons);
    std::vector<double> probs(n, 0.0);
    if (!smoothing_variance) {
        probs[static_cast<std::size_t>(bin_index(angle_deg, config))] = 1.0;
        return probs;
    }
    const double var = *smoothing_variance;
    if (!(var > 0.0)) raise(ErrorCode::InvalidParams, "smoothing variance must be > 0");
    double max_log = -HUGE_VAL;
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = bin_center(static_cast<int>(i), config) - angle_deg;
        logs[i] = -d * d / (2.0 * var);
        max_log = std::max(max_log, logs[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        probs[i] = std::exp(logs[i] - max_log);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

double decode_expected(std::span<const double> probs, const CodecConfig& config) {
    config.validate();
    if (probs.size() != static_cast<std::size_t>(config.n_neurons))
        raise(ErrorCode::ShapeMismatch, "distribution length != n_neurons");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < -1e-6)
            raise(ErrorCode::InvalidDistribution, "negative probability at bin " + std::to_string(i));
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-6)
        raise(ErrorCode::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
    double expected = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        expected += probs[i] * bin_center(static_cast<int>(i), config);
    return expected;
}

double clamp_angle(double angle_deg, const CodecConfig& config) {
    config.validate();
    return std::clamp(angle_deg, -config.phi_max, config.phi_max);
}

}  // namespace sinesteer::codec
