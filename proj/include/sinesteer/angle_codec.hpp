#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sinesteer/errors.hpp"

namespace sinesteer::codec {

struct CodecConfig {
    int n_neurons = 95;
    double phi_max = 190.0;  // degrees

    void validate() const;
};

struct DecodeResult {
    double angle = 0.0;          // degrees
    double amplitude = 0.0;      // fitted wave amplitude
    double residual_rmse = 0.0;  // RMS misfit between input and fitted wave
};

/// Encodes a steering angle as the phase shift of a sine wave sampled across
/// the output neurons:
///
///   Y_i = sin( 2*pi*(i-1)/(N-1) - phi*pi/(2*phi_max) ),  i = 1..N
///
/// Every element lies in [-1, 1].
std::vector<double> encode(double angle_deg, const CodecConfig& config);

/// Least-squares sinusoid fit of `wave`, with no policy on the recovered
/// phase range: the returned angle may lie outside [-phi_max, phi_max].
/// The fit solves min over (a, b) of sum_i (wave_i - (a sin t_i - b cos t_i))^2
/// through the 2x2 normal equations; phase = atan2(b, a), which is exact for
/// waves in the encoding family because it is linear in (cos psi, sin psi).
/// Throws DegenerateWave when the fitted amplitude is below 1e-6.
DecodeResult fit_wave(std::span<const double> wave, const CodecConfig& config);

/// fit_wave plus the range contract: throws PhaseOutOfRange when the fitted
/// phase exceeds pi/2 + 1e-9 in magnitude (angle beyond +-phi_max). Callers
/// that want saturation instead use fit_wave + clamp_angle explicitly.
DecodeResult decode(std::span<const double> wave, const CodecConfig& config);

/// Discrete-bin encoding for the NLL baseline: N uniform bins over
/// [-phi_max, phi_max]. Without smoothing, one-hot at the bin containing the
/// angle (ties to the higher-index bin; +phi_max maps to the last bin). With
/// smoothing, a Gaussian of the given variance evaluated at bin centers and
/// renormalized.
std::vector<double> encode_bins(double angle_deg, const CodecConfig& config,
                                std::optional<double> smoothing_variance = std::nullopt);

/// Expected value of the bin-center distribution.
double decode_expected(std::span<const double> probs, const CodecConfig& config);

double clamp_angle(double angle_deg, const CodecConfig& config);

double bin_width(const CodecConfig& config);
double bin_center(int index, const CodecConfig& config);
int bin_index(double angle_deg, const CodecConfig& config);

}  // namespace sinesteer::codec
