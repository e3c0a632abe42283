#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinesteer/angle_codec.hpp"

namespace sinesteer::data {

/// One camera frame reduced to a fixed-length feature vector plus its
/// ground-truth steering angle.
struct FrameRecord {
    std::vector<double> features;
    double angle = 0.0;      // degrees
    double timestamp = 0.0;  // seconds
};

/// A contiguous driving session. Sessions are the unit of train/test
/// assignment; id gives frames a global identity (session, index) used by
/// the leakage audit.
struct Session {
    int id = 0;
    std::vector<FrameRecord> frames;

    std::size_t feature_dim() const { return frames.empty() ? 0 : frames.front().features.size(); }
    double frame_dt() const;
};

/// A many-to-one training sample: w consecutive frames, labelled by the
/// angle at the last frame. Views share the session's frame storage.
struct WindowedSample {
    const Session* session = nullptr;
    std::size_t start = 0;
    std::size_t width = 0;

    const FrameRecord& frame(std::size_t offset) const { return session->frames[start + offset]; }
    double label() const { return session->frames[start + width - 1].angle; }
};

struct ScenarioParams {
    std::size_t length = 2000;
    std::size_t feature_dim = 32;
    double observation_noise_sigma = 0.5;
    double curvature_smoothness = 0.95;  // in (0, 1)
    std::size_t distractor_dim = 16;
    std::uint64_t seed = 7;

    void validate() const;
};

/// Synthetic stand-in for the CNN feature extractor. A latent road curvature
/// follows a smoothed bounded random walk; the ground-truth angle is
/// phi_max times the normalized latent; signal features are noisy copies of
/// the latent and the rest are pure-noise distractors. Frames tick at 2 Hz.
/// Deterministic function of the seed.
Session synth_scenario(const ScenarioParams& params, const codec::CodecConfig& codec);

/// Sliding windows at offsets 0, stride, 2*stride, ... (Session must outlive
/// the returned views.)
std::vector<WindowedSample> make_windows(const Session& session, std::size_t w, std::size_t stride = 1);

struct SessionSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Assigns whole sessions to test, greedily in the given order, while the
/// assignment stays within test_fraction of total frames; never splits a
/// session. If no session fits the budget, the smallest one becomes test.
SessionSplit split_by_session(const std::vector<Session>& sessions, double test_fraction);

/// Positional join of a features CSV (header f0..f{D-1}) with a labeled
/// frame series CSV (timestamp_s,angle_deg).
Session load_labeled_series(const std::string& features_path, const std::string& labels_path);

void write_features_csv(const std::string& path, const Session& session);

/// Throws when any frame (by session id + index) appears in both sample
/// sets.
void audit_no_leakage(const std::vector<WindowedSample>& train, const std::vector<WindowedSample>& test);

}  // namespace sinesteer::data
