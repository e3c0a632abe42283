#include "sinesteer/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sinesteer/csv.hpp"
#include "sinesteer/errors.hpp"
#include "sinesteer/rng.hpp"

namespace sinesteer::data {

namespace {

constexpr double kFrameDt = 0.5;  // 2 Hz frame rate of the synthetic camera
constexpr double kClipSigmas = 4.0;

}  // namespace

double Session::frame_dt() const {
    if (frames.size() < 2) raise(ErrorCode::InvalidInput, "session needs >= 2 frames to infer dt");
    return (frames.back().timestamp - frames.front().timestamp) / static_cast<double>(frames.size() - 1);
}

void ScenarioParams::validate() const {
    if (length < 2) raise(ErrorCode::InvalidParams, "scenario length must be >= 2");
    if (feature_dim == 0) raise(ErrorCode::InvalidParams, "feature_dim must be > 0");
    if (feature_dim <= distractor_dim)
        raise(ErrorCode::InvalidParams, "feature_dim must exceed distractor_dim");
    if (!(curvature_smoothness > 0.0 && curvature_smoothness < 1.0))
        raise(ErrorCode::InvalidParams, "curvature_smoothness must lie in (0, 1)");
    if (observation_noise_sigma < 0.0) raise(ErrorCode::InvalidParams, "observation_noise_sigma must be >= 0");
}

Session synth_scenario(const ScenarioParams& params, const codec::CodecConfig& codec_config) {
    params.validate();
    codec_config.validate();

    const double s = params.curvature_smoothness;
    // Stationary std of c_t = s c_{t-1} + (1-s) eta_t; the walk is clipped at
    // kClipSigmas of it and normalized so the stored latent spans [-1, 1].
    const double stationary_std = std::sqrt((1.0 - s) / (1.0 + s));
    const double clip = kClipSigmas * stationary_std;

    Rng latent_rng = Rng::derive(params.seed, 0);
    Rng noise_rng = Rng::derive(params.seed, 1);

    Session session;
    session.id = static_cast<int>(params.seed & 0x7FFFFFFF);
    session.frames.resize(params.length);

    const std::size_t signal_dim = params.feature_dim - params.distractor_dim;
    double c = 0.0;
    for (std::size_t t = 0; t < params.length; ++t) {
        c = std::clamp(s * c + (1.0 - s) * latent_rng.gaussian(), -clip, clip);
        const double latent = c / clip;
        FrameRecord& frame = session.frames[t];
        frame.timestamp = static_cast<double>(t) * kFrameDt;
        frame.angle = codec_config.phi_max * latent;
        frame.features.resize(params.feature_dim);
        for (std::size_t j = 0; j < signal_dim; ++j)
            frame.features[j] = latent + params.observation_noise_sigma * noise_rng.gaussian();
        for (std::size_t j = signal_dim; j < params.feature_dim; ++j)
            frame.features[j] = noise_rng.gaussian();
    }
    return session;
}

std::vector<WindowedSample> make_windows(const Session& session, std::size_t w, std::size_t stride) {
    if (w == 0 || stride == 0) raise(ErrorCode::InvalidParams, "window and stride must be >= 1");
    if (session.frames.size() < w)
        raise(ErrorCode::SeriesTooShort, "series length " + std::to_string(session.frames.size()) +
                                             " shorter than window " + std::to_string(w));
    std::vector<WindowedSample> samples;
    for (std::size_t start = 0; start + w <= session.frames.size(); start += stride)
        samples.push_back(WindowedSample{&session, start, w});
    return samples;
}

SessionSplit split_by_session(const std::vector<Session>& sessions, double test_fraction) {
    if (sessions.size() < 2) raise(ErrorCode::NotEnoughSessions, "need >= 2 sessions to split");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(ErrorCode::InvalidParams, "test_fraction must lie in (0, 1)");
    std::size_t total = 0;
    for (const auto& s : sessions) total += s.frames.size();
    const double budget = test_fraction * static_cast<double>(total);

    SessionSplit split;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const std::size_t len = sessions[i].frames.size();
        if (static_cast<double>(assigned + len) <= budget) {
            split.test_indices.push_back(i);
            assigned += len;
        } else {
            split.train_indices.push_back(i);
        }
    }
    if (split.test_indices.empty()) {
        // Budget smaller than every session: hold out the smallest one.
        std::size_t smallest = 0;
        for (std::size_t i = 1; i < sessions.size(); ++i)
            if (sessions[i].frames.size() < sessions[smallest].frames.size()) smallest = i;
        split.test_indices.push_back(smallest);
        split.train_indices.erase(
            std::find(split.train_indices.begin(), split.train_indices.end(), smallest));
    }
    return split;
}

Session load_labeled_series(const std::string& features_path, const std::string& labels_path) {
    auto features = csv::read_numeric(features_path);
    auto labels = csv::read_numeric(labels_path);
    if (labels.header != std::vector<std::string>{"timestamp_s", "angle_deg"})
        raise(ErrorCode::MalformedFile, labels_path + ": expected header timestamp_s,angle_deg");
    for (std::size_t j = 0; j < features.header.size(); ++j)
        if (features.header[j] != "f" + std::to_string(j))
            raise(ErrorCode::MalformedFile, features_path + ": expected header f0,f1,...");
    if (features.rows.size() != labels.rows.size())
        raise(ErrorCode::RowCountMismatch, features_path + " has " + std::to_string(features.rows.size()) +
                                               " rows, " + labels_path + " has " +
                                               std::to_string(labels.rows.size()));
    Session session;
    session.frames.resize(features.rows.size());
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        session.frames[i].features = features.rows[i];
        session.frames[i].timestamp = labels.rows[i][0];
        session.frames[i].angle = labels.rows[i][1];
    }
    return session;
}

void write_features_csv(const std::string& path, const Session& session) {
    csv::Table table;
    for (std::size_t j = 0; j < session.feature_dim(); ++j) table.header.push_back("f" + std::to_string(j));
    for (const auto& frame : session.frames) table.rows.push_back(frame.features);
    csv::write_numeric(path, table);
}

void audit_no_leakage(const std::vector<WindowedSample>& train, const std::vector<WindowedSample>& test) {
    std::set<std::pair<int, std::size_t>> train_frames;
    for (const auto& sample : train)
        for (std::size_t k = 0; k < sample.width; ++k)
            train_frames.emplace(sample.session->id, sample.start + k);
    for (const auto& sample : test)
        for (std::size_t k = 0; k < sample.width; ++k)
            if (train_frames.count({sample.session->id, sample.start + k}))
                raise(ErrorCode::InvalidInput,
                      "train/test leakage: session " + std::to_string(sample.session->id) + " frame " +
                          std::to_string(sample.start + k) + " appears in both splits");
}

}  // namespace sinesteer::data
