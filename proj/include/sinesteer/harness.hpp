#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sinesteer/checkpoint.hpp"
#include "sinesteer/dataset.hpp"
#include "sinesteer/neural.hpp"

namespace sinesteer::harness {

/// Fully determines a training run given its seed. Serializes to a flat
/// key=value file with canonical (sorted) key order, so the FNV-1a hash of
/// the canonical form identifies a run.
struct ExperimentConfig {
    nn::ModelKind model = nn::ModelKind::CLstm;
    nn::HeadKind head = nn::HeadKind::SineWave;
    std::vector<int> hidden_dims = {64, 64};
    double dropout_rate = 0.1;
    std::optional<double> nll_smoothing_variance = 80.0;  // deg^2
    codec::CodecConfig codec;                             // N=95, phi_max=190

    data::ScenarioParams scenario = default_scenario();
    std::size_t n_sessions = 4;     // generated per run; seeds derived from `seed`
    std::size_t eval_sessions = 1;  // held-out test sessions (validation takes one more)

    std::size_t window = 10;  // 2 Hz x 5 s of driving
    std::size_t stride = 1;

    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double lr_fast = 1e-3;   // classification layer + LSTM group
    double lr_slow = 1e-5;   // pretrained-feature group (empty in the default models)
    double lr_decay = 0.98;  // per-epoch multiplier on both groups
    double grad_clip_norm = 5.0;
    std::uint64_t seed = 7;

    static data::ScenarioParams default_scenario();

    void validate() const;
    std::string canonical_serialize() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    static ExperimentConfig from_file(const std::string& path);
    void write_file(const std::string& path) const;
};

nn::ModelSpec model_spec(const ExperimentConfig& config);

/// The n_sessions scenarios of a run; session k's scenario seed derives from
/// config.seed and k.
std::vector<data::Session> build_sessions(const ExperimentConfig& config);

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_rmse = 0.0;
};

struct TrainOutput {
    nn::Model model;  // best-validation snapshot (parameters + Adam moments)
    nn::TrainState state;
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
};

/// Trains end-to-end (trunk and head jointly). Deterministic given the
/// config: initialization, shuffling and dropout all come from one stream
/// seeded by config.seed. Keeps the snapshot with best validation RMSE.
/// Throws NonfiniteLoss (with the epoch in the message) if a batch loss
/// stops being finite.
TrainOutput train(const ExperimentConfig& config);

struct SessionEval {
    int session_id = 0;
    std::size_t frames = 0;
    double rmse_deg = 0.0;
    double whiteness = 0.0;
};

struct EvalReport {
    double rmse_deg = 0.0;
    double whiteness = 0.0;  // deg^2/s^2
    std::size_t clamp_count = 0;
    std::vector<SessionEval> sessions;
    std::uint64_t config_hash = 0;
    double wall_seconds = 0.0;  // informational; never written to artifacts
};

/// Decoded predicted-angle series for one session (eval mode, stride-1
/// windows; predictions start at frame w-1). Out-of-range sine decodes are
/// clamped and counted.
std::vector<double> predict_session(const nn::Model& model, const data::Session& session, std::size_t w,
                                    std::size_t* clamp_count);

/// Runs the model over every test session and aggregates RMSE and whiteness
/// (frame-weighted, so the breakdown reproduces the totals). Throws
/// HeadCodecMismatch when the model's codec disagrees with the config's.
EvalReport evaluate_model(const nn::Model& model, const std::vector<data::Session>& test_sessions,
                          const ExperimentConfig& config);

struct CompareCell {
    nn::HeadKind head = nn::HeadKind::Regression;
    nn::ModelKind model = nn::ModelKind::Feedforward;
    double rmse_deg = 0.0;
    double whiteness = 0.0;
    std::size_t clamp_count = 0;
    std::uint64_t config_hash = 0;
    bool ok = false;
    std::string error;
};

/// Trains and evaluates every head x model cell (medians over n_seeds runs
/// seeded seed, seed+1, ...). Existing checkpoints in checkpoint_dir are
/// reused by config hash. A failed cell is marked and the table still comes
/// back complete.
std::vector<CompareCell> compare(const ExperimentConfig& base, std::size_t n_seeds,
                                 const std::string& checkpoint_dir = "");

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history);
void write_eval_report_csv(const std::string& path, const EvalReport& report);
void write_compare_csv(const std::string& path, const std::vector<CompareCell>& cells);

}  // namespace sinesteer::harness
