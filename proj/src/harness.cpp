#include "sinesteer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sinesteer/checkpoint.hpp"
#include "sinesteer/csv.hpp"
#include "sinesteer/metrics.hpp"

namespace sinesteer::harness {

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string join_dims(const std::vector<int>& dims) {
    std::string out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(dims[i]);
    }
    return out;
}

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    for (const auto& part : csv::split(text, ','))
        dims.push_back(std::stoi(part));
    return dims;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::UsageError, "config key " + key + ": bad numeric value '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::UsageError, "config key " + key + ": bad integer value '" + value + "'");
    }
}

/// Batch buffer assembly: windows as [B][w][D] row-major.
void fill_batch(const std::vector<data::WindowedSample>& samples, const std::vector<std::size_t>& order,
                std::size_t begin, std::size_t count, std::size_t w, std::size_t feat, double* out,
                double* targets) {
    for (std::size_t k = 0; k < count; ++k) {
        const data::WindowedSample& sample = samples[order[begin + k]];
        double* dst = out + k * w * feat;
        for (std::size_t t = 0; t < w; ++t) {
            const auto& f = sample.frame(t).features;
            std::copy(f.begin(), f.end(), dst + t * feat);
        }
        targets[k] = sample.label();
    }
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return std::nan("");
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

data::ScenarioParams ExperimentConfig::default_scenario() {
    data::ScenarioParams params;
    params.length = 400;  // keeps the 18-run comparison within a desk-scale budget
    return params;
}

void ExperimentConfig::validate() const {
    codec.validate();
    scenario.validate();
    if (window == 0 || stride == 0) raise(ErrorCode::InvalidParams, "window and stride must be >= 1");
    if (scenario.length <= window) raise(ErrorCode::InvalidParams, "scenario length must exceed window");
    if (epochs == 0) raise(ErrorCode::InvalidParams, "epochs must be >= 1");
    if (batch_size == 0) raise(ErrorCode::InvalidParams, "batch_size must be >= 1");
    if (eval_sessions == 0) raise(ErrorCode::InvalidParams, "eval_sessions must be >= 1");
    if (n_sessions < eval_sessions + 2)
        raise(ErrorCode::NotEnoughSessions,
              "n_sessions must cover train + validation + eval_sessions (need >= " +
                  std::to_string(eval_sessions + 2) + ")");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) raise(ErrorCode::InvalidParams, "lr_decay must lie in (0, 1]");
    if (grad_clip_norm <= 0.0) raise(ErrorCode::InvalidParams, "grad_clip_norm must be > 0");
    model_spec(*this).validate();
}

std::string ExperimentConfig::canonical_serialize() const {
    std::ostringstream out;
    out << "batch_size=" << batch_size << '\n'
        << "codec_n_neurons=" << codec.n_neurons << '\n'
        << "codec_phi_max=" << csv::format_double(codec.phi_max) << '\n'
        << "dropout_rate=" << csv::format_double(dropout_rate) << '\n'
        << "epochs=" << epochs << '\n'
        << "eval_sessions=" << eval_sessions << '\n'
        << "grad_clip_norm=" << csv::format_double(grad_clip_norm) << '\n'
        << "head=" << nn::head_name(head) << '\n'
        << "hidden_dims=" << join_dims(hidden_dims) << '\n'
        << "lr_decay=" << csv::format_double(lr_decay) << '\n'
        << "lr_fast=" << csv::format_double(lr_fast) << '\n'
        << "lr_slow=" << csv::format_double(lr_slow) << '\n'
        << "model=" << nn::model_name(model) << '\n'
        << "n_sessions=" << n_sessions << '\n'
        << "nll_smoothing_variance="
        << (nll_smoothing_variance ? csv::format_double(*nll_smoothing_variance) : std::string("none")) << '\n'
        << "scenario_curvature_smoothness=" << csv::format_double(scenario.curvature_smoothness) << '\n'
        << "scenario_distractor_dim=" << scenario.distractor_dim << '\n'
        << "scenario_feature_dim=" << scenario.feature_dim << '\n'
        << "scenario_length=" << scenario.length << '\n'
        << "scenario_noise_sigma=" << csv::format_double(scenario.observation_noise_sigma) << '\n'
        << "seed=" << seed << '\n'
        << "stride=" << stride << '\n'
        << "window=" << window << '\n';
    return out.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical_serialize()); }

std::string ExperimentConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig config;
    for (const auto& [key, value] : kv) {
        if (key == "batch_size") config.batch_size = parse_u64(key, value);
        else if (key == "codec_n_neurons") config.codec.n_neurons = static_cast<int>(parse_u64(key, value));
        else if (key == "codec_phi_max") config.codec.phi_max = parse_double(key, value);
        else if (key == "dropout_rate") config.dropout_rate = parse_double(key, value);
        else if (key == "epochs") config.epochs = parse_u64(key, value);
        else if (key == "eval_sessions") config.eval_sessions = parse_u64(key, value);
        else if (key == "grad_clip_norm") config.grad_clip_norm = parse_double(key, value);
        else if (key == "head") config.head = nn::head_from_name(value);
        else if (key == "hidden_dims") config.hidden_dims = parse_dims(value);
        else if (key == "lr_decay") config.lr_decay = parse_double(key, value);
        else if (key == "lr_fast") config.lr_fast = parse_double(key, value);
        else if (key == "lr_slow") config.lr_slow = parse_double(key, value);
        else if (key == "model") config.model = nn::model_from_name(value);
        else if (key == "n_sessions") config.n_sessions = parse_u64(key, value);
        else if (key == "nll_smoothing_variance")
            config.nll_smoothing_variance =
                value == "none" ? std::nullopt : std::optional<double>(parse_double(key, value));
        else if (key == "scenario_curvature_smoothness") config.scenario.curvature_smoothness = parse_double(key, value);
        else if (key == "scenario_distractor_dim") config.scenario.distractor_dim = parse_u64(key, value);
        else if (key == "scenario_feature_dim") config.scenario.feature_dim = parse_u64(key, value);
        else if (key == "scenario_length") config.scenario.length = parse_u64(key, value);
        else if (key == "scenario_noise_sigma") config.scenario.observation_noise_sigma = parse_double(key, value);
        else if (key == "seed") config.seed = parse_u64(key, value);
        else if (key == "stride") config.stride = parse_u64(key, value);
        else if (key == "window") config.window = parse_u64(key, value);
        else raise(ErrorCode::UsageError, "unknown config key '" + key + "'");
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::UsageError, path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return from_map(kv);
}

void ExperimentConfig::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write config " + path);
    out << canonical_serialize();
}

nn::ModelSpec model_spec(const ExperimentConfig& config) {
    nn::ModelSpec spec;
    spec.kind = config.model;
    spec.hidden_dims = config.hidden_dims;
    spec.head = config.head;
    spec.codec = config.codec;
    spec.feature_dim = static_cast<int>(config.scenario.feature_dim);
    spec.dropout_rate = config.dropout_rate;
    spec.nll_smoothing_variance = config.nll_smoothing_variance;
    return spec;
}

std::vector<data::Session> build_sessions(const ExperimentConfig& config) {
    std::vector<data::Session> sessions;
    sessions.reserve(config.n_sessions);
    for (std::size_t k = 0; k < config.n_sessions; ++k) {
        data::ScenarioParams params = config.scenario;
        params.seed = splitmix64(config.seed ^ splitmix64(k + 1));
        sessions.push_back(data::synth_scenario(params, config.codec));
        sessions.back().id = static_cast<int>(k);
    }
    return sessions;
}

double decode_prediction(nn::HeadKind head, std::span<const double> output,
                         const codec::CodecConfig& codec_config, std::size_t* clamp_count) {
    switch (head) {
        case nn::HeadKind::SineWave: {
            const double raw = codec::fit_wave(output, codec_config).angle;
            if (std::abs(raw) > codec_config.phi_max) {
                if (clamp_count) ++*clamp_count;
                return codec::clamp_angle(raw, codec_config);
            }
            return raw;
        }
        case nn::HeadKind::Regression:
            // tanh output scaled back to degrees; |output| < 1 keeps it in range
            return codec_config.phi_max * output[0];
        case nn::HeadKind::NllBins: {
            std::vector<double> probs(output.begin(), output.end());
            double zmax = *std::max_element(probs.begin(), probs.end());
            double sum = 0.0;
            for (double& p : probs) {
                p = std::exp(p - zmax);
                sum += p;
            }
            for (double& p : probs) p /= sum;
            return codec::decode_expected(probs, codec_config);
        }
    }
    raise(ErrorCode::InvalidParams, "unknown head kind");
}

std::vector<double> predict_session(const nn::Model& model, const data::Session& session, std::size_t w,
                                    std::size_t* clamp_count) {
    const auto windows = data::make_windows(session, w, 1);
    const std::size_t feat = session.feature_dim();
    const std::size_t width = static_cast<std::size_t>(model.spec().head_width());
    const std::size_t chunk = 256;
    std::vector<double> batch_buf(chunk * w * feat);
    std::vector<double> predictions;
    predictions.reserve(windows.size());
    for (std::size_t begin = 0; begin < windows.size(); begin += chunk) {
        const std::size_t count = std::min(chunk, windows.size() - begin);
        for (std::size_t k = 0; k < count; ++k) {
            double* dst = batch_buf.data() + k * w * feat;
            for (std::size_t t = 0; t < w; ++t) {
                const auto& f = windows[begin + k].frame(t).features;
                std::copy(f.begin(), f.end(), dst + t * feat);
            }
        }
        nn::Tape tape = model.forward_batch(batch_buf.data(), count, w, false, nullptr);
        for (std::size_t k = 0; k < count; ++k)
            predictions.push_back(decode_prediction(
                model.spec().head,
                std::span<const double>(tape.head_out.data() + k * width, width), model.spec().codec,
                clamp_count));
    }
    return predictions;
}

namespace {

double session_val_rmse(const nn::Model& model, const data::Session& session, std::size_t w) {
    std::size_t clamps = 0;
    const auto predictions = predict_session(model, session, w, &clamps);
    std::vector<double> truth;
    truth.reserve(predictions.size());
    for (std::size_t i = w - 1; i < session.frames.size(); ++i) truth.push_back(session.frames[i].angle);
    return metrics::rmse(truth, predictions);
}

}  // namespace

TrainOutput train(const ExperimentConfig& config) {
    config.validate();
    const auto sessions = build_sessions(config);
    const std::size_t n_train = config.n_sessions - config.eval_sessions - 1;
    const data::Session& val_session = sessions[n_train];

    std::vector<data::WindowedSample> train_windows;
    for (std::size_t s = 0; s < n_train; ++s) {
        auto windows = data::make_windows(sessions[s], config.window, config.stride);
        train_windows.insert(train_windows.end(), windows.begin(), windows.end());
    }
    {
        // provenance check: no held-out frame may contribute a gradient
        std::vector<data::WindowedSample> held_out;
        for (std::size_t s = n_train; s < sessions.size(); ++s) {
            auto windows = data::make_windows(sessions[s], config.window, 1);
            held_out.insert(held_out.end(), windows.begin(), windows.end());
        }
        data::audit_no_leakage(train_windows, held_out);
    }

    // one stream drives initialization, shuffling and dropout
    Rng run_rng = Rng::derive(config.seed, 0x5EED);
    nn::Model model(model_spec(config), run_rng);
    auto params = model.parameters();

    nn::AdamConfig adam;
    adam.lr_groups = {config.lr_fast, config.lr_slow};

    const std::size_t feat = config.scenario.feature_dim;
    const std::size_t w = config.window;
    std::vector<double> batch_buf(config.batch_size * w * feat);
    std::vector<double> targets(config.batch_size);
    std::vector<std::size_t> order(train_windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainOutput output{model, nn::TrainState{adam, 0}, {}, 0};
    double best_val = HUGE_VAL;
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double decay = std::pow(config.lr_decay, static_cast<double>(epoch));
        nn::AdamConfig epoch_adam = adam;
        epoch_adam.lr_groups = {config.lr_fast * decay, config.lr_slow * decay};

        run_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, order.size() - begin);
            fill_batch(train_windows, order, begin, count, w, feat, batch_buf.data(), targets.data());
            nn::Tape tape = model.forward_batch(batch_buf.data(), count, w, true, &run_rng);
            nn::LossResult loss = nn::head_loss(model.spec(), tape.head_out, count,
                                                std::span<const double>(targets.data(), count));
            if (!std::isfinite(loss.loss))
                raise(ErrorCode::NonfiniteLoss, "training loss became non-finite at epoch " +
                                                    std::to_string(epoch));
            model.zero_grads();
            model.backward_batch(tape, loss.grad.data());
            nn::clip_grad_norm(params, config.grad_clip_norm);
            ++step;
            nn::adam_step(params, epoch_adam, step);
            loss_sum += loss.loss * static_cast<double>(count);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(train_windows.size());
        stats.val_rmse = session_val_rmse(model, val_session, w);
        output.history.push_back(stats);

        if (stats.val_rmse < best_val) {
            best_val = stats.val_rmse;
            output.model = model;  // deep copy of parameters and Adam moments
            output.state.step = step;
            output.best_epoch = epoch;
        }
    }
    output.state.adam = adam;
    return output;
}

EvalReport evaluate_model(const nn::Model& model, const std::vector<data::Session>& test_sessions,
                          const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    if (model.spec().codec.n_neurons != config.codec.n_neurons ||
        model.spec().codec.phi_max != config.codec.phi_max)
        raise(ErrorCode::HeadCodecMismatch,
              "checkpoint codec (N=" + std::to_string(model.spec().codec.n_neurons) +
                  ", phi_max=" + std::to_string(model.spec().codec.phi_max) + ") != supplied codec (N=" +
                  std::to_string(config.codec.n_neurons) + ", phi_max=" + std::to_string(config.codec.phi_max) +
                  ")");

    EvalReport report;
    report.config_hash = config.hash();
    double pooled_sq = 0.0;
    double pooled_whiteness = 0.0;
    std::size_t pooled_frames = 0;
    for (const auto& session : test_sessions) {
        std::size_t clamps = 0;
        const auto predictions = predict_session(model, session, config.window, &clamps);
        report.clamp_count += clamps;
        std::vector<double> truth;
        truth.reserve(predictions.size());
        for (std::size_t i = config.window - 1; i < session.frames.size(); ++i)
            truth.push_back(session.frames[i].angle);

        SessionEval eval;
        eval.session_id = session.id;
        eval.frames = predictions.size();
        eval.rmse_deg = metrics::rmse(truth, predictions);
        eval.whiteness = metrics::whiteness(predictions, session.frame_dt());
        report.sessions.push_back(eval);

        pooled_sq += eval.rmse_deg * eval.rmse_deg * static_cast<double>(eval.frames);
        pooled_whiteness += eval.whiteness * static_cast<double>(eval.frames);
        pooled_frames += eval.frames;
    }
    report.rmse_deg = std::sqrt(pooled_sq / static_cast<double>(pooled_frames));
    report.whiteness = pooled_whiteness / static_cast<double>(pooled_frames);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<CompareCell> compare(const ExperimentConfig& base, std::size_t n_seeds,
                                 const std::string& checkpoint_dir) {
    if (n_seeds == 0) raise(ErrorCode::InvalidParams, "n_seeds must be >= 1");
    const nn::HeadKind heads[] = {nn::HeadKind::Regression, nn::HeadKind::NllBins, nn::HeadKind::SineWave};
    const nn::ModelKind kinds[] = {nn::ModelKind::Feedforward, nn::ModelKind::CLstm};

    std::vector<CompareCell> cells;
    for (nn::HeadKind head : heads) {
        for (nn::ModelKind kind : kinds) {
            CompareCell cell;
            cell.head = head;
            cell.model = kind;
            ExperimentConfig cell_config = base;
            cell_config.head = head;
            cell_config.model = kind;
            cell.config_hash = cell_config.hash();
            try {
                std::vector<double> rmses, whitenesses, clamps;
                for (std::size_t k = 0; k < n_seeds; ++k) {
                    ExperimentConfig run_config = cell_config;
                    run_config.seed = base.seed + k;

                    nn::Model run_model = [&]() {
                        if (!checkpoint_dir.empty()) {
                            const auto path = std::filesystem::path(checkpoint_dir) /
                                              (run_config.hash_hex() + ".ckpt");
                            if (std::filesystem::exists(path)) return nn::load_checkpoint(path.string());
                            TrainOutput out = train(run_config);
                            nn::save_checkpoint(path.string(), out.model, out.state);
                            return std::move(out.model);
                        }
                        return std::move(train(run_config).model);
                    }();

                    const auto sessions = build_sessions(run_config);
                    std::vector<data::Session> test(sessions.end() - static_cast<std::ptrdiff_t>(
                                                                         run_config.eval_sessions),
                                                    sessions.end());
                    EvalReport report = evaluate_model(run_model, test, run_config);
                    rmses.push_back(report.rmse_deg);
                    whitenesses.push_back(report.whiteness);
                    clamps.push_back(static_cast<double>(report.clamp_count));
                }
                cell.rmse_deg = median(rmses);
                cell.whiteness = median(whitenesses);
                cell.clamp_count = static_cast<std::size_t>(median(clamps));
                cell.ok = true;
            } catch (const Error& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path);
    out << "epoch,train_loss,val_rmse_deg\n";
    for (const auto& row : history)
        out << row.epoch << ',' << csv::format_double(row.train_loss) << ','
            << csv::format_double(row.val_rmse) << '\n';
}

void write_eval_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path);
    out << "metric,value,unit\n";
    out << "rmse_deg," << csv::format_double(report.rmse_deg) << ",degrees\n";
    out << "whiteness," << csv::format_double(report.whiteness) << ",deg2_per_s2\n";
    out << "clamp_count," << report.clamp_count << ",count\n";
    for (const auto& session : report.sessions) {
        const std::string tag = "session" + std::to_string(session.session_id);
        out << tag << "_frames," << session.frames << ",count\n";
        out << tag << "_rmse_deg," << csv::format_double(session.rmse_deg) << ",degrees\n";
        out << tag << "_whiteness," << csv::format_double(session.whiteness) << ",deg2_per_s2\n";
    }
}

void write_compare_csv(const std::string& path, const std::vector<CompareCell>& cells) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path);
    out << "head,model,rmse_deg,whiteness,clamp_count,config_hash\n";
    for (const auto& cell : cells) {
        char hash_hex[17];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(cell.config_hash));
        out << nn::head_name(cell.head) << ',' << nn::model_name(cell.model) << ',';
        if (cell.ok)
            out << csv::format_double(cell.rmse_deg) << ',' << csv::format_double(cell.whiteness) << ','
                << cell.clamp_count;
        else
            out << "nan,nan,nan";
        out << ',' << hash_hex << '\n';
    }
}

}  // namespace sinesteer::harness
