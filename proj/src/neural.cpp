#include "sinesteer/neural.hpp"

#include <algorithm>
#include <cmath>

namespace sinesteer::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// c[m][n] (+)= a[m][k] * b[n][k]^T
void matmul_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
               bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double dot = 0.0;
            for (std::size_t kk = 0; kk < k; ++kk) dot += ai[kk] * bj[kk];
            ci[j] = accumulate ? ci[j] + dot : dot;
        }
    }
}

// c[m][n] (+)= a[m][k] * b[k][n]
void matmul_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
               bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        if (!accumulate) std::fill(ci, ci + n, 0.0);
        const double* ai = a + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = ai[kk];
            if (av == 0.0) continue;
            const double* bk = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bk[j];
        }
    }
}

// w[n][k] += sum_b a[b][n] (outer) x[b][k]
void accumulate_outer(const double* a, const double* x, double* w, std::size_t batch, std::size_t n,
                      std::size_t k) {
    for (std::size_t b = 0; b < batch; ++b) {
        const double* ab = a + b * n;
        const double* xb = x + b * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double av = ab[j];
            if (av == 0.0) continue;
            double* wj = w + j * k;
            for (std::size_t kk = 0; kk < k; ++kk) wj[kk] += av * xb[kk];
        }
    }
}

void init_uniform(Tensor& t, double bound, Rng& rng) {
    for (double& v : t.data) v = rng.uniform(-bound, bound);
}

}  // namespace

Parameter Parameter::make(std::string name, std::vector<std::size_t> shape) {
    Parameter p;
    p.name = std::move(name);
    p.value = Tensor::zeros(shape);
    p.grad = Tensor::zeros(shape);
    p.adam_m = Tensor::zeros(shape);
    p.adam_v = Tensor::zeros(std::move(shape));
    return p;
}

const char* head_name(HeadKind head) {
    switch (head) {
        case HeadKind::Regression: return "regression";
        case HeadKind::NllBins: return "nll_bins";
        case HeadKind::SineWave: return "sine_wave";
    }
    return "?";
}

const char* model_name(ModelKind kind) {
    return kind == ModelKind::Feedforward ? "feedforward" : "c_lstm";
}

HeadKind head_from_name(const std::string& name) {
    if (name == "regression") return HeadKind::Regression;
    if (name == "nll_bins") return HeadKind::NllBins;
    if (name == "sine_wave") return HeadKind::SineWave;
    raise(ErrorCode::InvalidParams, "unknown head kind '" + name + "'");
}

ModelKind model_from_name(const std::string& name) {
    if (name == "feedforward") return ModelKind::Feedforward;
    if (name == "c_lstm") return ModelKind::CLstm;
    raise(ErrorCode::InvalidParams, "unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
    codec.validate();
    if (hidden_dims.empty()) raise(ErrorCode::InvalidParams, "model needs at least one hidden layer");
    for (int h : hidden_dims)
        if (h <= 0) raise(ErrorCode::InvalidParams, "hidden dims must be positive");
    if (feature_dim <= 0) raise(ErrorCode::InvalidParams, "feature_dim must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        raise(ErrorCode::InvalidParams, "dropout_rate must lie in [0, 1)");
    if (nll_smoothing_variance && !(*nll_smoothing_variance > 0.0))
        raise(ErrorCode::InvalidParams, "nll smoothing variance must be > 0");
}

// Weights start uniform with std 1/sqrt(fan_in), i.e. bounds +-sqrt(3/fan_in);
// biases start at zero except the forget gate's, which starts at 1.
Model::Model(const ModelSpec& spec, Rng& init_rng) : spec_(spec) {
    spec_.validate();
    int in_dim = spec_.feature_dim;
    for (std::size_t l = 0; l < spec_.hidden_dims.size(); ++l) {
        const int hidden = spec_.hidden_dims[l];
        const std::string prefix =
            (spec_.kind == ModelKind::CLstm ? "lstm" : "dense") + std::to_string(l);
        if (spec_.kind == ModelKind::CLstm) {
            LstmLayer layer;
            layer.in_dim = in_dim;
            layer.hidden_dim = hidden;
            layer.w_input = Parameter::make(prefix + ".w_input",
                                            {static_cast<std::size_t>(4 * hidden), static_cast<std::size_t>(in_dim)});
            layer.w_hidden = Parameter::make(prefix + ".w_hidden",
                                             {static_cast<std::size_t>(4 * hidden), static_cast<std::size_t>(hidden)});
            layer.bias = Parameter::make(prefix + ".bias", {static_cast<std::size_t>(4 * hidden)});
            init_uniform(layer.w_input.value, std::sqrt(3.0 / in_dim), init_rng);
            init_uniform(layer.w_hidden.value, std::sqrt(3.0 / hidden), init_rng);
            std::fill(layer.bias.value.data.begin() + hidden, layer.bias.value.data.begin() + 2 * hidden, 1.0);
            lstm_layers_.push_back(std::move(layer));
        } else {
            DenseLayer layer;
            layer.in_dim = in_dim;
            layer.out_dim = hidden;
            layer.tanh_activation = true;
            layer.weight = Parameter::make(prefix + ".weight",
                                           {static_cast<std::size_t>(hidden), static_cast<std::size_t>(in_dim)});
            layer.bias = Parameter::make(prefix + ".bias", {static_cast<std::size_t>(hidden)});
            init_uniform(layer.weight.value, std::sqrt(3.0 / in_dim), init_rng);
            dense_layers_.push_back(std::move(layer));
        }
        in_dim = hidden;
    }
    head_.in_dim = in_dim;
    head_.out_dim = spec_.head_width();
    head_.tanh_activation = spec_.head != HeadKind::NllBins;
    head_.weight = Parameter::make("head.weight", {static_cast<std::size_t>(head_.out_dim),
                                                   static_cast<std::size_t>(head_.in_dim)});
    head_.bias = Parameter::make("head.bias", {static_cast<std::size_t>(head_.out_dim)});
    init_uniform(head_.weight.value, std::sqrt(3.0 / head_.in_dim), init_rng);
}

std::vector<Parameter*> Model::parameters() {
    std::vector<Parameter*> params;
    for (auto& layer : lstm_layers_) {
        params.push_back(&layer.w_input);
        params.push_back(&layer.w_hidden);
        params.push_back(&layer.bias);
    }
    for (auto& layer : dense_layers_) {
        params.push_back(&layer.weight);
        params.push_back(&layer.bias);
    }
    params.push_back(&head_.weight);
    params.push_back(&head_.bias);
    return params;
}

std::vector<const Parameter*> Model::parameters() const {
    std::vector<const Parameter*> params;
    for (const auto& layer : lstm_layers_) {
        params.push_back(&layer.w_input);
        params.push_back(&layer.w_hidden);
        params.push_back(&layer.bias);
    }
    for (const auto& layer : dense_layers_) {
        params.push_back(&layer.weight);
        params.push_back(&layer.bias);
    }
    params.push_back(&head_.weight);
    params.push_back(&head_.bias);
    return params;
}

void Model::zero_grads() {
    for (Parameter* p : parameters()) p->grad.fill(0.0);
}

void DenseLayer::forward(const double* x, std::size_t batch, double* y) const {
    const std::size_t in = static_cast<std::size_t>(in_dim);
    const std::size_t out = static_cast<std::size_t>(out_dim);
    matmul_nt(x, weight.value.ptr(), y, batch, in, out, false);
    for (std::size_t b = 0; b < batch; ++b) {
        double* yb = y + b * out;
        for (std::size_t j = 0; j < out; ++j) {
            yb[j] += bias.value.data[j];
            if (tanh_activation) yb[j] = std::tanh(yb[j]);
        }
    }
}

void DenseLayer::backward(const double* x, const double* y, const double* dy, std::size_t batch, double* dx) {
    const std::size_t in = static_cast<std::size_t>(in_dim);
    const std::size_t out = static_cast<std::size_t>(out_dim);
    std::vector<double> dz(batch * out);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* yb = y + b * out;
        const double* dyb = dy + b * out;
        double* dzb = dz.data() + b * out;
        for (std::size_t j = 0; j < out; ++j)
            dzb[j] = tanh_activation ? dyb[j] * (1.0 - yb[j] * yb[j]) : dyb[j];
    }
    accumulate_outer(dz.data(), x, weight.grad.ptr(), batch, out, in);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t j = 0; j < out; ++j) bias.grad.data[j] += dz[b * out + j];
    if (dx) matmul_nn(dz.data(), weight.value.ptr(), dx, batch, out, in, false);
}

namespace {

void lstm_forward(const LstmLayer& layer, const double* input_seq, std::size_t w, std::size_t batch,
                  Tape::LstmTrace& trace) {
    const std::size_t in = static_cast<std::size_t>(layer.in_dim);
    const std::size_t hidden = static_cast<std::size_t>(layer.hidden_dim);
    const std::size_t gates = 4 * hidden;
    trace.hidden.assign(w * batch * hidden, 0.0);
    trace.cell.assign(w * batch * hidden, 0.0);
    trace.gates.assign(w * batch * gates, 0.0);

    std::vector<double> z(batch * gates);
    const std::vector<double> zeros(batch * hidden, 0.0);
    const double* bias = layer.bias.value.ptr();

    for (std::size_t t = 0; t < w; ++t) {
        const double* x_t = input_seq + t * batch * in;
        const double* h_prev = t == 0 ? zeros.data() : trace.hidden.data() + (t - 1) * batch * hidden;
        const double* c_prev = t == 0 ? zeros.data() : trace.cell.data() + (t - 1) * batch * hidden;
        matmul_nt(x_t, layer.w_input.value.ptr(), z.data(), batch, in, gates, false);
        matmul_nt(h_prev, layer.w_hidden.value.ptr(), z.data(), batch, hidden, gates, true);

        double* g_t = trace.gates.data() + t * batch * gates;
        double* h_t = trace.hidden.data() + t * batch * hidden;
        double* c_t = trace.cell.data() + t * batch * hidden;
        for (std::size_t b = 0; b < batch; ++b) {
            const double* zb = z.data() + b * gates;
            double* gb = g_t + b * gates;
            double* hb = h_t + b * hidden;
            double* cb = c_t + b * hidden;
            const double* cpb = c_prev + b * hidden;
            for (std::size_t j = 0; j < hidden; ++j) {
                const double gi = sigmoid(zb[j] + bias[j]);
                const double gf = sigmoid(zb[hidden + j] + bias[hidden + j]);
                const double gg = std::tanh(zb[2 * hidden + j] + bias[2 * hidden + j]);
                const double go = sigmoid(zb[3 * hidden + j] + bias[3 * hidden + j]);
                gb[j] = gi;
                gb[hidden + j] = gf;
                gb[2 * hidden + j] = gg;
                gb[3 * hidden + j] = go;
                const double c_new = gf * cpb[j] + gi * gg;
                cb[j] = c_new;
                hb[j] = go * std::tanh(c_new);
            }
        }
    }
}

void lstm_backward(LstmLayer& layer, const Tape::LstmTrace& trace, std::size_t w, std::size_t batch,
                   const double* dh_seq, double* dx_seq) {
    const std::size_t in = static_cast<std::size_t>(layer.in_dim);
    const std::size_t hidden = static_cast<std::size_t>(layer.hidden_dim);
    const std::size_t gates = 4 * hidden;

    std::vector<double> dh_next(batch * hidden, 0.0);
    std::vector<double> dc_next(batch * hidden, 0.0);
    std::vector<double> dz(batch * gates);
    const std::vector<double> zeros(batch * hidden, 0.0);

    for (std::size_t t = w; t-- > 0;) {
        const double* g_t = trace.gates.data() + t * batch * gates;
        const double* c_t = trace.cell.data() + t * batch * hidden;
        const double* c_prev = t == 0 ? zeros.data() : trace.cell.data() + (t - 1) * batch * hidden;
        const double* h_prev = t == 0 ? zeros.data() : trace.hidden.data() + (t - 1) * batch * hidden;
        const double* x_t = trace.input.data() + t * batch * in;

        for (std::size_t b = 0; b < batch; ++b) {
            const double* gb = g_t + b * gates;
            const double* cb = c_t + b * hidden;
            const double* cpb = c_prev + b * hidden;
            const double* dhu = dh_seq + (t * batch + b) * hidden;
            double* dhn = dh_next.data() + b * hidden;
            double* dcn = dc_next.data() + b * hidden;
            double* dzb = dz.data() + b * gates;
            for (std::size_t j = 0; j < hidden; ++j) {
                const double gi = gb[j];
                const double gf = gb[hidden + j];
                const double gg = gb[2 * hidden + j];
                const double go = gb[3 * hidden + j];
                const double tc = std::tanh(cb[j]);
                const double dh = dhu[j] + dhn[j];
                const double dct = dcn[j] + dh * go * (1.0 - tc * tc);
                dzb[j] = dct * gg * gi * (1.0 - gi);                 // input gate
                dzb[hidden + j] = dct * cpb[j] * gf * (1.0 - gf);    // forget gate
                dzb[2 * hidden + j] = dct * gi * (1.0 - gg * gg);    // candidate
                dzb[3 * hidden + j] = dh * tc * go * (1.0 - go);     // output gate
                dcn[j] = dct * gf;
            }
        }
        accumulate_outer(dz.data(), x_t, layer.w_input.grad.ptr(), batch, gates, in);
        accumulate_outer(dz.data(), h_prev, layer.w_hidden.grad.ptr(), batch, gates, hidden);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < gates; ++j) layer.bias.grad.data[j] += dz[b * gates + j];
        if (dx_seq) matmul_nn(dz.data(), layer.w_input.value.ptr(), dx_seq + t * batch * in, batch, gates, in, false);
        matmul_nn(dz.data(), layer.w_hidden.value.ptr(), dh_next.data(), batch, gates, hidden, false);
    }
}

}  // namespace

void dropout_forward(std::span<double> x, double rate, bool training, Rng& rng, double* scale_out) {
    if (!(rate >= 0.0 && rate < 1.0)) raise(ErrorCode::InvalidParams, "dropout rate must lie in [0, 1)");
    if (!training || rate == 0.0) {
        if (scale_out) std::fill(scale_out, scale_out + x.size(), 1.0);
        return;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double scale = rng.uniform01() <= rate ? 0.0 : keep_scale;
        x[i] *= scale;
        if (scale_out) scale_out[i] = scale;
    }
}

void dropout_backward(std::span<double> upstream, const double* scale) {
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] *= scale[i];
}

Tape Model::forward_batch(const double* windows, std::size_t batch, std::size_t w, bool training,
                          Rng* dropout_rng) const {
    if (batch == 0 || w == 0) raise(ErrorCode::ShapeMismatch, "empty batch or window");
    if (training && spec_.dropout_rate > 0.0 && !dropout_rng)
        raise(ErrorCode::InvalidParams, "training-mode dropout needs an rng");

    Tape tape;
    tape.batch = batch;
    tape.window = w;
    tape.training = training;
    const std::size_t feat = static_cast<std::size_t>(spec_.feature_dim);
    const bool use_dropout = training && spec_.dropout_rate > 0.0;

    if (spec_.kind == ModelKind::CLstm) {
        tape.lstm.resize(lstm_layers_.size());
        tape.lstm_dropout.resize(lstm_layers_.size());
        // time-major copy [w][B][feat]
        std::vector<double> cur(w * batch * feat);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < w; ++t)
                std::copy(windows + (b * w + t) * feat, windows + (b * w + t + 1) * feat,
                          cur.begin() + (t * batch + b) * feat);
        for (std::size_t l = 0; l < lstm_layers_.size(); ++l) {
            tape.lstm[l].input = std::move(cur);
            lstm_forward(lstm_layers_[l], tape.lstm[l].input.data(), w, batch, tape.lstm[l]);
            cur = tape.lstm[l].hidden;  // copy; dropout applies to the upward path only
            if (use_dropout) {
                tape.lstm_dropout[l].resize(cur.size());
                dropout_forward(cur, spec_.dropout_rate, true, *dropout_rng, tape.lstm_dropout[l].data());
            }
        }
        const std::size_t top_h = static_cast<std::size_t>(lstm_layers_.back().hidden_dim);
        tape.head_in.assign(cur.end() - static_cast<std::ptrdiff_t>(batch * top_h), cur.end());
    } else {
        // final frame only
        std::vector<double> cur(batch * feat);
        for (std::size_t b = 0; b < batch; ++b)
            std::copy(windows + (b * w + (w - 1)) * feat, windows + (b * w + w) * feat,
                      cur.begin() + b * feat);
        tape.dense_in.resize(dense_layers_.size());
        tape.dense_out.resize(dense_layers_.size());
        tape.dense_dropout.resize(dense_layers_.size());
        for (std::size_t l = 0; l < dense_layers_.size(); ++l) {
            tape.dense_in[l] = std::move(cur);
            tape.dense_out[l].resize(batch * static_cast<std::size_t>(dense_layers_[l].out_dim));
            dense_layers_[l].forward(tape.dense_in[l].data(), batch, tape.dense_out[l].data());
            cur = tape.dense_out[l];
            if (use_dropout) {
                tape.dense_dropout[l].resize(cur.size());
                dropout_forward(cur, spec_.dropout_rate, true, *dropout_rng, tape.dense_dropout[l].data());
            }
        }
        tape.head_in = std::move(cur);
    }

    tape.head_out.resize(batch * static_cast<std::size_t>(head_.out_dim));
    head_.forward(tape.head_in.data(), batch, tape.head_out.data());
    return tape;
}

void Model::backward_batch(const Tape& tape, const double* dhead) {
    const std::size_t batch = tape.batch;
    const std::size_t w = tape.window;
    std::vector<double> d_head_in(tape.head_in.size());
    head_.backward(tape.head_in.data(), tape.head_out.data(), dhead, batch, d_head_in.data());

    if (spec_.kind == ModelKind::CLstm) {
        const std::size_t top = lstm_layers_.size() - 1;
        std::vector<double> dh_seq;
        for (std::size_t l = top + 1; l-- > 0;) {
            const std::size_t hidden = static_cast<std::size_t>(lstm_layers_[l].hidden_dim);
            if (l == top) {
                dh_seq.assign(w * batch * hidden, 0.0);
                std::copy(d_head_in.begin(), d_head_in.end(),
                          dh_seq.begin() + static_cast<std::ptrdiff_t>((w - 1) * batch * hidden));
            }
            if (!tape.lstm_dropout[l].empty())
                dropout_backward(dh_seq, tape.lstm_dropout[l].data());
            if (l > 0) {
                std::vector<double> dx_seq(w * batch * static_cast<std::size_t>(lstm_layers_[l].in_dim));
                lstm_backward(lstm_layers_[l], tape.lstm[l], w, batch, dh_seq.data(), dx_seq.data());
                dh_seq = std::move(dx_seq);
            } else {
                lstm_backward(lstm_layers_[l], tape.lstm[l], w, batch, dh_seq.data(), nullptr);
            }
        }
    } else {
        std::vector<double> d_cur = std::move(d_head_in);
        for (std::size_t l = dense_layers_.size(); l-- > 0;) {
            if (!tape.dense_dropout[l].empty()) dropout_backward(d_cur, tape.dense_dropout[l].data());
            if (l > 0) {
                std::vector<double> dx(batch * static_cast<std::size_t>(dense_layers_[l].in_dim));
                dense_layers_[l].backward(tape.dense_in[l].data(), tape.dense_out[l].data(), d_cur.data(),
                                          batch, dx.data());
                d_cur = std::move(dx);
            } else {
                dense_layers_[l].backward(tape.dense_in[l].data(), tape.dense_out[l].data(), d_cur.data(),
                                          batch, nullptr);
            }
        }
    }
}

std::vector<double> Model::forward_window(std::span<const double> window, std::size_t w) const {
    if (window.size() != w * static_cast<std::size_t>(spec_.feature_dim))
        raise(ErrorCode::ShapeMismatch, "window size != w * feature_dim");
    Tape tape = forward_batch(window.data(), 1, w, false, nullptr);
    return tape.head_out;
}

LossResult loss_sine(std::span<const double> head_out, std::size_t batch,
                     std::span<const double> target_angles, const codec::CodecConfig& config) {
    const std::size_t n = static_cast<std::size_t>(config.n_neurons);
    if (head_out.size() != batch * n || target_angles.size() != batch)
        raise(ErrorCode::ShapeMismatch, "sine loss shape mismatch");
    LossResult result;
    result.grad.assign(batch * n, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        const std::vector<double> target = codec::encode(target_angles[b], config);
        const double* yb = head_out.data() + b * n;
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = yb[i] - target[i];
            sq += d * d;
        }
        const double sample_rmse = std::sqrt(sq / static_cast<double>(n));
        result.loss += sample_rmse;
        if (sample_rmse >= 1e-12) {
            const double scale = 1.0 / (static_cast<double>(n) * sample_rmse * static_cast<double>(batch));
            double* gb = result.grad.data() + b * n;
            for (std::size_t i = 0; i < n; ++i) gb[i] = (yb[i] - target[i]) * scale;
        }
    }
    result.loss /= static_cast<double>(batch);
    return result;
}

LossResult loss_regression(std::span<const double> head_out, std::size_t batch,
                           std::span<const double> target_angles, const codec::CodecConfig& config) {
    if (head_out.size() != batch || target_angles.size() != batch)
        raise(ErrorCode::ShapeMismatch, "regression loss shape mismatch");
    LossResult result;
    result.grad.assign(batch, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        const double d = head_out[b] - target_angles[b] / config.phi_max;
        result.loss += d * d;
        result.grad[b] = 2.0 * d / static_cast<double>(batch);
    }
    result.loss /= static_cast<double>(batch);
    return result;
}

LossResult loss_nll(std::span<const double> logits, std::size_t batch,
                    std::span<const double> target_angles, const codec::CodecConfig& config,
                    std::optional<double> smoothing_variance) {
    const std::size_t n = static_cast<std::size_t>(config.n_neurons);
    if (logits.size() != batch * n || target_angles.size() != batch)
        raise(ErrorCode::ShapeMismatch, "nll loss shape mismatch");
    LossResult result;
    result.grad.assign(batch * n, 0.0);
    std::vector<double> probs(n);
    for (std::size_t b = 0; b < batch; ++b) {
        const std::vector<double> target = codec::encode_bins(target_angles[b], config, smoothing_variance);
        const double* zb = logits.data() + b * n;
        double zmax = zb[0];
        for (std::size_t i = 1; i < n; ++i) zmax = std::max(zmax, zb[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            probs[i] = std::exp(zb[i] - zmax);
            sum += probs[i];
        }
        double sample_loss = 0.0;
        double* gb = result.grad.data() + b * n;
        for (std::size_t i = 0; i < n; ++i) {
            probs[i] /= sum;
            if (target[i] > 0.0) sample_loss -= target[i] * std::log(probs[i]);
            gb[i] = (probs[i] - target[i]) / static_cast<double>(batch);
        }
        result.loss += sample_loss;
    }
    result.loss /= static_cast<double>(batch);
    return result;
}

LossResult head_loss(const ModelSpec& spec, std::span<const double> head_out, std::size_t batch,
                     std::span<const double> target_angles) {
    switch (spec.head) {
        case HeadKind::SineWave: return loss_sine(head_out, batch, target_angles, spec.codec);
        case HeadKind::Regression: return loss_regression(head_out, batch, target_angles, spec.codec);
        case HeadKind::NllBins:
            return loss_nll(head_out, batch, target_angles, spec.codec, spec.nll_smoothing_variance);
    }
    raise(ErrorCode::InvalidParams, "unknown head kind");
}

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& config, std::size_t t) {
    if (t == 0) raise(ErrorCode::InvalidParams, "adam step count is 1-based");
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (Parameter* p : params) {
        const double lr = config.lr_groups.at(static_cast<std::size_t>(p->lr_group));
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad.data[i];
            double& m = p->adam_m.data[i];
            double& v = p->adam_v.data[i];
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = config.beta2 * v + (1.0 - config.beta2) * g * g;
            const double m_hat = m / bc1;
            const double v_hat = v / bc2;
            p->value.data[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

double grad_norm(const std::vector<Parameter*>& params) {
    double sq = 0.0;
    for (const Parameter* p : params)
        for (double g : p->grad.data) sq += g * g;
    return std::sqrt(sq);
}

void clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
    const double norm = grad_norm(params);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (Parameter* p : params)
        for (double& g : p->grad.data) g *= scale;
}

double eval_loss(const Model& model, const double* windows, std::size_t batch, std::size_t w,
                 std::span<const double> target_angles) {
    Tape tape = model.forward_batch(windows, batch, w, false, nullptr);
    return head_loss(model.spec(), tape.head_out, batch, target_angles).loss;
}

double grad_check(Model& model, const double* windows, std::size_t batch, std::size_t w,
                  std::span<const double> target_angles, double epsilon, std::size_t max_scalars,
                  std::uint64_t subsample_seed) {
    if (!(epsilon > 0.0)) raise(ErrorCode::InvalidEpsilon, "epsilon must be > 0");

    model.zero_grads();
    Tape tape = model.forward_batch(windows, batch, w, false, nullptr);
    LossResult loss = head_loss(model.spec(), tape.head_out, batch, target_angles);
    model.backward_batch(tape, loss.grad.data());

    auto params = model.parameters();
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t pi = 0; pi < params.size(); ++pi)
        for (std::size_t i = 0; i < params[pi]->value.size(); ++i) coords.emplace_back(pi, i);
    if (coords.size() > max_scalars) {
        Rng rng = Rng::derive(subsample_seed, 0xC0FFEE);
        rng.shuffle(coords);
        coords.resize(max_scalars);
    }

    double max_rel = 0.0;
    for (auto [pi, i] : coords) {
        double& theta = params[pi]->value.data[i];
        const double saved = theta;
        theta = saved + epsilon;
        const double up = eval_loss(model, windows, batch, w, target_angles);
        theta = saved - epsilon;
        const double down = eval_loss(model, windows, batch, w, target_angles);
        theta = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = params[pi]->grad.data[i];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

}  // namespace sinesteer::nn
