#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sinesteer/angle_codec.hpp"
#include "sinesteer/rng.hpp"
#include "sinesteer/tensor.hpp"

namespace sinesteer::nn {

/// A learnable tensor together with its gradient and Adam moments.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
    int lr_group = 0;

    static Parameter make(std::string name, std::vector<std::size_t> shape);
};

enum class HeadKind { Regression, NllBins, SineWave };
enum class ModelKind { Feedforward, CLstm };

const char* head_name(HeadKind head);
const char* model_name(ModelKind kind);
HeadKind head_from_name(const std::string& name);
ModelKind model_from_name(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::CLstm;
    std::vector<int> hidden_dims = {64, 64};
    HeadKind head = HeadKind::SineWave;
    codec::CodecConfig codec;
    int feature_dim = 32;
    double dropout_rate = 0.1;
    std::optional<double> nll_smoothing_variance = 80.0;  // deg^2

    int head_width() const { return head == HeadKind::Regression ? 1 : codec.n_neurons; }
    void validate() const;
};

struct DenseLayer {
    Parameter weight;  // [out][in]
    Parameter bias;    // [out]
    bool tanh_activation = true;
    int in_dim = 0;
    int out_dim = 0;

    /// y[batch][out] = (tanh of) x[batch][in] W^T + b.
    void forward(const double* x, std::size_t batch, double* y) const;
    /// Accumulates weight/bias grads; writes dx if non-null. `y` is the
    /// cached forward output (needed for the tanh derivative).
    void backward(const double* x, const double* y, const double* dy, std::size_t batch, double* dx);
};

/// Canonical four-gate LSTM (input, forget, candidate, output gates with
/// sigmoid/sigmoid/tanh/sigmoid activations). Gate blocks are stored in
/// i, f, g, o order along the 4H axis.
struct LstmLayer {
    Parameter w_input;   // [4H][in]
    Parameter w_hidden;  // [4H][H]
    Parameter bias;      // [4H]
    int in_dim = 0;
    int hidden_dim = 0;
};

/// Everything one batched forward records for backpropagation through time.
struct Tape {
    std::size_t batch = 0;
    std::size_t window = 0;
    bool training = false;
    struct LstmTrace {
        std::vector<double> input;   // [w][B][in]  (post-dropout of the layer below)
        std::vector<double> hidden;  // [w][B][H]
        std::vector<double> cell;    // [w][B][H]
        std::vector<double> gates;   // [w][B][4H] activated i,f,g,o
    };
    std::vector<LstmTrace> lstm;
    std::vector<std::vector<double>> lstm_dropout;  // per layer [w][B][H] multipliers
    std::vector<std::vector<double>> dense_in;      // per trunk layer [B][in]
    std::vector<std::vector<double>> dense_out;     // per trunk layer [B][out]
    std::vector<std::vector<double>> dense_dropout;
    std::vector<double> head_in;   // [B][trunk_out]
    std::vector<double> head_out;  // [B][head_width]
};

class Model {
public:
    Model(const ModelSpec& spec, Rng& init_rng);

    const ModelSpec& spec() const { return spec_; }

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;

    /// Deterministic eval-mode forward of one window (row-major [w][feature_dim]).
    /// The feedforward kind uses only the final frame; the C-LSTM carries
    /// state across all frames and emits from the last step (many-to-one).
    std::vector<double> forward_window(std::span<const double> window, std::size_t w) const;

    /// Batched forward over windows [batch][w][feature_dim]. In training
    /// mode, inverted dropout masks are drawn from `dropout_rng`.
    Tape forward_batch(const double* windows, std::size_t batch, std::size_t w, bool training,
                       Rng* dropout_rng) const;

    /// Accumulates parameter gradients for the batch recorded in `tape`;
    /// `dhead` is the loss gradient w.r.t. head outputs [batch][head_width].
    void backward_batch(const Tape& tape, const double* dhead);

    void zero_grads();

    std::vector<LstmLayer>& lstm_layers() { return lstm_layers_; }
    std::vector<DenseLayer>& dense_layers() { return dense_layers_; }
    DenseLayer& head() { return head_; }
    const DenseLayer& head() const { return head_; }

private:
    ModelSpec spec_;
    std::vector<LstmLayer> lstm_layers_;
    std::vector<DenseLayer> dense_layers_;
    DenseLayer head_;
};

struct LossResult {
    double loss = 0.0;
    std::vector<double> grad;  // w.r.t. head outputs, [batch][head_width]
};

/// Waveform loss: per-sample RMSE between the head output and the encoded
/// target wave, averaged over the batch. Below an RMSE of 1e-12 the gradient
/// of the square root is undefined and a zero gradient is returned.
LossResult loss_sine(std::span<const double> head_out, std::size_t batch,
                     std::span<const double> target_angles, const codec::CodecConfig& config);

/// Squared error on the angle normalized to [-1, 1] by phi_max.
LossResult loss_regression(std::span<const double> head_out, std::size_t batch,
                           std::span<const double> target_angles, const codec::CodecConfig& config);

/// Softmax cross-entropy against the (optionally smoothed) bin distribution.
LossResult loss_nll(std::span<const double> logits, std::size_t batch,
                    std::span<const double> target_angles, const codec::CodecConfig& config,
                    std::optional<double> smoothing_variance);

/// Dispatch on the model's head kind.
LossResult head_loss(const ModelSpec& spec, std::span<const double> head_out, std::size_t batch,
                     std::span<const double> target_angles);

/// Inverted dropout. Training mode scales kept elements by 1/(1-rate); eval
/// mode is the identity. The mask (per-element multiplier) is written to
/// `scale_out` when provided.
void dropout_forward(std::span<double> x, double rate, bool training, Rng& rng, double* scale_out);
void dropout_backward(std::span<double> upstream, const double* scale);

struct AdamConfig {
    std::array<double, 2> lr_groups = {1e-3, 1e-5};
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Standard Adam update with bias correction; `t` is the 1-based step count.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& config, std::size_t t);

double grad_norm(const std::vector<Parameter*>& params);
void clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

/// Mean head loss of a batch in eval mode.
double eval_loss(const Model& model, const double* windows, std::size_t batch, std::size_t w,
                 std::span<const double> target_angles);

/// Central-difference check of every parameter scalar (or a seeded random
/// subsample above `max_scalars`) against the analytic gradients, in eval
/// mode. Returns max |a - n| / max(|a|, |n|, 1e-8).
double grad_check(Model& model, const double* windows, std::size_t batch, std::size_t w,
                  std::span<const double> target_angles, double epsilon,
                  std::size_t max_scalars = 10000, std::uint64_t subsample_seed = 0);

}  // namespace sinesteer::nn
