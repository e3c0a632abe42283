#pragma once

#include <string>

#include "sinesteer/neural.hpp"

namespace sinesteer::nn {

/// Optimizer state carried alongside the parameters so training can resume.
struct TrainState {
    AdamConfig adam;
    std::size_t step = 0;
};

/// Self-describing CBOR container: format version, model spec, every
/// parameter tensor (name, shape, row-major doubles) and the Adam moments.
/// Doubles are stored as IEEE-754 binary64, so save -> load round-trips
/// bit-exactly.
void save_checkpoint(const std::string& path, const Model& model, const TrainState& state);

Model load_checkpoint(const std::string& path, TrainState* state_out = nullptr);

}  // namespace sinesteer::nn
