#include "sinesteer/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace sinesteer::nn {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json spec_to_json(const ModelSpec& spec) {
    json j;
    j["kind"] = model_name(spec.kind);
    j["hidden_dims"] = spec.hidden_dims;
    j["head"] = head_name(spec.head);
    j["codec"] = {{"n_neurons", spec.codec.n_neurons}, {"phi_max", spec.codec.phi_max}};
    j["feature_dim"] = spec.feature_dim;
    j["dropout_rate"] = spec.dropout_rate;
    if (spec.nll_smoothing_variance)
        j["nll_smoothing_variance"] = *spec.nll_smoothing_variance;
    else
        j["nll_smoothing_variance"] = nullptr;
    return j;
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec spec;
    spec.kind = model_from_name(j.at("kind").get<std::string>());
    spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
    spec.head = head_from_name(j.at("head").get<std::string>());
    spec.codec.n_neurons = j.at("codec").at("n_neurons").get<int>();
    spec.codec.phi_max = j.at("codec").at("phi_max").get<double>();
    spec.feature_dim = j.at("feature_dim").get<int>();
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    if (j.at("nll_smoothing_variance").is_null())
        spec.nll_smoothing_variance = std::nullopt;
    else
        spec.nll_smoothing_variance = j.at("nll_smoothing_variance").get<double>();
    return spec;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, const TrainState& state) {
    json j;
    j["format_version"] = kFormatVersion;
    j["model"] = spec_to_json(model.spec());
    j["adam"] = {{"step", state.step},
                 {"beta1", state.adam.beta1},
                 {"beta2", state.adam.beta2},
                 {"epsilon", state.adam.epsilon},
                 {"lr_fast", state.adam.lr_groups[0]},
                 {"lr_slow", state.adam.lr_groups[1]}};
    json params = json::array();
    for (const Parameter* p : model.parameters()) {
        json entry;
        entry["name"] = p->name;
        entry["shape"] = p->value.shape;
        entry["value"] = p->value.data;
        entry["adam_m"] = p->adam_m.data;
        entry["adam_v"] = p->adam_v.data;
        entry["lr_group"] = p->lr_group;
        params.push_back(std::move(entry));
    }
    j["params"] = std::move(params);

    const std::vector<std::uint8_t> blob = json::to_cbor(j);
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write checkpoint " + path);
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
}

Model load_checkpoint(const std::string& path, TrainState* state_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open checkpoint " + path);
    std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j;
    try {
        j = json::from_cbor(blob);
    } catch (const json::exception& e) {
        raise(ErrorCode::MalformedFile, path + ": not a checkpoint (" + e.what() + ")");
    }
    if (j.at("format_version").get<int>() != kFormatVersion)
        raise(ErrorCode::MalformedFile, path + ": unsupported checkpoint format version");

    ModelSpec spec = spec_from_json(j.at("model"));
    Rng throwaway(0);
    Model model(spec, throwaway);

    auto params = model.parameters();
    const json& stored = j.at("params");
    if (stored.size() != params.size())
        raise(ErrorCode::MalformedFile, path + ": parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const json& entry = stored[i];
        if (entry.at("name").get<std::string>() != params[i]->name)
            raise(ErrorCode::MalformedFile, path + ": parameter name mismatch at index " + std::to_string(i));
        auto value = entry.at("value").get<std::vector<double>>();
        auto m = entry.at("adam_m").get<std::vector<double>>();
        auto v = entry.at("adam_v").get<std::vector<double>>();
        if (value.size() != params[i]->value.size())
            raise(ErrorCode::MalformedFile, path + ": parameter size mismatch for " + params[i]->name);
        params[i]->value.data = std::move(value);
        params[i]->adam_m.data = std::move(m);
        params[i]->adam_v.data = std::move(v);
        params[i]->lr_group = entry.at("lr_group").get<int>();
    }

    if (state_out) {
        const json& adam = j.at("adam");
        state_out->step = adam.at("step").get<std::size_t>();
        state_out->adam.beta1 = adam.at("beta1").get<double>();
        state_out->adam.beta2 = adam.at("beta2").get<double>();
        state_out->adam.epsilon = adam.at("epsilon").get<double>();
        state_out->adam.lr_groups[0] = adam.at("lr_fast").get<double>();
        state_out->adam.lr_groups[1] = adam.at("lr_slow").get<double>();
    }
    return model;
}

}  // namespace sinesteer::nn
