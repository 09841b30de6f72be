// SPDX-License-Identifier: Apache-2.0
//
// uavchan - generative channel modeling for mmWave UAV-to-ground links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "uavchan/genmodel.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace uavchan {

using nlohmann::json;

LatentDraw LatentDraw::from_rng(Rng& rng) {
    LatentDraw d;
    d.z_state = rng.uniform();
    for (double& z : d.z_nlos)
        z = rng.normal();
    for (double& z : d.z_out)
        z = rng.normal();
    return d;
}

GenerativeModel train_generative_model(const Dataset& train, const GenerativeTrainConfig& cfg,
                                       TrainCurve* link_state_curve, TrainCurve* vae_curve) {
    GenerativeModel model;
    model.carrier_hz = train.carrier_hz;
    model.env_id = train.records.empty() ? "" : train.records.front().env_id;
    model.codec = fit_codec_scalers(train);
    model.link_state = train_link_state(train, cfg.link_state, link_state_curve);
    model.vae = train_vae(train, model.codec, cfg.vae, vae_curve);
    return model;
}

PathSet generate_link(const GenerativeModel& model, const LinkCondition& u,
                      const LatentDraw& draw) {
    if (!model.trained())
        throw std::logic_error("generate_link: model not trained");

    auto probs = predict_state_probs(model.link_state, u);
    LinkState s = sample_state(probs, draw.z_state);
    if (s == LinkState::NoLink)
        return PathSet{};

    auto v_path = transform_path_condition(model.vae, u, s);
    PathVector y = sample_y(model.vae, v_path, draw.z_nlos, draw.z_out);
    PathSet nlos = decode_nlos(y, u.displacement(), model.carrier_hz, model.codec,
                               model.absent_eps);
    return assemble_full_pathset(nlos, s, u.displacement(), model.carrier_hz);
}

std::vector<PathSet> generate_batch(const GenerativeModel& model,
                                    const std::vector<LinkCondition>& conditions,
                                    std::uint64_t seed) {
    Rng root(seed);
    std::vector<PathSet> out(conditions.size());
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        Rng sub = root.substream(i);
        out[i] = generate_link(model, conditions[i], LatentDraw::from_rng(sub));
    }
    return out;
}

// ------------------------------------------------------- persistence ------

namespace {

json scaler_to_json(const MinMaxScaler& s) {
    return json{{"lower", s.lower()}, {"upper", s.upper()}};
}

MinMaxScaler scaler_from_json(const json& j) {
    return MinMaxScaler::from_limits(j.at("lower").get<std::vector<double>>(),
                                     j.at("upper").get<std::vector<double>>());
}

json net_to_json(const DenseNet& net) {
    return json{
        {"layer_sizes", net.layer_sizes},
        {"hidden_activation", "relu"},
        {"output_activation",
         net.output_activation == OutputActivation::Softmax ? "softmax" : "linear"},
        {"weights_row_major", net.weights},
        {"biases", net.biases},
    };
}

DenseNet net_from_json(const json& j) {
    DenseNet net;
    net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    std::string act = j.at("output_activation").get<std::string>();
    if (act == "softmax")
        net.output_activation = OutputActivation::Softmax;
    else if (act == "linear")
        net.output_activation = OutputActivation::Linear;
    else
        throw std::runtime_error("model file: unknown output activation '" + act + "'");
    net.weights = j.at("weights_row_major").get<std::vector<std::vector<double>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    if (net.weights.size() + 1 != net.layer_sizes.size() ||
        net.biases.size() != net.weights.size())
        throw std::runtime_error("model file: layer/weight count mismatch");
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        std::size_t expect_w = static_cast<std::size_t>(net.layer_sizes[l]) * net.layer_sizes[l + 1];
        if (net.weights[l].size() != expect_w ||
            net.biases[l].size() != static_cast<std::size_t>(net.layer_sizes[l + 1]))
            throw std::runtime_error("model file: weight shape mismatch at layer " +
                                     std::to_string(l));
    }
    return net;
}

} // namespace

void save_model(const GenerativeModel& model, const std::string& path) {
    json j{
        {"format", kModelFormat},
        {"version", kModelFormatVersion},
        {"carrier_hz", model.carrier_hz},
        {"env_id", model.env_id},
        {"absent_eps", model.absent_eps},
        // 20 path-major blocks of [gain, rel_aoa_az, rel_aoa_el, rel_aod_az,
        // rel_aod_el, excess_delay]
        {"path_vector_layout", "path-major-6"},
        {"link_state",
         json{{"scaler", scaler_to_json(model.link_state.scaler)},
              {"classifier", net_to_json(model.link_state.classifier)}}},
        {"vae",
         json{{"cond_scaler", scaler_to_json(model.vae.cond_scaler)},
              {"latent_dim", model.vae.latent_dim},
              {"encoder", net_to_json(model.vae.encoder)},
              {"decoder", net_to_json(model.vae.decoder)}}},
        {"codec",
         json{{"gain_scaler", scaler_to_json(model.codec.gain)},
              {"delay_scaler", scaler_to_json(model.codec.delay)}}},
    };
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
    if (!out)
        throw std::runtime_error("save_model: write failed for '" + path + "'");
}

GenerativeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_model: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_model: malformed model file '" + path + "': " + e.what());
    }
    if (!j.contains("format") || j.at("format").get<std::string>() != kModelFormat)
        throw std::runtime_error("load_model: '" + path + "' is not a " + kModelFormat +
                                 " document");
    int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
        throw std::runtime_error("load_model: unsupported model version " +
                                 std::to_string(version) + " (expected " +
                                 std::to_string(kModelFormatVersion) + ")");

    GenerativeModel m;
    m.carrier_hz = j.at("carrier_hz").get<double>();
    m.env_id = j.at("env_id").get<std::string>();
    m.absent_eps = j.at("absent_eps").get<double>();
    m.link_state.scaler = scaler_from_json(j.at("link_state").at("scaler"));
    m.link_state.classifier = net_from_json(j.at("link_state").at("classifier"));
    m.vae.cond_scaler = scaler_from_json(j.at("vae").at("cond_scaler"));
    m.vae.latent_dim = j.at("vae").at("latent_dim").get<int>();
    m.vae.encoder = net_from_json(j.at("vae").at("encoder"));
    m.vae.decoder = net_from_json(j.at("vae").at("decoder"));
    m.codec.gain = scaler_from_json(j.at("codec").at("gain_scaler"));
    m.codec.delay = scaler_from_json(j.at("codec").at("delay_scaler"));
    return m;
}

} // namespace uavchan
