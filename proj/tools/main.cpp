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
//
// Command-line entry point. Every command writes its outputs under a run
// directory together with the effective configuration and a manifest; a run
// repeated with the same manifest inputs reproduces its numeric outputs byte
// for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavchan/airsim.hpp"
#include "uavchan/citygen.hpp"
#include "uavchan/genmodel.hpp"
#include "uavchan/gpp_baseline.hpp"
#include "uavchan/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uavchan;

namespace {

// ------------------------------------------------------- config plumbing --

// Overlays user JSON onto defaults, rejecting unknown keys so typos cannot
// silently fall back to defaults.
void merge_strict(json& effective, const json& user, const std::string& scope) {
    if (!user.is_object())
        throw std::runtime_error("config " + scope + ": expected an object");
    for (const auto& [key, value] : user.items()) {
        if (!effective.contains(key))
            throw std::runtime_error("config: unknown key '" + scope + key + "'");
        if (effective[key].is_object() && value.is_object())
            merge_strict(effective[key], value, scope + key + ".");
        else
            effective[key] = value;
    }
}

json load_config(const std::string& path, json defaults) {
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file '" + path + "'");
        json user;
        try {
            in >> user;
        } catch (const json::parse_error& e) {
            throw std::runtime_error("malformed config '" + path + "': " + e.what());
        }
        merge_strict(defaults, user, "");
    }
    return defaults;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(1) << '\n';
}

fs::path prepare_out_dir(const std::string& out) {
    if (out.empty())
        throw std::runtime_error("--out is required");
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::string>& argv_tail, const json& effective,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json manifest{
        {"command", command},
        {"args", argv_tail},
        {"effective_config", effective},
        {"inputs", inputs},
        {"outputs", outputs},
    };
    write_json(manifest, out_dir / "manifest.json");
}

void write_losses_csv(const fs::path& path, const std::vector<std::pair<std::string, const TrainCurve*>>& curves) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "stage,epoch,loss\n";
    char buf[64];
    for (const auto& [stage, curve] : curves)
        for (std::size_t e = 0; e < curve->epoch_loss.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%s,%zu,%.9g\n", stage.c_str(), e + 1,
                          curve->epoch_loss[e]);
            out << buf;
        }
}

// ------------------------------------------------------ default configs ---

json datagen_defaults() {
    OracleConfig c;
    return json{
        {"n_links", 20000},
        {"seed", 1},
        {"oracle",
         json{{"env_id", c.env_id},
              {"carrier_hz", c.carrier_hz},
              {"plos_alpha_standard", c.plos_alpha_standard},
              {"plos_alpha_dedicated", c.plos_alpha_dedicated},
              {"nolink_cutoff_m", c.nolink_cutoff_m},
              {"nolink_ramp_m", c.nolink_ramp_m},
              {"nolink_max_frac", c.nolink_max_frac},
              {"nlos_intercept_db", c.nlos_intercept_db},
              {"nlos_exponent", c.nlos_exponent},
              {"nlos_shadow_sigma_db", c.nlos_shadow_sigma_db},
              {"nlos_path_count_mean", c.nlos_path_count_mean},
              {"angle_scale0_deg", c.angle_scale0_deg},
              {"angle_decay_m", c.angle_decay_m},
              {"angle_min_deg", c.angle_min_deg},
              {"excess_delay_mean_s", c.excess_delay_mean_s},
              {"uav_altitudes_m", c.uav_altitudes_m},
              {"gnb_height_standard_m", c.gnb_height_standard_m},
              {"gnb_height_dedicated_m", c.gnb_height_dedicated_m},
              {"d2d_min_m", c.d2d_min_m},
              {"d2d_max_m", c.d2d_max_m},
              {"dedicated_fraction", c.dedicated_fraction}}},
    };
}

OracleConfig oracle_from_json(const json& j) {
    OracleConfig c;
    c.env_id = j.at("env_id").get<std::string>();
    c.carrier_hz = j.at("carrier_hz").get<double>();
    c.plos_alpha_standard = j.at("plos_alpha_standard").get<std::array<double, 6>>();
    c.plos_alpha_dedicated = j.at("plos_alpha_dedicated").get<std::array<double, 6>>();
    c.nolink_cutoff_m = j.at("nolink_cutoff_m").get<double>();
    c.nolink_ramp_m = j.at("nolink_ramp_m").get<double>();
    c.nolink_max_frac = j.at("nolink_max_frac").get<double>();
    c.nlos_intercept_db = j.at("nlos_intercept_db").get<double>();
    c.nlos_exponent = j.at("nlos_exponent").get<double>();
    c.nlos_shadow_sigma_db = j.at("nlos_shadow_sigma_db").get<double>();
    c.nlos_path_count_mean = j.at("nlos_path_count_mean").get<double>();
    c.angle_scale0_deg = j.at("angle_scale0_deg").get<double>();
    c.angle_decay_m = j.at("angle_decay_m").get<double>();
    c.angle_min_deg = j.at("angle_min_deg").get<double>();
    c.excess_delay_mean_s = j.at("excess_delay_mean_s").get<double>();
    c.uav_altitudes_m = j.at("uav_altitudes_m").get<std::array<double, 4>>();
    c.gnb_height_standard_m = j.at("gnb_height_standard_m").get<double>();
    c.gnb_height_dedicated_m = j.at("gnb_height_dedicated_m").get<double>();
    c.d2d_min_m = j.at("d2d_min_m").get<double>();
    c.d2d_max_m = j.at("d2d_max_m").get<double>();
    c.dedicated_fraction = j.at("dedicated_fraction").get<double>();
    return c;
}

json train_defaults() {
    GenerativeTrainConfig c;
    return json{
        {"seed", 1},
        {"link_state",
         json{{"epochs", c.link_state.epochs},
              {"batch_size", c.link_state.batch_size},
              {"learning_rate", c.link_state.learning_rate}}},
        // The 10000-epoch VAE default suits very large datasets; smaller runs
        // override it.
        {"vae",
         json{{"epochs", c.vae.epochs},
              {"batch_size", c.vae.batch_size},
              {"learning_rate", c.vae.learning_rate}}},
    };
}

GenerativeTrainConfig train_from_json(const json& j) {
    GenerativeTrainConfig c;
    std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    c.link_state.seed = seed;
    c.vae.seed = seed + 1;
    c.link_state.epochs = j.at("link_state").at("epochs").get<int>();
    c.link_state.batch_size = j.at("link_state").at("batch_size").get<int>();
    c.link_state.learning_rate = j.at("link_state").at("learning_rate").get<double>();
    c.vae.epochs = j.at("vae").at("epochs").get<int>();
    c.vae.batch_size = j.at("vae").at("batch_size").get<int>();
    c.vae.learning_rate = j.at("vae").at("learning_rate").get<double>();
    return c;
}

json fit3gpp_defaults() {
    GppFitConfig c;
    return json{
        {"which", "plos"},
        {"seed", 1},
        {"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"learning_rate", c.learning_rate},
        {"gnb_filter", "standard"}, // the benchmark methodology uses standard gNBs
        {"gnb_height_standard_m", c.gnb_height_standard_m},
        {"gnb_height_dedicated_m", c.gnb_height_dedicated_m},
        {"pathloss_target", "omni"},
    };
}

GppFitConfig gppfit_from_json(const json& j) {
    GppFitConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.gnb_height_standard_m = j.at("gnb_height_standard_m").get<double>();
    c.gnb_height_dedicated_m = j.at("gnb_height_dedicated_m").get<double>();
    std::string filter = j.at("gnb_filter").get<std::string>();
    if (filter == "standard")
        c.filter = GppFitConfig::Filter::StandardOnly;
    else if (filter == "dedicated")
        c.filter = GppFitConfig::Filter::DedicatedOnly;
    else if (filter == "all")
        c.filter = GppFitConfig::Filter::All;
    else
        throw std::runtime_error("config: gnb_filter must be standard|dedicated|all");
    return c;
}

json eval_defaults() {
    return json{
        {"seed", 1},
        {"grid", json{{"d2d_bin_m", 20.0}, {"dz_bin_m", 5.0}}},
        {"angle_threshold_db", 30.0},
        {"angle_bin_deg", 5.0},
        {"d3d_bin_m", 100.0},
        {"gnb_filter", "all"},
        {"gnb_height_standard_m", 2.0},
        {"gnb_height_dedicated_m", 30.0},
    };
}

json snrmap_defaults() {
    SnrMapConfig c;
    return json{
        {"gnb_type", "dedicated"},
        {"seed", 1},
        {"x_min_m", c.x_min_m},
        {"x_max_m", c.x_max_m},
        {"x_step_m", c.x_step_m},
        {"z_min_m", c.z_min_m},
        {"z_max_m", c.z_max_m},
        {"z_step_m", c.z_step_m},
        {"n_realizations", c.n_realizations},
        {"nolink_floor_db", c.nolink_floor_db},
        {"gnb_height_standard_m", c.gnb_height_standard_m},
        {"gnb_height_dedicated_m", c.gnb_height_dedicated_m},
        {"budget",
         json{{"carrier_hz", c.budget.carrier_hz},
              {"bandwidth_hz", c.budget.bandwidth_hz},
              {"tx_power_dbm", c.budget.tx_power_dbm},
              {"losses_db", c.budget.losses_db}}},
    };
}

SnrMapConfig snrmap_from_json(const json& j) {
    SnrMapConfig c;
    c.gnb_type = gnb_type_from_string(j.at("gnb_type").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.x_min_m = j.at("x_min_m").get<double>();
    c.x_max_m = j.at("x_max_m").get<double>();
    c.x_step_m = j.at("x_step_m").get<double>();
    c.z_min_m = j.at("z_min_m").get<double>();
    c.z_max_m = j.at("z_max_m").get<double>();
    c.z_step_m = j.at("z_step_m").get<double>();
    c.n_realizations = j.at("n_realizations").get<int>();
    c.nolink_floor_db = j.at("nolink_floor_db").get<double>();
    c.gnb_height_standard_m = j.at("gnb_height_standard_m").get<double>();
    c.gnb_height_dedicated_m = j.at("gnb_height_dedicated_m").get<double>();
    c.budget.carrier_hz = j.at("budget").at("carrier_hz").get<double>();
    c.budget.bandwidth_hz = j.at("budget").at("bandwidth_hz").get<double>();
    c.budget.tx_power_dbm = j.at("budget").at("tx_power_dbm").get<double>();
    c.budget.losses_db = j.at("budget").at("losses_db").get<double>();
    return c;
}

Dataset filter_by_type(const Dataset& data, const std::string& filter) {
    if (filter == "all")
        return data;
    GnbType keep = gnb_type_from_string(filter);
    Dataset out;
    out.carrier_hz = data.carrier_hz;
    for (const auto& rec : data.records)
        if (rec.condition.gnb_type == keep)
            out.records.push_back(rec);
    if (out.records.empty())
        throw std::runtime_error("eval: no links of type '" + filter + "' in the dataset");
    return out;
}

void write_angular_histograms(const AngularHistogram& h, const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "angle_name,d3d_lo_m,d3d_hi_m,rel_angle_lo_deg,rel_angle_hi_deg,fraction\n";
    char buf[128];
    for (int a = 0; a < 4; ++a)
        for (std::size_t di = 0; di + 1 < h.d3d_edges_m.size(); ++di)
            for (std::size_t ai = 0; ai + 1 < h.angle_edges_deg.size(); ++ai) {
                double frac = h.density[a][di][ai];
                if (frac == 0.0)
                    continue;
                std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", kAngleNames[a],
                              h.d3d_edges_m[di], h.d3d_edges_m[di + 1], h.angle_edges_deg[ai],
                              h.angle_edges_deg[ai + 1], frac);
                out << buf;
            }
}

void write_plos_grid(const PlosGridReport& report, const GridSpec& grid, const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "gnb_type,d2d_lo_m,d2d_hi_m,dz_lo_m,dz_hi_m,n_links,empirical_plos,model_plos,"
           "abs_err\n";
    char buf[160];
    for (const auto& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%ld,%.9g,%.9g,%.9g\n",
                      to_string(c.type), c.d2d_lo_m, c.d2d_lo_m + grid.d2d_bin_m, c.dz_lo_m,
                      c.dz_lo_m + grid.dz_bin_m, c.n_links, c.empirical, c.model,
                      std::abs(c.model - c.empirical));
        out << buf;
    }
}

// ------------------------------------------------------------ commands ----

int cmd_datagen(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                const std::string& out, const std::vector<std::string>& argv_tail) {
    json effective = load_config(config_path, datagen_defaults());
    if (seed_override)
        effective["seed"] = *seed_override;
    fs::path out_dir = prepare_out_dir(out);

    OracleConfig cfg = oracle_from_json(effective.at("oracle"));
    std::size_t n = effective.at("n_links").get<std::size_t>();
    std::uint64_t seed = effective.at("seed").get<std::uint64_t>();

    Dataset data = generate_city(cfg, n, seed);
    fs::path data_path = out_dir / "dataset.csv";
    write_dataset(data, data_path.string());

    write_json(effective, out_dir / "config.json");
    write_manifest(out_dir, "datagen", argv_tail, effective, {}, {"dataset.csv"});
    std::cout << "wrote " << data.records.size() << " links to " << data_path.string() << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_override,
              const std::string& data_path, const std::string& out,
              const std::vector<std::string>& argv_tail) {
    json effective = load_config(config_path, train_defaults());
    if (seed_override)
        effective["seed"] = *seed_override;
    fs::path out_dir = prepare_out_dir(out);
    if (data_path.empty())
        throw std::runtime_error("train: --data is required");

    Dataset train_data = read_dataset(data_path);
    GenerativeTrainConfig cfg = train_from_json(effective);

    TrainCurve ls_curve, vae_curve;
    GenerativeModel model = train_generative_model(train_data, cfg, &ls_curve, &vae_curve);

    fs::path model_path = out_dir / "model.json";
    save_model(model, model_path.string());
    write_losses_csv(out_dir / "losses.csv",
                     {{"link_state", &ls_curve}, {"vae", &vae_curve}});
    write_json(effective, out_dir / "config.json");
    write_manifest(out_dir, "train", argv_tail, effective, {data_path},
                   {"model.json", "losses.csv"});
    std::cout << "trained on " << train_data.records.size() << " links; model at "
              << model_path.string() << "\n";
    return 0;
}

int cmd_generate(const std::string& model_path, const std::string& conditions_path,
                 std::uint64_t seed, const std::string& out,
                 const std::vector<std::string>& argv_tail) {
    fs::path out_dir = prepare_out_dir(out);
    if (model_path.empty() || conditions_path.empty())
        throw std::runtime_error("generate: --model and --data (conditions CSV) are required");

    GenerativeModel model = load_model(model_path);
    std::vector<LinkCondition> conds = read_conditions(conditions_path);
    std::vector<PathSet> paths = generate_batch(model, conds, seed);

    Dataset generated;
    generated.carrier_hz = model.carrier_hz;
    for (std::size_t i = 0; i < conds.size(); ++i) {
        LinkRecord rec;
        rec.env_id = model.env_id.empty() ? "generated" : model.env_id;
        rec.condition = conds[i];
        rec.paths = paths[i];
        generated.records.push_back(std::move(rec));
    }
    fs::path gen_path = out_dir / "generated.csv";
    write_dataset(generated, gen_path.string());

    json effective{{"seed", seed}};
    write_json(effective, out_dir / "config.json");
    write_manifest(out_dir, "generate", argv_tail, effective, {model_path, conditions_path},
                   {"generated.csv"});
    std::cout << "generated " << generated.records.size() << " links to " << gen_path.string()
              << "\n";
    return 0;
}

int cmd_fit3gpp(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                const std::string& data_path, const std::string& which_flag,
                const std::string& out, const std::vector<std::string>& argv_tail) {
    json effective = load_config(config_path, fit3gpp_defaults());
    if (seed_override)
        effective["seed"] = *seed_override;
    if (!which_flag.empty())
        effective["which"] = which_flag;
    fs::path out_dir = prepare_out_dir(out);
    if (data_path.empty())
        throw std::runtime_error("fit-3gpp: --data is required");

    Dataset train_data = read_dataset(data_path);
    GppFitConfig cfg = gppfit_from_json(effective);
    std::string which = effective.at("which").get<std::string>();

    TrainCurve curve;
    std::string params_name;
    if (which == "plos") {
        Alpha3GPP alpha = fit_plos(train_data, cfg, &curve);
        params_name = "plos_params.json";
        save_alpha(alpha, (out_dir / params_name).string());
    } else if (which == "pathloss") {
        std::string target = effective.at("pathloss_target").get<std::string>();
        PathlossTarget t;
        if (target == "omni")
            t = PathlossTarget::OmniPowerSum;
        else if (target == "strongest")
            t = PathlossTarget::StrongestPath;
        else
            throw std::runtime_error("config: pathloss_target must be omni|strongest");
        Beta3GPP beta = fit_pathloss(train_data, cfg, t, &curve);
        params_name = "pathloss_params.json";
        save_beta(beta, (out_dir / params_name).string());
    } else {
        throw std::runtime_error("fit-3gpp: --which must be plos or pathloss");
    }

    write_losses_csv(out_dir / "losses.csv", {{which, &curve}});
    write_json(effective, out_dir / "config.json");
    write_manifest(out_dir, "fit-3gpp", argv_tail, effective, {data_path},
                   {params_name, "losses.csv"});
    std::cout << "fitted " << which << " parameters to " << (out_dir / params_name).string()
              << "\n";
    return 0;
}

int cmd_eval(const std::string& config_path, std::optional<std::uint64_t> seed_override,
             const std::string& model_path, const std::string& gpp_plos_path,
             const std::string& gpp_pathloss_path, const std::string& data_path,
             const std::string& out, const std::vector<std::string>& argv_tail) {
    json effective = load_config(config_path, eval_defaults());
    if (seed_override)
        effective["seed"] = *seed_override;
    fs::path out_dir = prepare_out_dir(out);
    fs::path eval_dir = out_dir / "eval";
    fs::create_directories(eval_dir);
    if (data_path.empty())
        throw std::runtime_error("eval: --data is required");
    bool use_model = !model_path.empty();
    bool use_gpp = !gpp_plos_path.empty() || !gpp_pathloss_path.empty();
    if (use_model == use_gpp)
        throw std::runtime_error(
            "eval: pass either --model or 3GPP parameter files (--gpp-plos/--gpp-pathloss)");

    Dataset test = read_dataset(data_path);
    test = filter_by_type(test, effective.at("gnb_filter").get<std::string>());

    GridSpec grid;
    grid.d2d_bin_m = effective.at("grid").at("d2d_bin_m").get<double>();
    grid.dz_bin_m = effective.at("grid").at("dz_bin_m").get<double>();
    double angle_threshold = effective.at("angle_threshold_db").get<double>();
    double angle_bin = effective.at("angle_bin_deg").get<double>();
    double d3d_bin = effective.at("d3d_bin_m").get<double>();
    std::uint64_t seed = effective.at("seed").get<std::uint64_t>();

    json metrics;
    std::vector<std::string> outputs;

    // Test-data statistics common to both evaluation routes.
    std::vector<double> data_pl;
    for (const auto& rec : test.records)
        if (derive_link_state(rec.paths) != LinkState::NoLink)
            data_pl.push_back(omni_pathloss(rec.paths));
    if (data_pl.empty())
        throw std::runtime_error("eval: test data has no links with paths");
    CdfSamples data_cdf = CdfSamples::from(std::move(data_pl));
    export_cdf(data_cdf, (eval_dir / "pl_cdf_data.csv").string());
    outputs.push_back("eval/pl_cdf_data.csv");

    if (use_model) {
        GenerativeModel model = load_model(model_path);
        if (std::abs(model.carrier_hz - test.carrier_hz) > 1.0)
            throw std::runtime_error("eval: model carrier " + std::to_string(model.carrier_hz) +
                                     " Hz does not match dataset carrier " +
                                     std::to_string(test.carrier_hz) + " Hz");

        // Generate one sample per test condition and compare distributions.
        std::vector<LinkCondition> conds;
        for (const auto& rec : test.records)
            conds.push_back(rec.condition);
        std::vector<PathSet> gen = generate_batch(model, conds, seed);

        Dataset gen_data;
        gen_data.carrier_hz = model.carrier_hz;
        std::vector<double> gen_pl;
        for (std::size_t i = 0; i < gen.size(); ++i) {
            LinkRecord rec;
            rec.env_id = "generated";
            rec.condition = conds[i];
            rec.paths = gen[i];
            gen_data.records.push_back(std::move(rec));
            if (derive_link_state(gen[i]) != LinkState::NoLink)
                gen_pl.push_back(omni_pathloss(gen[i]));
        }
        if (gen_pl.empty())
            throw std::runtime_error("eval: the model generated no links with paths");
        CdfSamples gen_cdf = CdfSamples::from(std::move(gen_pl));
        export_cdf(gen_cdf, (eval_dir / "pl_cdf_model.csv").string());
        outputs.push_back("eval/pl_cdf_model.csv");
        metrics["wasserstein1_pathloss_db"] = wasserstein1(data_cdf, gen_cdf);

        PlosFn model_fn = [&model](double d2d, double dz, GnbType type) {
            LinkCondition u;
            u.dx_m = d2d;
            u.dz_m = dz;
            u.gnb_type = type;
            if (u.d3d() <= 0.0)
                u.dx_m = 0.1;
            return predict_state_probs(model.link_state, u)[0];
        };
        PlosGridReport report = plos_grid_mae(model_fn, test, grid);
        write_plos_grid(report, grid, eval_dir / "plos_grid.csv");
        outputs.push_back("eval/plos_grid.csv");
        metrics["plos_grid_mae"] = report.mae;

        AngularHistogram data_hist =
            angular_distribution(test, angle_threshold, d3d_bin, angle_bin);
        AngularHistogram gen_hist =
            angular_distribution(gen_data, angle_threshold, d3d_bin, angle_bin);
        write_angular_histograms(data_hist, eval_dir / "angles_data.csv");
        write_angular_histograms(gen_hist, eval_dir / "angles_model.csv");
        outputs.push_back("eval/angles_data.csv");
        outputs.push_back("eval/angles_model.csv");
    } else {
        double h_std = effective.at("gnb_height_standard_m").get<double>();
        double h_ded = effective.at("gnb_height_dedicated_m").get<double>();
        GppFitConfig hcfg;
        hcfg.gnb_height_standard_m = h_std;
        hcfg.gnb_height_dedicated_m = h_ded;

        if (!gpp_plos_path.empty()) {
            Alpha3GPP alpha = load_alpha(gpp_plos_path);
            PlosFn gpp_fn = [&](double d2d, double dz, GnbType type) {
                GppCondition c;
                c.h_gnb_m = (type == GnbType::Standard) ? h_std : h_ded;
                c.h_m = c.h_gnb_m + dz;
                c.d2d_m = d2d;
                if (c.h_m < 1.5 || c.h_m > 300.0)
                    return 0.0; // outside validity; counted as certain non-LOS
                return plos_3gpp(c, alpha);
            };
            PlosGridReport report = plos_grid_mae(gpp_fn, test, grid);
            write_plos_grid(report, grid, eval_dir / "plos_grid.csv");
            outputs.push_back("eval/plos_grid.csv");
            metrics["plos_grid_mae"] = report.mae;
        }
        if (!gpp_pathloss_path.empty()) {
            Beta3GPP beta = load_beta(gpp_pathloss_path);
            // Predicted path loss per test link at its observed state.
            std::vector<double> pred;
            for (const auto& rec : test.records) {
                LinkState s = derive_link_state(rec.paths);
                if (s == LinkState::NoLink)
                    continue;
                GppCondition c = gpp_condition_from_link(rec.condition, hcfg);
                if (c.h_m < 1.5 || c.h_m > 300.0)
                    continue;
                pred.push_back(pathloss_3gpp(c, s, beta, test.carrier_hz));
            }
            if (pred.empty())
                throw std::runtime_error("eval: no valid links for the path-loss baseline");
            CdfSamples pred_cdf = CdfSamples::from(std::move(pred));
            export_cdf(pred_cdf, (eval_dir / "pl_cdf_model.csv").string());
            outputs.push_back("eval/pl_cdf_model.csv");
            metrics["wasserstein1_pathloss_db"] = wasserstein1(data_cdf, pred_cdf);
        }
    }

    write_json(metrics, eval_dir / "metrics.json");
    outputs.push_back("eval/metrics.json");
    write_json(effective, out_dir / "config.json");
    std::vector<std::string> inputs{data_path};
    if (use_model)
        inputs.push_back(model_path);
    if (!gpp_plos_path.empty())
        inputs.push_back(gpp_plos_path);
    if (!gpp_pathloss_path.empty())
        inputs.push_back(gpp_pathloss_path);
    write_manifest(out_dir, "eval", argv_tail, effective, inputs, outputs);
    std::cout << "evaluation metrics written to " << (eval_dir / "metrics.json").string() << "\n";
    return 0;
}

int cmd_snrmap(const std::string& config_path, std::optional<std::uint64_t> seed_override,
               const std::string& model_path, const std::string& out,
               const std::vector<std::string>& argv_tail) {
    json effective = load_config(config_path, snrmap_defaults());
    if (seed_override)
        effective["seed"] = *seed_override;
    fs::path out_dir = prepare_out_dir(out);
    if (model_path.empty())
        throw std::runtime_error("snr-map: --model is required");

    GenerativeModel model = load_model(model_path);
    SnrMapConfig cfg = snrmap_from_json(effective);
    SnrMap map = snr_map(model, cfg);
    write_snr_map(map, (out_dir / "snr_map.csv").string(),
                  (out_dir / "snr_map_meta.json").string());

    write_json(effective, out_dir / "config.json");
    write_manifest(out_dir, "snr-map", argv_tail, effective, {model_path},
                   {"snr_map.csv", "snr_map_meta.json"});
    std::cout << "SNR map written to " << (out_dir / "snr_map.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uavchan: generative channel modeling for mmWave UAV-to-ground links"};
    app.require_subcommand(1);

    std::string config_path, data_path, model_path, out_path, which, conditions_path;
    std::string gpp_plos_path, gpp_pathloss_path;
    std::optional<std::uint64_t> seed_opt;
    std::uint64_t gen_seed = 1;

    auto* datagen = app.add_subcommand("datagen", "Generate a synthetic oracle dataset");
    datagen->add_option("--config", config_path, "JSON config file");
    datagen->add_option("--seed", seed_opt, "Seed override");
    datagen->add_option("--out", out_path, "Output run directory")->required();

    auto* train = app.add_subcommand("train", "Train the two-stage generative model");
    train->add_option("--config", config_path, "JSON config file");
    train->add_option("--seed", seed_opt, "Seed override");
    train->add_option("--data", data_path, "Training dataset CSV")->required();
    train->add_option("--out", out_path, "Output run directory")->required();

    auto* generate = app.add_subcommand("generate", "Sample path sets for given conditions");
    generate->add_option("--model", model_path, "Trained model JSON")->required();
    generate->add_option("--data", conditions_path, "Conditions CSV")->required();
    generate->add_option("--seed", gen_seed, "Generation seed");
    generate->add_option("--out", out_path, "Output run directory")->required();

    auto* fit = app.add_subcommand("fit-3gpp", "Refit the closed-form baselines");
    fit->add_option("--config", config_path, "JSON config file");
    fit->add_option("--seed", seed_opt, "Seed override");
    fit->add_option("--data", data_path, "Training dataset CSV")->required();
    fit->add_option("--which", which, "plos or pathloss");
    fit->add_option("--out", out_path, "Output run directory")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a model or baseline on test data");
    eval->add_option("--config", config_path, "JSON config file");
    eval->add_option("--seed", seed_opt, "Seed override");
    eval->add_option("--model", model_path, "Trained model JSON");
    eval->add_option("--gpp-plos", gpp_plos_path, "Fitted P_LOS parameter JSON");
    eval->add_option("--gpp-pathloss", gpp_pathloss_path, "Fitted path-loss parameter JSON");
    eval->add_option("--data", data_path, "Test dataset CSV")->required();
    eval->add_option("--out", out_path, "Output run directory")->required();

    auto* snrmap = app.add_subcommand("snr-map", "Median-SNR map over a UAV position grid");
    snrmap->add_option("--config", config_path, "JSON config file");
    snrmap->add_option("--seed", seed_opt, "Seed override");
    snrmap->add_option("--model", model_path, "Trained model JSON")->required();
    snrmap->add_option("--out", out_path, "Output run directory")->required();

    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> argv_tail;
    for (int i = 1; i < argc; ++i)
        argv_tail.emplace_back(argv[i]);

    try {
        if (datagen->parsed())
            return cmd_datagen(config_path, seed_opt, out_path, argv_tail);
        if (train->parsed())
            return cmd_train(config_path, seed_opt, data_path, out_path, argv_tail);
        if (generate->parsed())
            return cmd_generate(model_path, conditions_path, gen_seed, out_path, argv_tail);
        if (fit->parsed())
            return cmd_fit3gpp(config_path, seed_opt, data_path, which, out_path, argv_tail);
        if (eval->parsed())
            return cmd_eval(config_path, seed_opt, model_path, gpp_plos_path, gpp_pathloss_path,
                            data_path, out_path, argv_tail);
        if (snrmap->parsed())
            return cmd_snrmap(config_path, seed_opt, model_path, out_path, argv_tail);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
