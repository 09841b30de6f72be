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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavchan/airsim.hpp"
#include "uavchan/citygen.hpp"
#include "uavchan/genmodel.hpp"
#include "uavchan/gpp_baseline.hpp"
#include "uavchan/metrics.hpp"

namespace py = pybind11;
using namespace uavchan;

namespace {

// Path sets cross the boundary as (20, 7) float arrays with columns
// [loss_db, aoa_az_deg, aoa_el_deg, aod_az_deg, aod_el_deg, delay_s, is_los].
py::array_t<double> pathset_to_array(const PathSet& paths) {
    py::array_t<double> arr({kMaxPaths, 7});
    auto a = arr.mutable_unchecked<2>();
    for (int k = 0; k < kMaxPaths; ++k) {
        const PathEntry& e = paths.entries[k];
        a(k, 0) = e.loss_db;
        a(k, 1) = e.aoa_az_deg;
        a(k, 2) = e.aoa_el_deg;
        a(k, 3) = e.aod_az_deg;
        a(k, 4) = e.aod_el_deg;
        a(k, 5) = e.delay_s;
        a(k, 6) = e.is_los ? 1.0 : 0.0;
    }
    return arr;
}

PathSet pathset_from_array(const py::array_t<double>& arr) {
    auto a = arr.unchecked<2>();
    if (a.shape(0) != kMaxPaths || a.shape(1) != 7)
        throw std::invalid_argument("path array must have shape (20, 7)");
    PathSet paths;
    for (int k = 0; k < kMaxPaths; ++k) {
        PathEntry& e = paths.entries[k];
        e.loss_db = a(k, 0);
        e.aoa_az_deg = a(k, 1);
        e.aoa_el_deg = a(k, 2);
        e.aod_az_deg = a(k, 3);
        e.aod_el_deg = a(k, 4);
        e.delay_s = a(k, 5);
        e.is_los = a(k, 6) != 0.0;
    }
    return paths;
}

LinkCondition make_condition(const std::string& gnb_type, double dx, double dy, double dz) {
    LinkCondition u;
    u.gnb_type = gnb_type_from_string(gnb_type);
    u.dx_m = dx;
    u.dy_m = dy;
    u.dz_m = dz;
    return u;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-stage generative channel model for mmWave UAV-to-ground links";

    py::class_<OracleConfig>(m, "OracleConfig")
        .def(py::init<>())
        .def_readwrite("env_id", &OracleConfig::env_id)
        .def_readwrite("carrier_hz", &OracleConfig::carrier_hz)
        .def_readwrite("plos_alpha_standard", &OracleConfig::plos_alpha_standard)
        .def_readwrite("plos_alpha_dedicated", &OracleConfig::plos_alpha_dedicated)
        .def_readwrite("nolink_cutoff_m", &OracleConfig::nolink_cutoff_m)
        .def_readwrite("nolink_ramp_m", &OracleConfig::nolink_ramp_m)
        .def_readwrite("nolink_max_frac", &OracleConfig::nolink_max_frac)
        .def_readwrite("nlos_intercept_db", &OracleConfig::nlos_intercept_db)
        .def_readwrite("nlos_exponent", &OracleConfig::nlos_exponent)
        .def_readwrite("nlos_shadow_sigma_db", &OracleConfig::nlos_shadow_sigma_db)
        .def_readwrite("nlos_path_count_mean", &OracleConfig::nlos_path_count_mean)
        .def_readwrite("angle_scale0_deg", &OracleConfig::angle_scale0_deg)
        .def_readwrite("angle_decay_m", &OracleConfig::angle_decay_m)
        .def_readwrite("angle_min_deg", &OracleConfig::angle_min_deg)
        .def_readwrite("excess_delay_mean_s", &OracleConfig::excess_delay_mean_s)
        .def_readwrite("d2d_min_m", &OracleConfig::d2d_min_m)
        .def_readwrite("d2d_max_m", &OracleConfig::d2d_max_m)
        .def_readwrite("dedicated_fraction", &OracleConfig::dedicated_fraction);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("carrier_hz", [](const Dataset& d) { return d.carrier_hz; })
        .def("__len__", [](const Dataset& d) { return d.records.size(); })
        .def("condition",
             [](const Dataset& d, std::size_t i) {
                 const LinkCondition& u = d.records.at(i).condition;
                 return py::make_tuple(to_string(u.gnb_type), u.dx_m, u.dy_m, u.dz_m);
             })
        .def("paths",
             [](const Dataset& d, std::size_t i) { return pathset_to_array(d.records.at(i).paths); })
        .def("link_state",
             [](const Dataset& d, std::size_t i) {
                 return to_string(derive_link_state(d.records.at(i).paths));
             })
        .def("omni_pathloss_samples", [](const Dataset& d) {
            std::vector<double> out;
            for (const auto& rec : d.records)
                if (derive_link_state(rec.paths) != LinkState::NoLink)
                    out.push_back(omni_pathloss(rec.paths));
            return out;
        });

    m.def("generate_city", &generate_city, py::arg("config"), py::arg("n_links"),
          py::arg("seed"), "Generate a synthetic oracle dataset");
    m.def(
        "split",
        [](const Dataset& d, double fraction, std::uint64_t seed) {
            auto [train, test] = split(d, fraction, seed);
            return py::make_tuple(std::move(train), std::move(test));
        },
        py::arg("data"), py::arg("fraction") = 0.75, py::arg("seed") = 1);
    m.def("read_dataset", &read_dataset, py::arg("path"));
    m.def("write_dataset", &write_dataset, py::arg("data"), py::arg("path"));

    py::class_<GenerativeModel>(m, "GenerativeModel")
        .def_property_readonly("carrier_hz",
                               [](const GenerativeModel& m_) { return m_.carrier_hz; })
        .def_property_readonly("env_id", [](const GenerativeModel& m_) { return m_.env_id; })
        .def("save", [](const GenerativeModel& m_, const std::string& path) {
            save_model(m_, path);
        })
        .def(
            "generate",
            [](const GenerativeModel& m_,
               const std::vector<std::tuple<std::string, double, double, double>>& conditions,
               std::uint64_t seed) {
                std::vector<LinkCondition> conds;
                conds.reserve(conditions.size());
                for (const auto& [type, dx, dy, dz] : conditions)
                    conds.push_back(make_condition(type, dx, dy, dz));
                auto paths = generate_batch(m_, conds, seed);
                py::list out;
                for (const auto& p : paths)
                    out.append(pathset_to_array(p));
                return out;
            },
            py::arg("conditions"), py::arg("seed") = 1,
            "Sample one path set per (gnb_type, dx, dy, dz) condition; rows of each\n"
            "returned (20, 7) array are [loss_db, aoa_az_deg, aoa_el_deg, aod_az_deg,\n"
            "aod_el_deg, delay_s, is_los]");

    m.def(
        "train",
        [](const Dataset& data, int link_state_epochs, int vae_epochs, int batch_size,
           double link_state_lr, double vae_lr, std::uint64_t seed) {
            GenerativeTrainConfig cfg;
            cfg.link_state.epochs = link_state_epochs;
            cfg.link_state.batch_size = batch_size;
            cfg.link_state.learning_rate = link_state_lr;
            cfg.link_state.seed = seed;
            cfg.vae.epochs = vae_epochs;
            cfg.vae.batch_size = batch_size;
            cfg.vae.learning_rate = vae_lr;
            cfg.vae.seed = seed + 1;
            return train_generative_model(data, cfg);
        },
        py::arg("data"), py::arg("link_state_epochs") = 50, py::arg("vae_epochs") = 100,
        py::arg("batch_size") = 100, py::arg("link_state_lr") = 1e-3, py::arg("vae_lr") = 1e-4,
        py::arg("seed") = 1);
    m.def("load_model", &load_model, py::arg("path"));

    m.def(
        "predict_state_probs",
        [](const GenerativeModel& m_, const std::string& gnb_type, double dx, double dy,
           double dz) {
            auto p = predict_state_probs(m_.link_state, make_condition(gnb_type, dx, dy, dz));
            return py::make_tuple(p[0], p[1], p[2]);
        },
        py::arg("model"), py::arg("gnb_type"), py::arg("dx"), py::arg("dy"), py::arg("dz"),
        "Probabilities (LOS, NLOS, NoLink)");

    m.def("friis_loss", &friis_loss, py::arg("d3d_m"), py::arg("f_hz"));
    m.def(
        "plos_3gpp",
        [](double h_m, double d2d_m, double h_gnb_m, std::optional<std::array<double, 6>> mult) {
            GppCondition c;
            c.h_m = h_m;
            c.d2d_m = d2d_m;
            c.h_gnb_m = h_gnb_m;
            Alpha3GPP alpha;
            if (mult)
                alpha.multipliers = *mult;
            return plos_3gpp(c, alpha);
        },
        py::arg("h_m"), py::arg("d2d_m"), py::arg("h_gnb_m") = 2.0,
        py::arg("multipliers") = py::none(),
        "Closed-form LOS probability (nominal parameters unless multipliers are given)");
    m.def(
        "pathloss_3gpp",
        [](double h_m, double d2d_m, double h_gnb_m, const std::string& state, double f_hz) {
            GppCondition c;
            c.h_m = h_m;
            c.d2d_m = d2d_m;
            c.h_gnb_m = h_gnb_m;
            LinkState s = state == "LOS" ? LinkState::Los : LinkState::Nlos;
            return pathloss_3gpp(c, s, Beta3GPP::nominal(), f_hz);
        },
        py::arg("h_m"), py::arg("d2d_m"), py::arg("h_gnb_m"), py::arg("state"),
        py::arg("f_hz") = 28e9);

    m.def(
        "wasserstein1",
        [](std::vector<double> p, std::vector<double> q) {
            return wasserstein1(CdfSamples::from(std::move(p)), CdfSamples::from(std::move(q)));
        },
        py::arg("p"), py::arg("q"));
    m.def(
        "omni_pathloss",
        [](const py::array_t<double>& paths) { return omni_pathloss(pathset_from_array(paths)); },
        py::arg("paths"), "Omnidirectional path loss (power sum) of a (20, 7) path array");

    m.def(
        "link_snr",
        [](const py::array_t<double>& paths, const std::string& gnb_type) {
            LinkBudget budget;
            ArrayConfig uav = ArrayConfig::uav_panel();
            ArrayConfig gnb = gnb_type_from_string(gnb_type) == GnbType::Standard
                                  ? ArrayConfig::gnb_standard()
                                  : ArrayConfig::gnb_dedicated();
            return link_snr_db(pathset_from_array(paths), budget, uav, gnb);
        },
        py::arg("paths"), py::arg("gnb_type") = "dedicated",
        "Uplink SNR with the default link budget (-inf when no paths)");

    m.def(
        "snr_map",
        [](const GenerativeModel& m_, const std::string& gnb_type, double x_step, double z_step,
           int n_realizations, std::uint64_t seed) {
            SnrMapConfig cfg;
            cfg.gnb_type = gnb_type_from_string(gnb_type);
            cfg.x_step_m = x_step;
            cfg.z_step_m = z_step;
            cfg.n_realizations = n_realizations;
            cfg.seed = seed;
            SnrMap map = snr_map(m_, cfg);
            py::array_t<double> grid({map.z_m.size(), map.x_m.size()});
            auto g = grid.mutable_unchecked<2>();
            for (std::size_t iz = 0; iz < map.z_m.size(); ++iz)
                for (std::size_t ix = 0; ix < map.x_m.size(); ++ix)
                    g(iz, ix) = map.median_db[iz][ix];
            return py::make_tuple(map.x_m, map.z_m, grid);
        },
        py::arg("model"), py::arg("gnb_type") = "dedicated", py::arg("x_step_m") = 50.0,
        py::arg("z_step_m") = 26.0, py::arg("n_realizations") = 100, py::arg("seed") = 1,
        "Median-SNR map over the UAV position grid; returns (x, z, median_db[z][x])");
}
