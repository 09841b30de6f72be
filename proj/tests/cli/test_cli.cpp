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
// End-to-end exercise of the command-line tool: full pipeline, refusal
// paths, and byte-level reproducibility. Takes the CLI binary path as its
// only argument.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok)
        ++g_failures;
}

int run(const std::string& cmd) {
    int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: " << argv[0] << " <path-to-cli>\n";
        return 2;
    }
    const std::string cli = argv[1];
    fs::path dir = fs::temp_directory_path() / "uavchan_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string base = dir.string();

    // Small but non-trivial configuration for the pipeline smoke run.
    write_text(dir / "datagen.json", R"({"n_links": 5000, "seed": 11})");
    write_text(dir / "train.json",
               R"({"seed": 4, "link_state": {"epochs": 15}, "vae": {"epochs": 15, "learning_rate": 1e-3}})");
    write_text(dir / "snr.json",
               R"({"x_step_m": 250, "z_step_m": 65, "n_realizations": 10})");

    check(run(cli + " datagen --config " + base + "/datagen.json --out " + base + "/d1") == 0,
          "datagen runs");
    check(fs::exists(dir / "d1/dataset.csv"), "datagen emits dataset.csv");
    check(fs::exists(dir / "d1/manifest.json"), "datagen emits manifest.json");
    check(fs::exists(dir / "d1/config.json"), "datagen emits the effective config");

    check(run(cli + " train --config " + base + "/train.json --data " + base +
              "/d1/dataset.csv --out " + base + "/m1") == 0,
          "train runs");
    check(fs::exists(dir / "m1/model.json"), "train emits model.json");
    check(fs::exists(dir / "m1/losses.csv"), "train emits losses.csv");

    check(run(cli + " eval --model " + base + "/m1/model.json --data " + base +
              "/d1/dataset.csv --out " + base + "/e1") == 0,
          "eval runs");
    for (const char* f : {"eval/metrics.json", "eval/pl_cdf_data.csv", "eval/pl_cdf_model.csv",
                          "eval/plos_grid.csv", "eval/angles_data.csv", "eval/angles_model.csv"})
        check(fs::exists(dir / "e1" / f), std::string("eval emits ") + f);

    check(run(cli + " fit-3gpp --data " + base + "/d1/dataset.csv --which plos --out " + base +
              "/f1") == 0,
          "fit-3gpp plos runs");
    check(fs::exists(dir / "f1/plos_params.json"), "fit-3gpp emits plos_params.json");
    check(run(cli + " fit-3gpp --data " + base + "/d1/dataset.csv --which pathloss --out " +
              base + "/f2") == 0,
          "fit-3gpp pathloss runs");
    check(run(cli + " eval --gpp-plos " + base + "/f1/plos_params.json --gpp-pathloss " + base +
              "/f2/pathloss_params.json --data " + base + "/d1/dataset.csv --out " + base +
              "/e2") == 0,
          "eval accepts fitted baseline parameters");

    check(run(cli + " snr-map --config " + base + "/snr.json --model " + base +
              "/m1/model.json --out " + base + "/s1") == 0,
          "snr-map runs");
    check(fs::exists(dir / "s1/snr_map.csv"), "snr-map emits snr_map.csv");
    check(fs::exists(dir / "s1/snr_map_meta.json"), "snr-map emits metadata");

    // Conditions-driven generation.
    write_text(dir / "conds.csv", "gnb_type,dx_m,dy_m,dz_m\n"
                                  "standard,120,0,58\n"
                                  "dedicated,40,30,60\n");
    check(run(cli + " generate --model " + base + "/m1/model.json --data " + base +
              "/conds.csv --seed 5 --out " + base + "/g1") == 0,
          "generate runs");
    check(fs::exists(dir / "g1/generated.csv"), "generate emits generated.csv");

    // Determinism: identical reruns produce byte-identical numeric outputs.
    check(run(cli + " datagen --config " + base + "/datagen.json --out " + base + "/d2") == 0,
          "datagen rerun");
    check(slurp(dir / "d1/dataset.csv") == slurp(dir / "d2/dataset.csv"),
          "identical datagen reruns are byte-identical");
    check(run(cli + " eval --model " + base + "/m1/model.json --data " + base +
              "/d1/dataset.csv --out " + base + "/e3") == 0,
          "eval rerun");
    check(slurp(dir / "e1/eval/metrics.json") == slurp(dir / "e3/eval/metrics.json"),
          "identical eval reruns are byte-identical");
    check(slurp(dir / "e1/eval/pl_cdf_model.csv") == slurp(dir / "e3/eval/pl_cdf_model.csv"),
          "identical eval reruns reproduce CDF exports");

    // Refusals.
    write_text(dir / "bad.json", R"({"n_links": 100, "typo_key": 1})");
    check(run(cli + " datagen --config " + base + "/bad.json --out " + base + "/dx") != 0,
          "unknown config keys are rejected");

    write_text(dir / "datagen_26.json", R"({"n_links": 300, "oracle": {"carrier_hz": 26e9}})");
    check(run(cli + " datagen --config " + base + "/datagen_26.json --out " + base + "/d26") == 0,
          "datagen at another carrier");
    check(run(cli + " eval --model " + base + "/m1/model.json --data " + base +
              "/d26/dataset.csv --out " + base + "/e26") != 0,
          "eval refuses a model/dataset carrier mismatch");

    check(run(cli + " eval --data " + base + "/d1/dataset.csv --out " + base + "/e4") != 0,
          "eval without a model or parameters is refused");
    check(run(cli + " train --data " + base + "/missing.csv --out " + base + "/m2") != 0,
          "train refuses a missing dataset");

    if (g_failures == 0)
        fs::remove_all(dir);
    std::printf("%s (%d failures)\n", g_failures == 0 ? "CLI TESTS PASSED" : "CLI TESTS FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
