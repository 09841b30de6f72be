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

#include "uavchan/domain.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace uavchan {

namespace {
constexpr double kDegPerRad = 180.0 / std::numbers::pi;
} // namespace

double wrap_azimuth_deg(double az_deg) {
    double a = std::fmod(az_deg, 360.0);
    if (a > 180.0)
        a -= 360.0;
    else if (a <= -180.0)
        a += 360.0;
    return a;
}

double wrap_elevation_deg(double el_deg) {
    // Reflect into [0, 180]: angles past a pole fold back.
    double e = std::fmod(el_deg, 360.0);
    if (e < 0.0)
        e += 360.0;
    if (e > 180.0)
        e = 360.0 - e;
    return e;
}

Vec3 direction_from_angles(double az_deg, double el_deg) {
    double az = az_deg / kDegPerRad;
    double el = el_deg / kDegPerRad;
    double se = std::sin(el);
    return {se * std::cos(az), se * std::sin(az), std::cos(el)};
}

void angles_from_direction(const Vec3& dir, double& az_deg, double& el_deg) {
    double n = dir.norm();
    if (n <= 0.0)
        throw std::invalid_argument("angles_from_direction: zero direction");
    double cz = std::clamp(dir.z / n, -1.0, 1.0);
    el_deg = std::acos(cz) * kDegPerRad;
    if (dir.x == 0.0 && dir.y == 0.0)
        az_deg = 0.0; // azimuth undefined at the poles; fix a reference
    else
        az_deg = wrap_azimuth_deg(std::atan2(dir.y, dir.x) * kDegPerRad);
}

int PathSet::present_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.present())
            ++n;
    return n;
}

bool PathSet::has_los() const {
    for (const auto& e : entries)
        if (e.present() && e.is_los)
            return true;
    return false;
}

void PathSet::compact() {
    std::stable_partition(entries.begin(), entries.end(),
                          [](const PathEntry& e) { return e.present(); });
}

const char* to_string(GnbType t) {
    return t == GnbType::Standard ? "standard" : "dedicated";
}

GnbType gnb_type_from_string(const std::string& s) {
    if (s == "standard")
        return GnbType::Standard;
    if (s == "dedicated")
        return GnbType::Dedicated;
    throw std::invalid_argument("unknown gNB type: '" + s + "'");
}

const char* to_string(LinkState s) {
    switch (s) {
    case LinkState::Los:
        return "LOS";
    case LinkState::Nlos:
        return "NLOS";
    default:
        return "NoLink";
    }
}

LinkState derive_link_state(const PathSet& paths) {
    bool any_present = false;
    for (const auto& e : paths.entries) {
        if (!e.present())
            continue;
        if (e.is_los)
            return LinkState::Los;
        any_present = true;
    }
    return any_present ? LinkState::Nlos : LinkState::NoLink;
}

ValidationReport validate_record(const LinkRecord& rec) {
    ValidationReport report;
    auto flag = [&](const std::string& msg) { report.violations.push_back(msg); };

    if (rec.condition.d3d() <= 0.0)
        flag("zero displacement: d3D must be > 0");

    bool seen_absent = false;
    int los_count = 0;
    for (int k = 0; k < kMaxPaths; ++k) {
        const PathEntry& e = rec.paths.entries[k];
        std::string tag = "path " + std::to_string(k) + ": ";
        if (e.loss_db <= 0.0 || e.loss_db > kAbsentLossDb) {
            flag(tag + "loss_db out of (0, 200]");
            continue;
        }
        if (!e.present()) {
            seen_absent = true;
            if (e.aoa_az_deg != 0.0 || e.aoa_el_deg != 0.0 || e.aod_az_deg != 0.0 ||
                e.aod_el_deg != 0.0 || e.delay_s != 0.0 || e.is_los)
                flag(tag + "absent path has nonzero fields");
            continue;
        }
        if (seen_absent)
            flag(tag + "present path after an absent slot");
        if (e.aoa_az_deg <= -180.0 || e.aoa_az_deg > 180.0)
            flag(tag + "aoa azimuth out of (-180, 180]");
        if (e.aod_az_deg <= -180.0 || e.aod_az_deg > 180.0)
            flag(tag + "aod azimuth out of (-180, 180]");
        if (e.aoa_el_deg < 0.0 || e.aoa_el_deg > 180.0)
            flag(tag + "aoa elevation out of [0, 180]");
        if (e.aod_el_deg < 0.0 || e.aod_el_deg > 180.0)
            flag(tag + "aod elevation out of [0, 180]");
        if (e.delay_s < 0.0)
            flag(tag + "negative delay");
        if (e.is_los) {
            ++los_count;
            if (k != 0)
                flag(tag + "LOS not at index 0");
        }
    }
    if (los_count > 1)
        flag("more than one LOS entry");
    return report;
}

} // namespace uavchan
