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

#ifndef UAVCHAN_DOMAIN_HPP
#define UAVCHAN_DOMAIN_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace uavchan {

constexpr double kSpeedOfLight = 299792458.0; // m/s
constexpr double kAbsentLossDb = 200.0;       // in-band marker for a missing path
constexpr int kMaxPaths = 20;                 // fixed number of path slots per link
constexpr int kParamsPerPath = 6;             // loss, 4 angles, delay
constexpr double kDefaultCarrierHz = 28e9;

// Simple 3-vector, meters.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

// Angle conventions used throughout:
//   azimuth in (-180, 180] degrees, atan2(y, x)
//   elevation in [0, 180] degrees, measured from zenith (+z)
double wrap_azimuth_deg(double az_deg);          // wraps any angle into (-180, 180]
double wrap_elevation_deg(double el_deg);        // reflects any angle into [0, 180]
Vec3 direction_from_angles(double az_deg, double el_deg);
void angles_from_direction(const Vec3& dir, double& az_deg, double& el_deg);

// One propagation path. loss_db == 200 exactly marks an absent slot; absent
// slots carry zeros in every other field.
struct PathEntry {
    double loss_db = kAbsentLossDb;
    double aoa_az_deg = 0.0; // arrival azimuth at the gNB
    double aoa_el_deg = 0.0; // arrival elevation at the gNB, from zenith
    double aod_az_deg = 0.0; // departure azimuth at the UAV
    double aod_el_deg = 0.0; // departure elevation at the UAV, from zenith
    double delay_s = 0.0;    // absolute propagation delay
    bool is_los = false;

    bool present() const { return loss_db < kAbsentLossDb; }
};

// Fixed-size collection of K = 20 path slots. Invariants: at most one LOS
// entry and it sits at index 0; present entries precede absent ones.
struct PathSet {
    std::array<PathEntry, kMaxPaths> entries{};

    int present_count() const;
    bool has_los() const;
    // Moves present entries to the front, preserving their relative order.
    void compact();
};

enum class GnbType { Standard, Dedicated };

const char* to_string(GnbType t);
GnbType gnb_type_from_string(const std::string& s);

// Link condition u: displacement from the gNB to the UAV plus the gNB type.
// d = (UAV position) - (gNB position); departure at the UAV looks along -d,
// arrival at the gNB looks along +d.
struct LinkCondition {
    double dx_m = 0.0;
    double dy_m = 0.0;
    double dz_m = 0.0; // positive when the UAV is above the gNB
    GnbType gnb_type = GnbType::Standard;

    Vec3 displacement() const { return {dx_m, dy_m, dz_m}; }
    double d3d() const { return std::sqrt(dx_m * dx_m + dy_m * dy_m + dz_m * dz_m); }
    double d2d() const { return std::sqrt(dx_m * dx_m + dy_m * dy_m); }
};

enum class LinkState { Los, Nlos, NoLink };

const char* to_string(LinkState s);

// One labeled sample: environment tag, condition, and the path collection.
struct LinkRecord {
    std::string env_id;
    LinkCondition condition;
    PathSet paths;
};

struct Dataset {
    std::vector<LinkRecord> records;
    double carrier_hz = kDefaultCarrierHz;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// LOS if any LOS entry is present, NoLink if every slot is absent, NLOS
// otherwise. Total and pure.
LinkState derive_link_state(const PathSet& paths);

// Checks every field range, the present-before-absent ordering, the
// LOS-at-index-0 convention, and that absent slots are zeroed.
ValidationReport validate_record(const LinkRecord& rec);

} // namespace uavchan

#endif // UAVCHAN_DOMAIN_HPP
