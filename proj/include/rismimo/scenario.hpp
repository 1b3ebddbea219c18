// SPDX-License-Identifier: Apache-2.0
//
// ris-mimo-sim: uplink RIS-aided massive MIMO rate analysis and phase optimization
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

#ifndef RISMIMO_SCENARIO_HPP
#define RISMIMO_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rismimo/ga.hpp"
#include "rismimo/rng.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Raw scenario knobs as written in a scenario file. Distances are in meters;
/// powers in dBm; large-scale coefficients are derived, never stored.
struct ScenarioSpec {
    std::size_t bs_antennas = 50;
    std::size_t ris_elements = 25;
    std::size_t users = 4;
    double tx_power_dbm = 30.0;
    double noise_power_dbm = -104.0;
    double k_r = 0.08, k_u = 0.08, k_b = 0.08;

    double l_rb = 1000.0;
    double l_ur = 20.0;
    std::vector<double> l_ub = {988.0, 980.0, 980.0, 988.0};
    double ris_bs_rician = 10.0;
    double user_ris_rician = 1.0;
    bool direct_link = true;

    // "random" mode draws every AoA/AoD uniformly on [0, 2*pi) from angle_seed;
    // "explicit" takes the listed values.
    bool random_angles = true;
    std::uint64_t angle_seed = 1;
    double bs_aoa_az = 0.0, bs_aoa_el = 0.0;
    double ris_aod_az = 0.0, ris_aod_el = 0.0;
    std::vector<double> user_aoa_az, user_aoa_el;

    GaConfig ga;
};

/// §V parameter set (M=50, N=25, K=4).
inline ScenarioSpec paper_scenario() { return ScenarioSpec{}; }

/// Reduced problem size for fast iteration and CI.
inline ScenarioSpec desk_scenario() {
    ScenarioSpec s;
    s.bs_antennas = 16;
    s.ris_elements = 16;
    s.users = 2;
    s.l_ub = {988.0, 980.0};
    return s;
}

namespace detail {

inline std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

}  // namespace detail

/// Canonical serialization; parsing it back reproduces the spec, and its hash
/// identifies the scenario in emitted artifacts.
inline std::string scenario_text(const ScenarioSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "[system]\n"
       << "bs_antennas = " << s.bs_antennas << "\n"
       << "ris_elements = " << s.ris_elements << "\n"
       << "users = " << s.users << "\n"
       << "tx_power_dbm = " << s.tx_power_dbm << "\n"
       << "noise_power_dbm = " << s.noise_power_dbm << "\n"
       << "k_r = " << s.k_r << "\n"
       << "k_u = " << s.k_u << "\n"
       << "k_b = " << s.k_b << "\n"
       << "\n[geometry]\n"
       << "l_rb = " << s.l_rb << "\n"
       << "l_ur = " << s.l_ur << "\n"
       << "l_ub = " << detail::join(s.l_ub) << "\n"
       << "ris_bs_rician = " << s.ris_bs_rician << "\n"
       << "user_ris_rician = " << s.user_ris_rician << "\n"
       << "direct_link = " << (s.direct_link ? "on" : "off") << "\n"
       << "angles = " << (s.random_angles ? "random" : "explicit") << "\n";
    if (s.random_angles) {
        os << "angle_seed = " << s.angle_seed << "\n";
    } else {
        os << "bs_aoa_az = " << s.bs_aoa_az << "\nbs_aoa_el = " << s.bs_aoa_el << "\n"
           << "ris_aod_az = " << s.ris_aod_az << "\nris_aod_el = " << s.ris_aod_el << "\n"
           << "user_aoa_az = " << detail::join(s.user_aoa_az) << "\n"
           << "user_aoa_el = " << detail::join(s.user_aoa_el) << "\n";
    }
    os << "\n[ga]\n"
       << "elites = " << s.ga.elites << "\n"
       << "mutants = " << s.ga.mutants << "\n"
       << "crossed = " << s.ga.crossed << "\n"
       << "max_iters = " << s.ga.max_iters << "\n"
       << "mutation_rate = " << s.ga.mutation_rate << "\n"
       << "phase_grid = " << s.ga.phase_grid << "\n";
    return os.str();
}

/// FNV-1a (64-bit) of the canonical scenario text.
inline std::uint64_t scenario_hash(const ScenarioSpec& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : scenario_text(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Parse a flat key = value document with [section] headers, '#' comments and
/// blank lines. Unknown sections/keys and malformed values are errors that
/// carry the 1-based line number.
inline ScenarioSpec parse_scenario(const std::string& content) {
    ScenarioSpec s;
    s.l_ub.clear();
    bool have_l_ub = false;
    std::istringstream in(content);
    std::string line, section;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& what) -> void {
        throw std::runtime_error("scenario parse error at line " + std::to_string(lineno) + ": " +
                                 what);
    };
    auto to_double = [&](const std::string& v) {
        std::size_t pos = 0;
        double d = 0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (pos != v.size()) fail("trailing characters in number '" + v + "'");
        return d;
    };
    auto to_size = [&](const std::string& v) {
        double d = to_double(v);
        if (d < 0 || d != std::floor(d)) fail("expected a nonnegative integer, got '" + v + "'");
        return static_cast<std::size_t>(d);
    };
    auto to_list = [&](const std::string& v) {
        std::vector<double> out;
        std::string item;
        std::istringstream ls(v);
        while (std::getline(ls, item, ',')) {
            std::size_t b = item.find_first_not_of(" \t");
            std::size_t e = item.find_last_not_of(" \t");
            if (b == std::string::npos) fail("empty list element");
            out.push_back(to_double(item.substr(b, e - b + 1)));
        }
        if (out.empty()) fail("empty list");
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "system" && section != "geometry" && section != "ga")
                fail("unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string& t) {
            std::size_t bb = t.find_first_not_of(" \t");
            std::size_t ee = t.find_last_not_of(" \t");
            t = bb == std::string::npos ? std::string{} : t.substr(bb, ee - bb + 1);
        };
        strip(key);
        strip(val);
        if (key.empty() || val.empty()) fail("expected key = value");

        if (section == "system") {
            if (key == "bs_antennas") s.bs_antennas = to_size(val);
            else if (key == "ris_elements") s.ris_elements = to_size(val);
            else if (key == "users") s.users = to_size(val);
            else if (key == "tx_power_dbm") s.tx_power_dbm = to_double(val);
            else if (key == "noise_power_dbm") s.noise_power_dbm = to_double(val);
            else if (key == "k_r") s.k_r = to_double(val);
            else if (key == "k_u") s.k_u = to_double(val);
            else if (key == "k_b") s.k_b = to_double(val);
            else fail("unknown key '" + key + "' in [system]");
        } else if (section == "geometry") {
            if (key == "l_rb") s.l_rb = to_double(val);
            else if (key == "l_ur") s.l_ur = to_double(val);
            else if (key == "l_ub") { s.l_ub = to_list(val); have_l_ub = true; }
            else if (key == "ris_bs_rician") s.ris_bs_rician = to_double(val);
            else if (key == "user_ris_rician") s.user_ris_rician = to_double(val);
            else if (key == "direct_link") {
                if (val == "on") s.direct_link = true;
                else if (val == "off") s.direct_link = false;
                else fail("direct_link must be 'on' or 'off'");
            } else if (key == "angles") {
                if (val == "random") s.random_angles = true;
                else if (val == "explicit") s.random_angles = false;
                else fail("angles must be 'random' or 'explicit'");
            } else if (key == "angle_seed") s.angle_seed = to_size(val);
            else if (key == "bs_aoa_az") s.bs_aoa_az = to_double(val);
            else if (key == "bs_aoa_el") s.bs_aoa_el = to_double(val);
            else if (key == "ris_aod_az") s.ris_aod_az = to_double(val);
            else if (key == "ris_aod_el") s.ris_aod_el = to_double(val);
            else if (key == "user_aoa_az") s.user_aoa_az = to_list(val);
            else if (key == "user_aoa_el") s.user_aoa_el = to_list(val);
            else fail("unknown key '" + key + "' in [geometry]");
        } else if (section == "ga") {
            if (key == "elites") s.ga.elites = to_size(val);
            else if (key == "mutants") s.ga.mutants = to_size(val);
            else if (key == "crossed") s.ga.crossed = to_size(val);
            else if (key == "max_iters") s.ga.max_iters = to_size(val);
            else if (key == "mutation_rate") s.ga.mutation_rate = to_double(val);
            else if (key == "phase_grid") s.ga.phase_grid = to_size(val);
            else fail("unknown key '" + key + "' in [ga]");
        } else {
            fail("key outside any section");
        }
    }
    if (!have_l_ub) s.l_ub = ScenarioSpec{}.l_ub;
    return s;
}

struct Scenario {
    SystemConfig cfg;
    ScenarioGeometry geom;
    GaConfig ga;
};

/// Apply the large-scale rules (mu = 1e-3 l_ur^-2, nu = 1e-3 l_rb^-2.5,
/// xi = 1e-3 l_ub^-4), dBm conversions and the angle source.
inline Scenario build_scenario(const ScenarioSpec& s) {
    if (s.l_ub.size() != s.users)
        throw std::runtime_error("scenario error: users = " + std::to_string(s.users) + " but " +
                                 std::to_string(s.l_ub.size()) + " l_ub entries");
    if (!(s.l_rb > 0.0) || !(s.l_ur > 0.0))
        throw std::runtime_error("scenario error: distances must be positive");
    for (double d : s.l_ub)
        if (!(d > 0.0)) throw std::runtime_error("scenario error: distances must be positive");

    Scenario out;
    out.cfg.bs_antennas = s.bs_antennas;
    out.cfg.ris_elements = s.ris_elements;
    out.cfg.users = s.users;
    out.cfg.tx_power_w.assign(s.users, dbm_to_watt(s.tx_power_dbm));
    out.cfg.noise_power_w = dbm_to_watt(s.noise_power_dbm);
    out.cfg.ris_phase_noise = s.k_r;
    out.cfg.tx_impairment = s.k_u;
    out.cfg.rx_impairment = s.k_b;

    out.geom.ris_bs_gain = 1e-3 * std::pow(s.l_rb, -2.5);
    out.geom.user_ris_gain.assign(s.users, 1e-3 * std::pow(s.l_ur, -2.0));
    for (double d : s.l_ub)
        out.geom.user_bs_gain.push_back(s.direct_link ? 1e-3 * std::pow(d, -4.0) : 0.0);
    out.geom.ris_bs_rician = s.ris_bs_rician;
    out.geom.user_ris_rician.assign(s.users, s.user_ris_rician);

    if (s.random_angles) {
        Rng rng = Rng::substream(s.angle_seed, 0x616e676cULL);  // "angl"
        out.geom.bs_aoa_az = rng.uniform(0.0, two_pi);
        out.geom.bs_aoa_el = rng.uniform(0.0, two_pi);
        out.geom.ris_aod_az = rng.uniform(0.0, two_pi);
        out.geom.ris_aod_el = rng.uniform(0.0, two_pi);
        for (std::size_t k = 0; k < s.users; ++k)
            out.geom.user_angles.push_back({rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)});
    } else {
        if (s.user_aoa_az.size() != s.users || s.user_aoa_el.size() != s.users)
            throw std::runtime_error(
                "scenario error: explicit angles need one user_aoa_az/el entry per user");
        out.geom.bs_aoa_az = s.bs_aoa_az;
        out.geom.bs_aoa_el = s.bs_aoa_el;
        out.geom.ris_aod_az = s.ris_aod_az;
        out.geom.ris_aod_el = s.ris_aod_el;
        for (std::size_t k = 0; k < s.users; ++k)
            out.geom.user_angles.push_back({s.user_aoa_az[k], s.user_aoa_el[k]});
    }

    out.ga = s.ga;
    out.cfg.validate();
    out.geom.validate(out.cfg);
    return out;
}

}  // namespace rismimo

#endif
