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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "rismimo/scenario.hpp"

using namespace rismimo;

TEST_CASE("dBm conversions follow the documented formula and round-trip") {
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dbm_to_watt(-104.0) == doctest::Approx(std::pow(10.0, -13.4)).epsilon(1e-14));
    CHECK(watt_to_dbm(dbm_to_watt(-104.0)) == doctest::Approx(-104.0).epsilon(1e-12));
    CHECK(watt_to_dbm(dbm_to_watt(30.0)) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("default scenario applies the large-scale rules") {
    Scenario sc = build_scenario(paper_scenario());
    CHECK(sc.cfg.bs_antennas == 50);
    CHECK(sc.cfg.ris_elements == 25);
    CHECK(sc.cfg.users == 4);
    CHECK(sc.geom.user_ris_gain[0] == doctest::Approx(2.5e-6).epsilon(1e-14));
    CHECK(sc.geom.ris_bs_gain == doctest::Approx(1e-3 * std::pow(1000.0, -2.5)).epsilon(1e-14));
    CHECK(sc.geom.user_bs_gain[0] == doctest::Approx(1e-3 * std::pow(988.0, -4.0)).epsilon(1e-14));
    CHECK(sc.geom.user_bs_gain[1] == doctest::Approx(1e-3 * std::pow(980.0, -4.0)).epsilon(1e-14));
    CHECK(sc.geom.ris_bs_rician == 10.0);
    CHECK(sc.geom.user_ris_rician[2] == 1.0);
    CHECK(sc.cfg.tx_power_w[3] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sc.cfg.noise_power_w == doctest::Approx(dbm_to_watt(-104.0)).epsilon(1e-14));
    CHECK(sc.cfg.ris_phase_noise == 0.08);
    CHECK(sc.cfg.tx_impairment == 0.08);
    CHECK(sc.cfg.rx_impairment == 0.08);
}

TEST_CASE("desk scenario shrinks the problem but keeps the rules") {
    Scenario sc = build_scenario(desk_scenario());
    CHECK(sc.cfg.bs_antennas == 16);
    CHECK(sc.cfg.ris_elements == 16);
    CHECK(sc.cfg.users == 2);
    CHECK(sc.geom.user_ris_gain[0] == doctest::Approx(2.5e-6).epsilon(1e-14));
}

TEST_CASE("disabling the direct link zeroes xi without touching anything else") {
    ScenarioSpec s = desk_scenario();
    s.direct_link = false;
    Scenario sc = build_scenario(s);
    CHECK(sc.geom.user_bs_gain[0] == 0.0);
    CHECK(sc.geom.user_bs_gain[1] == 0.0);
    CHECK(sc.geom.user_ris_gain[0] > 0.0);
}

TEST_CASE("scenario text round-trips through the parser") {
    ScenarioSpec s = desk_scenario();
    s.k_r = 0.11;
    s.ga.phase_grid = 8;
    s.angle_seed = 77;
    ScenarioSpec back = parse_scenario(scenario_text(s));
    CHECK(scenario_text(back) == scenario_text(s));
    CHECK(scenario_hash(back) == scenario_hash(s));

    Scenario a = build_scenario(s), b = build_scenario(back);
    CHECK(a.geom.bs_aoa_az == b.geom.bs_aoa_az);
    CHECK(a.cfg.ris_phase_noise == 0.11);
    CHECK(b.ga.phase_grid == 8);
}

TEST_CASE("explicit angles round-trip and are used verbatim") {
    ScenarioSpec s = desk_scenario();
    s.random_angles = false;
    s.bs_aoa_az = 0.25;
    s.bs_aoa_el = 1.5;
    s.ris_aod_az = 2.75;
    s.ris_aod_el = 0.5;
    s.user_aoa_az = {0.1, 0.2};
    s.user_aoa_el = {1.1, 1.2};
    Scenario sc = build_scenario(parse_scenario(scenario_text(s)));
    CHECK(sc.geom.bs_aoa_az == 0.25);
    CHECK(sc.geom.user_angles[1].ris_aoa_az == 0.2);
    CHECK(sc.geom.user_angles[1].ris_aoa_el == 1.2);
}

TEST_CASE("random angles are deterministic per angle_seed and lie in [0, 2 pi)") {
    ScenarioSpec s = desk_scenario();
    s.angle_seed = 9;
    Scenario a = build_scenario(s), b = build_scenario(s);
    CHECK(a.geom.bs_aoa_az == b.geom.bs_aoa_az);
    CHECK(a.geom.user_angles[1].ris_aoa_el == b.geom.user_angles[1].ris_aoa_el);
    s.angle_seed = 10;
    Scenario c = build_scenario(s);
    CHECK(a.geom.bs_aoa_az != c.geom.bs_aoa_az);
    for (const UserAngles& ua : a.geom.user_angles) {
        CHECK(ua.ris_aoa_az >= 0.0);
        CHECK(ua.ris_aoa_az < two_pi);
    }
}

TEST_CASE("parse errors carry line numbers") {
    auto message_of = [](const std::string& text) {
        try {
            parse_scenario(text);
        } catch (const std::runtime_error& e) {
            return std::string(e.what());
        }
        return std::string{};
    };
    CHECK(message_of("[system]\nbogus_key = 3\n").find("line 2") != std::string::npos);
    CHECK(message_of("[nope]\n").find("line 1") != std::string::npos);
    CHECK(message_of("[system]\nusers 4\n").find("line 2") != std::string::npos);
    CHECK(message_of("users = 4\n").find("outside any section") != std::string::npos);
    CHECK(message_of("[system]\nusers = 4.5\n").find("integer") != std::string::npos);
    CHECK(message_of("[geometry]\nl_ub = 1,,3\n").find("line 2") != std::string::npos);
}

TEST_CASE("comments and blank lines are ignored") {
    ScenarioSpec s = parse_scenario(
        "# header comment\n\n[system]\nusers = 2  # trailing\n\n[geometry]\nl_ub = 988, 980\n");
    CHECK(s.users == 2);
    CHECK(s.l_ub.size() == 2);
}

TEST_CASE("user count must match the direct-link distance list") {
    ScenarioSpec s = desk_scenario();
    s.users = 3;
    try {
        build_scenario(s);
        FAIL("expected a scenario error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("l_ub") != std::string::npos);
    }
}

TEST_CASE("scenario hash distinguishes different scenarios") {
    ScenarioSpec a = desk_scenario();
    ScenarioSpec b = desk_scenario();
    b.k_u = 0.12;
    CHECK(scenario_hash(a) != scenario_hash(b));
    CHECK(scenario_hash(a) == scenario_hash(desk_scenario()));
}
