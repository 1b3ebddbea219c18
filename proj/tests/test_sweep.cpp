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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rismimo/sweep.hpp"

using namespace rismimo;

namespace {

ScenarioSpec tiny_spec() {
    ScenarioSpec s = desk_scenario();
    s.bs_antennas = 9;
    s.ris_elements = 9;
    s.ga.max_iters = 25;  // keep sweeps fast; tests exercise plumbing, not convergence
    return s;
}

}  // namespace

TEST_CASE("run_sweep: input validation happens before any computation") {
    SweepFlags flags;
    CHECK_THROWS_AS(run_sweep(tiny_spec(), SweepVar::ris_elements, {}, GaObjective::sum_rate,
                              flags),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(tiny_spec(), SweepVar::ris_elements, {16.0, 10.0},
                              GaObjective::sum_rate, flags),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(tiny_spec(), SweepVar::bs_antennas, {4.0, -9.0},
                              GaObjective::sum_rate, flags),
                    std::invalid_argument);
}

TEST_CASE("run_sweep: N sweep rows are ordered and the optimized curve grows") {
    SweepFlags flags;
    flags.seed = 3;
    SweepResult r = run_sweep(tiny_spec(), SweepVar::ris_elements, {25.0, 9.0, 16.0},
                              GaObjective::sum_rate, flags);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].value == 9.0);
    CHECK(r.rows[1].value == 16.0);
    CHECK(r.rows[2].value == 25.0);
    CHECK(r.rows[1].sum_rate >= r.rows[0].sum_rate);
    CHECK(r.rows[2].sum_rate >= r.rows[1].sum_rate);
    for (const SweepRow& row : r.rows) {
        CHECK(row.arm == "optimized");
        CHECK(row.user_rates.size() == 2);
        CHECK(std::isfinite(row.sum_rate));
        CHECK(row.min_rate <= row.sum_rate / 2.0 + 1e-12);
    }
}

TEST_CASE("run_sweep: M sweep produces the four figure arms per value") {
    SweepFlags flags;
    SweepResult r =
        run_sweep(tiny_spec(), SweepVar::bs_antennas, {9.0, 16.0}, GaObjective::sum_rate, flags);
    REQUIRE(r.rows.size() == 8);
    CHECK(r.rows[0].arm == "optimized");
    CHECK(r.rows[1].arm == "random");
    CHECK(r.rows[2].arm == "optimized-nodirect");
    CHECK(r.rows[3].arm == "random-nodirect");
    // optimized beats its random counterpart within each link condition
    CHECK(r.rows[0].sum_rate >= r.rows[1].sum_rate);
    CHECK(r.rows[2].sum_rate >= r.rows[3].sum_rate);
    CHECK(r.rows[4].value == 16.0);
}

TEST_CASE("run_sweep: k_hwi sweep pins aware above ignorant") {
    SweepFlags flags;
    flags.seed = 5;
    SweepResult r = run_sweep(tiny_spec(), SweepVar::k_hwi, {0.0, 0.08}, GaObjective::sum_rate,
                              flags);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[0].arm == "hwi-aware");
    CHECK(r.rows[1].arm == "hwi-ignorant");
    CHECK(r.rows[0].sum_rate >= r.rows[1].sum_rate - 1e-12);
    CHECK(r.rows[2].sum_rate >= r.rows[3].sum_rate - 1e-12);
    // zero impairments: both designs face the same landscape
    CHECK(r.rows[0].sum_rate == doctest::Approx(r.rows[1].sum_rate).epsilon(1e-12));
}

TEST_CASE("render_csv: empty result is header-only; rows round-trip") {
    SweepResult empty;
    empty.users = 2;
    std::string text = render_csv(empty);
    std::istringstream in(text);
    std::string line;
    std::size_t data_lines = 0, header_lines = 0;
    while (std::getline(in, line)) {
        if (line.rfind('#', 0) == 0) ++header_lines;
        else ++data_lines;
    }
    CHECK(header_lines == 6);
    CHECK(data_lines == 1);  // the column header only

    SweepFlags flags;
    SweepResult one =
        run_sweep(tiny_spec(), SweepVar::ris_elements, {9.0}, GaObjective::sum_rate, flags);
    std::string csv = render_csv(one);
    // last line parses back to the row values
    std::size_t pos = csv.rfind("\n9,optimized,");
    CHECK(pos != std::string::npos);
    std::istringstream row(csv.substr(pos + 1));
    std::string val, arm, r1, r2, sum, minr;
    std::getline(row, val, ',');
    std::getline(row, arm, ',');
    std::getline(row, r1, ',');
    std::getline(row, r2, ',');
    std::getline(row, sum, ',');
    std::getline(row, minr, ',');
    CHECK(std::stod(val) == 9.0);
    CHECK(std::stod(sum) == doctest::Approx(one.rows[0].sum_rate).epsilon(1e-10));
    CHECK(std::stod(minr) == doctest::Approx(one.rows[0].min_rate).epsilon(1e-10));
}

TEST_CASE("emit_csv: byte-identical across re-runs, LF endings, hash in header") {
    SweepFlags flags;
    flags.seed = 11;
    ScenarioSpec spec = tiny_spec();
    SweepResult a =
        run_sweep(spec, SweepVar::ris_elements, {9.0, 16.0}, GaObjective::min_rate, flags);
    SweepResult b =
        run_sweep(spec, SweepVar::ris_elements, {9.0, 16.0}, GaObjective::min_rate, flags);
    std::string ta = render_csv(a), tb = render_csv(b);
    CHECK(ta == tb);
    CHECK(ta.find("\r") == std::string::npos);

    char hash_line[64];
    std::snprintf(hash_line, sizeof hash_line, "# scenario_hash = %016llx",
                  static_cast<unsigned long long>(scenario_hash(spec)));
    CHECK(ta.find(hash_line) != std::string::npos);
    CHECK(ta.find("# objective = min") != std::string::npos);

    const char* path = "test_sweep_out.csv";
    emit_csv(a, path);
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == ta);
    std::remove(path);
    CHECK_THROWS_AS(emit_csv(a, "no_such_dir/x.csv"), std::runtime_error);
}

TEST_CASE("run_sweep: MC columns agree with the analytic sum rate") {
    SweepFlags flags;
    flags.mc_validate = true;
    flags.mc_samples = 4000;
    ScenarioSpec spec = tiny_spec();
    SweepResult r =
        run_sweep(spec, SweepVar::ris_elements, {9.0}, GaObjective::sum_rate, flags);
    REQUIRE(r.has_mc);
    // small-system moment-ratio bias dominates the statistical error here
    CHECK(std::abs(r.rows[0].mc_sum_rate - r.rows[0].sum_rate) <
          4.0 * r.rows[0].mc_std_error + 0.25 * 2.0);
}
