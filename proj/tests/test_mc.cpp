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

#include "helpers.hpp"
#include "rismimo/mc.hpp"
#include "rismimo/moments.hpp"

using namespace rismimo;

TEST_CASE("accumulator merge is associative within 1e-10 relative") {
    Rng rng(5);
    std::vector<double> xs;
    for (int i = 0; i < 3000; ++i) xs.push_back(std::exp(3.0 * rng.normal()));

    McAccumulator whole;
    for (double x : xs) whole.add(x);

    McAccumulator a, b, c;
    for (int i = 0; i < 1000; ++i) a.add(xs[i]);
    for (int i = 1000; i < 1700; ++i) b.add(xs[i]);
    for (int i = 1700; i < 3000; ++i) c.add(xs[i]);

    McAccumulator left = a;
    left.merge(b);
    left.merge(c);
    McAccumulator right = c;
    right.merge(b);
    right.merge(a);

    McEstimate w = whole.estimate(), l = left.estimate(), r = right.estimate();
    CHECK(l.n_samples == w.n_samples);
    CHECK(std::abs(l.mean - w.mean) / std::abs(w.mean) < 1e-10);
    CHECK(std::abs(r.mean - w.mean) / std::abs(w.mean) < 1e-10);
    CHECK(std::abs(l.std_error - w.std_error) / w.std_error < 1e-10);
    CHECK(std::abs(r.std_error - w.std_error) / w.std_error < 1e-10);
}

TEST_CASE("estimate_moment: near-deterministic channel has vanishing spread") {
    Scenario sc = testutil::make_scenario(4, 4, 1, 3);
    sc.geom.ris_bs_rician = 1e12;
    sc.geom.user_ris_rician[0] = 1e12;
    sc.geom.user_bs_gain[0] = 0.0;
    sc.cfg.ris_phase_noise = 0.0;
    PhaseVector p = testutil::random_phases(4, 1);

    McEstimate e = estimate_moment(MomentKind::noise, 0, 0, p, sc.geom, sc.cfg, 2000, 7);
    double expect = e_noise(0, p, sc.geom, sc.cfg);
    CHECK(std::abs(e.mean - expect) / expect < 1e-5);
    CHECK(e.std_error / e.mean < 1e-5);
}

TEST_CASE("estimate_moment: argument checking") {
    Scenario sc = testutil::make_scenario(4, 4, 2, 3);
    PhaseVector p = testutil::random_phases(4, 1);
    CHECK_THROWS_AS(estimate_moment(MomentKind::noise, 0, 0, p, sc.geom, sc.cfg, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_moment(MomentKind::interf, 1, 1, p, sc.geom, sc.cfg, 2000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_moment(MomentKind::cross, 0, 0, p, sc.geom, sc.cfg, 2000, 1),
                    std::invalid_argument);
}

TEST_CASE("estimate_moment: every moment matches the closed form within 3 SE") {
    Scenario sc = testutil::make_scenario(9, 9, 2, 11);
    PhaseVector p = testutil::random_phases(9, 5);
    RateEvaluator ev(sc.geom, sc.cfg);
    auto st = ev.phase_state(p);

    UserMomentEstimates m = estimate_user_moments(0, p, sc.geom, sc.cfg, 40000, 200000, 21);
    auto within = [](double analytic, const McEstimate& e) {
        return std::abs(analytic - e.mean) <= 3.0 * e.std_error;
    };
    CHECK(within(ev.e_signal(st, 0), m.signal));
    CHECK(within(ev.e_noise(st, 0), m.noise));
    CHECK(within(ev.e_interf(st, 0, 1), m.interf[1]));
    CHECK(within(ev.cross_moment(st, 0, 1), m.cross[1]));
    CHECK(within(ev.fourth_moment_per_antenna(st, 0), m.fourth));
}

TEST_CASE("estimate_moment: std_error shrinks like 1/sqrt(n)") {
    Scenario sc = testutil::make_scenario(4, 4, 1, 3);
    PhaseVector p = testutil::random_phases(4, 2);
    McEstimate small = estimate_moment(MomentKind::signal, 0, 0, p, sc.geom, sc.cfg, 20000, 9);
    McEstimate big = estimate_moment(MomentKind::signal, 0, 0, p, sc.geom, sc.cfg, 80000, 9);
    CHECK(big.std_error == doctest::Approx(small.std_error / 2.0).epsilon(0.2));
}

TEST_CASE("estimate_moment: deterministic per seed") {
    Scenario sc = testutil::make_scenario(4, 4, 2, 3);
    PhaseVector p = testutil::random_phases(4, 2);
    McEstimate a = estimate_moment(MomentKind::interf, 0, 1, p, sc.geom, sc.cfg, 5000, 13);
    McEstimate b = estimate_moment(MomentKind::interf, 0, 1, p, sc.geom, sc.cfg, 5000, 13);
    McEstimate c = estimate_moment(MomentKind::interf, 0, 1, p, sc.geom, sc.cfg, 5000, 14);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean != c.mean);
}

TEST_CASE("noise-moment z-scores stay sane across independent seeds") {
    Scenario sc = testutil::make_scenario(4, 9, 1, 5);
    PhaseVector p = testutil::random_phases(9, 3);
    double analytic = e_noise(0, p, sc.geom, sc.cfg);
    int ok = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        McEstimate e = estimate_moment(MomentKind::noise, 0, 0, p, sc.geom, sc.cfg, 5000, 100 + s);
        if (std::abs(e.mean - analytic) / e.std_error < 4.0) ++ok;
    }
    CHECK(ok >= 19);
}

TEST_CASE("estimate_ergodic_rate: deterministic single-user ideal case is exact") {
    Scenario sc = testutil::make_scenario(4, 4, 1, 3);
    sc.geom.ris_bs_rician = 1e12;
    sc.geom.user_ris_rician[0] = 1e12;
    sc.geom.user_bs_gain[0] = 0.0;
    sc.cfg.ris_phase_noise = 0.0;
    sc.cfg.tx_impairment = 0.0;
    sc.cfg.rx_impairment = 0.0;
    PhaseVector p = testutil::random_phases(4, 4);

    McEstimate e = estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 2000, 5, RateMode::instantaneous);
    // SINR = p ||g||^2 / sigma^2 for K=1 without impairments
    ChannelRealization r = sample_realization(sc.geom, sc.cfg, 1);
    std::vector<cvec> g = effective_channel(r, p);
    double n2 = 0.0;
    for (const cplx& x : g[0]) n2 += std::norm(x);
    double expect = std::log2(1.0 + sc.cfg.tx_power_w[0] * n2 / sc.cfg.noise_power_w);
    CHECK(e.mean == doctest::Approx(expect).epsilon(1e-4));
    CHECK(e.std_error / e.mean < 1e-4);
}

TEST_CASE("estimate_ergodic_rate: moment-ratio agrees with the analytic rate") {
    Scenario sc = testutil::make_scenario(9, 9, 2, 7);
    PhaseVector p = testutil::random_phases(9, 6);
    double analytic = rate(0, p, sc.geom, sc.cfg);
    McEstimate e = estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 32000, 3, RateMode::moment_ratio);
    CHECK(std::abs(e.mean - analytic) <= 3.0 * e.std_error + 1e-3);
}

TEST_CASE("estimate_ergodic_rate: instantaneous mode near the analytic rate") {
    // The moment-ratio form carries a real approximation bias that shrinks as
    // the system grows: allow a loose bound at desk scale and the tight
    // figure-level bound at full scale.
    SUBCASE("desk scale, loose") {
        Scenario sc = testutil::make_scenario(16, 16, 2, 9);
        PhaseVector p = testutil::random_phases(16, 2);
        double analytic = rate(0, p, sc.geom, sc.cfg);
        McEstimate e =
            estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 20000, 4, RateMode::instantaneous);
        CHECK(std::abs(e.mean - analytic) < 0.25);
    }
    SUBCASE("full scale, tight") {
        Scenario sc = build_scenario(paper_scenario());
        PhaseVector p = testutil::random_phases(25, 2);
        double analytic = rate(0, p, sc.geom, sc.cfg);
        McEstimate e =
            estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 30000, 4, RateMode::instantaneous);
        CHECK(std::abs(e.mean - analytic) < 0.1);
    }
}

TEST_CASE("estimate_ergodic_rate: sampled HWI audit mode tracks conditional mode") {
    Scenario sc = testutil::make_scenario(9, 9, 2, 4);
    PhaseVector p = testutil::random_phases(9, 8);
    McEstimate cond = estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 20000, 6,
                                            RateMode::instantaneous, HwiMode::conditional);
    McEstimate samp = estimate_ergodic_rate(0, p, sc.geom, sc.cfg, 20000, 6,
                                            RateMode::instantaneous, HwiMode::sampled);
    double se = std::sqrt(cond.std_error * cond.std_error + samp.std_error * samp.std_error);
    CHECK(std::abs(cond.mean - samp.mean) <= 4.0 * se + 1e-3);
}

TEST_CASE("estimate_hwi_power: matches the analytic e_hwi within 3 SE") {
    Scenario sc = testutil::make_scenario(9, 9, 2, 6);
    PhaseVector p = testutil::random_phases(9, 7);
    double analytic = e_hwi(0, p, sc.geom, sc.cfg);
    McEstimate e = estimate_hwi_power(0, p, sc.geom, sc.cfg, 40000, 8);
    CHECK(std::abs(e.mean - analytic) <= 3.0 * e.std_error);
}
