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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rismimo/ga.hpp"
#include "rismimo/mc.hpp"
#include "rismimo/moments.hpp"
#include "rismimo/scenario.hpp"
#include "rismimo/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct GlobalOpts {
    std::string scenario_path;
    bool paper_scale = false;
    std::uint64_t seed = 1;
    std::uint64_t mc_samples = 20000;
    std::string out_path;
};

rismimo::ScenarioSpec load_spec(const GlobalOpts& g) {
    if (!g.scenario_path.empty()) {
        std::ifstream f(g.scenario_path);
        if (!f) throw std::runtime_error("cannot read scenario file: " + g.scenario_path);
        std::ostringstream buf;
        buf << f.rdbuf();
        return rismimo::parse_scenario(buf.str());
    }
    return g.paper_scale ? rismimo::paper_scenario() : rismimo::desk_scenario();
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
    return out;
}

int cmd_validate(const GlobalOpts& g) {
    using namespace rismimo;
    ScenarioSpec spec = load_spec(g);
    Scenario sc = build_scenario(spec);
    RateEvaluator eval(sc.geom, sc.cfg);
    Rng rng = Rng::substream(g.seed, 0x706873ULL);
    PhaseVector phases;
    for (std::size_t n = 0; n < sc.cfg.ris_elements; ++n)
        phases.theta.push_back(rng.uniform(0.0, two_pi));
    RateEvaluator::PhaseState st = eval.phase_state(phases);

    bool ok = true;
    auto check = [&](const std::string& name, double analytic, const McEstimate& mc) {
        double gap = std::abs(analytic - mc.mean);
        double limit = 4.0 * mc.std_error;
        bool pass = mc.std_error == 0.0 ? gap == 0.0 : gap <= limit;
        ok = ok && pass;
        std::printf("%-22s analytic=%.8g mc=%.8g +/- %.3g  %s\n", name.c_str(), analytic, mc.mean,
                    mc.std_error, pass ? "ok" : "MISMATCH");
    };

    std::uint64_t n_vec = g.mc_samples, n_row = g.mc_samples * 10;
    for (std::size_t k = 0; k < sc.cfg.users; ++k) {
        UserMomentEstimates m =
            estimate_user_moments(k, phases, sc.geom, sc.cfg, n_vec, n_row, mix64(g.seed ^ k));
        check("e_signal[" + std::to_string(k) + "]", eval.e_signal(st, k), m.signal);
        check("e_noise[" + std::to_string(k) + "]", eval.e_noise(st, k), m.noise);
        check("fourth_moment[" + std::to_string(k) + "]", eval.fourth_moment_per_antenna(st, k),
              m.fourth);
        for (std::size_t i = 0; i < sc.cfg.users; ++i) {
            if (i == k) continue;
            check("e_interf[" + std::to_string(k) + "," + std::to_string(i) + "]",
                  eval.e_interf(st, k, i), m.interf[i]);
            check("cross_moment[" + std::to_string(k) + "," + std::to_string(i) + "]",
                  eval.cross_moment(st, k, i), m.cross[i]);
        }
        McEstimate r = estimate_ergodic_rate(k, phases, sc.geom, sc.cfg, n_vec,
                                             mix64(g.seed ^ (k + 100)), RateMode::instantaneous);
        double ar = eval.rate(st, k);
        // the moment-ratio approximation bias shrinks with system size:
        // ~0.1 bits/s/Hz is typical at the reduced desk scale
        bool pass = std::abs(ar - r.mean) < 0.25;
        ok = ok && pass;
        std::printf("rate[%zu]                analytic=%.8g mc=%.8g +/- %.3g  %s\n", k, ar, r.mean,
                    r.std_error, pass ? "ok" : "MISMATCH");
    }
    std::printf("validate: %s\n", ok ? "PASS" : "FAIL");
    return ok ? kExitOk : kExitValidationFailure;
}

int cmd_optimize(const GlobalOpts& g, const std::string& objective) {
    using namespace rismimo;
    ScenarioSpec spec = load_spec(g);
    Scenario sc = build_scenario(spec);
    GaConfig ga = sc.ga;
    ga.seed = g.seed;
    GaObjective obj = objective == "min" ? GaObjective::min_rate : GaObjective::sum_rate;
    GaResult res = ga_optimize(obj, sc.geom, sc.cfg, ga);
    RateEvaluator eval(sc.geom, sc.cfg);
    RateEvaluator::PhaseState st = eval.phase_state(res.best);
    std::printf("generations: %zu\n", res.trace.generations.size() - 1);
    std::printf("best %s-rate objective: %.8g\n", objective.c_str(), res.best_fitness);
    for (std::size_t k = 0; k < sc.cfg.users; ++k)
        std::printf("rate[%zu] = %.8g bits/s/Hz\n", k, eval.rate(st, k));
    std::printf("phases:");
    for (double t : res.best.theta) std::printf(" %.6f", t);
    std::printf("\n");
    if (!g.out_path.empty()) {
        std::ofstream f(g.out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + g.out_path);
        f << "# ris-mimo-sim optimize\n# objective = " << objective << "\ngeneration,best,mean\n";
        for (std::size_t i = 0; i < res.trace.generations.size(); ++i)
            f << i << "," << res.trace.generations[i].best_fitness << ","
              << res.trace.generations[i].mean_fitness << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const GlobalOpts& g, const std::string& var, const std::string& values_csv,
              const std::string& objective, bool with_mc, bool no_optimize) {
    using namespace rismimo;
    ScenarioSpec spec = load_spec(g);
    SweepVar sv;
    if (var == "N") sv = SweepVar::ris_elements;
    else if (var == "M") sv = SweepVar::bs_antennas;
    else if (var == "k_hwi") sv = SweepVar::k_hwi;
    else throw CLI::ValidationError("--var must be one of N, M, k_hwi");
    SweepFlags flags;
    flags.seed = g.seed;
    flags.mc_validate = with_mc;
    flags.mc_samples = g.mc_samples;
    flags.optimize = !no_optimize;
    GaObjective obj = objective == "min" ? GaObjective::min_rate : GaObjective::sum_rate;
    SweepResult result = run_sweep(spec, sv, parse_values(values_csv), obj, flags);
    if (g.out_path.empty())
        std::cout << render_csv(result);
    else
        emit_csv(result, g.out_path);
    return kExitOk;
}

int cmd_asymptotic(const GlobalOpts& g, const std::string& m_values_csv, double p_dbm) {
    using namespace rismimo;
    ScenarioSpec spec = load_spec(g);
    spec.ris_bs_rician = 0.0;
    spec.user_ris_rician = 0.0;  // Eq. requires pure-NLoS RIS links
    double p_total = dbm_to_watt(p_dbm);
    std::printf("M,rate_1,limit_1\n");
    for (double mv : parse_values(m_values_csv)) {
        ScenarioSpec point = spec;
        point.bs_antennas = static_cast<std::size_t>(mv);
        Scenario sc = build_scenario(point);
        for (double& p : sc.cfg.tx_power_w) p = p_total / mv;
        RateEvaluator eval(sc.geom, sc.cfg);
        PhaseVector zero(std::vector<double>(sc.cfg.ris_elements, 0.0));
        double finite = eval.rate(0, zero);
        double limit = asymptotic_rate(0, sc.geom, sc.cfg, p_total);
        std::printf("%g,%.10g,%.10g\n", mv, finite, limit);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided massive MIMO uplink rate analysis and phase optimization"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the global flags after the subcommand name

    GlobalOpts g;
    app.add_option("--scenario", g.scenario_path, "scenario file (key = value with sections)");
    app.add_flag("--paper-scale", g.paper_scale, "use the full-scale default scenario");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--mc-samples", g.mc_samples, "Monte Carlo sample count");
    app.add_option("--out", g.out_path, "output file path");

    auto* validate = app.add_subcommand("validate", "check analytic moments against Monte Carlo");

    std::string objective = "sum";
    auto* optimize = app.add_subcommand("optimize", "GA phase optimization");
    optimize->add_option("--objective", objective, "sum or min")
        ->check(CLI::IsMember({"sum", "min"}));

    std::string var = "N", values = "16,25,36";
    bool with_mc = false, no_optimize = false;
    auto* sweep = app.add_subcommand("sweep", "rate sweep over N, M or k_hwi");
    sweep->add_option("--var", var, "swept variable: N, M or k_hwi");
    sweep->add_option("--values", values, "comma-separated sweep values");
    sweep->add_option("--objective", objective, "sum or min")
        ->check(CLI::IsMember({"sum", "min"}));
    sweep->add_flag("--mc", with_mc, "add Monte Carlo validation columns");
    sweep->add_flag("--no-optimize", no_optimize, "evaluate random phases instead of running GA");

    std::string m_values = "64,256,1024,4096";
    double p_dbm = 30.0;
    auto* asym = app.add_subcommand("asymptotic", "power-scaling law vs the large-M limit");
    asym->add_option("--m-values", m_values, "antenna counts (perfect squares)");
    asym->add_option("--power-dbm", p_dbm, "total power p before the p/M split");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(g);
        if (optimize->parsed()) return cmd_optimize(g, objective);
        if (sweep->parsed()) return cmd_sweep(g, var, values, objective, with_mc, no_optimize);
        if (asym->parsed()) return cmd_asymptotic(g, m_values, p_dbm);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
