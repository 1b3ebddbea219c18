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

#ifndef RISMIMO_SWEEP_HPP
#define RISMIMO_SWEEP_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rismimo/ga.hpp"
#include "rismimo/mc.hpp"
#include "rismimo/moments.hpp"
#include "rismimo/scenario.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

enum class SweepVar { ris_elements, bs_antennas, k_hwi };

struct SweepFlags {
    bool optimize = true;     // GA per point; otherwise evaluate random phases only
    bool mc_validate = false; // add an MC sum-rate column
    std::uint64_t mc_samples = 100000;
    std::uint64_t seed = 1;
};

struct SweepRow {
    double value = 0.0;
    std::string arm;
    std::vector<double> user_rates;
    double sum_rate = 0.0;
    double min_rate = 0.0;
    double mc_sum_rate = 0.0;  // populated when mc_validate
    double mc_std_error = 0.0;
};

struct SweepResult {
    SweepVar var = SweepVar::ris_elements;
    GaObjective objective = GaObjective::sum_rate;
    std::size_t users = 0;
    bool has_mc = false;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::uint64_t angle_seed = 0;
    std::vector<SweepRow> rows;  // ordered by swept value
};

namespace detail {

inline PhaseVector random_phases(std::size_t n, Rng& rng) {
    PhaseVector p;
    p.theta.reserve(n);
    for (std::size_t i = 0; i < n; ++i) p.theta.push_back(rng.uniform(0.0, two_pi));
    return p;
}

inline SweepRow evaluate_arm(double value, std::string arm, const Scenario& sc,
                             const PhaseVector& phases, const SweepFlags& flags,
                             std::uint64_t mc_seed) {
    RateEvaluator eval(sc.geom, sc.cfg);
    RateEvaluator::PhaseState st = eval.phase_state(phases);
    SweepRow row;
    row.value = value;
    row.arm = std::move(arm);
    for (std::size_t k = 0; k < sc.cfg.users; ++k)
        row.user_rates.push_back(eval.rate(st, k));
    row.sum_rate = 0.0;
    row.min_rate = row.user_rates[0];
    for (double r : row.user_rates) {
        row.sum_rate += r;
        row.min_rate = std::min(row.min_rate, r);
    }
    if (flags.mc_validate) {
        double var_sum = 0.0;
        for (std::size_t k = 0; k < sc.cfg.users; ++k) {
            McEstimate e = estimate_ergodic_rate(k, phases, sc.geom, sc.cfg, flags.mc_samples,
                                                 mix64(mc_seed ^ k), RateMode::instantaneous);
            row.mc_sum_rate += e.mean;
            var_sum += e.std_error * e.std_error;
        }
        row.mc_std_error = std::sqrt(var_sum);
    }
    return row;
}

inline PhaseVector design_phases(const Scenario& sc, GaObjective objective,
                                 const SweepFlags& flags, std::uint64_t point_seed,
                                 Rng& baseline_rng) {
    if (!flags.optimize) return random_phases(sc.cfg.ris_elements, baseline_rng);
    GaConfig ga = sc.ga;
    ga.seed = point_seed;
    return ga_optimize(objective, sc.geom, sc.cfg, ga).best;
}

}  // namespace detail

/// Execute one sweep. M/N values must be perfect squares (checked before any
/// computation). The arm sets follow the figure layouts: N sweep runs the
/// designed phases only; M sweep crosses {optimized, random} with
/// {direct, nodirect}; k_hwi sets k_r = k_u = k_b and adds an "hwi-ignorant"
/// arm whose phases were optimized with impairments zeroed.
inline SweepResult run_sweep(const ScenarioSpec& spec, SweepVar var, std::vector<double> values,
                             GaObjective objective, const SweepFlags& flags) {
    if (values.empty()) throw std::invalid_argument("run_sweep: values must be nonempty");
    if (var != SweepVar::k_hwi)
        for (double v : values) {
            if (v <= 0.0 || v != std::floor(v) ||
                !is_perfect_square(static_cast<std::size_t>(v)))
                throw std::invalid_argument("run_sweep: M/N values must be perfect squares");
        }
    std::sort(values.begin(), values.end());

    SweepResult result;
    result.var = var;
    result.objective = objective;
    result.users = spec.users;
    result.has_mc = flags.mc_validate;
    result.scenario_hash = scenario_hash(spec);
    result.seed = flags.seed;
    result.angle_seed = spec.angle_seed;

    Rng baseline_rng = Rng::substream(flags.seed, 0x72616e64ULL);  // "rand"
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const double v = values[vi];
        const std::uint64_t pseed = mix64(flags.seed ^ (vi + 1));
        ScenarioSpec point = spec;
        switch (var) {
            case SweepVar::ris_elements:
                point.ris_elements = static_cast<std::size_t>(v);
                break;
            case SweepVar::bs_antennas:
                point.bs_antennas = static_cast<std::size_t>(v);
                break;
            case SweepVar::k_hwi:
                point.k_r = point.k_u = point.k_b = v;
                break;
        }

        if (var == SweepVar::ris_elements) {
            Scenario sc = build_scenario(point);
            PhaseVector p = detail::design_phases(sc, objective, flags, pseed, baseline_rng);
            result.rows.push_back(detail::evaluate_arm(v, "optimized", sc, p, flags, pseed));
        } else if (var == SweepVar::bs_antennas) {
            for (bool direct : {true, false}) {
                ScenarioSpec arm_spec = point;
                arm_spec.direct_link = direct;
                Scenario sc = build_scenario(arm_spec);
                GaConfig ga = sc.ga;
                ga.seed = pseed;
                PhaseVector opt = ga_optimize(objective, sc.geom, sc.cfg, ga).best;
                PhaseVector rnd = detail::random_phases(sc.cfg.ris_elements, baseline_rng);
                const char* tag_o = direct ? "optimized" : "optimized-nodirect";
                const char* tag_r = direct ? "random" : "random-nodirect";
                result.rows.push_back(detail::evaluate_arm(v, tag_o, sc, opt, flags, pseed));
                result.rows.push_back(
                    detail::evaluate_arm(v, tag_r, sc, rnd, flags, mix64(pseed ^ 7)));
            }
        } else {
            Scenario sc = build_scenario(point);

            ScenarioSpec ideal = point;  // design believing the hardware is clean
            ideal.k_r = ideal.k_u = ideal.k_b = 0.0;
            Scenario sci = build_scenario(ideal);
            // one value-independent seed for both arms: the k = 0 point ties
            // exactly and the ignorant design is the same at every k
            const std::uint64_t dseed = mix64(flags.seed ^ 0x6b687769ULL);
            GaConfig gai = sc.ga;
            gai.seed = dseed;
            PhaseVector ignorant = ga_optimize(objective, sci.geom, sci.cfg, gai).best;

            GaConfig ga = sc.ga;
            ga.seed = dseed;
            PhaseVector aware = ga_optimize(objective, sc.geom, sc.cfg, ga).best;
            // the aware designer can always fall back to the ignorant phases,
            // so keep whichever scores better under the true impairments
            RateEvaluator true_eval(sc.geom, sc.cfg);
            auto score = [&](const PhaseVector& p) {
                return objective == GaObjective::sum_rate ? true_eval.sum_rate(p)
                                                          : true_eval.min_rate(p);
            };
            if (score(ignorant) > score(aware)) aware = ignorant;

            result.rows.push_back(detail::evaluate_arm(v, "hwi-aware", sc, aware, flags, pseed));
            result.rows.push_back(
                detail::evaluate_arm(v, "hwi-ignorant", sc, ignorant, flags, mix64(pseed ^ 13)));
        }
    }
    return result;
}

namespace detail {

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

/// Render the CSV artifact (UTF-8, LF). Deterministic inputs give
/// byte-identical output; wall-clock data is deliberately absent.
inline std::string render_csv(const SweepResult& r) {
    std::string out;
    char head[128];
    std::snprintf(head, sizeof head, "# ris-mimo-sim sweep\n# scenario_hash = %016llx\n",
                  static_cast<unsigned long long>(r.scenario_hash));
    out += head;
    out += "# seed = " + std::to_string(r.seed) + "\n";
    out += "# angle_seed = " + std::to_string(r.angle_seed) + "\n";
    out += std::string("# objective = ") +
           (r.objective == GaObjective::sum_rate ? "sum" : "min") + "\n";
    out += std::string("# sweep = ") +
           (r.var == SweepVar::ris_elements ? "N"
            : r.var == SweepVar::bs_antennas ? "M"
                                             : "k_hwi") +
           "\n";
    out += "value,arm";
    for (std::size_t k = 0; k < r.users; ++k) out += ",rate_" + std::to_string(k + 1);
    out += ",sum_rate,min_rate";
    if (r.has_mc) out += ",mc_sum_rate,mc_std_error";
    out += "\n";
    for (const SweepRow& row : r.rows) {
        out += detail::fmt_g(row.value) + "," + row.arm;
        for (double u : row.user_rates) out += "," + detail::fmt_g(u);
        out += "," + detail::fmt_g(row.sum_rate) + "," + detail::fmt_g(row.min_rate);
        if (r.has_mc)
            out += "," + detail::fmt_g(row.mc_sum_rate) + "," + detail::fmt_g(row.mc_std_error);
        out += "\n";
    }
    return out;
}

inline void emit_csv(const SweepResult& r, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << render_csv(r);
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace rismimo

#endif
