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

#ifndef RISMIMO_TESTS_HELPERS_HPP
#define RISMIMO_TESTS_HELPERS_HPP

#include "rismimo/scenario.hpp"

namespace testutil {

/// Scenario with the standard large-scale rules at a configurable problem
/// size, random angles from angle_seed.
inline rismimo::Scenario make_scenario(std::size_t M, std::size_t N, std::size_t K,
                                       std::uint64_t angle_seed = 1) {
    rismimo::ScenarioSpec s = rismimo::desk_scenario();
    s.bs_antennas = M;
    s.ris_elements = N;
    s.users = K;
    s.l_ub.assign(K, 985.0);
    s.angle_seed = angle_seed;
    return rismimo::build_scenario(s);
}

inline rismimo::PhaseVector random_phases(std::size_t n, std::uint64_t seed) {
    rismimo::Rng rng(seed);
    rismimo::PhaseVector p;
    for (std::size_t i = 0; i < n; ++i) p.theta.push_back(rng.uniform(0.0, rismimo::two_pi));
    return p;
}

inline rismimo::PhaseVector zero_phases(std::size_t n) {
    return rismimo::PhaseVector(std::vector<double>(n, 0.0));
}

}  // namespace testutil

#endif
