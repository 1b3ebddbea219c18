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

#ifndef RISMIMO_CHANNEL_HPP
#define RISMIMO_CHANNEL_HPP

#include <cmath>
#include <cstdint>

#include "rismimo/rng.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

/// USPA response vector of a Z-element square array (Z a perfect square).
///
/// Element (m, n), 0 <= m, n <= sqrt(Z)-1, equals
///   exp(j * 2*pi * (d/lambda) * (m sin(az) sin(el) + n cos(el)))
/// flattened row-major with m as the outer index. Every entry has unit magnitude.
inline cvec steering_vector(std::size_t z, double az, double el, double d_over_lambda) {
    if (z == 0 || !is_perfect_square(z))
        throw std::invalid_argument("steering_vector: array size must be a perfect square");
    if (!(d_over_lambda > 0.0))
        throw std::invalid_argument("steering_vector: d_over_lambda must be positive");
    auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(z))));
    double ka = two_pi * d_over_lambda * std::sin(az) * std::sin(el);
    double ke = two_pi * d_over_lambda * std::cos(el);
    cvec out(z);
    std::size_t idx = 0;
    for (std::size_t m = 0; m < side; ++m)
        for (std::size_t n = 0; n < side; ++n, ++idx) {
            double arg = ka * static_cast<double>(m) + ke * static_cast<double>(n);
            out[idx] = {std::cos(arg), std::sin(arg)};
        }
    return out;
}

/// Planar-array response for an arbitrary element count: a perfect square uses
/// the square layout of steering_vector; otherwise the array is the most
/// nearly square r x c rectangle with r*c = Z (a prime count degenerates to a
/// line). Entries keep unit magnitude either way.
inline cvec array_response(std::size_t z, double az, double el, double d_over_lambda) {
    if (is_perfect_square(z)) return steering_vector(z, az, el, d_over_lambda);
    if (z == 0 || !(d_over_lambda > 0.0))
        throw std::invalid_argument("array_response: invalid array size or spacing");
    std::size_t rows = 1;
    for (std::size_t r = 1; r * r <= z; ++r)
        if (z % r == 0) rows = r;
    std::size_t cols = z / rows;
    double ka = two_pi * d_over_lambda * std::sin(az) * std::sin(el);
    double ke = two_pi * d_over_lambda * std::cos(el);
    cvec out(z);
    std::size_t idx = 0;
    for (std::size_t m = 0; m < rows; ++m)
        for (std::size_t n = 0; n < cols; ++n, ++idx) {
            double arg = ka * static_cast<double>(m) + ke * static_cast<double>(n);
            out[idx] = {std::cos(arg), std::sin(arg)};
        }
    return out;
}

struct LosChannels {
    cmat H_bar_rb;            // M x N, rank one, unit-magnitude entries
    std::vector<cvec> h_bar;  // K user LoS vectors, length N
};

/// Deterministic LoS components: H_bar_rb = a_M(bs_aoa) a_N(ris_aod)^H and
/// h_bar_k = a_N(user ris_aoa).
inline LosChannels los_channels(const ScenarioGeometry& geom, const SystemConfig& cfg) {
    cfg.validate();
    geom.validate(cfg);
    const std::size_t M = cfg.bs_antennas, N = cfg.ris_elements;
    cvec a_bs = array_response(M, geom.bs_aoa_az, geom.bs_aoa_el, cfg.spacing_over_lambda);
    cvec a_ris = steering_vector(N, geom.ris_aod_az, geom.ris_aod_el, cfg.spacing_over_lambda);
    LosChannels los;
    los.H_bar_rb = cmat(M, N);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t n = 0; n < N; ++n)
            los.H_bar_rb(m, n) = a_bs[m] * std::conj(a_ris[n]);
    los.h_bar.reserve(cfg.users);
    for (std::size_t k = 0; k < cfg.users; ++k)
        los.h_bar.push_back(steering_vector(N, geom.user_angles[k].ris_aoa_az,
                                            geom.user_angles[k].ris_aoa_el,
                                            cfg.spacing_over_lambda));
    return los;
}

/// One random draw of all channel components and RIS phase noise.
///
/// H_rb = sqrt(nu) (sqrt(rho/(rho+1)) H_bar + sqrt(1/(rho+1)) H_tilde) with
/// i.i.d. CN(0,1) H_tilde; h_k analogous with (mu_k, eps_k); d_k Rayleigh;
/// phase noise i.i.d. uniform on [-k_r*pi, k_r*pi]. Deterministic per seed.
inline ChannelRealization sample_realization(const ScenarioGeometry& geom,
                                             const SystemConfig& cfg, std::uint64_t seed) {
    LosChannels los = los_channels(geom, cfg);
    const std::size_t M = cfg.bs_antennas, N = cfg.ris_elements, K = cfg.users;
    Rng rng(seed);

    ChannelRealization out;
    const double rho = geom.ris_bs_rician;
    const double wl = std::sqrt(geom.ris_bs_gain * rho / (rho + 1.0));
    const double wn = std::sqrt(geom.ris_bs_gain / (rho + 1.0));
    out.H_rb = cmat(M, N);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t n = 0; n < N; ++n)
            out.H_rb(m, n) = wl * los.H_bar_rb(m, n) + wn * rng.cnormal();

    out.h.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double eps = geom.user_ris_rician[k];
        const double ul = std::sqrt(geom.user_ris_gain[k] * eps / (eps + 1.0));
        const double un = std::sqrt(geom.user_ris_gain[k] / (eps + 1.0));
        out.h[k].resize(N);
        for (std::size_t n = 0; n < N; ++n)
            out.h[k][n] = ul * los.h_bar[k][n] + un * rng.cnormal();
    }

    out.d.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double sd = std::sqrt(geom.user_bs_gain[k]);
        out.d[k].resize(M);
        for (std::size_t m = 0; m < M; ++m) out.d[k][m] = sd * rng.cnormal();
    }

    const double bound = cfg.ris_phase_noise * two_pi / 2.0;  // k_r * pi
    out.phase_noise.resize(N);
    for (std::size_t n = 0; n < N; ++n)
        out.phase_noise[n] = bound == 0.0 ? 0.0 : rng.uniform(-bound, bound);
    return out;
}

/// Effective uplink channels g_k = d_k + H_rb diag(exp(j(theta + phase_noise))) h_k.
inline std::vector<cvec> effective_channel(const ChannelRealization& real,
                                           const PhaseVector& phases) {
    const std::size_t M = real.H_rb.rows, N = real.H_rb.cols, K = real.h.size();
    if (phases.size() != N || real.phase_noise.size() != N)
        throw std::invalid_argument("effective_channel: phase vector length mismatch");
    cvec shift(N);
    for (std::size_t n = 0; n < N; ++n) {
        double a = phases.theta[n] + real.phase_noise[n];
        shift[n] = {std::cos(a), std::sin(a)};
    }
    std::vector<cvec> g(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (real.h[k].size() != N || real.d[k].size() != M)
            throw std::invalid_argument("effective_channel: realization dimension mismatch");
        g[k] = real.d[k];
        cvec th(N);
        for (std::size_t n = 0; n < N; ++n) th[n] = shift[n] * real.h[k][n];
        for (std::size_t m = 0; m < M; ++m) {
            cplx acc{0.0, 0.0};
            const cplx* row = &real.H_rb.data[m * N];
            for (std::size_t n = 0; n < N; ++n) acc += row[n] * th[n];
            g[k][m] += acc;
        }
    }
    return g;
}

}  // namespace rismimo

#endif
