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

#ifndef RISMIMO_MC_HPP
#define RISMIMO_MC_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rismimo/channel.hpp"
#include "rismimo/rng.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

/// Streaming (Welford) accumulator; partial accumulators from independent
/// substreams merge associatively.
class McAccumulator {
  public:
    void add(double x) {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const McAccumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        double delta = o.mean_ - mean_;
        mean_ += delta * nb / (na + nb);
        m2_ += o.m2_ + delta * delta * na * nb / (na + nb);
        n_ += o.n_;
    }

    McEstimate estimate() const {
        McEstimate e;
        e.n_samples = n_;
        e.mean = mean_;
        if (n_ > 1) {
            double var = m2_ / static_cast<double>(n_ - 1);
            e.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n_));
        }
        return e;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

enum class MomentKind { signal, noise, interf, cross, fourth };
enum class RateMode { instantaneous, moment_ratio };
enum class HwiMode { conditional, sampled };

namespace detail {

/// Precomputed scale factors and LoS components for fast repeated draws.
struct McSampler {
    std::size_t M, N, K;
    double rho_w_los, rho_w_nlos;       // sqrt(nu rho/(rho+1)), sqrt(nu/(rho+1))
    std::vector<double> eps_w_los, eps_w_nlos, d_scale;
    double pn_bound;                    // k_r * pi
    cmat H_bar;                         // scaled by nothing; apply factors per draw
    std::vector<cvec> h_bar;
    cvec e_theta;                       // designed phase shifts e^{j theta_n}

    McSampler(const ScenarioGeometry& geom, const SystemConfig& cfg, const PhaseVector& phases) {
        cfg.validate();
        geom.validate(cfg);
        if (phases.size() != cfg.ris_elements)
            throw std::invalid_argument("phase vector length must equal ris_elements");
        M = cfg.bs_antennas;
        N = cfg.ris_elements;
        K = cfg.users;
        const double rho = geom.ris_bs_rician;
        rho_w_los = std::sqrt(geom.ris_bs_gain * rho / (rho + 1.0));
        rho_w_nlos = std::sqrt(geom.ris_bs_gain / (rho + 1.0));
        for (std::size_t k = 0; k < K; ++k) {
            double eps = geom.user_ris_rician[k];
            eps_w_los.push_back(std::sqrt(geom.user_ris_gain[k] * eps / (eps + 1.0)));
            eps_w_nlos.push_back(std::sqrt(geom.user_ris_gain[k] / (eps + 1.0)));
            d_scale.push_back(std::sqrt(geom.user_bs_gain[k]));
        }
        pn_bound = cfg.ris_phase_noise * two_pi / 2.0;
        LosChannels los = los_channels(geom, cfg);
        H_bar = std::move(los.H_bar_rb);
        h_bar = std::move(los.h_bar);
        e_theta.resize(N);
        for (std::size_t n = 0; n < N; ++n) {
            double t = phases.theta[n];
            e_theta[n] = {std::cos(t), std::sin(t)};
        }
    }

    /// Fresh draw of all g_k (length-M vectors), written into `g`.
    void draw_full(Rng& rng, std::vector<cvec>& g, cmat& H, std::vector<cvec>& th) const {
        if (H.rows != M) H = cmat(M, N);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t n = 0; n < N; ++n)
                H(m, n) = rho_w_los * H_bar(m, n) + rho_w_nlos * rng.cnormal();
        if (th.size() != K) th.assign(K, cvec(N));
        g.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t n = 0; n < N; ++n)
                th[k][n] = eps_w_los[k] * h_bar[k][n] + eps_w_nlos[k] * rng.cnormal();
            g[k].assign(M, cplx{});
            for (std::size_t m = 0; m < M; ++m) g[k][m] = d_scale[k] * rng.cnormal();
        }
        for (std::size_t n = 0; n < N; ++n) {
            cplx shift = e_theta[n];
            if (pn_bound != 0.0) {
                double a = rng.uniform(-pn_bound, pn_bound);
                shift *= cplx{std::cos(a), std::sin(a)};
            }
            for (std::size_t k = 0; k < K; ++k) th[k][n] *= shift;
        }
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t m = 0; m < M; ++m) {
                cplx acc{};
                const cplx* row = &H.data[m * N];
                for (std::size_t n = 0; n < N; ++n) acc += row[n] * th[k][n];
                g[k][m] += acc;
            }
    }

    /// Fresh draw of a single antenna (m = 0, unit LoS phasor): g_k0 per user.
    void draw_antenna(Rng& rng, cvec& gk) const {
        thread_local cvec row, shift;
        row.resize(N);
        shift.resize(N);
        for (std::size_t n = 0; n < N; ++n)
            row[n] = rho_w_los * H_bar(0, n) + rho_w_nlos * rng.cnormal();
        for (std::size_t n = 0; n < N; ++n) {
            shift[n] = e_theta[n];
            if (pn_bound != 0.0) {
                double a = rng.uniform(-pn_bound, pn_bound);
                shift[n] *= cplx{std::cos(a), std::sin(a)};
            }
        }
        gk.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            cplx acc = d_scale[k] * rng.cnormal();
            for (std::size_t n = 0; n < N; ++n) {
                cplx hn = eps_w_los[k] * h_bar[k][n] + eps_w_nlos[k] * rng.cnormal();
                acc += row[n] * shift[n] * hn;
            }
            gk[k] = acc;
        }
    }
};

inline double norm2(const cvec& v) {
    double acc = 0.0;
    for (const cplx& x : v) acc += std::norm(x);
    return acc;
}

inline cplx inner(const cvec& a, const cvec& b) {  // a^H b
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

}  // namespace detail

/// Estimates of every moment entering the rate of user k, from two passes:
/// full-vector draws (signal/noise/interf) and single-antenna draws
/// (fourth/cross), which are much cheaper per sample.
struct UserMomentEstimates {
    McEstimate signal, noise, fourth;
    std::vector<McEstimate> interf;  // slot k unused
    std::vector<McEstimate> cross;   // slot k unused
};

inline UserMomentEstimates estimate_user_moments(std::size_t k, const PhaseVector& phases,
                                                 const ScenarioGeometry& geom,
                                                 const SystemConfig& cfg,
                                                 std::uint64_t n_vector_samples,
                                                 std::uint64_t n_antenna_samples,
                                                 std::uint64_t seed) {
    detail::McSampler smp(geom, cfg, phases);
    const std::size_t K = smp.K;
    if (k >= K) throw std::invalid_argument("user index out of range");

    McAccumulator acc_sig, acc_noise, acc_fourth;
    std::vector<McAccumulator> acc_int(K), acc_cross(K);

    Rng rng = Rng::substream(seed, 0);
    std::vector<cvec> g;
    cmat H;
    std::vector<cvec> th;
    for (std::uint64_t it = 0; it < n_vector_samples; ++it) {
        smp.draw_full(rng, g, H, th);
        double n2 = detail::norm2(g[k]);
        acc_noise.add(n2);
        acc_sig.add(n2 * n2);
        for (std::size_t i = 0; i < K; ++i)
            if (i != k) acc_int[i].add(std::norm(detail::inner(g[k], g[i])));
    }

    Rng rng2 = Rng::substream(seed, 1);
    cvec gk;
    for (std::uint64_t it = 0; it < n_antenna_samples; ++it) {
        smp.draw_antenna(rng2, gk);
        double pk = std::norm(gk[k]);
        acc_fourth.add(pk * pk);
        for (std::size_t i = 0; i < K; ++i)
            if (i != k) acc_cross[i].add(pk * std::norm(gk[i]));
    }

    UserMomentEstimates out;
    out.signal = acc_sig.estimate();
    out.noise = acc_noise.estimate();
    out.fourth = acc_fourth.estimate();
    out.interf.resize(K);
    out.cross.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        out.interf[i] = acc_int[i].estimate();
        out.cross[i] = acc_cross[i].estimate();
    }
    return out;
}

/// Sample mean of one moment of user k. `i` selects the other user for
/// interf/cross and is ignored otherwise.
inline McEstimate estimate_moment(MomentKind which, std::size_t k, std::size_t i,
                                  const PhaseVector& phases, const ScenarioGeometry& geom,
                                  const SystemConfig& cfg, std::uint64_t n_samples,
                                  std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("estimate_moment: need >= 1e3 samples");
    if ((which == MomentKind::interf || which == MomentKind::cross) && i == k)
        throw std::invalid_argument("estimate_moment: interf/cross require i != k");
    bool vector_kind = which == MomentKind::signal || which == MomentKind::noise ||
                       which == MomentKind::interf;
    UserMomentEstimates all = estimate_user_moments(
        k, phases, geom, cfg, vector_kind ? n_samples : 0, vector_kind ? 0 : n_samples, seed);
    switch (which) {
        case MomentKind::signal: return all.signal;
        case MomentKind::noise: return all.noise;
        case MomentKind::interf: return all.interf[i];
        case MomentKind::cross: return all.cross[i];
        case MomentKind::fourth: return all.fourth;
    }
    throw std::invalid_argument("estimate_moment: unknown moment selector");
}

/// MC estimate of the transceiver-distortion power seen by user k,
/// conditioned per realization (distortions enter as additive noise powers).
inline McEstimate estimate_hwi_power(std::size_t k, const PhaseVector& phases,
                                     const ScenarioGeometry& geom, const SystemConfig& cfg,
                                     std::uint64_t n_samples, std::uint64_t seed) {
    detail::McSampler smp(geom, cfg, phases);
    const std::size_t K = smp.K, M = smp.M;
    const double ku = cfg.tx_impairment, kb = cfg.rx_impairment;
    McAccumulator acc;
    Rng rng = Rng::substream(seed, 0);
    std::vector<cvec> g;
    cmat H;
    std::vector<cvec> th;
    for (std::uint64_t it = 0; it < n_samples; ++it) {
        smp.draw_full(rng, g, H, th);
        double p_t = 0.0, p_r = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            p_t += cfg.tx_power_w[i] * std::norm(detail::inner(g[k], g[i]));
            double diag = 0.0;
            for (std::size_t m = 0; m < M; ++m) diag += std::norm(g[i][m]) * std::norm(g[k][m]);
            p_r += cfg.tx_power_w[i] * diag;
        }
        acc.add(ku * p_t + (1.0 + ku) * kb * p_r);
    }
    return acc.estimate();
}

/// MC ergodic rate of user k in bits/s/Hz.
///
/// instantaneous: averages log2(1 + SINR) with the SINR conditioned on each
/// realization (HWI powers enter as conditional variances; `hwi_mode`
/// `sampled` draws explicit distortion noise instead, for auditing).
/// moment_ratio: plugs block-wise MC moment means into the closed ratio; the
/// std_error is the spread over 16 sample blocks.
inline McEstimate estimate_ergodic_rate(std::size_t k, const PhaseVector& phases,
                                        const ScenarioGeometry& geom, const SystemConfig& cfg,
                                        std::uint64_t n_samples, std::uint64_t seed, RateMode mode,
                                        HwiMode hwi_mode = HwiMode::conditional) {
    if (n_samples < 1000) throw std::invalid_argument("estimate_ergodic_rate: need >= 1e3 samples");
    detail::McSampler smp(geom, cfg, phases);
    const std::size_t K = smp.K, M = smp.M;
    const double ku = cfg.tx_impairment, kb = cfg.rx_impairment;

    Rng rng = Rng::substream(seed, 0);
    std::vector<cvec> g;
    cmat H;
    std::vector<cvec> th;

    if (mode == RateMode::instantaneous) {
        McAccumulator acc;
        for (std::uint64_t it = 0; it < n_samples; ++it) {
            smp.draw_full(rng, g, H, th);
            double sig = 0.0, interf = 0.0, hwi = 0.0;
            double n2 = detail::norm2(g[k]);
            sig = cfg.tx_power_w[k] * n2 * n2;
            for (std::size_t i = 0; i < K; ++i)
                if (i != k) interf += cfg.tx_power_w[i] * std::norm(detail::inner(g[k], g[i]));
            if (hwi_mode == HwiMode::conditional) {
                if (ku != 0.0 || kb != 0.0) {
                    for (std::size_t i = 0; i < K; ++i) {
                        hwi += ku * cfg.tx_power_w[i] * std::norm(detail::inner(g[k], g[i]));
                        double diag = 0.0;
                        for (std::size_t m = 0; m < M; ++m)
                            diag += std::norm(g[i][m]) * std::norm(g[k][m]);
                        hwi += (1.0 + ku) * kb * cfg.tx_power_w[i] * diag;
                    }
                }
            } else {
                // explicit distortion sampling: z_t,i ~ CN(0, ku p_i),
                // z_r,m ~ CN(0, kb sum_i |y_im|^2), y_i = g_i (sqrt(p_i) x_i + z_t,i)
                cplx tx_mix{};
                std::vector<double> ydiag(M, 0.0);
                for (std::size_t i = 0; i < K; ++i) {
                    cplx xi = rng.cnormal();
                    cplx zti = std::sqrt(ku * cfg.tx_power_w[i]) * rng.cnormal();
                    cplx amp = std::sqrt(cfg.tx_power_w[i]) * xi + zti;
                    for (std::size_t m = 0; m < M; ++m)
                        ydiag[m] += std::norm(g[i][m] * amp);
                    tx_mix += detail::inner(g[k], g[i]) * zti;
                }
                cplx gkzr{};
                for (std::size_t m = 0; m < M; ++m)
                    gkzr += std::conj(g[k][m]) * (std::sqrt(kb * ydiag[m]) * rng.cnormal());
                hwi = std::norm(tx_mix) + std::norm(gkzr);
            }
            double sinr = sig / (interf + hwi + cfg.noise_power_w * n2);
            acc.add(std::log2(1.0 + sinr));
        }
        return acc.estimate();
    }

    // moment-ratio mode
    const std::uint64_t blocks = 16;
    McAccumulator block_rates;
    std::uint64_t per_block = n_samples / blocks;
    if (per_block == 0) per_block = 1;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        double m_sig = 0.0, m_noise = 0.0, m_hwi = 0.0;
        std::vector<double> m_int(K, 0.0);
        for (std::uint64_t it = 0; it < per_block; ++it) {
            smp.draw_full(rng, g, H, th);
            double n2 = detail::norm2(g[k]);
            m_noise += n2;
            m_sig += n2 * n2;
            for (std::size_t i = 0; i < K; ++i)
                if (i != k) m_int[i] += std::norm(detail::inner(g[k], g[i]));
            if (ku != 0.0 || kb != 0.0) {
                for (std::size_t i = 0; i < K; ++i) {
                    m_hwi += ku * cfg.tx_power_w[i] * std::norm(detail::inner(g[k], g[i]));
                    double diag = 0.0;
                    for (std::size_t m = 0; m < M; ++m)
                        diag += std::norm(g[i][m]) * std::norm(g[k][m]);
                    m_hwi += (1.0 + ku) * kb * cfg.tx_power_w[i] * diag;
                }
            }
        }
        double nb = static_cast<double>(per_block);
        double denom = m_hwi / nb + cfg.noise_power_w * m_noise / nb;
        for (std::size_t i = 0; i < K; ++i)
            if (i != k) denom += cfg.tx_power_w[i] * m_int[i] / nb;
        block_rates.add(std::log2(1.0 + cfg.tx_power_w[k] * (m_sig / nb) / denom));
    }
    McEstimate est = block_rates.estimate();
    est.n_samples = per_block * blocks;
    return est;
}

}  // namespace rismimo

#endif
