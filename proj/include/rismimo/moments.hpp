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

#ifndef RISMIMO_MOMENTS_HPP
#define RISMIMO_MOMENTS_HPP

#include <cmath>
#include <vector>

#include "rismimo/channel.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

/// Unnormalized sinc: sin(x)/x with sinc(0) = 1. This is the convention forced
/// by E{exp(j t)} for t uniform on [-x, x].
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Closed-form evaluation of the ergodic-rate moment terms.
///
/// All statistical averaging over NLoS fading, direct links and RIS phase
/// noise is carried out exactly; the only approximation left is the
/// moment-ratio form of the rate itself. Construction precomputes everything
/// that does not depend on the phase configuration, so a GA can evaluate many
/// phase vectors cheaply against one evaluator.
class RateEvaluator {
  public:
    RateEvaluator(const ScenarioGeometry& geom, const SystemConfig& cfg)
        : geom_(geom), cfg_(cfg) {
        cfg.validate();
        geom.validate(cfg);
        K_ = cfg.users;
        N_ = static_cast<double>(cfg.ris_elements);
        M_ = static_cast<double>(cfg.bs_antennas);
        rho_ = geom.ris_bs_rician;

        LosChannels los = los_channels(geom, cfg);
        cvec a_ris = steering_vector(cfg.ris_elements, geom.ris_aod_az, geom.ris_aod_el,
                                     cfg.spacing_over_lambda);
        const std::size_t n_el = cfg.ris_elements;
        base_.resize(K_, cvec(n_el));
        for (std::size_t k = 0; k < K_; ++k)
            for (std::size_t n = 0; n < n_el; ++n)
                base_[k][n] = std::conj(a_ris[n]) * los.h_bar[k][n];

        J_.assign(K_ * K_, cplx{});
        for (std::size_t k = 0; k < K_; ++k)
            for (std::size_t i = 0; i < K_; ++i) {
                cplx acc{};
                for (std::size_t n = 0; n < n_el; ++n)
                    acc += std::conj(los.h_bar[k][n]) * los.h_bar[i][n];
                J_[k * K_ + i] = acc;  // h_bar_k^H h_bar_i
            }

        a_.resize(K_);
        for (std::size_t k = 0; k < K_; ++k)
            a_[k] = geom.ris_bs_gain * geom.user_ris_gain[k] /
                    ((rho_ + 1.0) * (geom.user_ris_rician[k] + 1.0));

        const double krpi = cfg.ris_phase_noise * two_pi / 2.0;
        s_ = sinc(krpi);
        s2_ = sinc(2.0 * krpi);
        q1_ = 1.0 - s_ * s_;          // E|z - s|^2, z = e^{j noise}
        q2_ = s2_ - s_ * s_;          // E (z - s)^2
        t1_ = s_ * (2.0 * s_ * s_ - s2_ - 1.0);  // E (z-s)^2 conj(z-s)
        q4_ = 1.0 - 3.0 * s_ * s_ * s_ * s_ + 2.0 * s_ * s_ * s2_;  // E|z - s|^4
    }

    std::size_t users() const { return K_; }
    const SystemConfig& config() const { return cfg_; }
    const ScenarioGeometry& geometry() const { return geom_; }

    /// Phase-dependent per-user state; compute once per PhaseVector.
    struct PhaseState {
        cvec f;       // f_k = a_N(ris_aod)^H Theta h_bar_k
        cvec W;       // W_ki = sum_n [base_k]_n [base_i]_n e^{2j theta_n}, K x K
        std::vector<double> c;  // c_k
    };

    PhaseState phase_state(const PhaseVector& phases) const {
        const std::size_t n_el = cfg_.ris_elements;
        if (phases.size() != n_el)
            throw std::invalid_argument("phase vector length must equal ris_elements");
        PhaseState st;
        cvec e(n_el), e2(n_el);
        for (std::size_t n = 0; n < n_el; ++n) {
            double t = phases.theta[n];
            e[n] = {std::cos(t), std::sin(t)};
            e2[n] = e[n] * e[n];
        }
        std::vector<cvec> w(K_, cvec(n_el));
        st.f.resize(K_);
        for (std::size_t k = 0; k < K_; ++k) {
            cplx acc{};
            for (std::size_t n = 0; n < n_el; ++n) {
                w[k][n] = base_[k][n] * e[n];
                acc += w[k][n];
            }
            st.f[k] = acc;
        }
        st.W.assign(K_ * K_, cplx{});
        for (std::size_t k = 0; k < K_; ++k)
            for (std::size_t i = k; i < K_; ++i) {
                cplx acc{};
                for (std::size_t n = 0; n < n_el; ++n) acc += w[k][n] * w[i][n];
                st.W[k * K_ + i] = acc;
                st.W[i * K_ + k] = acc;
            }
        st.c.resize(K_);
        for (std::size_t k = 0; k < K_; ++k)
            st.c[k] = s_ * s_ * std::norm(st.f[k]) + q1_ * N_;
        return st;
    }

    cplx f_value(const PhaseState& st, std::size_t k) const { return st.f[k]; }
    double c_value(const PhaseState& st, std::size_t k) const { return st.c[k]; }

    /// E{ ||g_k||^4 }
    double e_signal(const PhaseState& st, std::size_t k) const {
        const double a = a_[k], xi = geom_.user_bs_gain[k];
        double g4 = 2.0 * xi * xi + 4.0 * xi * a * t2(st, k) + a * a * t4(st, k);
        double c2 = xi * xi + 2.0 * xi * a * t2(st, k) + a * a * cross_antenna_same_user(st, k);
        return M_ * g4 + M_ * (M_ - 1.0) * c2;
    }

    /// E{ |g_k^H g_i|^2 }, i != k
    double e_interf(const PhaseState& st, std::size_t k, std::size_t i) const {
        if (i == k) throw std::domain_error("e_interf requires i != k");
        return M_ * cross_moment(st, k, i) + M_ * (M_ - 1.0) * offdiag_interf(st, k, i);
    }

    /// E{ ||g_k||^2 } = M (a_k rho eps_k c_k + a_k N (rho + eps_k + 1) + xi_k)
    double e_noise(const PhaseState& st, std::size_t k) const {
        const double eps = geom_.user_ris_rician[k];
        return M_ * (a_[k] * rho_ * eps * st.c[k] + a_[k] * N_ * (rho_ + eps + 1.0) +
                     geom_.user_bs_gain[k]);
    }

    /// Per-antenna E{ |g_im|^2 |g_km|^2 }, i != k (independent of m).
    double cross_moment(const PhaseState& st, std::size_t k, std::size_t i) const {
        if (i == k) throw std::domain_error("cross_moment requires i != k");
        const double xk = geom_.user_bs_gain[k], xi_i = geom_.user_bs_gain[i];
        return xk * xi_i + xi_i * a_[k] * t2(st, k) + xk * a_[i] * t2(st, i) +
               a_[k] * a_[i] * cross_antenna_pair(st, k, i);
    }

    /// Per-antenna E{ |g_km|^4 } (independent of m).
    double fourth_moment_per_antenna(const PhaseState& st, std::size_t k) const {
        const double a = a_[k], xi = geom_.user_bs_gain[k];
        return 2.0 * xi * xi + 4.0 * xi * a * t2(st, k) + a * a * t4(st, k);
    }

    /// Transceiver distortion power term of the SINR denominator.
    double e_hwi(const PhaseState& st, std::size_t k) const {
        const double ku = cfg_.tx_impairment, kb = cfg_.rx_impairment;
        if (ku == 0.0 && kb == 0.0) return 0.0;
        double interf_p = 0.0, diag_p = 0.0;
        for (std::size_t i = 0; i < K_; ++i) {
            if (i == k) continue;
            interf_p += cfg_.tx_power_w[i] * e_interf(st, k, i);
            diag_p += cfg_.tx_power_w[i] * M_ * cross_moment(st, k, i);
        }
        diag_p += cfg_.tx_power_w[k] * M_ * fourth_moment_per_antenna(st, k);
        return ku * (interf_p + cfg_.tx_power_w[k] * e_signal(st, k)) + (1.0 + ku) * kb * diag_p;
    }

    RateBreakdown breakdown(const PhaseState& st, std::size_t k) const {
        RateBreakdown rb;
        rb.e_signal = e_signal(st, k);
        rb.e_interf.assign(K_, 0.0);
        double denom = 0.0;
        for (std::size_t i = 0; i < K_; ++i) {
            if (i == k) continue;
            rb.e_interf[i] = e_interf(st, k, i);
            denom += cfg_.tx_power_w[i] * rb.e_interf[i];
        }
        rb.e_noise = e_noise(st, k);
        rb.e_hwi = e_hwi(st, k);
        denom += rb.e_hwi + cfg_.noise_power_w * rb.e_noise;
        rb.rate = std::log2(1.0 + cfg_.tx_power_w[k] * rb.e_signal / denom);
        return rb;
    }

    double rate(const PhaseState& st, std::size_t k) const { return breakdown(st, k).rate; }

    double sum_rate(const PhaseState& st) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < K_; ++k) acc += rate(st, k);
        return acc;
    }

    double min_rate(const PhaseState& st) const {
        double best = rate(st, 0);
        for (std::size_t k = 1; k < K_; ++k) best = std::min(best, rate(st, k));
        return best;
    }

    // PhaseVector conveniences; hot loops should reuse one PhaseState instead.
    RateBreakdown breakdown(const PhaseVector& p, std::size_t k) const {
        return breakdown(phase_state(p), k);
    }
    double rate(std::size_t k, const PhaseVector& p) const { return breakdown(p, k).rate; }
    double sum_rate(const PhaseVector& p) const { return sum_rate(phase_state(p)); }
    double min_rate(const PhaseVector& p) const { return min_rate(phase_state(p)); }

  private:
    // E|v_km|^2 / a_k
    double t2(const PhaseState& st, std::size_t k) const {
        const double eps = geom_.user_ris_rician[k];
        return rho_ * eps * st.c[k] + rho_ * N_ + eps * N_ + N_;
    }

    // E|F_k|^4 over phase noise; F_k = sum_n [base_k]_n e^{j(theta_n + noise_n)}
    double phi4(const PhaseState& st, std::size_t k) const {
        const double f2 = std::norm(st.f[k]);
        const cplx W = st.W[k * K_ + k];
        double eg4 = 2.0 * N_ * N_ * q1_ * q1_ + std::norm(W) * q2_ * q2_ +
                     N_ * (q4_ - 2.0 * q1_ * q1_ - q2_ * q2_);
        return s_ * s_ * s_ * s_ * f2 * f2 + 4.0 * s_ * s_ * q1_ * N_ * f2 +
               2.0 * q2_ * s_ * s_ * std::real(std::conj(st.f[k] * st.f[k]) * W) +
               4.0 * s_ * t1_ * f2 + eg4;
    }

    // E{ |F_k|^2 |F_i|^2 } over the shared phase noise
    double phi22(const PhaseState& st, std::size_t k, std::size_t i) const {
        const double fk2 = std::norm(st.f[k]), fi2 = std::norm(st.f[i]);
        const cplx W = st.W[k * K_ + i], J = J_[k * K_ + i];
        return s_ * s_ * s_ * s_ * fk2 * fi2 + (s_ * s_ * q1_ * N_ + 2.0 * s_ * t1_) * (fk2 + fi2) +
               2.0 * s_ * s_ * q2_ * std::real(std::conj(st.f[k]) * std::conj(st.f[i]) * W) +
               2.0 * s_ * s_ * q1_ * std::real(std::conj(st.f[k]) * st.f[i] * J) +
               q1_ * q1_ * (N_ * N_ - 2.0 * N_ + std::norm(J)) +
               q2_ * q2_ * (std::norm(W) - N_) + N_ * q4_;
    }

    // s^2 Re{ conj(f_k) f_i conj(J_ki) } + (1 - s^2) |J_ki|^2
    double coupled_los(const PhaseState& st, std::size_t k, std::size_t i) const {
        const cplx J = J_[k * K_ + i];
        return s_ * s_ * std::real(std::conj(st.f[k]) * st.f[i] * std::conj(J)) +
               q1_ * std::norm(J);
    }

    // E|v_km|^4 / a_k^2
    double t4(const PhaseState& st, std::size_t k) const {
        const double eps = geom_.user_ris_rician[k], c = st.c[k];
        return rho_ * rho_ * eps * eps * phi4(st, k) +
               2.0 * N_ * N_ * (rho_ * rho_ + eps * eps + 1.0) + 2.0 * N_ +
               4.0 * rho_ * eps * N_ * c * (rho_ + eps + 1.0) + 4.0 * rho_ * eps * N_ * N_ +
               4.0 * (rho_ + eps) * N_ * (N_ + 1.0) + 8.0 * rho_ * eps * c;
    }

    // E{ |v_km|^2 |v_km'|^2 } / a_k^2, m != m'
    double cross_antenna_same_user(const PhaseState& st, std::size_t k) const {
        const double eps = geom_.user_ris_rician[k], c = st.c[k];
        return rho_ * rho_ * eps * eps * phi4(st, k) +
               (4.0 * rho_ * rho_ + 2.0 * rho_) * eps * N_ * c + 2.0 * rho_ * eps * eps * N_ * c +
               2.0 * rho_ * rho_ * N_ * N_ + 2.0 * rho_ * eps * N_ * N_ +
               2.0 * rho_ * N_ * (N_ + 1.0) + eps * eps * N_ * N_ + 2.0 * eps * N_ * N_ +
               N_ * N_ + N_ + 4.0 * rho_ * eps * c + 2.0 * eps * N_;
    }

    // E{ |v_km|^2 |v_im|^2 } / (a_k a_i), same antenna, i != k
    double cross_antenna_pair(const PhaseState& st, std::size_t k, std::size_t i) const {
        const double ek = geom_.user_ris_rician[k], ei = geom_.user_ris_rician[i];
        const double ck = st.c[k], ci = st.c[i];
        const double J2 = std::norm(J_[k * K_ + i]);
        return rho_ * rho_ * ek * ei * phi22(st, k, i) + rho_ * rho_ * N_ * (ek * ck + ei * ci) +
               rho_ * ek * ei * N_ * (ck + ci) + rho_ * N_ * (ek * ck + ei * ci) +
               rho_ * rho_ * N_ * N_ + rho_ * N_ * N_ * (ek + ei) + 2.0 * rho_ * N_ * N_ +
               ek * ei * (N_ * N_ + J2) + (ek + ei) * (N_ * N_ + N_) + N_ * N_ + N_ +
               2.0 * rho_ * (ek * ei * coupled_los(st, k, i) + ek * ck + ei * ci + N_);
    }

    // E{ conj(g_km) g_im g_km' conj(g_im') }, m != m' (real by symmetry), i != k
    double offdiag_interf(const PhaseState& st, std::size_t k, std::size_t i) const {
        const double ek = geom_.user_ris_rician[k], ei = geom_.user_ris_rician[i];
        const double ck = st.c[k], ci = st.c[i];
        const double J2 = std::norm(J_[k * K_ + i]);
        return a_[k] * a_[i] *
               (rho_ * rho_ * ek * ei * phi22(st, k, i) +
                2.0 * rho_ * ek * ei * coupled_los(st, k, i) +
                rho_ * rho_ * N_ * (ek * ck + ei * ci) + 2.0 * rho_ * (ek * ck + ei * ci) +
                rho_ * rho_ * N_ * N_ + 2.0 * rho_ * N_ + ek * ei * J2 + (ek + ei) * N_ + N_);
    }

    ScenarioGeometry geom_;
    SystemConfig cfg_;
    std::size_t K_ = 0;
    double M_ = 0.0, N_ = 0.0, rho_ = 0.0;
    std::vector<cvec> base_;   // per user: conj(a_N(ris_aod))_n * h_bar_k[n]
    cvec J_;                   // K x K Gram matrix of the user LoS vectors
    std::vector<double> a_;    // a_k
    double s_ = 1.0, s2_ = 1.0, q1_ = 0.0, q2_ = 0.0, t1_ = 0.0, q4_ = 0.0;
};

// Convenience wrappers mirroring the per-operation surface. Each builds a
// fresh evaluator; use RateEvaluator directly in hot loops.

inline cplx f_k(const PhaseVector& phases, const ScenarioGeometry& geom,
                const SystemConfig& cfg, std::size_t k) {
    RateEvaluator ev(geom, cfg);
    return ev.f_value(ev.phase_state(phases), k);
}

inline double e_signal(std::size_t k, const PhaseVector& phases, const ScenarioGeometry& geom,
                       const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.e_signal(ev.phase_state(phases), k);
}

inline double e_interf(std::size_t k, std::size_t i, const PhaseVector& phases,
                       const ScenarioGeometry& geom, const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.e_interf(ev.phase_state(phases), k, i);
}

inline double e_noise(std::size_t k, const PhaseVector& phases, const ScenarioGeometry& geom,
                      const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.e_noise(ev.phase_state(phases), k);
}

inline double cross_moment(std::size_t k, std::size_t i, const PhaseVector& phases,
                           const ScenarioGeometry& geom, const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.cross_moment(ev.phase_state(phases), k, i);
}

inline double fourth_moment_per_antenna(std::size_t k, const PhaseVector& phases,
                                        const ScenarioGeometry& geom, const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.fourth_moment_per_antenna(ev.phase_state(phases), k);
}

inline double e_hwi(std::size_t k, const PhaseVector& phases, const ScenarioGeometry& geom,
                    const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.e_hwi(ev.phase_state(phases), k);
}

inline double rate(std::size_t k, const PhaseVector& phases, const ScenarioGeometry& geom,
                   const SystemConfig& cfg) {
    RateEvaluator ev(geom, cfg);
    return ev.rate(ev.phase_state(phases), k);
}

/// Large-M limit of the rate under power scaling p_k = p/M with pure-NLoS
/// RIS links (requires rho = eps_k = 0):
///   log2(1 + p A1 / (p (1+k_u) sum_{i!=k} A2_i + p k_u A1 + A3 sigma^2))
/// with A1 = nu mu_k N (nu mu_k N + nu mu_k + 2 xi_k) + xi_k^2,
/// A2_i = nu^2 mu_k mu_i N, A3 = nu mu_k N + xi_k.
inline double asymptotic_rate(std::size_t k, const ScenarioGeometry& geom,
                              const SystemConfig& cfg, double p_total) {
    cfg.validate();
    geom.validate(cfg);
    if (geom.ris_bs_rician != 0.0)
        throw std::invalid_argument("asymptotic_rate requires ris_bs_rician == 0");
    for (double e : geom.user_ris_rician)
        if (e != 0.0) throw std::invalid_argument("asymptotic_rate requires user_ris_rician == 0");
    const double nu = geom.ris_bs_gain, mu = geom.user_ris_gain[k], xi = geom.user_bs_gain[k];
    const double N = static_cast<double>(cfg.ris_elements), ku = cfg.tx_impairment;
    const double a1 = nu * mu * N * (nu * mu * N + nu * mu + 2.0 * xi) + xi * xi;
    const double a3 = nu * mu * N + xi;
    double sum_a2 = 0.0;
    for (std::size_t i = 0; i < cfg.users; ++i)
        if (i != k) sum_a2 += nu * nu * mu * geom.user_ris_gain[i] * N;
    return std::log2(1.0 + p_total * a1 /
                               (p_total * (1.0 + ku) * sum_a2 + p_total * ku * a1 +
                                a3 * cfg.noise_power_w));
}

}  // namespace rismimo

#endif
