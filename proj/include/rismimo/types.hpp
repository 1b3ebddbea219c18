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

#ifndef RISMIMO_TYPES_HPP
#define RISMIMO_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rismimo {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Dense complex matrix, row-major.
struct cmat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    cvec data;

    cmat() = default;
    cmat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    cplx& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

constexpr double two_pi = 6.283185307179586476925286766559;

inline bool is_perfect_square(std::size_t z) {
    auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(z))));
    return r * r == z;
}

/// Scalar system parameters: array sizes, powers and impairment severities.
struct SystemConfig {
    std::size_t bs_antennas = 0;   // M, perfect square (USPA)
    std::size_t ris_elements = 0;  // N, perfect square (USPA)
    std::size_t users = 0;         // K
    std::vector<double> tx_power_w;  // p_k, linear watts, length K
    double noise_power_w = 0.0;      // sigma^2, linear watts
    double ris_phase_noise = 0.0;    // k_r in [0,1]
    double tx_impairment = 0.0;      // k_u >= 0
    double rx_impairment = 0.0;      // k_b >= 0
    double spacing_over_lambda = 0.5;  // d / lambda

    void validate() const {
        // The BS count is not forced to a square: non-square M uses the closest
        // rectangular planar array, which leaves every rate moment unchanged
        // (only the unit magnitude of the LoS phasors enters the moments).
        if (bs_antennas == 0)
            throw std::invalid_argument("bs_antennas must be positive");
        if (ris_elements == 0 || !is_perfect_square(ris_elements))
            throw std::invalid_argument("ris_elements must be a positive perfect square");
        if (users == 0)
            throw std::invalid_argument("users must be positive");
        if (tx_power_w.size() != users)
            throw std::invalid_argument("tx_power_w must have one entry per user");
        for (double p : tx_power_w)
            if (!(p > 0.0)) throw std::invalid_argument("tx powers must be strictly positive");
        if (!(noise_power_w > 0.0))
            throw std::invalid_argument("noise_power_w must be strictly positive");
        if (!(ris_phase_noise >= 0.0 && ris_phase_noise <= 1.0))
            throw std::invalid_argument("ris_phase_noise must lie in [0,1]");
        if (!(tx_impairment >= 0.0) || !(rx_impairment >= 0.0))
            throw std::invalid_argument("impairment severities must be nonnegative");
        if (!(spacing_over_lambda > 0.0))
            throw std::invalid_argument("spacing_over_lambda must be positive");
    }
};

struct UserAngles {
    double ris_aoa_az = 0.0;  // azimuth of arrival at RIS from the user
    double ris_aoa_el = 0.0;  // elevation of arrival at RIS from the user
};

/// Large-scale fading, Rician factors and all LoS angles.
///
/// The RIS-BS LoS component is a_M(bs_aoa) * a_N(ris_aod)^H; the same
/// a_N(ris_aod) vector enters the f_k inner products of the rate analysis.
struct ScenarioGeometry {
    double ris_bs_gain = 0.0;              // nu
    std::vector<double> user_ris_gain;     // mu_k
    std::vector<double> user_bs_gain;      // xi_k (0 disables the direct link)
    double ris_bs_rician = 0.0;            // rho
    std::vector<double> user_ris_rician;   // epsilon_k
    double bs_aoa_az = 0.0, bs_aoa_el = 0.0;    // arrival at the BS from the RIS
    double ris_aod_az = 0.0, ris_aod_el = 0.0;  // departure from the RIS towards the BS
    std::vector<UserAngles> user_angles;

    void validate(const SystemConfig& cfg) const {
        if (!(ris_bs_gain > 0.0))
            throw std::invalid_argument("ris_bs_gain must be positive");
        if (user_ris_gain.size() != cfg.users || user_bs_gain.size() != cfg.users ||
            user_ris_rician.size() != cfg.users || user_angles.size() != cfg.users)
            throw std::invalid_argument("per-user geometry arrays must have length K");
        for (double m : user_ris_gain)
            if (!(m > 0.0)) throw std::invalid_argument("user_ris_gain entries must be positive");
        for (double x : user_bs_gain)
            if (!(x >= 0.0)) throw std::invalid_argument("user_bs_gain entries must be nonnegative");
        if (!(ris_bs_rician >= 0.0))
            throw std::invalid_argument("ris_bs_rician must be nonnegative");
        for (double e : user_ris_rician)
            if (!(e >= 0.0)) throw std::invalid_argument("user_ris_rician entries must be nonnegative");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(bs_aoa_az) || !finite(bs_aoa_el) || !finite(ris_aod_az) || !finite(ris_aod_el))
            throw std::invalid_argument("angles must be finite");
        for (const auto& ua : user_angles)
            if (!finite(ua.ris_aoa_az) || !finite(ua.ris_aoa_el))
                throw std::invalid_argument("angles must be finite");
    }
};

/// The N designed RIS phase shifts, each in [0, 2*pi).
struct PhaseVector {
    std::vector<double> theta;

    PhaseVector() = default;
    explicit PhaseVector(std::vector<double> t) : theta(std::move(t)) {}

    std::size_t size() const { return theta.size(); }

    void validate() const {
        for (double t : theta)
            if (!(t >= 0.0 && t < two_pi))
                throw std::invalid_argument("phase entries must lie in [0, 2*pi)");
    }

    /// Wrap an arbitrary angle into [0, 2*pi).
    static double wrap(double t) {
        t = std::fmod(t, two_pi);
        if (t < 0.0) t += two_pi;
        return t;
    }
};

/// One sampled draw of all random channel components and RIS phase noise.
struct ChannelRealization {
    cmat H_rb;                       // M x N
    std::vector<cvec> h;             // K vectors, length N
    std::vector<cvec> d;             // K vectors, length M
    std::vector<double> phase_noise; // length N, each in [-k_r*pi, k_r*pi]
};

/// Per-user moment terms of the approximate rate and the rate itself.
struct RateBreakdown {
    double e_signal = 0.0;
    std::vector<double> e_interf;  // entry i, i != k; the k-th slot is 0
    double e_noise = 0.0;
    double e_hwi = 0.0;
    double rate = 0.0;  // bits/s/Hz
};

}  // namespace rismimo

#endif
