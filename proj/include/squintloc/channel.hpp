// SPDX-License-Identifier: Apache-2.0
//
// squintloc - near-field wideband beam squint simulation and localization
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
// ------------------------------------------------------------------------

#ifndef SQUINTLOC_CHANNEL_HPP
#define SQUINTLOC_CHANNEL_HPP

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "squintloc/constants.hpp"
#include "squintloc/geometry.hpp"
#include "squintloc/random.hpp"

namespace squintloc
{

template <typename Scalar>
using ComplexVector = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;
template <typename Scalar>
using RealVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

/// ULA geometry plus the OFDM grid. M is the number of subcarrier intervals,
/// so the grid carries M+1 subcarriers f_m = f0 + m*W/M, m = 0..M.
template <typename Scalar = double>
struct ArrayConfig
{
    int n_antennas;    // N >= 2
    Scalar spacing;    // d, meters
    Scalar f0;         // lowest subcarrier frequency, Hz
    Scalar bandwidth;  // W, Hz
    int m_intervals;   // M; f_M = f0 + W

    ArrayConfig(int n, Scalar f0_hz, Scalar w_hz, int m, Scalar d_m = Scalar(0))
        : n_antennas(n), spacing(d_m), f0(f0_hz), bandwidth(w_hz), m_intervals(m)
    {
        if (n < 2)
            throw std::invalid_argument("ArrayConfig: need at least 2 antennas");
        if (!(f0 > Scalar(0)) || !(bandwidth > Scalar(0)))
            throw std::invalid_argument("ArrayConfig: f0 and W must be positive");
        if (m < 1)
            throw std::invalid_argument("ArrayConfig: need at least 1 subcarrier interval");
        if (spacing == Scalar(0))
            spacing = Scalar(speed_of_light) / (Scalar(2) * f0); // half wavelength at f0
        if (!(spacing > Scalar(0)))
            throw std::invalid_argument("ArrayConfig: spacing must be positive");
    }

    int n_subcarriers() const { return m_intervals + 1; }
    Scalar f_max() const { return f0 + bandwidth; }
    Scalar carrier() const { return f0 + bandwidth / Scalar(2); }

    std::pair<Scalar, Scalar>
    validity_bounds(ApertureConvention conv = ApertureConvention::FullSpan) const
    {
        return near_field_bounds(n_antennas, spacing, Scalar(speed_of_light) / f0, conv);
    }
};

using ArrayConfigd = ArrayConfig<double>;

template <typename Scalar>
Scalar subcarrier_frequency(const ArrayConfig<Scalar>& cfg, int m)
{
    if (m < 0 || m > cfg.m_intervals)
        throw std::out_of_range("subcarrier_frequency: index outside [0, M]");
    return cfg.f0 + Scalar(m) * cfg.bandwidth / Scalar(cfg.m_intervals);
}

/// Baseband frequency of subcarrier m: f_m - f0.
template <typename Scalar>
Scalar baseband_frequency(const ArrayConfig<Scalar>& cfg, int m)
{
    if (m < 0 || m > cfg.m_intervals)
        throw std::out_of_range("baseband_frequency: index outside [0, M]");
    return Scalar(m) * cfg.bandwidth / Scalar(cfg.m_intervals);
}

template <typename Scalar>
Scalar wavelength(Scalar f)
{
    return Scalar(speed_of_light) / f;
}

/// Free-space amplitude attenuation c/(4*pi*f*r).
template <typename Scalar>
Scalar path_loss(Scalar f, Scalar r)
{
    if (!(f > Scalar(0)) || !(r > Scalar(0)))
        throw std::invalid_argument("path_loss: f and r must be positive");
    return Scalar(speed_of_light) / (Scalar(4) * pi_v<Scalar> * f * r);
}

/// exp(j*phase) elementwise.
template <typename Scalar>
ComplexVector<Scalar> unit_phasor(const RealVector<Scalar>& phase)
{
    ComplexVector<Scalar> out(phase.size());
    out.real() = phase.array().cos().matrix();
    out.imag() = phase.array().sin().matrix();
    return out;
}

/// LoS channel vector of one user at subcarrier m. Entry n carries phase
/// -2*pi*f_m*r_n/c with r_n from the chosen distance model; the amplitude is
/// the common loss c/(4*pi*f_m*r) shared by all antennas.
template <typename Scalar>
ComplexVector<Scalar> channel_vector(const ArrayConfig<Scalar>& cfg, const PolarPoint<Scalar>& user,
                                     int m, DistanceModel model = DistanceModel::Exact)
{
    const Scalar f = subcarrier_frequency(cfg, m);
    const RealVector<Scalar> dist =
        element_distances(user, cfg.n_antennas, cfg.spacing, model);
    const Scalar k = -Scalar(2) * pi_v<Scalar> * f / Scalar(speed_of_light);
    return path_loss(f, user.r) * unit_phasor<Scalar>(k * dist);
}

/// Per-subcarrier complex samples of one sweep at one user, length M+1.
template <typename Scalar = double>
struct ReceivedSpectrum
{
    ComplexVector<Scalar> samples;
    bool rescaled = false; // false: raw receiver samples; true: wavelength-rescaled

    int size() const { return int(samples.size()); }
};

using ReceivedSpectrumd = ReceivedSpectrum<double>;

/// Adds circularly-symmetric complex white Gaussian noise at the given linear
/// SNR. The noise variance is mean(|y_m|^2)/snr over the sweep's M+1 samples;
/// snr = +inf returns the input unchanged. Draws are consumed in subcarrier
/// order, so a fixed stream yields bit-identical output.
template <typename Scalar>
ReceivedSpectrum<Scalar> add_awgn(const ReceivedSpectrum<Scalar>& spectrum, Scalar snr, Rng& rng)
{
    if (!(snr > Scalar(0)))
        throw std::invalid_argument("add_awgn: snr must be positive (or infinite)");
    if (std::isinf(snr))
        return spectrum;
    const Scalar mean_power = spectrum.samples.squaredNorm() / Scalar(spectrum.samples.size());
    const Scalar sigma = std::sqrt(mean_power / snr / Scalar(2)); // per real component
    ReceivedSpectrum<Scalar> out = spectrum;
    for (Eigen::Index i = 0; i < out.samples.size(); ++i)
        out.samples[i] += std::complex<Scalar>(Scalar(rng.normal()) * sigma,
                                               Scalar(rng.normal()) * sigma);
    return out;
}

} // namespace squintloc

#endif
