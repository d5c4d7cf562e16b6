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

#ifndef SQUINTLOC_BEAMFORMING_HPP
#define SQUINTLOC_BEAMFORMING_HPP

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "squintloc/channel.hpp"
#include "squintloc/constants.hpp"
#include "squintloc/geometry.hpp"

namespace squintloc
{

/// Thrown when a closed-form squint solution leaves the physical domain
/// (|sin| > 1 or non-positive curvature), which signals a degenerate
/// start/end pair or an off-grid frequency.
struct OutOfTrajectory : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Analog front-end state: one phase-shifter cycle count and one delay per
/// antenna, plus the sweep's declared start/end foci. Phase values are kept
/// in unwrapped cycles because the delay rule consumes them unwrapped;
/// wrapping before the delay computation would corrupt the delays.
template <typename Scalar = double>
struct BeamformerState
{
    ArrayConfig<Scalar> cfg;
    RealVector<Scalar> phase_cycles; // phi_n in cycles (phase / 2*pi)
    RealVector<Scalar> delays;       // t_n in seconds, may be negative
    PolarPoint<Scalar> start_focus;  // focus of subcarrier 0
    PolarPoint<Scalar> end_focus;    // focus of subcarrier M
    DistanceModel model;             // distance model used at construction
    Scalar delay_offset;             // common offset already folded into delays
};

using BeamformerStated = BeamformerState<double>;

/// Beam squint point: where subcarrier m's gain is maximized.
template <typename Scalar = double>
struct SquintPoint
{
    int m;
    Scalar f; // Hz
    PolarPoint<Scalar> point;
};

using SquintPointd = SquintPoint<double>;

/// Per-antenna phase-shifter cycles for a focus: phi_n = f0 * r_n / c.
template <typename Scalar>
RealVector<Scalar> ps_phase_cycles(const ArrayConfig<Scalar>& cfg, const PolarPoint<Scalar>& focus,
                                   DistanceModel model = DistanceModel::Fresnel)
{
    return (cfg.f0 / Scalar(speed_of_light)) *
           element_distances(focus, cfg.n_antennas, cfg.spacing, model);
}

/// Phase-shifter beamforming weights matched to the focus at the lowest
/// subcarrier: entry n = (1/sqrt(N)) * exp(-j*2*pi*f0*r_n/c).
template <typename Scalar>
ComplexVector<Scalar> ps_weights(const ArrayConfig<Scalar>& cfg, const PolarPoint<Scalar>& focus,
                                 DistanceModel model = DistanceModel::Fresnel)
{
    const RealVector<Scalar> cycles = ps_phase_cycles(cfg, focus, model);
    // Reduce to the principal cycle before converting to radians; the
    // unwrapped counts reach 1e4 cycles and would waste precision in sin/cos.
    const RealVector<Scalar> frac =
        (cycles.array() - cycles.array().round()).matrix();
    return unit_phasor<Scalar>(Scalar(-2) * pi_v<Scalar> * frac) /
           std::sqrt(Scalar(cfg.n_antennas));
}

/// Configures phase shifters and delay lines so the sweep squints from
/// `start` at subcarrier 0 to `end` at subcarrier M:
/// phi_n = f0*r_start,n/c and t_n = f_M*r_end,n/(W*c) - phi_n/W.
/// `delay_offset` adds a common delay to every line (for studies with
/// non-negative hardware delays); it multiplies subcarrier m's response by
/// the common factor exp(-j*2*pi*fb_m*delay_offset).
template <typename Scalar>
BeamformerState<Scalar> ttd_config(const ArrayConfig<Scalar>& cfg, const PolarPoint<Scalar>& start,
                                   const PolarPoint<Scalar>& end,
                                   DistanceModel model = DistanceModel::Fresnel,
                                   Scalar delay_offset = Scalar(0))
{
    RealVector<Scalar> cycles = ps_phase_cycles(cfg, start, model);
    const RealVector<Scalar> end_dist =
        element_distances(end, cfg.n_antennas, cfg.spacing, model);
    RealVector<Scalar> delays =
        (cfg.f_max() / (cfg.bandwidth * Scalar(speed_of_light))) * end_dist -
        cycles / cfg.bandwidth;
    delays.array() += delay_offset;
    return BeamformerState<Scalar>{cfg, std::move(cycles), std::move(delays),
                                   start, end, model, delay_offset};
}

template <typename Scalar>
SquintPoint<Scalar> natural_squint_point(const ArrayConfig<Scalar>& cfg,
                                         const PolarPoint<Scalar>& focus0, int m);

/// Frequency-flat phase-shifter state (all delay lines at zero). Subcarriers
/// above f0 squint away from the focus along the natural trajectory, so the
/// declared end focus is the natural squint point of subcarrier M; with that
/// end point the controlled-squint closed form reduces to the natural one.
template <typename Scalar>
BeamformerState<Scalar> ps_only_state(const ArrayConfig<Scalar>& cfg,
                                      const PolarPoint<Scalar>& focus,
                                      DistanceModel model = DistanceModel::Fresnel)
{
    return BeamformerState<Scalar>{cfg, ps_phase_cycles(cfg, focus, model),
                                   RealVector<Scalar>::Zero(cfg.n_antennas), focus,
                                   natural_squint_point(cfg, focus, cfg.m_intervals).point, model,
                                   Scalar(0)};
}

/// Effective weights at subcarrier m: entry n =
/// (1/sqrt(N)) * exp(-j*2*pi*(phi_n + fb_m*t_n)) with fb_m = m*W/M.
/// At m = 0 this equals ps_weights(start_focus) bit for bit.
template <typename Scalar>
ComplexVector<Scalar> weights_at(const BeamformerState<Scalar>& state, int m)
{
    const Scalar fb = baseband_frequency(state.cfg, m);
    const RealVector<Scalar> cycles = state.phase_cycles + fb * state.delays;
    const RealVector<Scalar> frac =
        (cycles.array() - cycles.array().round()).matrix();
    return unit_phasor<Scalar>(Scalar(-2) * pi_v<Scalar> * frac) /
           std::sqrt(Scalar(state.cfg.n_antennas));
}

/// Array gain |w^H b(r, theta, f)| of the given weights at one position and
/// frequency. Bounded by sqrt(N) for unit-modulus analog weights.
template <typename Scalar>
Scalar array_gain(const ComplexVector<Scalar>& weights, const PolarPoint<Scalar>& point, Scalar f,
                  const ArrayConfig<Scalar>& cfg, DistanceModel model = DistanceModel::Exact)
{
    const RealVector<Scalar> dist =
        element_distances(point, cfg.n_antennas, cfg.spacing, model);
    const Scalar k = -Scalar(2) * pi_v<Scalar> * f / Scalar(speed_of_light);
    return std::abs(weights.dot(unit_phasor<Scalar>(k * dist)));
}

/// Natural (phase-shifter only) squint point of subcarrier m for a beam
/// focused on `focus0` at f0:
/// sin(theta_m) = (f0/f_m) sin(theta_0),
/// r_m = r_0 * (f_m/f0) * cos^2(theta_m)/cos^2(theta_0).
template <typename Scalar>
SquintPoint<Scalar> natural_squint_point(const ArrayConfig<Scalar>& cfg,
                                         const PolarPoint<Scalar>& focus0, int m)
{
    const Scalar f = subcarrier_frequency(cfg, m);
    const Scalar s0 = std::sin(focus0.theta);
    const Scalar sm = cfg.f0 / f * s0; // |sm| <= |s0| < 1 since f >= f0
    const Scalar c2_0 = Scalar(1) - s0 * s0;
    const Scalar c2_m = Scalar(1) - sm * sm;
    const Scalar rm = focus0.r * (f / cfg.f0) * (c2_m / c2_0);
    return SquintPoint<Scalar>{m, f, PolarPoint<Scalar>(rm, std::asin(sm))};
}

/// TTD-controlled squint point of subcarrier m for a sweep from `start` to
/// `end` (closed form; endpoints reproduce the foci):
/// sin(t~_m) = [(W-fb)f0 sin(t0) + (W+f0)fb sin(tc)] / (W f_m),
/// 1/r~_m    = [(W-fb)f0 cos^2(t0)/r0 + (W+f0)fb cos^2(tc)/rc] / (W f_m cos^2(t~_m)).
template <typename Scalar>
SquintPoint<Scalar> ttd_squint_point(const ArrayConfig<Scalar>& cfg,
                                     const PolarPoint<Scalar>& start,
                                     const PolarPoint<Scalar>& end, int m)
{
    const Scalar f = subcarrier_frequency(cfg, m);
    const Scalar fb = baseband_frequency(cfg, m);
    const Scalar w = cfg.bandwidth;
    const Scalar a = (w - fb) * cfg.f0 / (w * f);       // weight on the start focus
    const Scalar b = (w + cfg.f0) * fb / (w * f);       // weight on the end focus
    const Scalar s0 = std::sin(start.theta);
    const Scalar sc = std::sin(end.theta);
    const Scalar sm = a * s0 + b * sc;
    if (!(std::abs(sm) <= Scalar(1)))
        throw OutOfTrajectory("ttd_squint_point: |sin(theta)| > 1");
    const Scalar c2m = Scalar(1) - sm * sm;
    if (!(c2m > Scalar(0)))
        throw OutOfTrajectory("ttd_squint_point: beam degenerates onto the array axis");
    const Scalar inv_r = (a * (Scalar(1) - s0 * s0) / start.r + b * (Scalar(1) - sc * sc) / end.r) / c2m;
    if (!(inv_r > Scalar(0)))
        throw OutOfTrajectory("ttd_squint_point: non-positive distance curvature");
    return SquintPoint<Scalar>{m, f, PolarPoint<Scalar>(Scalar(1) / inv_r, std::asin(sm))};
}

template <typename Scalar>
SquintPoint<Scalar> ttd_squint_point(const BeamformerState<Scalar>& state, int m)
{
    return ttd_squint_point(state.cfg, state.start_focus, state.end_focus, m);
}

/// Rectangular polar search grid. Points are r_min + i*r_step (up to r_max)
/// by theta_min + j*theta_step (up to theta_max), both inclusive.
template <typename Scalar = double>
struct SearchGrid
{
    Scalar r_min, r_max, r_step;
    Scalar theta_min, theta_max, theta_step; // radians

    int r_count() const
    {
        return 1 + int(std::floor((r_max - r_min) / r_step * (1 + Scalar(1e-12)) + Scalar(1e-9)));
    }
    int theta_count() const
    {
        return 1 +
               int(std::floor((theta_max - theta_min) / theta_step * (1 + Scalar(1e-12)) + Scalar(1e-9)));
    }
};

using SearchGridd = SearchGrid<double>;

/// Grid covering the array's near-field annulus with the conventional
/// 0.4 m / 0.5 degree survey steps over the full front half-plane.
template <typename Scalar>
SearchGrid<Scalar> default_search_grid(const ArrayConfig<Scalar>& cfg)
{
    const auto [lower, upper] = cfg.validity_bounds();
    return SearchGrid<Scalar>{lower, upper, Scalar(0.4), deg_to_rad(Scalar(-90)),
                              deg_to_rad(Scalar(90)), deg_to_rad(Scalar(0.5))};
}

/// Exhaustive gain argmax of fixed weights at frequency f over the grid.
/// Ties break toward smaller r, then smaller theta, independent of the
/// evaluation order. This is the measurement-based oracle for the
/// closed-form squint solutions.
template <typename Scalar>
SquintPoint<Scalar> grid_argmax_gain(const ComplexVector<Scalar>& weights, int m, Scalar f,
                                     const ArrayConfig<Scalar>& cfg, const SearchGrid<Scalar>& grid,
                                     DistanceModel model = DistanceModel::Exact)
{
    using Arr = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    const int nr = grid.r_count();
    const int nt = grid.theta_count();
    if (nr < 1 || nt < 1)
        throw std::invalid_argument("grid_argmax_gain: empty grid");

    const int n_ant = cfg.n_antennas;
    Arr n(n_ant);
    for (int i = 0; i < n_ant; ++i)
        n[i] = antenna_index<Scalar>(i, n_ant);
    const Arr nd = n * cfg.spacing;
    const Arr wr = weights.real().array();
    const Arr wi = weights.imag().array();
    const Scalar k = Scalar(2) * pi_v<Scalar> * f / Scalar(speed_of_light);

    Scalar best_gain = Scalar(-1);
    Scalar best_r = grid.r_min, best_theta = grid.theta_min;
    Arr dist(n_ant), phase(n_ant), cph(n_ant), sph(n_ant);
    for (int j = 0; j < nt; ++j)
    {
        const Scalar theta = grid.theta_min + Scalar(j) * grid.theta_step;
        const Scalar st = std::sin(theta);
        const Scalar ct2 = Scalar(1) - st * st;
        for (int i = 0; i < nr; ++i)
        {
            const Scalar r = grid.r_min + Scalar(i) * grid.r_step;
            if (model == DistanceModel::Exact)
                dist = ((r * st - nd).square() + r * r * ct2).sqrt();
            else
                dist = r - nd * st + nd.square() * (ct2 / (Scalar(2) * r));
            // b_n = exp(-j*k*dist); gain = |sum conj(w_n) b_n|
            phase = k * dist;
            cph = phase.cos();
            sph = phase.sin();
            const Scalar re = (wr * cph - wi * sph).sum();
            const Scalar im = (-wr * sph - wi * cph).sum();
            const Scalar gain = std::hypot(re, im);
            const bool better =
                gain > best_gain ||
                (gain == best_gain && (r < best_r || (r == best_r && theta < best_theta)));
            if (better)
            {
                best_gain = gain;
                best_r = r;
                best_theta = theta;
            }
        }
    }
    return SquintPoint<Scalar>{m, f, PolarPoint<Scalar>(best_r, best_theta)};
}

/// Oracle squint point of subcarrier m for a TTD-configured sweep.
template <typename Scalar>
SquintPoint<Scalar> brute_force_squint_point(const BeamformerState<Scalar>& state, int m,
                                             const SearchGrid<Scalar>& grid,
                                             DistanceModel model = DistanceModel::Exact)
{
    return grid_argmax_gain(weights_at(state, m), m, subcarrier_frequency(state.cfg, m), state.cfg,
                            grid, model);
}

/// Oracle squint point of subcarrier m under natural (phase-shifter only)
/// beamforming focused on `focus0`.
template <typename Scalar>
SquintPoint<Scalar> brute_force_natural_squint_point(const ArrayConfig<Scalar>& cfg,
                                                     const PolarPoint<Scalar>& focus0, int m,
                                                     const SearchGrid<Scalar>& grid,
                                                     DistanceModel model = DistanceModel::Exact,
                                                     DistanceModel weights_model = DistanceModel::Fresnel)
{
    return grid_argmax_gain(ps_weights(cfg, focus0, weights_model), m,
                            subcarrier_frequency(cfg, m), cfg, grid, model);
}

} // namespace squintloc

#endif
