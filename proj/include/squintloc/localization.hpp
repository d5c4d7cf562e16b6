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

#ifndef SQUINTLOC_LOCALIZATION_HPP
#define SQUINTLOC_LOCALIZATION_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "squintloc/beamforming.hpp"
#include "squintloc/channel.hpp"
#include "squintloc/geometry.hpp"
#include "squintloc/random.hpp"

namespace squintloc
{

struct LocalizationError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Peak feedback frequency off the subcarrier grid or outside the band.
struct InvalidFeedback : LocalizationError
{
    using LocalizationError::LocalizationError;
};

/// Radial inversion produced a non-positive curvature (corrupted feedback).
struct NonPositiveDistance : LocalizationError
{
    using LocalizationError::LocalizationError;
};

/// Two near-equal peaks in the distance-consistency objective; the estimate
/// is reported as unresolved instead of guessing between them.
struct AmbiguousDistance : LocalizationError
{
    using LocalizationError::LocalizationError;
};

/// Dual-anchor geometry is singular (user too close to the baseline axis).
struct DegenerateGeometry : LocalizationError
{
    using LocalizationError::LocalizationError;
};

enum class Scheme
{
    Tbt,     // traditional beam-training baseline
    CbsLow,  // controllable squint, peak-index inversion
    CbsHigh, // controllable squint, multi-sweep phase-difference ranging
    Cbs2Bs   // controllable squint, dual base station triangulation
};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

enum class StageKind
{
    Generic,
    AngleStage,    // angles squint over the sensing range at mid distances
    DistanceStage, // radial sweep at a fixed angle
    HighP,         // p-th sweep of the phase-difference scheme
    Baseline       // one beam-training codeword
};

/// One configured transmission over all subcarriers.
struct SweepPlan
{
    BeamformerStated beamformer;
    StageKind kind = StageKind::Generic;
    int index = 0; // sweep ordinal within its stage
    int bs_id = 0;

    void validate() const;
};

/// What a user reports back after one sweep: the index/frequency of its
/// maximum-power subcarrier, and the phase measured there (used only by the
/// phase-difference scheme).
struct UserFeedback
{
    int peak_subcarrier = 0;
    double peak_frequency = 0.0; // Hz
    double peak_phase = 0.0;     // radians
};

struct Estimate
{
    double theta_hat = 0.0; // radians
    double r_hat = 0.0;     // meters
    Scheme scheme = Scheme::CbsLow;
    int sweeps_used = 0;
    std::vector<UserFeedback> feedback_trail;
    std::vector<std::string> flags; // e.g. "clamped"
    double objective = 0.0;         // scheme-specific score at the estimate

    std::string flags_string() const;
};

/// Rectangular sensing region in polar coordinates (angles in radians).
struct SensingRange
{
    double r_min, r_max;
    double theta_min, theta_max;

    void validate() const;
    double r_mid() const { return (r_min + r_max) / 2.0; }
    /// Mean per-subcarrier angle step of a full angle-stage sweep.
    double mean_angle_step(int m_intervals) const
    {
        return (theta_max - theta_min) / double(m_intervals);
    }
};

struct TbtParams
{
    int i_angle = 0;    // angle codewords, >= 2
    int i_distance = 0; // distance codewords, >= 2
    std::optional<double> r_anchor; // codeword distance of the angle stage
};

struct CbsLowParams
{
    std::optional<double> r_mid1, r_mid2; // angle-stage focus distances
};

struct CbsHighParams
{
    int p_sweeps = 5;
    // Base angular stagger between sweeps, radians. Defaults to 0.5 degrees
    // or four subcarrier angle steps, whichever is larger, so the staggered
    // peaks stay several subcarriers apart on coarse grids.
    std::optional<double> delta_pad;
    int p_r = 1024;           // distance search grid size
    double refine_tol = 1e-3; // golden-section tolerance, meters
    std::optional<double> r_mid1, r_mid2;

    double resolved_delta_pad(const SensingRange& range, int m_intervals) const;
};

struct TwoBsParams
{
    double baseline = 0.0; // distance between the two arrays, meters
    std::optional<double> r_mid1, r_mid2;
    std::optional<double> axis_epsilon; // radians; default: half angle step
};

/// Per-sweep context of the phase-difference scheme, enough to evaluate the
/// theoretical phase of the fed-back subcarrier at any candidate distance.
struct HighSweepContext
{
    double theta_max_p, theta_min_p; // sweep endpoints, radians
    double r_mid1, r_mid2;           // focus distances of the sweep
    double f_peak;                   // fed-back subcarrier frequency, Hz
    double theta_hat_p;              // per-sweep angle estimate, radians
    double measured_phase;           // radians
    double delay_offset = 0.0;       // common delay folded into the sweep
};

// ---- sweep-level operations ------------------------------------------------

/// Received spectrum of one user for one sweep: y_m = h_m^H w_m with all-ones
/// pilots, plus white noise at the given linear SNR (+inf for noiseless).
ReceivedSpectrumd simulate_sweep(const ArrayConfigd& cfg, const SweepPlan& plan,
                                 const PolarPointd& user, double snr, Rng& rng,
                                 DistanceModel channel_model = DistanceModel::Exact);

/// Rescales sample m by 4*pi*sqrt(N)/lambda_m, removing the per-subcarrier
/// wavelength factor of the path loss. At a perfect focus the rescaled
/// magnitude is N/r.
ReceivedSpectrumd process_spectrum(const ArrayConfigd& cfg, const ReceivedSpectrumd& raw);

/// Index of the maximum-magnitude sample (ties toward the smallest index),
/// with its frequency and the sample's phase.
UserFeedback peak_subcarrier(const ArrayConfigd& cfg, const ReceivedSpectrumd& spectrum);

struct AngleInversion
{
    double theta; // radians
    bool clamped; // arcsin argument hit [-1, 1]
};

/// Inverts the angle trajectory of an angle-stage sweep from theta_max to
/// theta_min at the fed-back peak frequency.
AngleInversion angle_from_peak(const ArrayConfigd& cfg, double theta_max, double theta_min,
                               double f_peak);

/// Inverts the distance trajectory of a radial sweep from r_min to r_max at
/// the fed-back peak frequency (the cos^2 factors cancel on radial sweeps).
double distance_from_peak(const ArrayConfigd& cfg, double r_min, double r_max, double f_peak);

/// Angular pad of the p-th staggered sweep (p counts from 0), for a base pad
/// `delta_pad`. Pad steps grow with an irrational quadratic term so the
/// fed-back peak frequencies never form a uniform comb (a uniform comb makes
/// the phase ranging alias at full height).
double stagger_pad(double delta_pad, int p, int p_sweeps);

/// Theoretical phase of the fed-back subcarrier for a candidate user
/// distance r, from the full complex sum of the processed-signal model.
double cbs_high_theoretical_phase(const ArrayConfigd& cfg, const HighSweepContext& ctx, double r);

/// Phase-consistency objective L(r) = |sum_p exp(j(measured_p - theory_p(r)))|.
/// Bounded by the number of sweeps; equals it when every phase matches.
double cbs_high_objective(const ArrayConfigd& cfg, const std::vector<HighSweepContext>& sweeps,
                          double r);

// ---- scheme drivers ----------------------------------------------------------

/// Two-stage beam-training baseline over an I_a x I_d polar codebook.
Estimate tbt_localize(const ArrayConfigd& cfg, const PolarPointd& user, const SensingRange& range,
                      const TbtParams& params, double snr, Rng& rng,
                      DistanceModel channel_model = DistanceModel::Exact);

/// Low-complexity squint localization: one shared angle-stage sweep for all
/// users, then one radial sweep per distinct estimated angle.
std::vector<Estimate> cbs_low_localize(const ArrayConfigd& cfg,
                                       const std::vector<PolarPointd>& users,
                                       const SensingRange& range, const CbsLowParams& params,
                                       double snr, Rng& rng,
                                       DistanceModel channel_model = DistanceModel::Exact);

/// High-accuracy squint localization: P staggered angle sweeps, averaged
/// angle, and phase-difference distance search with golden-section refinement.
Estimate cbs_high_localize(const ArrayConfigd& cfg, const PolarPointd& user,
                           const SensingRange& range, const CbsHighParams& params, double snr,
                           Rng& rng, DistanceModel channel_model = DistanceModel::Exact);

/// Closed-form dual-anchor combination. theta_a/theta_b are the user angles
/// seen by the main and auxiliary arrays (the auxiliary frame faces the main
/// one). Throws DegenerateGeometry within axis_epsilon of the baseline axis.
Estimate cbs_2bs_from_angles(double baseline, double theta_a, double theta_b,
                             double axis_epsilon = 1e-9);

/// Full dual-anchor driver: one angle-stage sweep per base station, then the
/// closed-form combination. The user is given in the main array's Cartesian
/// frame; the auxiliary array center sits at (baseline, 0).
Estimate cbs_2bs_localize(const ArrayConfigd& cfg, const CartesianPointd& user,
                          const SensingRange& range, const TwoBsParams& params, double snr,
                          Rng& rng, DistanceModel channel_model = DistanceModel::Exact);

} // namespace squintloc

#endif
