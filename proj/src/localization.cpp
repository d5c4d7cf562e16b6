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

#include "squintloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace squintloc
{

using Eigen::VectorXcd;
using Eigen::VectorXd;

std::string scheme_name(Scheme s)
{
    switch (s)
    {
    case Scheme::Tbt:
        return "tbt";
    case Scheme::CbsLow:
        return "cbs_low";
    case Scheme::CbsHigh:
        return "cbs_high";
    case Scheme::Cbs2Bs:
        return "cbs_2bs";
    }
    throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name)
{
    if (name == "tbt")
        return Scheme::Tbt;
    if (name == "cbs_low")
        return Scheme::CbsLow;
    if (name == "cbs_high")
        return Scheme::CbsHigh;
    if (name == "cbs_2bs")
        return Scheme::Cbs2Bs;
    throw std::invalid_argument("unknown scheme: " + name);
}

void SweepPlan::validate() const
{
    if (kind == StageKind::DistanceStage &&
        beamformer.start_focus.theta != beamformer.end_focus.theta)
        throw std::invalid_argument("SweepPlan: radial sweep must keep a fixed angle");
}

std::string Estimate::flags_string() const
{
    std::string out;
    for (const auto& f : flags)
        out += (out.empty() ? "" : "|") + f;
    return out;
}

void SensingRange::validate() const
{
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("SensingRange: need 0 < r_min < r_max");
    if (!(theta_max > theta_min))
        throw std::invalid_argument("SensingRange: need theta_min < theta_max");
    if (!(std::abs(theta_min) < pi / 2) || !(std::abs(theta_max) < pi / 2))
        throw std::invalid_argument("SensingRange: angles must lie inside (-pi/2, pi/2)");
}

static void check_same_grid(const ArrayConfigd& a, const ArrayConfigd& b)
{
    if (a.n_antennas != b.n_antennas || a.spacing != b.spacing || a.f0 != b.f0 ||
        a.bandwidth != b.bandwidth || a.m_intervals != b.m_intervals)
        throw std::invalid_argument("simulate_sweep: beamformer was built for a different array");
}

ReceivedSpectrumd simulate_sweep(const ArrayConfigd& cfg, const SweepPlan& plan,
                                 const PolarPointd& user, double snr, Rng& rng,
                                 DistanceModel channel_model)
{
    plan.validate();
    check_same_grid(cfg, plan.beamformer.cfg);
    const int n_sub = cfg.n_subcarriers();
    const VectorXd dist = element_distances(user, cfg.n_antennas, cfg.spacing, channel_model);
    const double inv_sqrt_n = 1.0 / std::sqrt(double(cfg.n_antennas));

    // y_m = h_m^H w_m: per-antenna phase (in cycles) f_m*r_n/c - phi_n - fb_m*t_n,
    // common amplitude alpha_m / sqrt(N).
    ReceivedSpectrumd out;
    out.samples.resize(n_sub);
    out.rescaled = false;
    VectorXd cycles(cfg.n_antennas), ph(cfg.n_antennas);
    for (int m = 0; m < n_sub; ++m)
    {
        const double f = subcarrier_frequency(cfg, m);
        const double fb = baseband_frequency(cfg, m);
        cycles = (f / speed_of_light) * dist - plan.beamformer.phase_cycles -
                 fb * plan.beamformer.delays;
        ph = 2.0 * pi * (cycles.array() - cycles.array().round());
        const double re = ph.array().cos().sum();
        const double im = ph.array().sin().sum();
        out.samples[m] = path_loss(f, user.r) * inv_sqrt_n * std::complex<double>(re, im);
    }
    return add_awgn(out, snr, rng);
}

ReceivedSpectrumd process_spectrum(const ArrayConfigd& cfg, const ReceivedSpectrumd& raw)
{
    if (raw.rescaled)
        throw std::invalid_argument("process_spectrum: spectrum already rescaled");
    if (raw.size() != cfg.n_subcarriers())
        throw std::invalid_argument("process_spectrum: spectrum length does not match the grid");
    ReceivedSpectrumd out;
    out.samples.resize(raw.size());
    out.rescaled = true;
    const double k = 4.0 * pi * std::sqrt(double(cfg.n_antennas)) / speed_of_light;
    for (int m = 0; m < raw.size(); ++m)
        out.samples[m] = raw.samples[m] * (k * subcarrier_frequency(cfg, m));
    return out;
}

UserFeedback peak_subcarrier(const ArrayConfigd& cfg, const ReceivedSpectrumd& spectrum)
{
    if (spectrum.size() == 0)
        throw std::invalid_argument("peak_subcarrier: empty spectrum");
    if (spectrum.size() != cfg.n_subcarriers())
        throw std::invalid_argument("peak_subcarrier: spectrum length does not match the grid");
    int best = 0;
    double best_mag = std::abs(spectrum.samples[0]);
    for (int m = 1; m < spectrum.size(); ++m)
    {
        const double mag = std::abs(spectrum.samples[m]);
        if (mag > best_mag)
        {
            best_mag = mag;
            best = m;
        }
    }
    return UserFeedback{best, subcarrier_frequency(cfg, best),
                        std::arg(spectrum.samples[best])};
}

// Peak feedback must name a frequency on (or within half a spacing of) the
// subcarrier grid.
static void check_on_grid(const ArrayConfigd& cfg, double f_peak, const char* who)
{
    const double spacing = cfg.bandwidth / double(cfg.m_intervals);
    const double slack = 0.5 * spacing * (1.0 + 1e-9);
    if (!(f_peak >= cfg.f0 - slack) || !(f_peak <= cfg.f_max() + slack))
        throw InvalidFeedback(std::string(who) + ": peak frequency off the subcarrier grid");
}

AngleInversion angle_from_peak(const ArrayConfigd& cfg, double theta_max, double theta_min,
                               double f_peak)
{
    check_on_grid(cfg, f_peak, "angle_from_peak");
    const double w = cfg.bandwidth;
    const double fb = f_peak - cfg.f0;
    const double num = (w - fb) * cfg.f0 * std::sin(theta_max) + (w + cfg.f0) * fb * std::sin(theta_min);
    double arg = num / (w * f_peak);
    bool clamped = false;
    if (arg > 1.0 || arg < -1.0)
    {
        arg = std::clamp(arg, -1.0, 1.0);
        clamped = true;
    }
    return AngleInversion{std::asin(arg), clamped};
}

double distance_from_peak(const ArrayConfigd& cfg, double r_min, double r_max, double f_peak)
{
    check_on_grid(cfg, f_peak, "distance_from_peak");
    const double w = cfg.bandwidth;
    const double fb = f_peak - cfg.f0;
    const double inv_r = (w - fb) * cfg.f0 / (w * f_peak) / r_min +
                         (w + cfg.f0) * fb / (w * f_peak) / r_max;
    if (!(inv_r > 0.0))
        throw NonPositiveDistance("distance_from_peak: non-positive curvature from feedback");
    return 1.0 / inv_r;
}

double cbs_high_theoretical_phase(const ArrayConfigd& cfg, const HighSweepContext& ctx, double r)
{
    const double w = cfg.bandwidth;
    const double f = ctx.f_peak;
    const double fb = f - cfg.f0;
    const double f_end = cfg.f_max();
    const double d = cfg.spacing;
    const double inv_c = 1.0 / speed_of_light;

    const double s_hat = std::sin(ctx.theta_hat_p);
    const double s_max = std::sin(ctx.theta_max_p);
    const double s_min = std::sin(ctx.theta_min_p);
    const double c2_hat = 1.0 - s_hat * s_hat;
    const double c2_max = 1.0 - s_max * s_max;
    const double c2_min = 1.0 - s_min * s_min;

    // Leading phase in cycles, reduced before the trig call; the raw count
    // reaches 1e4 cycles.
    const double xi0_cyc = inv_c * (f * r - (1.0 - fb / w) * cfg.f0 * ctx.r_mid1 -
                                    (fb / w) * f_end * ctx.r_mid2) -
                           fb * ctx.delay_offset;
    const double xi0 = 2.0 * pi * (xi0_cyc - std::round(xi0_cyc));
    const double xi1 = -2.0 * pi * d * inv_c *
                       (f * s_hat - (1.0 - fb / w) * cfg.f0 * s_max - (fb / w) * f_end * s_min);
    const double xi2 = 2.0 * pi * d * d * inv_c *
                       (f * c2_hat / (2.0 * r) - (1.0 - fb / w) * cfg.f0 * c2_max / (2.0 * ctx.r_mid1) -
                        (fb / w) * f_end * c2_min / (2.0 * ctx.r_mid2));

    std::complex<double> sum(0.0, 0.0);
    for (int i = 0; i < cfg.n_antennas; ++i)
    {
        const double n = antenna_index<double>(i, cfg.n_antennas);
        sum += std::polar(1.0, n * xi1 + n * n * xi2);
    }
    return std::arg(std::polar(1.0, xi0) * sum);
}

double cbs_high_objective(const ArrayConfigd& cfg, const std::vector<HighSweepContext>& sweeps,
                          double r)
{
    std::complex<double> acc(0.0, 0.0);
    for (const auto& ctx : sweeps)
        acc += std::polar(1.0, ctx.measured_phase - cbs_high_theoretical_phase(cfg, ctx, r));
    return std::abs(acc);
}

// ---- scheme drivers ----------------------------------------------------------

static double sum_magnitudes(const ReceivedSpectrumd& s)
{
    double acc = 0.0;
    for (int m = 0; m < s.size(); ++m)
        acc += std::abs(s.samples[m]);
    return acc;
}

Estimate tbt_localize(const ArrayConfigd& cfg, const PolarPointd& user, const SensingRange& range,
                      const TbtParams& params, double snr, Rng& rng, DistanceModel channel_model)
{
    range.validate();
    if (params.i_angle < 2 || params.i_distance < 2)
        throw std::invalid_argument("tbt_localize: need at least 2 codewords per stage");
    const double r_anchor = params.r_anchor.value_or(range.r_mid());

    // Angle stage: sweep I_a phase-shifter codewords at the anchor distance,
    // score each by the summed received magnitude over all subcarriers.
    const double dtheta = (range.theta_max - range.theta_min) / double(params.i_angle - 1);
    double best_theta = range.theta_min;
    double best_score = -1.0;
    for (int i = 0; i < params.i_angle; ++i)
    {
        const double theta = range.theta_min + double(i) * dtheta;
        const SweepPlan plan{ps_only_state(cfg, PolarPointd(r_anchor, theta)),
                             StageKind::Baseline, i, 0};
        const double score = sum_magnitudes(simulate_sweep(cfg, plan, user, snr, rng, channel_model));
        if (score > best_score)
        {
            best_score = score;
            best_theta = theta;
        }
    }

    // Distance stage at the estimated angle.
    const double dr = (range.r_max - range.r_min) / double(params.i_distance - 1);
    double best_r = range.r_min;
    double best_score_r = -1.0;
    for (int i = 0; i < params.i_distance; ++i)
    {
        const double r = range.r_min + double(i) * dr;
        const SweepPlan plan{ps_only_state(cfg, PolarPointd(r, best_theta)),
                             StageKind::Baseline, i, 0};
        const double score = sum_magnitudes(simulate_sweep(cfg, plan, user, snr, rng, channel_model));
        if (score > best_score_r)
        {
            best_score_r = score;
            best_r = r;
        }
    }

    Estimate est;
    est.theta_hat = best_theta;
    est.r_hat = best_r;
    est.scheme = Scheme::Tbt;
    est.sweeps_used = params.i_angle + params.i_distance;
    est.objective = best_score_r;
    return est;
}

std::vector<Estimate> cbs_low_localize(const ArrayConfigd& cfg,
                                       const std::vector<PolarPointd>& users,
                                       const SensingRange& range, const CbsLowParams& params,
                                       double snr, Rng& rng, DistanceModel channel_model)
{
    range.validate();
    if (users.empty())
        throw std::invalid_argument("cbs_low_localize: no users");
    const double r_mid1 = params.r_mid1.value_or(range.r_mid());
    const double r_mid2 = params.r_mid2.value_or(range.r_mid());
    const int n_users = int(users.size());

    // Stage 1: one angle sweep from (r_mid1, theta_max) to (r_mid2, theta_min)
    // serves every user at once.
    const SweepPlan angle_plan{
        ttd_config(cfg, PolarPointd(r_mid1, range.theta_max), PolarPointd(r_mid2, range.theta_min)),
        StageKind::AngleStage, 0, 0};
    std::vector<Estimate> out(n_users);
    std::vector<double> theta_hat(n_users);
    for (int k = 0; k < n_users; ++k)
    {
        const auto spectrum =
            process_spectrum(cfg, simulate_sweep(cfg, angle_plan, users[k], snr, rng, channel_model));
        const UserFeedback fb = peak_subcarrier(cfg, spectrum);
        const AngleInversion inv = angle_from_peak(cfg, range.theta_max, range.theta_min, fb.peak_frequency);
        theta_hat[k] = inv.theta;
        out[k].scheme = Scheme::CbsLow;
        out[k].theta_hat = inv.theta;
        out[k].feedback_trail.push_back(fb);
        if (inv.clamped)
            out[k].flags.push_back("clamped");
    }

    // Group users whose angle estimates are indistinguishable at the sweep's
    // resolution; one radial sweep per group.
    const double tol = 0.5 * range.mean_angle_step(cfg.m_intervals);
    std::vector<int> order(n_users);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return theta_hat[a] < theta_hat[b]; });
    std::vector<std::vector<int>> groups;
    for (int idx : order)
    {
        if (groups.empty() || theta_hat[idx] - theta_hat[groups.back().back()] > tol)
            groups.push_back({idx});
        else
            groups.back().push_back(idx);
    }

    for (const auto& group : groups)
    {
        double theta_bar = 0.0;
        for (int k : group)
            theta_bar += theta_hat[k];
        theta_bar /= double(group.size());
        const SweepPlan radial_plan{
            ttd_config(cfg, PolarPointd(range.r_min, theta_bar), PolarPointd(range.r_max, theta_bar)),
            StageKind::DistanceStage, 0, 0};
        for (int k : group)
        {
            const auto spectrum = process_spectrum(
                cfg, simulate_sweep(cfg, radial_plan, users[k], snr, rng, channel_model));
            const UserFeedback fb = peak_subcarrier(cfg, spectrum);
            out[k].r_hat = distance_from_peak(cfg, range.r_min, range.r_max, fb.peak_frequency);
            out[k].feedback_trail.push_back(fb);
        }
    }

    const int sweeps_total = 1 + int(groups.size());
    for (auto& est : out)
        est.sweeps_used = sweeps_total;
    return out;
}

// Golden-section maximizer on [lo, hi]; assumes a single interior maximum.
static double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol)
    {
        if (fc > fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double CbsHighParams::resolved_delta_pad(const SensingRange& range, int m_intervals) const
{
    if (delta_pad)
        return *delta_pad;
    return std::max(deg_to_rad(0.5), 4.0 * range.mean_angle_step(m_intervals));
}

/// Angular pad of the p-th sweep (p = 0-based):
/// pad_p = delta_pad * (p + 0.618 * p*(p-1)/(P-1)).
/// The irrational quadratic growth keeps consecutive pad steps incommensurate,
/// so the peak subcarriers never quantize onto a resonant index pattern.
double stagger_pad(double delta_pad, int p, int p_sweeps)
{
    const double denom = std::max(p_sweeps - 1, 1);
    return delta_pad * (double(p) + 0.6180339887498949 * double(p) * double(p - 1) / denom);
}

Estimate cbs_high_localize(const ArrayConfigd& cfg, const PolarPointd& user,
                           const SensingRange& range, const CbsHighParams& params, double snr,
                           Rng& rng, DistanceModel channel_model)
{
    range.validate();
    if (params.p_sweeps < 2)
        throw std::invalid_argument("cbs_high_localize: need at least 2 sweeps");
    if (params.p_r < 2)
        throw std::invalid_argument("cbs_high_localize: need at least 2 distance grid points");
    const double delta_pad = params.resolved_delta_pad(range, cfg.m_intervals);
    if (!(delta_pad > 0.0))
        throw std::invalid_argument("cbs_high_localize: stagger must be positive");
    const double pad_span = stagger_pad(delta_pad, params.p_sweeps - 1, params.p_sweeps);
    if (!(range.theta_max + pad_span < pi / 2) || !(range.theta_min - pad_span > -pi / 2))
        throw std::invalid_argument("cbs_high_localize: staggered sweeps leave the half-plane");
    const double r_mid1 = params.r_mid1.value_or(range.r_mid());
    const double r_mid2 = params.r_mid2.value_or(range.r_mid());

    Estimate est;
    est.scheme = Scheme::CbsHigh;
    est.sweeps_used = params.p_sweeps;

    // P staggered angle sweeps; each widens the covered range so the user's
    // peak lands on a different subcarrier every time. The pads grow with
    // arithmetic-progression steps rather than a constant one: a constant
    // step makes the fed-back frequencies a near-uniform comb, whose phase
    // ranging aliases at c over the comb spacing with full height.
    std::vector<HighSweepContext> sweeps;
    double theta_sum = 0.0;
    for (int p = 0; p < params.p_sweeps; ++p)
    {
        const double pad = stagger_pad(delta_pad, p, params.p_sweeps);
        const double theta_max_p = range.theta_max + pad;
        const double theta_min_p = range.theta_min - pad;
        const SweepPlan plan{
            ttd_config(cfg, PolarPointd(r_mid1, theta_max_p), PolarPointd(r_mid2, theta_min_p)),
            StageKind::HighP, p, 0};
        const auto spectrum =
            process_spectrum(cfg, simulate_sweep(cfg, plan, user, snr, rng, channel_model));
        const UserFeedback fb = peak_subcarrier(cfg, spectrum);
        const AngleInversion inv = angle_from_peak(cfg, theta_max_p, theta_min_p, fb.peak_frequency);
        theta_sum += inv.theta;
        if (inv.clamped && est.flags.empty())
            est.flags.push_back("clamped");
        est.feedback_trail.push_back(fb);
        sweeps.push_back(HighSweepContext{theta_max_p, theta_min_p, r_mid1, r_mid2,
                                          fb.peak_frequency, inv.theta, fb.peak_phase,
                                          plan.beamformer.delay_offset});
    }
    est.theta_hat = theta_sum / double(params.p_sweeps);

    // Distance: maximize the phase-consistency objective on a uniform grid,
    // check the runner-up peak, then refine inside the winning cell.
    const int n_grid = params.p_r;
    const double dr = (range.r_max - range.r_min) / double(n_grid - 1);
    std::vector<double> L(n_grid);
    int best = 0;
    for (int j = 0; j < n_grid; ++j)
    {
        L[j] = cbs_high_objective(cfg, sweeps, range.r_min + double(j) * dr);
        if (L[j] > L[best])
            best = j;
    }
    double runner_up = -1.0;
    for (int j = 0; j < n_grid; ++j)
    {
        const bool local_max = (j == 0 || L[j] >= L[j - 1]) && (j == n_grid - 1 || L[j] > L[j + 1]);
        if (local_max && std::abs(j - best) > 1)
            runner_up = std::max(runner_up, L[j]);
    }
    if (runner_up > 0.99 * L[best])
        throw AmbiguousDistance("cbs_high_localize: two distance peaks within 1%");

    const double lo = range.r_min + double(std::max(best - 1, 0)) * dr;
    const double hi = range.r_min + double(std::min(best + 1, n_grid - 1)) * dr;
    est.r_hat = golden_max([&](double r) { return cbs_high_objective(cfg, sweeps, r); }, lo, hi,
                           params.refine_tol);
    est.objective = cbs_high_objective(cfg, sweeps, est.r_hat);
    return est;
}

Estimate cbs_2bs_from_angles(double baseline, double theta_a, double theta_b, double axis_epsilon)
{
    if (!(baseline > 0.0))
        throw std::invalid_argument("cbs_2bs_from_angles: baseline must be positive");
    if (std::abs(theta_a) < axis_epsilon || std::abs(theta_b) < axis_epsilon)
        throw DegenerateGeometry("cbs_2bs_from_angles: user too close to the baseline axis");
    // Both arrays look at the same user, so the angle signs must agree; a
    // mismatch means at least one feedback straddles the axis.
    if ((theta_a > 0.0) != (theta_b > 0.0))
        throw DegenerateGeometry("cbs_2bs_from_angles: angle signs disagree");
    const double denom = std::cos(theta_a) + std::sin(theta_a) / std::tan(theta_b);
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw DegenerateGeometry("cbs_2bs_from_angles: inconsistent angle pair");
    Estimate est;
    est.theta_hat = theta_a;
    est.r_hat = baseline / denom;
    est.scheme = Scheme::Cbs2Bs;
    est.sweeps_used = 2;
    return est;
}

Estimate cbs_2bs_localize(const ArrayConfigd& cfg, const CartesianPointd& user,
                          const SensingRange& range, const TwoBsParams& params, double snr,
                          Rng& rng, DistanceModel channel_model)
{
    range.validate();
    if (!(params.baseline > 0.0))
        throw std::invalid_argument("cbs_2bs_localize: baseline must be positive");
    if (!(user.x > 0.0) || !(user.x < params.baseline))
        throw std::invalid_argument("cbs_2bs_localize: user must lie between the two arrays");
    const double r_mid1 = params.r_mid1.value_or(range.r_mid());
    const double r_mid2 = params.r_mid2.value_or(range.r_mid());

    // The auxiliary array faces the main one: its local frame sees the user
    // at (baseline - x, y), so the same angle-stage machinery applies.
    const PolarPointd seen_a = cartesian_to_polar(user);
    const PolarPointd seen_b = cartesian_to_polar(CartesianPointd(params.baseline - user.x, user.y));

    const SweepPlan plan_a{
        ttd_config(cfg, PolarPointd(r_mid1, range.theta_max), PolarPointd(r_mid2, range.theta_min)),
        StageKind::AngleStage, 0, 0};
    const SweepPlan plan_b{plan_a.beamformer, StageKind::AngleStage, 0, 1};

    const UserFeedback fb_a =
        peak_subcarrier(cfg, process_spectrum(cfg, simulate_sweep(cfg, plan_a, seen_a, snr, rng, channel_model)));
    const UserFeedback fb_b =
        peak_subcarrier(cfg, process_spectrum(cfg, simulate_sweep(cfg, plan_b, seen_b, snr, rng, channel_model)));
    const AngleInversion inv_a = angle_from_peak(cfg, range.theta_max, range.theta_min, fb_a.peak_frequency);
    const AngleInversion inv_b = angle_from_peak(cfg, range.theta_max, range.theta_min, fb_b.peak_frequency);

    const double eps = params.axis_epsilon.value_or(0.5 * range.mean_angle_step(cfg.m_intervals));
    Estimate est = cbs_2bs_from_angles(params.baseline, inv_a.theta, inv_b.theta, eps);
    est.feedback_trail = {fb_a, fb_b};
    if (inv_a.clamped || inv_b.clamped)
        est.flags.push_back("clamped");
    return est;
}

} // namespace squintloc
