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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "squintloc/localization.hpp"

using namespace squintloc;

namespace
{
const double inf = std::numeric_limits<double>::infinity();

SweepPlan angle_plan(const ArrayConfigd& cfg, const SensingRange& range, double r_mid1,
                     double r_mid2)
{
    return SweepPlan{ttd_config(cfg, PolarPointd(r_mid1, range.theta_max),
                                PolarPointd(r_mid2, range.theta_min)),
                     StageKind::AngleStage, 0, 0};
}
} // namespace

TEST_CASE("scheme names round trip")
{
    for (Scheme s : {Scheme::Tbt, Scheme::CbsLow, Scheme::CbsHigh, Scheme::Cbs2Bs})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("nope"), std::invalid_argument);
}

TEST_CASE("radial sweep plans must keep a fixed angle")
{
    const ArrayConfigd cfg(16, 30e9, 3e9, 8);
    SweepPlan plan{ttd_config(cfg, PolarPointd(10.0, 0.1), PolarPointd(20.0, 0.2)),
                   StageKind::DistanceStage, 0, 0};
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan.kind = StageKind::AngleStage;
    CHECK_NOTHROW(plan.validate());
}

TEST_CASE("matched sweep delivers sqrt(N) times the path loss on every subcarrier")
{
    const ArrayConfigd cfg(128, 30e9, 3e9, 32, 0.005);
    const PolarPointd user(25.0, deg_to_rad(15.0));
    const SweepPlan plan{ttd_config(cfg, user, user), StageKind::Generic, 0, 0};
    Rng rng(1);
    const auto y = simulate_sweep(cfg, plan, user, inf, rng, DistanceModel::Fresnel);
    REQUIRE(y.size() == 33);
    CHECK_FALSE(y.rescaled);
    for (int m = 0; m <= 32; ++m)
    {
        const double expected = std::sqrt(128.0) * path_loss(subcarrier_frequency(cfg, m), user.r);
        CHECK(std::abs(y.samples[m]) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("simulate_sweep agrees with the channel/weights composition")
{
    const ArrayConfigd cfg(32, 28e9, 2e9, 16);
    const PolarPointd user(18.0, deg_to_rad(-22.0));
    const auto state = ttd_config(cfg, PolarPointd(12.0, deg_to_rad(30.0)),
                                  PolarPointd(20.0, deg_to_rad(-30.0)));
    const SweepPlan plan{state, StageKind::Generic, 0, 0};
    Rng rng(1);
    const auto y = simulate_sweep(cfg, plan, user, inf, rng, DistanceModel::Exact);
    for (int m = 0; m <= 16; ++m)
    {
        const auto h = channel_vector(cfg, user, m, DistanceModel::Exact);
        const std::complex<double> ref = h.dot(weights_at(state, m));
        CHECK(std::abs(y.samples[m] - ref) < 1e-9 * std::abs(ref));
    }
}

TEST_CASE("noiseless sweep equals infinite-snr sweep with any seed")
{
    const ArrayConfigd cfg(16, 30e9, 3e9, 8);
    const PolarPointd user(15.0, 0.2);
    const SweepPlan plan{ps_only_state(cfg, user), StageKind::Baseline, 0, 0};
    Rng a(111), b(999);
    const auto ya = simulate_sweep(cfg, plan, user, inf, a);
    const auto yb = simulate_sweep(cfg, plan, user, inf, b);
    CHECK(ya.samples == yb.samples);

    Rng c(5), d(5);
    const auto yc = simulate_sweep(cfg, plan, user, 3.0, c);
    const auto yd = simulate_sweep(cfg, plan, user, 3.0, d);
    CHECK(yc.samples == yd.samples);
    CHECK(yc.samples != ya.samples);
}

TEST_CASE("sweep across a mismatched array is rejected")
{
    const ArrayConfigd cfg(16, 30e9, 3e9, 8);
    const ArrayConfigd other(32, 30e9, 3e9, 8);
    const SweepPlan plan{ps_only_state(other, PolarPointd(10.0, 0.0)), StageKind::Generic, 0, 0};
    Rng rng(1);
    CHECK_THROWS_AS(simulate_sweep(cfg, plan, PolarPointd(10.0, 0.0), inf, rng),
                    std::invalid_argument);
}

TEST_CASE("sweep starting on the user peaks at the first subcarrier")
{
    const ArrayConfigd cfg(128, 30e9, 3e9, 8, 0.005);
    const PolarPointd user(60.0, deg_to_rad(30.0));
    const SweepPlan plan{
        ttd_config(cfg, user, PolarPointd(60.0, deg_to_rad(-30.0))), StageKind::AngleStage, 0, 0};
    Rng rng(1);
    const auto fb =
        peak_subcarrier(cfg, process_spectrum(cfg, simulate_sweep(cfg, plan, user, inf, rng)));
    CHECK(fb.peak_subcarrier <= 1);
}

TEST_CASE("process_spectrum rescales to N/r at a perfect focus")
{
    const ArrayConfigd cfg(128, 30e9, 3e9, 16, 0.005);
    const PolarPointd user(25.0, deg_to_rad(-10.0));
    const SweepPlan plan{ttd_config(cfg, user, user), StageKind::Generic, 0, 0};
    Rng rng(1);
    const auto hat =
        process_spectrum(cfg, simulate_sweep(cfg, plan, user, inf, rng, DistanceModel::Fresnel));
    CHECK(hat.rescaled);
    for (int m = 0; m <= 16; ++m)
        CHECK(std::abs(hat.samples[m]) == doctest::Approx(128.0 / user.r).epsilon(1e-12));
}

TEST_CASE("process_spectrum edge behaviors")
{
    const ArrayConfigd cfg(8, 30e9, 6e9, 4);
    ReceivedSpectrumd zero;
    zero.samples = Eigen::VectorXcd::Zero(5);
    const auto z = process_spectrum(cfg, zero);
    CHECK(z.samples.norm() == 0.0);
    CHECK_THROWS_AS(process_spectrum(cfg, z), std::invalid_argument); // already rescaled

    // Flat raw spectrum: rescale ratio between the band edges is f_M/f0.
    ReceivedSpectrumd flat;
    flat.samples = Eigen::VectorXcd::Constant(5, std::complex<double>(1.0, 0.0));
    const auto r = process_spectrum(cfg, flat);
    CHECK(std::abs(r.samples[4]) / std::abs(r.samples[0]) ==
          doctest::Approx(36e9 / 30e9).epsilon(1e-14));

    ReceivedSpectrumd wrong;
    wrong.samples = Eigen::VectorXcd::Zero(4);
    CHECK_THROWS_AS(process_spectrum(cfg, wrong), std::invalid_argument);
}

TEST_CASE("peak_subcarrier picks the maximum and breaks ties low")
{
    const ArrayConfigd cfg(8, 30e9, 6e9, 12);
    ReceivedSpectrumd s;
    s.samples = Eigen::VectorXcd::Zero(13);
    s.samples[7] = std::complex<double>(0.0, 2.0);
    const auto fb = peak_subcarrier(cfg, s);
    CHECK(fb.peak_subcarrier == 7);
    CHECK(fb.peak_frequency == doctest::Approx(subcarrier_frequency(cfg, 7)));
    CHECK(fb.peak_phase == doctest::Approx(pi / 2));

    s.samples[3] = std::complex<double>(2.0, 0.0);
    s.samples[9] = std::complex<double>(-2.0, 0.0);
    CHECK(peak_subcarrier(cfg, s).peak_subcarrier == 3);
}

TEST_CASE("angle-stage peak index follows the trajectory crossing")
{
    // Focus distances tuned so the sweep arc passes near the user's range.
    const ArrayConfigd cfg(128, 30e9, 3e9, 2047, 0.005);
    const SensingRange range{5.0, 80.0, deg_to_rad(-60.0), deg_to_rad(60.0)};
    const PolarPointd user(30.0, deg_to_rad(30.0));
    const SweepPlan plan = angle_plan(cfg, range, 10.0, 10.0);
    Rng rng(1);
    const auto fb =
        peak_subcarrier(cfg, process_spectrum(cfg, simulate_sweep(cfg, plan, user, inf, rng)));

    int best_m = 0;
    double best_gap = 1e300;
    for (int m = 0; m <= cfg.m_intervals; ++m)
    {
        const double gap = std::abs(ttd_squint_point(plan.beamformer, m).point.theta - user.theta);
        if (gap < best_gap)
        {
            best_gap = gap;
            best_m = m;
        }
    }
    CHECK(std::abs(fb.peak_subcarrier - best_m) <= 1);
}

TEST_CASE("angle_from_peak endpoints and round trip")
{
    const ArrayConfigd cfg(64, 30e9, 3e9, 16, 0.005);
    const double tmax = deg_to_rad(42.0), tmin = deg_to_rad(-17.0);
    CHECK(angle_from_peak(cfg, tmax, tmin, cfg.f0).theta == doctest::Approx(tmax).epsilon(1e-14));
    CHECK(angle_from_peak(cfg, tmax, tmin, cfg.f_max()).theta ==
          doctest::Approx(tmin).epsilon(1e-14));

    const auto state = ttd_config(cfg, PolarPointd(22.0, tmax), PolarPointd(31.0, tmin));
    for (int m = 0; m <= cfg.m_intervals; ++m)
    {
        const auto sp = ttd_squint_point(state, m);
        const auto inv = angle_from_peak(cfg, tmax, tmin, subcarrier_frequency(cfg, m));
        CHECK_FALSE(inv.clamped);
        CHECK(inv.theta == doctest::Approx(sp.point.theta).epsilon(1e-12));
    }

    CHECK_THROWS_AS(angle_from_peak(cfg, tmax, tmin, cfg.f0 - cfg.bandwidth), InvalidFeedback);
    CHECK_THROWS_AS(angle_from_peak(cfg, tmax, tmin, cfg.f_max() * 1.1), InvalidFeedback);
}

TEST_CASE("angle_from_peak clamps out-of-domain arguments and flags it")
{
    const ArrayConfigd cfg(64, 30e9, 3e9, 16, 0.005);
    const double spacing = cfg.bandwidth / cfg.m_intervals;
    // Half a spacing below the grid start extrapolates past the endpoint.
    const auto inv =
        angle_from_peak(cfg, deg_to_rad(80.0), deg_to_rad(-80.0), cfg.f0 - 0.49 * spacing);
    CHECK(inv.clamped);
    CHECK(inv.theta == doctest::Approx(pi / 2));
}

TEST_CASE("distance_from_peak endpoints, round trip and failure")
{
    const ArrayConfigd cfg(64, 30e9, 3e9, 16, 0.005);
    CHECK(distance_from_peak(cfg, 12.0, 55.0, cfg.f0) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(distance_from_peak(cfg, 12.0, 55.0, cfg.f_max()) ==
          doctest::Approx(55.0).epsilon(1e-14));

    const auto state = ttd_config(cfg, PolarPointd(12.0, 0.3), PolarPointd(55.0, 0.3));
    for (int m = 0; m <= cfg.m_intervals; ++m)
    {
        const auto sp = ttd_squint_point(state, m);
        const double r = distance_from_peak(cfg, 12.0, 55.0, subcarrier_frequency(cfg, m));
        CHECK(r == doctest::Approx(sp.point.r).epsilon(1e-12));
        CHECK(r >= 12.0 * (1 - 1e-12));
        CHECK(r <= 55.0 * (1 + 1e-12));
    }

    CHECK_THROWS_AS(distance_from_peak(cfg, 12.0, 55.0, 2 * cfg.f_max()), InvalidFeedback);
    // Tolerated off-grid overshoot extrapolates 1/r below zero for extreme spans.
    const double spacing = cfg.bandwidth / cfg.m_intervals;
    CHECK_THROWS_AS(distance_from_peak(cfg, 0.5, 40.0, cfg.f_max() + 0.49 * spacing),
                    NonPositiveDistance);
}

TEST_CASE("beam training returns the matched node for on-grid users")
{
    // Narrowband so the squint shift stays well under a codebook step; the
    // aperture is kept large so the codebook still resolves distance.
    const ArrayConfigd cfg(256, 30e9, 0.2e9, 16, 0.005);
    const SensingRange range{10.0, 26.0, deg_to_rad(-20.0), deg_to_rad(20.0)};
    TbtParams params;
    params.i_angle = 9;
    params.i_distance = 9;
    // node (r index 4, theta index 6) = (18 m, 10 deg)
    const PolarPointd user(18.0, deg_to_rad(10.0));
    Rng rng(1);
    const auto est = tbt_localize(cfg, user, range, params, inf, rng);
    CHECK(est.theta_hat == doctest::Approx(user.theta).epsilon(1e-12));
    CHECK(est.r_hat == doctest::Approx(user.r).epsilon(1e-12));
    CHECK(est.sweeps_used == 18);
    CHECK(est.scheme == Scheme::Tbt);
}

TEST_CASE("beam training stays within half a codebook step off-grid")
{
    // The angle grid must sample at or below the beamwidth; a coarser grid
    // leaves the distance codewords pointed off the user, where defocused
    // entries collect more energy than focused ones.
    const ArrayConfigd cfg(256, 30e9, 0.2e9, 16, 0.005);
    const SensingRange range{10.0, 26.0, deg_to_rad(-20.0), deg_to_rad(20.0)};
    TbtParams params;
    params.i_angle = 81; // 0.5 degree steps, about one beamwidth
    params.i_distance = 9;
    const double dtheta = deg_to_rad(40.0) / 80.0;
    const double dr = 2.0;
    const PolarPointd user(17.3, deg_to_rad(8.6)); // off-grid in both coordinates
    Rng rng(1);
    const auto est = tbt_localize(cfg, user, range, params, inf, rng);
    CHECK(std::abs(est.theta_hat - user.theta) <= dtheta / 2 + 1e-12);
    CHECK(std::abs(est.r_hat - user.r) <= dr / 2 + 1e-12);
    CHECK(est.sweeps_used == 90);

    CHECK_THROWS_AS(tbt_localize(cfg, user, range, TbtParams{1, 4, {}}, inf, rng),
                    std::invalid_argument);
}

TEST_CASE("cbs_low: noiseless errors stay within one squint step")
{
    const ArrayConfigd cfg(64, 30e9, 6e9, 511, 0.005);
    const SensingRange range{2.5, 18.0, deg_to_rad(-40.0), deg_to_rad(40.0)};
    const auto ang_state = ttd_config(cfg, PolarPointd(range.r_mid(), range.theta_max),
                                      PolarPointd(range.r_mid(), range.theta_min));
    double ang_step = 0.0;
    for (int m = 0; m < cfg.m_intervals; ++m)
        ang_step = std::max(ang_step, std::abs(ttd_squint_point(ang_state, m + 1).point.theta -
                                               ttd_squint_point(ang_state, m).point.theta));
    const auto rad_state =
        ttd_config(cfg, PolarPointd(range.r_min, 0.1), PolarPointd(range.r_max, 0.1));
    double r_step = 0.0;
    for (int m = 0; m < cfg.m_intervals; ++m)
        r_step = std::max(r_step, std::abs(ttd_squint_point(rad_state, m + 1).point.r -
                                           ttd_squint_point(rad_state, m).point.r));

    for (double r : {6.0, 12.0, 16.0})
        for (double td : {-30.0, 0.0, 25.0})
        {
            Rng rng(1);
            const PolarPointd user(r, deg_to_rad(td));
            const auto est = cbs_low_localize(cfg, {user}, range, {}, inf, rng).front();
            CHECK(std::abs(est.theta_hat - user.theta) <= ang_step);
            CHECK(std::abs(est.r_hat - user.r) <= r_step);
            CHECK(est.sweeps_used == 2);
            CHECK(est.feedback_trail.size() == 2);
        }
}

TEST_CASE("cbs_low groups users sharing an angle into one radial sweep")
{
    const ArrayConfigd cfg(64, 30e9, 6e9, 511, 0.005);
    const SensingRange range{2.5, 18.0, deg_to_rad(-40.0), deg_to_rad(40.0)};
    Rng rng(3);
    const std::vector<PolarPointd> same_angle{PolarPointd(8.0, deg_to_rad(12.0)),
                                              PolarPointd(13.0, deg_to_rad(12.0))};
    const auto ests = cbs_low_localize(cfg, same_angle, range, {}, inf, rng);
    REQUIRE(ests.size() == 2);
    CHECK(ests[0].sweeps_used == 2); // one angle sweep + one shared radial sweep
    CHECK(ests[1].sweeps_used == 2);
    CHECK(std::abs(ests[0].r_hat - 8.0) < 0.5);
    CHECK(std::abs(ests[1].r_hat - 13.0) < 0.5);

    Rng rng2(3);
    const std::vector<PolarPointd> distinct{PolarPointd(8.0, deg_to_rad(-25.0)),
                                            PolarPointd(13.0, deg_to_rad(20.0))};
    const auto ests2 = cbs_low_localize(cfg, distinct, range, {}, inf, rng2);
    CHECK(ests2[0].sweeps_used == 3); // K + 1 with distinct angles
    CHECK(ests2[1].sweeps_used == 3);
}

TEST_CASE("cbs_high: noiseless objective reaches the sweep count at the true range")
{
    const ArrayConfigd cfg(128, 30e9, 3e9, 511, 0.005);
    const SensingRange range{10.0, 80.0, deg_to_rad(-30.0), deg_to_rad(30.0)};
    CbsHighParams params;
    params.p_sweeps = 5;
    const PolarPointd user(47.0, deg_to_rad(12.0));
    Rng rng(1);
    const auto est = cbs_high_localize(cfg, user, range, params, inf, rng, DistanceModel::Fresnel);
    CHECK(est.scheme == Scheme::CbsHigh);
    CHECK(est.sweeps_used == 5);
    CHECK(int(est.feedback_trail.size()) == 5);
    CHECK(std::abs(est.r_hat - user.r) < 5e-3);
    CHECK(est.objective == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(std::abs(est.theta_hat - user.theta) < deg_to_rad(0.2));
}

TEST_CASE("cbs_high objective is bounded by the sweep count everywhere")
{
    const ArrayConfigd cfg(128, 30e9, 3e9, 255, 0.005);
    const SensingRange range{10.0, 80.0, deg_to_rad(-30.0), deg_to_rad(30.0)};
    CbsHighParams params;
    params.p_sweeps = 4;
    const PolarPointd user(41.0, deg_to_rad(-8.0));

    // Rebuild the sweep contexts the driver would use and scan L(r).
    std::vector<HighSweepContext> sweeps;
    Rng rng(2);
    const double delta_pad = params.resolved_delta_pad(range, cfg.m_intervals);
    for (int p = 0; p < params.p_sweeps; ++p)
    {
        const double pad = stagger_pad(delta_pad, p, params.p_sweeps);
        const double tmax = range.theta_max + pad, tmin = range.theta_min - pad;
        const SweepPlan plan{
            ttd_config(cfg, PolarPointd(range.r_mid(), tmax), PolarPointd(range.r_mid(), tmin)),
            StageKind::HighP, p, 0};
        const auto fb =
            peak_subcarrier(cfg, process_spectrum(cfg, simulate_sweep(cfg, plan, user, 10.0, rng)));
        sweeps.push_back(HighSweepContext{tmax, tmin, range.r_mid(), range.r_mid(),
                                          fb.peak_frequency,
                                          angle_from_peak(cfg, tmax, tmin, fb.peak_frequency).theta,
                                          fb.peak_phase, 0.0});
    }
    for (double r = range.r_min; r <= range.r_max; r += 0.7)
    {
        const double L = cbs_high_objective(cfg, sweeps, r);
        CHECK(L >= 0.0);
        CHECK(L <= 4.0 + 1e-12);
    }
}

TEST_CASE("cbs_high rejects degenerate parameterizations")
{
    const ArrayConfigd cfg(32, 30e9, 3e9, 64);
    const SensingRange range{10.0, 40.0, deg_to_rad(-30.0), deg_to_rad(30.0)};
    const PolarPointd user(20.0, 0.1);
    Rng rng(1);
    CbsHighParams p1;
    p1.p_sweeps = 1;
    CHECK_THROWS_AS(cbs_high_localize(cfg, user, range, p1, inf, rng), std::invalid_argument);
    CbsHighParams p2;
    p2.p_sweeps = 40;
    p2.delta_pad = deg_to_rad(4.0); // staggered ranges would cross 90 degrees
    CHECK_THROWS_AS(cbs_high_localize(cfg, user, range, p2, inf, rng), std::invalid_argument);
}

TEST_CASE("stagger pads grow with distinct steps")
{
    CbsHighParams params;
    params.p_sweeps = 6;
    const double d = params.resolved_delta_pad(SensingRange{1.0, 2.0, -0.5, 0.5}, 2047);
    CHECK(stagger_pad(d, 0, 6) == 0.0);
    double prev_step = 0.0;
    for (int p = 1; p < 6; ++p)
    {
        const double step = stagger_pad(d, p, 6) - stagger_pad(d, p - 1, 6);
        CHECK(step > prev_step);
        prev_step = step;
    }
}

TEST_CASE("dual-anchor closed form reproduces the worked geometry")
{
    // user (40, 30) from anchors at (0,0) and (100,0): both angles known
    const double theta_a = std::asin(0.6);
    const double theta_b = std::atan2(30.0, 60.0);
    const auto est = cbs_2bs_from_angles(100.0, theta_a, theta_b);
    CHECK(est.r_hat == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(est.theta_hat == doctest::Approx(theta_a));
    CHECK(est.sweeps_used == 2);
}

TEST_CASE("dual-anchor symmetry at the midpoint")
{
    const double theta = deg_to_rad(35.0);
    const auto est = cbs_2bs_from_angles(80.0, theta, theta);
    // mirrored geometry: both anchors see the same range
    const double expected = 40.0 / std::cos(theta);
    CHECK(est.r_hat == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dual-anchor degenerate and inconsistent inputs")
{
    CHECK_THROWS_AS(cbs_2bs_from_angles(100.0, 0.3, 0.0), DegenerateGeometry);
    CHECK_THROWS_AS(cbs_2bs_from_angles(100.0, 1e-12, 0.3), DegenerateGeometry);
    CHECK_THROWS_AS(cbs_2bs_from_angles(100.0, 0.3, -0.3), DegenerateGeometry); // signs disagree
    CHECK_THROWS_AS(cbs_2bs_from_angles(0.0, 0.3, 0.3), std::invalid_argument);
}

TEST_CASE("dual-anchor driver localizes noiseless users within the feedback bound")
{
    const ArrayConfigd cfg(256, 30e9, 3e9, 511, 0.005);
    const SensingRange range{10.0, 90.0, deg_to_rad(-60.0), deg_to_rad(60.0)};
    TwoBsParams params;
    params.baseline = 100.0;
    params.r_mid1 = 24.0;
    params.r_mid2 = 24.0;
    const double step = range.mean_angle_step(cfg.m_intervals);
    Rng urng(42);
    for (int k = 0; k < 4; ++k)
    {
        const double x = 25.0 + 50.0 * urng.uniform();
        const double y = 15.0 + 20.0 * urng.uniform();
        Rng rng(Rng::derive(5, std::uint64_t(k)));
        const auto est = cbs_2bs_localize(cfg, CartesianPointd(x, y), range, params, inf, rng);
        const double r_true = std::hypot(x, y);
        const double ta = std::atan2(y, x);
        const double tb = std::atan2(y, 100.0 - x);
        double bound = 0.0;
        for (double da : {-step, step})
            for (double db : {-step, step})
                bound = std::max(bound,
                                 std::abs(cbs_2bs_from_angles(100.0, ta + da, tb + db, 1e-12).r_hat -
                                          r_true));
        CHECK(std::abs(est.r_hat - r_true) <= bound);
        CHECK(est.sweeps_used == 2);
        CHECK(est.feedback_trail.size() == 2);
    }

    Rng rng(9);
    CHECK_THROWS_AS(cbs_2bs_localize(cfg, CartesianPointd(50.0, 1e-3), range, params, inf, rng),
                    DegenerateGeometry);
    CHECK_THROWS_AS(cbs_2bs_localize(cfg, CartesianPointd(120.0, 10.0), range, params, inf, rng),
                    std::invalid_argument);
}

TEST_CASE("estimate flag strings")
{
    Estimate est;
    CHECK(est.flags_string() == "");
    est.flags = {"clamped", "other"};
    CHECK(est.flags_string() == "clamped|other");
}
