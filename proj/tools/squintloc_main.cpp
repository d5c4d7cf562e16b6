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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "squintloc/config.hpp"
#include "squintloc/csv.hpp"
#include "squintloc/experiments.hpp"
#include "squintloc/localization.hpp"

using namespace squintloc;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_scheme_error = 3;

const std::set<std::string> common_keys = {"n_antennas", "f0_ghz", "w_ghz", "m_intervals",
                                           "d_m",        "seed",   "output"};

std::set<std::string> with_common(std::set<std::string> extra)
{
    extra.insert(common_keys.begin(), common_keys.end());
    return extra;
}

ArrayConfigd array_from_config(const RunConfig& cfg)
{
    const int n = int(cfg.get_int("n_antennas"));
    const double f0 = cfg.get_double("f0_ghz") * 1e9;
    const double w = cfg.get_double("w_ghz") * 1e9;
    const int m = int(cfg.get_int("m_intervals"));
    const double d = cfg.find_double("d_m").value_or(0.0);
    return ArrayConfigd(n, f0, w, m, d);
}

DistanceModel channel_model_from_config(const RunConfig& cfg)
{
    const std::string name = cfg.find_string("channel_model").value_or("exact");
    if (name == "exact")
        return DistanceModel::Exact;
    if (name == "fresnel")
        return DistanceModel::Fresnel;
    throw ConfigError("channel_model must be exact or fresnel, got `" + name + "`");
}

void check_noise_model(const RunConfig& cfg)
{
    const std::string name = cfg.find_string("noise_model").value_or("per_subcarrier");
    if (name != "per_subcarrier")
        throw ConfigError("noise_model: only per_subcarrier is supported");
}

double snr_linear_from_db(double snr_db)
{
    return std::isinf(snr_db) ? std::numeric_limits<double>::infinity()
                              : std::pow(10.0, snr_db / 10.0);
}

// Output stream selection: --output flag beats the config key, default stdout.
class OutputTarget
{
  public:
    OutputTarget(const std::string& flag_path, const RunConfig& cfg)
    {
        const std::string path = !flag_path.empty() ? flag_path
                                                    : cfg.find_string("output").value_or("");
        if (!path.empty())
        {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

void warn_if_outside_near_field(const ArrayConfigd& cfg, double r, int user_id)
{
    const auto [lo, hi] = cfg.validity_bounds();
    if (r < lo || r > hi)
        std::cerr << "note: user " << user_id << " at r = " << r
                  << " m is outside the near-field validity interval [" << lo << ", " << hi
                  << "] m\n";
}

SensingRange range_from_config(const RunConfig& cfg)
{
    SensingRange range{cfg.get_double("r_min_m"), cfg.get_double("r_max_m"),
                       deg_to_rad(cfg.get_double("theta_min_deg")),
                       deg_to_rad(cfg.get_double("theta_max_deg"))};
    range.validate();
    return range;
}

std::vector<PolarPointd> polar_users_from_config(const RunConfig& cfg)
{
    const auto rs = cfg.get_double_list("users_r_m");
    const auto ts = cfg.get_double_list("users_theta_deg");
    if (rs.size() != ts.size())
        throw ConfigError("users_r_m and users_theta_deg must have the same length");
    std::vector<PolarPointd> users;
    users.reserve(rs.size());
    for (size_t i = 0; i < rs.size(); ++i)
        users.emplace_back(rs[i], deg_to_rad(ts[i]));
    return users;
}

std::vector<CartesianPointd> cartesian_users_from_config(const RunConfig& cfg)
{
    const auto xs = cfg.get_double_list("users_x_m");
    const auto ys = cfg.get_double_list("users_y_m");
    if (xs.size() != ys.size())
        throw ConfigError("users_x_m and users_y_m must have the same length");
    std::vector<CartesianPointd> users;
    users.reserve(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        users.emplace_back(xs[i], ys[i]);
    return users;
}

// ---- trajectory -------------------------------------------------------------

const std::set<std::string> trajectory_keys =
    with_common({"start_r_m", "start_theta_deg", "end_r_m", "end_theta_deg", "grid_r_min_m",
                 "grid_r_max_m", "grid_r_step_m", "grid_theta_min_deg", "grid_theta_max_deg",
                 "grid_theta_step_deg"});

int cmd_trajectory(const RunConfig& run, bool oracle, const std::string& out_path)
{
    run.require_known(trajectory_keys);
    const ArrayConfigd cfg = array_from_config(run);
    run.get_u64("seed"); // reproducibility contract: every run names its seed
    const PolarPointd start(run.get_double("start_r_m"),
                            deg_to_rad(run.get_double("start_theta_deg")));
    const bool has_end = run.has("end_r_m") || run.has("end_theta_deg");
    if (has_end && !(run.has("end_r_m") && run.has("end_theta_deg")))
        throw ConfigError("end focus needs both end_r_m and end_theta_deg");
    std::optional<PolarPointd> end;
    if (has_end)
        end.emplace(run.get_double("end_r_m"), deg_to_rad(run.get_double("end_theta_deg")));

    SearchGridd grid = default_search_grid(cfg);
    if (const auto v = run.find_double("grid_r_min_m"))
        grid.r_min = *v;
    if (const auto v = run.find_double("grid_r_max_m"))
        grid.r_max = *v;
    if (const auto v = run.find_double("grid_r_step_m"))
        grid.r_step = *v;
    if (const auto v = run.find_double("grid_theta_min_deg"))
        grid.theta_min = deg_to_rad(*v);
    if (const auto v = run.find_double("grid_theta_max_deg"))
        grid.theta_max = deg_to_rad(*v);
    if (const auto v = run.find_double("grid_theta_step_deg"))
        grid.theta_step = deg_to_rad(*v);

    OutputTarget out(out_path, run);
    CsvWriter csv(out.stream());
    std::vector<std::string> header = {"m", "f_hz", "r_m", "theta_deg"};
    if (oracle)
    {
        header.push_back("oracle_r_m");
        header.push_back("oracle_theta_deg");
    }
    csv.row(header);

    const auto state = end ? ttd_config(cfg, start, *end) : ps_only_state(cfg, start);
    for (int m = 0; m <= cfg.m_intervals; ++m)
    {
        const SquintPointd sp =
            end ? ttd_squint_point(state, m) : natural_squint_point(cfg, start, m);
        csv.field(m).field(sp.f).field(sp.point.r).field(rad_to_deg(sp.point.theta));
        if (oracle)
        {
            const auto got = brute_force_squint_point(state, m, grid, DistanceModel::Fresnel);
            csv.field(got.point.r).field(rad_to_deg(got.point.theta));
        }
        csv.end_row();
    }
    return exit_ok;
}

// ---- spectrum ---------------------------------------------------------------

const std::set<std::string> spectrum_keys =
    with_common({"start_r_m", "start_theta_deg", "end_r_m", "end_theta_deg", "user_r_m",
                 "user_theta_deg", "snr_db", "rescale", "channel_model", "noise_model"});

int cmd_spectrum(const RunConfig& run, const std::string& out_path)
{
    run.require_known(spectrum_keys);
    const ArrayConfigd cfg = array_from_config(run);
    check_noise_model(run);
    const PolarPointd start(run.get_double("start_r_m"),
                            deg_to_rad(run.get_double("start_theta_deg")));
    const bool has_end = run.has("end_r_m") || run.has("end_theta_deg");
    if (has_end && !(run.has("end_r_m") && run.has("end_theta_deg")))
        throw ConfigError("end focus needs both end_r_m and end_theta_deg");
    const PolarPointd user(run.get_double("user_r_m"), deg_to_rad(run.get_double("user_theta_deg")));
    warn_if_outside_near_field(cfg, user.r, 0);

    const double snr = snr_linear_from_db(run.find_double("snr_db").value_or(
        std::numeric_limits<double>::infinity()));
    const bool rescale = run.find_bool("rescale").value_or(true);
    const DistanceModel model = channel_model_from_config(run);
    Rng rng(run.get_u64("seed"));

    const SweepPlan plan{
        has_end ? ttd_config(cfg, start,
                             PolarPointd(run.get_double("end_r_m"),
                                         deg_to_rad(run.get_double("end_theta_deg"))))
                : ps_only_state(cfg, start),
        StageKind::Generic, 0, 0};
    ReceivedSpectrumd spectrum = simulate_sweep(cfg, plan, user, snr, rng, model);
    if (rescale)
        spectrum = process_spectrum(cfg, spectrum);

    double peak = 0.0;
    for (int m = 0; m < spectrum.size(); ++m)
        peak = std::max(peak, std::abs(spectrum.samples[m]));

    OutputTarget out(out_path, run);
    CsvWriter csv(out.stream());
    csv.row({"m", "f_hz", "power", "power_normalized", "phase_rad"});
    for (int m = 0; m < spectrum.size(); ++m)
    {
        const double mag = std::abs(spectrum.samples[m]);
        csv.field(m)
            .field(subcarrier_frequency(cfg, m))
            .field(mag)
            .field(peak > 0.0 ? mag / peak : 0.0)
            .field(std::arg(spectrum.samples[m]));
        csv.end_row();
    }
    return exit_ok;
}

// ---- localize ---------------------------------------------------------------

const std::set<std::string> localize_keys = with_common(
    {"scheme", "snr_db", "r_min_m", "r_max_m", "theta_min_deg", "theta_max_deg", "users_r_m",
     "users_theta_deg", "users_x_m", "users_y_m", "channel_model", "noise_model", "i_a", "i_d",
     "r_anchor_m", "r_mid1_m", "r_mid2_m", "p_sweeps", "delta_pad_deg", "p_r", "refine_tol_m",
     "baseline_l_m", "axis_epsilon_deg"});

TbtParams tbt_params_from_config(const RunConfig& run)
{
    TbtParams params;
    params.i_angle = int(run.get_int("i_a"));
    params.i_distance = int(run.get_int("i_d"));
    if (const auto v = run.find_double("r_anchor_m"))
        params.r_anchor = *v;
    return params;
}

CbsLowParams cbs_low_params_from_config(const RunConfig& run)
{
    CbsLowParams params;
    if (const auto v = run.find_double("r_mid1_m"))
        params.r_mid1 = *v;
    if (const auto v = run.find_double("r_mid2_m"))
        params.r_mid2 = *v;
    return params;
}

CbsHighParams cbs_high_params_from_config(const RunConfig& run)
{
    CbsHighParams params;
    params.p_sweeps = int(run.find_int("p_sweeps").value_or(5));
    if (const auto v = run.find_double("delta_pad_deg"))
        params.delta_pad = deg_to_rad(*v);
    params.p_r = int(run.find_int("p_r").value_or(1024));
    params.refine_tol = run.find_double("refine_tol_m").value_or(1e-3);
    if (const auto v = run.find_double("r_mid1_m"))
        params.r_mid1 = *v;
    if (const auto v = run.find_double("r_mid2_m"))
        params.r_mid2 = *v;
    return params;
}

TwoBsParams two_bs_params_from_config(const RunConfig& run)
{
    TwoBsParams params;
    params.baseline = run.get_double("baseline_l_m");
    if (const auto v = run.find_double("r_mid1_m"))
        params.r_mid1 = *v;
    if (const auto v = run.find_double("r_mid2_m"))
        params.r_mid2 = *v;
    if (const auto v = run.find_double("axis_epsilon_deg"))
        params.axis_epsilon = deg_to_rad(*v);
    return params;
}

int cmd_localize(const RunConfig& run, const std::string& out_path)
{
    run.require_known(localize_keys);
    const ArrayConfigd cfg = array_from_config(run);
    check_noise_model(run);
    const Scheme scheme = scheme_from_name(run.get_string("scheme"));
    const SensingRange range = range_from_config(run);
    const DistanceModel model = channel_model_from_config(run);
    const double snr = snr_linear_from_db(run.find_double("snr_db").value_or(
        std::numeric_limits<double>::infinity()));
    Rng rng(run.get_u64("seed"));

    struct Row
    {
        double theta_true, r_true;
        Estimate est;
    };
    std::vector<Row> rows;

    if (scheme == Scheme::Cbs2Bs)
    {
        const auto users = cartesian_users_from_config(run);
        const TwoBsParams params = two_bs_params_from_config(run);
        for (size_t k = 0; k < users.size(); ++k)
        {
            const PolarPointd truth = cartesian_to_polar(users[k]);
            warn_if_outside_near_field(cfg, truth.r, int(k));
            rows.push_back(
                {truth.theta, truth.r,
                 cbs_2bs_localize(cfg, users[k], range, params, snr, rng, model)});
        }
    }
    else
    {
        const auto users = polar_users_from_config(run);
        for (size_t k = 0; k < users.size(); ++k)
            warn_if_outside_near_field(cfg, users[k].r, int(k));
        if (scheme == Scheme::CbsLow)
        {
            const auto ests =
                cbs_low_localize(cfg, users, range, cbs_low_params_from_config(run), snr, rng, model);
            for (size_t k = 0; k < users.size(); ++k)
                rows.push_back({users[k].theta, users[k].r, ests[k]});
        }
        else if (scheme == Scheme::Tbt)
        {
            const TbtParams params = tbt_params_from_config(run);
            for (const auto& user : users)
                rows.push_back(
                    {user.theta, user.r, tbt_localize(cfg, user, range, params, snr, rng, model)});
        }
        else
        {
            const CbsHighParams params = cbs_high_params_from_config(run);
            for (const auto& user : users)
                rows.push_back({user.theta, user.r,
                                cbs_high_localize(cfg, user, range, params, snr, rng, model)});
        }
    }

    OutputTarget out(out_path, run);
    CsvWriter csv(out.stream());
    csv.row({"user_id", "scheme", "theta_true_deg", "r_true_m", "theta_hat_deg", "r_hat_m",
             "sweeps", "flags"});
    for (size_t k = 0; k < rows.size(); ++k)
    {
        const auto& row = rows[k];
        csv.field((long long)k)
            .field(scheme_name(scheme))
            .field(rad_to_deg(row.theta_true))
            .field(row.r_true)
            .field(rad_to_deg(row.est.theta_hat))
            .field(row.est.r_hat)
            .field((long long)row.est.sweeps_used)
            .field(row.est.flags_string());
        csv.end_row();
    }
    return exit_ok;
}

// ---- experiment -------------------------------------------------------------

const std::set<std::string> experiment_keys = [] {
    auto keys = localize_keys;
    keys.insert("trials");
    return keys;
}();

int cmd_experiment(const RunConfig& run, const std::string& out_path)
{
    run.require_known(experiment_keys);
    check_noise_model(run);
    ExperimentSpec spec{scheme_from_name(run.get_string("scheme")), array_from_config(run)};
    spec.range = range_from_config(run);
    spec.snr_db = run.get_double_list("snr_db");
    spec.trials = int(run.get_int("trials"));
    spec.seed = run.get_u64("seed");
    spec.channel_model = channel_model_from_config(run);
    if (spec.scheme == Scheme::Cbs2Bs)
    {
        spec.users_xy = cartesian_users_from_config(run);
        spec.two_bs = two_bs_params_from_config(run);
        for (size_t k = 0; k < spec.users_xy.size(); ++k)
            warn_if_outside_near_field(spec.cfg, cartesian_to_polar(spec.users_xy[k]).r, int(k));
    }
    else
    {
        spec.users = polar_users_from_config(run);
        for (size_t k = 0; k < spec.users.size(); ++k)
            warn_if_outside_near_field(spec.cfg, spec.users[k].r, int(k));
        if (spec.scheme == Scheme::Tbt)
            spec.tbt = tbt_params_from_config(run);
        else if (spec.scheme == Scheme::CbsLow)
            spec.cbs_low = cbs_low_params_from_config(run);
        else
            spec.cbs_high = cbs_high_params_from_config(run);
    }

    const auto cells = run_experiment(spec);

    OutputTarget out(out_path, run);
    CsvWriter csv(out.stream());
    csv.row({"snr_db", "user_id", "rmse_theta_deg", "rmse_r_m", "rmse_2d_m", "mean_sweeps",
             "excluded_trials"});
    for (const auto& cell : cells)
    {
        csv.field(cell.snr_db)
            .field(cell.user_id)
            .field(rad_to_deg(cell.rmse_theta))
            .field(cell.rmse_r)
            .field(cell.rmse_2d)
            .field(cell.mean_sweeps)
            .field((long long)cell.excluded_trials);
        csv.end_row();
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"squintloc: near-field wideband beam squint simulation and localization"};
    app.require_subcommand(1);

    std::string config_path, output_path;
    bool oracle = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "key = value configuration file")->required();
        sub->add_option("-o,--output", output_path, "output CSV path (default: stdout)");
    };

    CLI::App* trajectory =
        app.add_subcommand("trajectory", "per-subcarrier beam squint points of one sweep");
    add_common(trajectory);
    trajectory->add_flag("--oracle", oracle,
                         "append grid-search argmax columns next to the closed form");

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "received spectrum of one user for one sweep");
    add_common(spectrum);

    CLI::App* localize = app.add_subcommand("localize", "run one localization scheme end to end");
    add_common(localize);

    CLI::App* experiment =
        app.add_subcommand("experiment", "Monte-Carlo RMSE sweep over an SNR grid");
    add_common(experiment);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_config_error;
    }

    try
    {
        const RunConfig run = RunConfig::parse_file(config_path);
        if (trajectory->parsed())
            return cmd_trajectory(run, oracle, output_path);
        if (spectrum->parsed())
            return cmd_spectrum(run, output_path);
        if (localize->parsed())
            return cmd_localize(run, output_path);
        return cmd_experiment(run, output_path);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::out_of_range& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const LocalizationError& e)
    {
        std::cerr << "scheme error: " << e.what() << "\n";
        return exit_scheme_error;
    }
    catch (const OutOfTrajectory& e)
    {
        std::cerr << "scheme error: " << e.what() << "\n";
        return exit_scheme_error;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_scheme_error;
    }
}
