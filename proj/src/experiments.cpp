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

#include "squintloc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace squintloc
{

void ExperimentSpec::validate() const
{
    range.validate();
    if (trials < 1)
        throw std::invalid_argument("ExperimentSpec: need at least one trial");
    if (snr_db.empty())
        throw std::invalid_argument("ExperimentSpec: empty SNR grid");
    for (double s : snr_db)
        if (std::isnan(s))
            throw std::invalid_argument("ExperimentSpec: SNR must be finite or +inf");
    if (scheme == Scheme::Cbs2Bs)
    {
        if (users_xy.empty())
            throw std::invalid_argument("ExperimentSpec: dual-array scheme needs Cartesian users");
    }
    else if (users.empty())
        throw std::invalid_argument("ExperimentSpec: no users");
}

int ExperimentSpec::n_users() const
{
    return scheme == Scheme::Cbs2Bs ? int(users_xy.size()) : int(users.size());
}

double rmse(const std::vector<TrialRecord>& records, RmseKind kind)
{
    double acc = 0.0;
    long long n = 0;
    for (const auto& rec : records)
    {
        if (rec.excluded)
            continue;
        switch (kind)
        {
        case RmseKind::Theta:
            acc += rec.err_theta * rec.err_theta;
            break;
        case RmseKind::Distance:
            acc += rec.err_r * rec.err_r;
            break;
        case RmseKind::TwoD:
            acc += rec.err_x * rec.err_x + rec.err_y * rec.err_y;
            break;
        }
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument("rmse: no usable records in the cell");
    return std::sqrt(acc / double(n));
}

long long sweep_count(Scheme scheme, int k_users, int i_angle, int i_distance, int p_sweeps)
{
    if (k_users < 1)
        throw std::invalid_argument("sweep_count: need at least one user");
    switch (scheme)
    {
    case Scheme::Tbt:
        if (i_angle < 1 || i_distance < 1)
            throw std::invalid_argument("sweep_count: tbt needs I_a and I_d");
        return (long long)i_angle + (long long)k_users * i_distance;
    case Scheme::CbsLow:
        return k_users + 1; // all estimated angles distinct
    case Scheme::CbsHigh:
        if (p_sweeps < 1)
            throw std::invalid_argument("sweep_count: cbs_high needs P");
        return p_sweeps;
    case Scheme::Cbs2Bs:
        return 2;
    }
    throw std::invalid_argument("sweep_count: unknown scheme");
}

TrialRecord run_trial(const ExperimentSpec& spec, int user_index, double snr_db_value, int trial,
                      Rng& rng)
{
    TrialRecord rec;
    rec.trial = trial;
    rec.snr_db = snr_db_value;
    const double snr =
        std::isinf(snr_db_value) ? std::numeric_limits<double>::infinity()
                                 : std::pow(10.0, snr_db_value / 10.0);

    if (spec.scheme == Scheme::Cbs2Bs)
    {
        const CartesianPointd truth = spec.users_xy[size_t(user_index)];
        const PolarPointd truth_polar = cartesian_to_polar(truth);
        rec.theta_true = truth_polar.theta;
        rec.r_true = truth_polar.r;
        rec.x_true = truth.x;
        rec.y_true = truth.y;
    }
    else
    {
        const PolarPointd truth = spec.users[size_t(user_index)];
        const CartesianPointd truth_xy = polar_to_cartesian(truth);
        rec.theta_true = truth.theta;
        rec.r_true = truth.r;
        rec.x_true = truth_xy.x;
        rec.y_true = truth_xy.y;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        switch (spec.scheme)
        {
        case Scheme::Tbt:
            rec.estimate = tbt_localize(spec.cfg, spec.users[size_t(user_index)], spec.range,
                                        spec.tbt, snr, rng, spec.channel_model);
            break;
        case Scheme::CbsLow:
            rec.estimate = cbs_low_localize(spec.cfg, {spec.users[size_t(user_index)]}, spec.range,
                                            spec.cbs_low, snr, rng, spec.channel_model)
                               .front();
            break;
        case Scheme::CbsHigh:
            rec.estimate = cbs_high_localize(spec.cfg, spec.users[size_t(user_index)], spec.range,
                                             spec.cbs_high, snr, rng, spec.channel_model);
            break;
        case Scheme::Cbs2Bs:
            rec.estimate = cbs_2bs_localize(spec.cfg, spec.users_xy[size_t(user_index)], spec.range,
                                            spec.two_bs, snr, rng, spec.channel_model);
            break;
        }
    }
    catch (const LocalizationError& e)
    {
        rec.excluded = true;
        rec.exclude_reason = e.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!rec.excluded)
    {
        rec.err_theta = rec.estimate.theta_hat - rec.theta_true;
        rec.err_r = rec.estimate.r_hat - rec.r_true;
        rec.err_x = rec.estimate.r_hat * std::cos(rec.estimate.theta_hat) - rec.x_true;
        rec.err_y = rec.estimate.r_hat * std::sin(rec.estimate.theta_hat) - rec.y_true;
    }
    return rec;
}

static unsigned worker_count(const ExperimentSpec& spec, long long total_work)
{
    unsigned n = spec.threads > 0 ? unsigned(spec.threads)
                                  : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SQUINTLOC_THREADS"))
    {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0)
            n = std::min<unsigned>(n, unsigned(cap));
    }
    return unsigned(std::min<long long>(n, std::max<long long>(total_work, 1)));
}

std::vector<CellSummary> run_experiment(const ExperimentSpec& spec)
{
    return run_experiment(spec, nullptr);
}

std::vector<CellSummary> run_experiment(const ExperimentSpec& spec,
                                        std::vector<std::vector<TrialRecord>>* records_out)
{
    spec.validate();
    const int n_users = spec.n_users();
    const int n_snr = int(spec.snr_db.size());
    const int n_cells = n_snr * n_users;
    const long long total = (long long)n_cells * spec.trials;

    std::vector<std::vector<TrialRecord>> records(static_cast<size_t>(n_cells));
    for (auto& cell : records)
        cell.resize(size_t(spec.trials));

    // Work items are independent: the trial stream depends only on
    // (seed, snr index, user index, trial), never on scheduling.
    std::atomic<long long> next{0};
    auto worker = [&]() {
        for (;;)
        {
            const long long w = next.fetch_add(1);
            if (w >= total)
                return;
            const int cell = int(w / spec.trials);
            const int trial = int(w % spec.trials);
            const int si = cell / n_users;
            const int ui = cell % n_users;
            Rng rng(Rng::derive(spec.seed, std::uint64_t(si), std::uint64_t(ui),
                                std::uint64_t(trial)));
            records[size_t(cell)][size_t(trial)] =
                run_trial(spec, ui, spec.snr_db[size_t(si)], trial, rng);
        }
    };

    const unsigned n_workers = worker_count(spec, total);
    if (n_workers <= 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    std::vector<CellSummary> out;
    out.reserve(size_t(n_cells));
    for (int cell = 0; cell < n_cells; ++cell)
    {
        const auto& recs = records[size_t(cell)];
        CellSummary row;
        row.snr_db = spec.snr_db[size_t(cell / n_users)];
        row.user_id = cell % n_users;
        row.trials = spec.trials;
        long long used = 0;
        double sweeps = 0.0;
        for (const auto& rec : recs)
        {
            if (rec.excluded)
            {
                ++row.excluded_trials;
                continue;
            }
            sweeps += rec.estimate.sweeps_used;
            ++used;
        }
        row.mean_sweeps = used > 0 ? sweeps / double(used) : 0.0;
        if (used > 0)
        {
            row.rmse_theta = rmse(recs, RmseKind::Theta);
            row.rmse_r = rmse(recs, RmseKind::Distance);
            row.rmse_2d = rmse(recs, RmseKind::TwoD);
        }
        out.push_back(row);
    }
    if (records_out)
        *records_out = std::move(records);
    return out;
}

} // namespace squintloc
