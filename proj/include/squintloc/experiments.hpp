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

#ifndef SQUINTLOC_EXPERIMENTS_HPP
#define SQUINTLOC_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "squintloc/localization.hpp"

namespace squintloc
{

/// One Monte-Carlo run: a scheme, an array, a set of user truths, an SNR
/// grid in dB (+inf allowed) and a trial count. A fixed seed reproduces the
/// run byte for byte regardless of worker count.
struct ExperimentSpec
{
    Scheme scheme = Scheme::CbsLow;
    ArrayConfigd cfg;
    SensingRange range{};
    std::vector<PolarPointd> users;        // single-array schemes
    std::vector<CartesianPointd> users_xy; // dual-array scheme
    std::vector<double> snr_db;
    int trials = 1;
    std::uint64_t seed = 0;
    TbtParams tbt{};
    CbsLowParams cbs_low{};
    CbsHighParams cbs_high{};
    TwoBsParams two_bs{};
    DistanceModel channel_model = DistanceModel::Exact;
    int threads = 0; // 0 = auto (capped by SQUINTLOC_THREADS)

    void validate() const;
    int n_users() const;
};

struct TrialRecord
{
    int trial = 0;
    double snr_db = 0.0;
    double theta_true = 0.0, r_true = 0.0; // radians, meters
    double x_true = 0.0, y_true = 0.0;
    Estimate estimate;
    double err_theta = 0.0, err_r = 0.0; // estimate - truth
    double err_x = 0.0, err_y = 0.0;
    double wall_seconds = 0.0;
    bool excluded = false; // scheme raised; estimate fields are unset
    std::string exclude_reason;
};

enum class RmseKind
{
    Theta,
    Distance,
    TwoD
};

/// Root mean square error over the non-excluded records of one cell.
double rmse(const std::vector<TrialRecord>& records, RmseKind kind);

/// Beam sweeping count needed to localize k users with each scheme.
long long sweep_count(Scheme scheme, int k_users, int i_angle = 0, int i_distance = 0,
                      int p_sweeps = 0);

struct CellSummary
{
    double snr_db = 0.0;
    int user_id = 0;
    double rmse_theta = 0.0; // radians
    double rmse_r = 0.0;     // meters
    double rmse_2d = 0.0;    // meters
    double mean_sweeps = 0.0;
    int excluded_trials = 0;
    int trials = 0;
};

/// Runs one localization trial of the configured scheme for the given user
/// index with an explicit random stream (building block of run_experiment).
TrialRecord run_trial(const ExperimentSpec& spec, int user_index, double snr_db_value, int trial,
                      Rng& rng);

/// Full Monte-Carlo sweep over (snr, user) cells, trials in parallel. The
/// per-trial stream is derived from (seed, snr index, user index, trial), so
/// results do not depend on scheduling.
std::vector<CellSummary> run_experiment(const ExperimentSpec& spec);

/// Same, with the per-trial records returned for inspection;
/// records[cell_index][trial] with cell_index = snr_index * n_users + user.
std::vector<CellSummary> run_experiment(const ExperimentSpec& spec,
                                        std::vector<std::vector<TrialRecord>>* records_out);

} // namespace squintloc

#endif
