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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "squintloc/beamforming.hpp"

namespace
{

struct RunResult
{
    int exit_code;
    std::string output;
};

// Runs the CLI with stdout captured and stderr dropped.
RunResult run_cli(const std::string& args)
{
    const std::string cmd = std::string(SQUINTLOC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        output.append(buf, n);
    const int status = pclose(pipe);
    return RunResult{WEXITSTATUS(status), output};
}

std::string write_temp_config(const std::string& name, const std::string& body)
{
    const std::string path = std::string("/tmp/squintloc_test_") + name + ".cfg";
    std::ofstream out(path);
    out << body;
    return path;
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;)
    {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos)
        {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

const char* fig2_cfg = "n_antennas = 128\n"
                       "f0_ghz = 30\n"
                       "w_ghz = 6\n"
                       "m_intervals = 16\n"
                       "d_m = 0.005\n"
                       "seed = 1\n"
                       "start_r_m = 10\n"
                       "start_theta_deg = 60\n";

} // namespace

TEST_CASE("trajectory: header, natural squint endpoint, determinism")
{
    const std::string cfg = write_temp_config("fig2", fig2_cfg);
    const auto res = run_cli("trajectory -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 18); // header + 17 subcarriers
    CHECK(lines[0] == "m,f_hz,r_m,theta_deg");

    const auto last = split_fields(lines[17]);
    REQUIRE(last.size() == 4);
    CHECK(last[0] == "16");
    CHECK(std::stod(last[1]) == doctest::Approx(36e9));
    CHECK(std::stod(last[2]) == doctest::Approx(22.99).epsilon(5e-4));
    CHECK(std::stod(last[3]) == doctest::Approx(46.19).epsilon(2e-4));

    const auto again = run_cli("trajectory -c " + cfg);
    CHECK(again.output == res.output);
}

TEST_CASE("trajectory: fixed start/end collapses to one point")
{
    const std::string cfg = write_temp_config("fixed", std::string(fig2_cfg) +
                                                           "end_r_m = 10\n"
                                                           "end_theta_deg = 60\n");
    const auto res = run_cli("trajectory -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 18);
    for (size_t i = 1; i < lines.size(); ++i)
    {
        const auto f = split_fields(lines[i]);
        CHECK(std::stod(f[2]) == doctest::Approx(10.0).epsilon(1e-10));
        CHECK(std::stod(f[3]) == doctest::Approx(60.0).epsilon(1e-10));
    }
}

TEST_CASE("trajectory: oracle columns on demand")
{
    const std::string cfg = write_temp_config(
        "oracle", std::string(fig2_cfg) + "grid_r_min_m = 8\ngrid_r_max_m = 26\n"
                                          "grid_theta_min_deg = 40\ngrid_theta_max_deg = 65\n");
    const auto res = run_cli("trajectory --oracle -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    CHECK(lines[0] == "m,f_hz,r_m,theta_deg,oracle_r_m,oracle_theta_deg");
    const auto row0 = split_fields(lines[1]);
    REQUIRE(row0.size() == 6);
    CHECK(std::stod(row0[4]) == doctest::Approx(10.0).epsilon(0.05));
    CHECK(std::stod(row0[5]) == doctest::Approx(60.0).epsilon(0.01));
}

TEST_CASE("spectrum: header and peak at the start focus")
{
    const std::string cfg = write_temp_config("spec", std::string(fig2_cfg) +
                                                          "end_r_m = 22\n"
                                                          "end_theta_deg = 46\n"
                                                          "user_r_m = 10\n"
                                                          "user_theta_deg = 60\n");
    const auto res = run_cli("spectrum -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 18);
    CHECK(lines[0] == "m,f_hz,power,power_normalized,phase_rad");
    // user sits on the m = 0 focus: normalized power 1 in the first row
    const auto row0 = split_fields(lines[1]);
    CHECK(std::stod(row0[3]) == doctest::Approx(1.0));
    for (size_t i = 2; i < lines.size(); ++i)
        CHECK(std::stod(split_fields(lines[i])[3]) < 1.0);
}

TEST_CASE("spectrum: nearby users peak on distinct subcarriers")
{
    // Natural sweep focused on (20 m, 45 deg) over a 10% band: users spread
    // along the squint path each see their own maximum-power subcarrier.
    const char* base = "n_antennas = 128\n"
                       "f0_ghz = 30\n"
                       "w_ghz = 3\n"
                       "m_intervals = 2047\n"
                       "d_m = 0.005\n"
                       "seed = 3\n"
                       "start_r_m = 20\n"
                       "start_theta_deg = 45\n";
    const double user_r[3] = {21.0, 23.0, 25.0};
    const double user_theta[3] = {44.0, 43.0, 41.0};
    int peaks[3];
    for (int k = 0; k < 3; ++k)
    {
        std::ostringstream body;
        body << base << "user_r_m = " << user_r[k] << "\nuser_theta_deg = " << user_theta[k]
             << "\n";
        const std::string cfg = write_temp_config("fig3_" + std::to_string(k), body.str());
        const auto res = run_cli("spectrum -c " + cfg);
        REQUIRE(res.exit_code == 0);
        const auto lines = split_lines(res.output);
        REQUIRE(lines.size() == 2049);
        int best = 0;
        double best_power = -1.0;
        for (size_t i = 1; i < lines.size(); ++i)
        {
            const double p = std::stod(split_fields(lines[i])[2]);
            if (p > best_power)
            {
                best_power = p;
                best = int(i) - 1;
            }
        }
        peaks[k] = best;
    }
    CHECK(peaks[0] != peaks[1]);
    CHECK(peaks[1] != peaks[2]);
    CHECK(peaks[0] != peaks[2]);

    // The first user's peak sits where the natural trajectory crosses 44 deg.
    const squintloc::ArrayConfigd cfg(128, 30e9, 3e9, 2047, 0.005);
    const squintloc::PolarPointd focus(20.0, squintloc::deg_to_rad(45.0));
    int crossing = 0;
    double best_gap = 1e300;
    for (int m = 0; m <= cfg.m_intervals; ++m)
    {
        const double gap = std::abs(squintloc::natural_squint_point(cfg, focus, m).point.theta -
                                    squintloc::deg_to_rad(44.0));
        if (gap < best_gap)
        {
            best_gap = gap;
            crossing = m;
        }
    }
    CHECK(std::abs(peaks[0] - crossing) <= 2);
}

TEST_CASE("localize: cbs_low single noiseless user")
{
    const std::string cfg = write_temp_config("loc", "n_antennas = 64\n"
                                                     "f0_ghz = 30\n"
                                                     "w_ghz = 6\n"
                                                     "m_intervals = 511\n"
                                                     "seed = 9\n"
                                                     "scheme = cbs_low\n"
                                                     "r_min_m = 2.5\n"
                                                     "r_max_m = 18\n"
                                                     "theta_min_deg = -40\n"
                                                     "theta_max_deg = 40\n"
                                                     "users_r_m = 9\n"
                                                     "users_theta_deg = 14\n");
    const auto res = run_cli("localize -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "user_id,scheme,theta_true_deg,r_true_m,theta_hat_deg,r_hat_m,sweeps,flags");
    const auto row = split_fields(lines[1]);
    REQUIRE(row.size() == 8);
    CHECK(row[0] == "0");
    CHECK(row[1] == "cbs_low");
    CHECK(std::stod(row[4]) == doctest::Approx(14.0).epsilon(0.02));
    CHECK(std::stod(row[5]) == doctest::Approx(9.0).epsilon(0.02));
    CHECK(row[6] == "2");
    CHECK(row[7].empty());
}

TEST_CASE("localize: dual-anchor worked geometry")
{
    const std::string cfg = write_temp_config("loc2bs", "n_antennas = 256\n"
                                                        "f0_ghz = 30\n"
                                                        "w_ghz = 3\n"
                                                        "m_intervals = 511\n"
                                                        "d_m = 0.005\n"
                                                        "seed = 11\n"
                                                        "scheme = cbs_2bs\n"
                                                        "baseline_l_m = 100\n"
                                                        "r_min_m = 10\n"
                                                        "r_max_m = 90\n"
                                                        "theta_min_deg = -60\n"
                                                        "theta_max_deg = 60\n"
                                                        "r_mid1_m = 24\n"
                                                        "r_mid2_m = 24\n"
                                                        "users_x_m = 40\n"
                                                        "users_y_m = 30\n");
    const auto res = run_cli("localize -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 2);
    const auto row = split_fields(lines[1]);
    CHECK(row[1] == "cbs_2bs");
    CHECK(std::stod(row[3]) == doctest::Approx(50.0));
    CHECK(std::stod(row[5]) == doctest::Approx(50.0).epsilon(5e-3));
    CHECK(row[6] == "2");
}

TEST_CASE("experiment: header, determinism, and output file")
{
    const std::string body = "n_antennas = 64\n"
                             "f0_ghz = 30\n"
                             "w_ghz = 6\n"
                             "m_intervals = 255\n"
                             "seed = 4\n"
                             "scheme = cbs_low\n"
                             "r_min_m = 2.5\n"
                             "r_max_m = 18\n"
                             "theta_min_deg = -40\n"
                             "theta_max_deg = 40\n"
                             "users_r_m = 9\n"
                             "users_theta_deg = 14\n"
                             "trials = 4\n"
                             "snr_db = 10 inf\n";
    const std::string cfg = write_temp_config("exp", body);
    const auto res = run_cli("experiment -c " + cfg);
    CHECK(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "snr_db,user_id,rmse_theta_deg,rmse_r_m,rmse_2d_m,mean_sweeps,excluded_trials");
    CHECK(split_fields(lines[2])[0] == "inf");
    CHECK(split_fields(lines[1])[5] == "2");

    const auto again = run_cli("experiment -c " + cfg);
    CHECK(again.output == res.output);

    const auto to_file = run_cli("experiment -c " + cfg + " -o /tmp/squintloc_test_exp_out.csv");
    CHECK(to_file.exit_code == 0);
    CHECK(to_file.output.empty());
    std::ifstream in("/tmp/squintloc_test_exp_out.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == res.output);
}

TEST_CASE("exit code 2 on config problems")
{
    const std::string unknown =
        write_temp_config("unknown", std::string(fig2_cfg) + "mystery_key = 1\n");
    CHECK(run_cli("trajectory -c " + unknown).exit_code == 2);

    const std::string missing = write_temp_config("missing", "n_antennas = 128\n");
    CHECK(run_cli("trajectory -c " + missing).exit_code == 2);

    CHECK(run_cli("trajectory -c /nonexistent.cfg").exit_code == 2);
    CHECK(run_cli("trajectory").exit_code == 2);          // missing required option
    CHECK(run_cli("unknowncommand").exit_code == 2);      // unknown subcommand

    const std::string badval =
        write_temp_config("badval", std::string(fig2_cfg) + "end_r_m = ten\nend_theta_deg = 0\n");
    CHECK(run_cli("trajectory -c " + badval).exit_code == 2);
}

TEST_CASE("exit code 3 on scheme failures")
{
    // Dual-anchor user on the baseline axis: DegenerateGeometry at run time.
    const std::string cfg = write_temp_config("axis", "n_antennas = 64\n"
                                                      "f0_ghz = 30\n"
                                                      "w_ghz = 3\n"
                                                      "m_intervals = 127\n"
                                                      "seed = 2\n"
                                                      "scheme = cbs_2bs\n"
                                                      "baseline_l_m = 30\n"
                                                      "r_min_m = 5\n"
                                                      "r_max_m = 28\n"
                                                      "theta_min_deg = -40\n"
                                                      "theta_max_deg = 40\n"
                                                      "users_x_m = 15\n"
                                                      "users_y_m = 0.0001\n");
    CHECK(run_cli("localize -c " + cfg).exit_code == 3);
}
