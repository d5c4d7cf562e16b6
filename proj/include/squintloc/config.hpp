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

#ifndef SQUINTLOC_CONFIG_HPP
#define SQUINTLOC_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace squintloc
{

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` document. Lines starting with '#' (or anything after a
/// '#') are comments; keys must be unique. Physical quantities carry their
/// unit in the key name (f0_ghz, d_m, ...), so values are plain numbers.
class RunConfig
{
  public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;     // accepts "inf"
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;         // true/false
    std::vector<double> get_double_list(const std::string& key) const;

    std::optional<std::string> find_string(const std::string& key) const;
    std::optional<double> find_double(const std::string& key) const;
    std::optional<long long> find_int(const std::string& key) const;
    std::optional<bool> find_bool(const std::string& key) const;

    /// Rejects any key that is not in `allowed` (misspellings and stale keys
    /// fail loudly instead of being silently ignored).
    void require_known(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

} // namespace squintloc

#endif
