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

#include "squintloc/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace squintloc
{

static std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RunConfig RunConfig::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.entries_.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key `" + key + "`");
        cfg.entries_[key] = value;
    }
    return cfg;
}

std::string RunConfig::get_string(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError("missing required key `" + key + "`");
    return it->second;
}

static double parse_double(const std::string& key, const std::string& value)
{
    if (value == "inf" || value == "+inf" || value == "infinity")
        return std::numeric_limits<double>::infinity();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("key `" + key + "`: not a number: `" + value + "`");
    return v;
}

double RunConfig::get_double(const std::string& key) const
{
    return parse_double(key, get_string(key));
}

long long RunConfig::get_int(const std::string& key) const
{
    const std::string value = get_string(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("key `" + key + "`: not an integer: `" + value + "`");
    return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const
{
    const std::string value = get_string(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE || value.find('-') != std::string::npos)
        throw ConfigError("key `" + key + "`: not an unsigned integer: `" + value + "`");
    return v;
}

bool RunConfig::get_bool(const std::string& key) const
{
    const std::string value = get_string(key);
    if (value == "true")
        return true;
    if (value == "false")
        return false;
    throw ConfigError("key `" + key + "`: expected true or false, got `" + value + "`");
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const
{
    std::istringstream in(get_string(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok)
        out.push_back(parse_double(key, tok));
    if (out.empty())
        throw ConfigError("key `" + key + "`: empty list");
    return out;
}

std::optional<std::string> RunConfig::find_string(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::optional<double> RunConfig::find_double(const std::string& key) const
{
    if (!has(key))
        return std::nullopt;
    return get_double(key);
}

std::optional<long long> RunConfig::find_int(const std::string& key) const
{
    if (!has(key))
        return std::nullopt;
    return get_int(key);
}

std::optional<bool> RunConfig::find_bool(const std::string& key) const
{
    if (!has(key))
        return std::nullopt;
    return get_bool(key);
}

void RunConfig::require_known(const std::set<std::string>& allowed) const
{
    std::string bad;
    for (const auto& [key, value] : entries_)
        if (!allowed.count(key))
            bad += (bad.empty() ? "" : ", ") + key;
    if (!bad.empty())
        throw ConfigError("unknown config key(s): " + bad);
}

} // namespace squintloc
