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

#include "squintloc/csv.hpp"

#include <cmath>
#include <cstdio>

namespace squintloc
{

std::string format_double(double value)
{
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

static std::string escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    for (const auto& f : fields)
        field(f);
    end_row();
}

CsvWriter& CsvWriter::field(const std::string& s)
{
    if (row_open_)
        out_ << ',';
    out_ << escape(s);
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::field(double v)
{
    return field(format_double(v));
}

CsvWriter& CsvWriter::field(long long v)
{
    return field(std::to_string(v));
}

void CsvWriter::end_row()
{
    out_ << '\n';
    row_open_ = false;
}

} // namespace squintloc
