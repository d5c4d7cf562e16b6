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

#ifndef SQUINTLOC_CSV_HPP
#define SQUINTLOC_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

namespace squintloc
{

/// Doubles at full round-trip precision (17 significant digits), '.' decimal
/// separator regardless of locale.
std::string format_double(double value);

/// Minimal RFC-4180 writer: comma separated, LF line endings, fields quoted
/// only when they contain a comma, quote or newline.
class CsvWriter
{
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields);

    CsvWriter& field(const std::string& s);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field((long long)v); }
    void end_row();

  private:
    std::ostream& out_;
    bool row_open_ = false;
};

} // namespace squintloc

#endif
