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

#ifndef SQUINTLOC_RANDOM_HPP
#define SQUINTLOC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "squintloc/constants.hpp"

namespace squintloc
{

// Deterministic random stream. The mt19937_64 output sequence is fully
// specified by the standard, and the uniform/normal transforms below avoid
// std::*_distribution, whose algorithms vary between standard libraries.
// The same seed therefore produces the same draws on every platform.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// splitmix64 finalizer; also used to derive child-stream seeds.
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Seed for the child stream identified by (a, b, c), e.g. a Monte-Carlo
    /// cell (snr index, user index, trial index). Stable split rule:
    /// successive splitmix64 rounds over the root seed and the indices.
    static std::uint64_t derive(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                                std::uint64_t c = 0)
    {
        std::uint64_t s = mix(root);
        s = mix(s ^ a);
        s = mix(s ^ b);
        s = mix(s ^ c);
        return s;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform()
    {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, draws buffered in pairs).
    double normal()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * pi * u2);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace squintloc

#endif
