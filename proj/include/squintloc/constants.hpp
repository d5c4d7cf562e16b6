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

#ifndef SQUINTLOC_CONSTANTS_HPP
#define SQUINTLOC_CONSTANTS_HPP

#include <numbers>

namespace squintloc
{

// Propagation speed used throughout. The nominal 3e8 m/s is deliberate: it is
// the value that makes half-wavelength spacings and delay budgets come out at
// the round numbers used for array design (lambda = 1 cm at 30 GHz).
inline constexpr double speed_of_light = 3.0e8;

template <typename Scalar>
inline constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

inline constexpr double pi = std::numbers::pi;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg)
{
    return deg * pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad)
{
    return rad * Scalar(180) / pi_v<Scalar>;
}

} // namespace squintloc

#endif
