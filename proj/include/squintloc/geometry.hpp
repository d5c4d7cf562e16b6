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

#ifndef SQUINTLOC_GEOMETRY_HPP
#define SQUINTLOC_GEOMETRY_HPP

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "squintloc/constants.hpp"

namespace squintloc
{

// Coordinate conventions, fixed once for the whole library:
//  - The array is a ULA on the y-axis; antenna n sits at (0, n*d) with
//    n = -(N-1)/2, ..., (N-1)/2 (half-integer indices when N is even).
//  - theta is measured from broadside (the positive x-axis), in radians,
//    with sin(theta) along the array axis. Valid range is (-pi/2, pi/2).
//  - All distances are in meters, all angles in radians. Degrees appear
//    only at I/O boundaries.

/// Position in polar form (r, theta) relative to the array center.
template <typename Scalar = double>
struct PolarPoint
{
    Scalar r;     // meters, > 0
    Scalar theta; // radians, |theta| < pi/2

    PolarPoint(Scalar r_m, Scalar theta_rad) : r(r_m), theta(theta_rad)
    {
        if (!(r > Scalar(0)))
            throw std::invalid_argument("PolarPoint: r must be positive");
        if (!(std::abs(theta) < pi_v<Scalar> / Scalar(2)))
            throw std::invalid_argument("PolarPoint: |theta| must be below pi/2");
    }
};

/// Position in Cartesian form. x > 0 is the half-plane in front of the array.
template <typename Scalar = double>
struct CartesianPoint
{
    Scalar x; // meters
    Scalar y; // meters

    CartesianPoint(Scalar x_m, Scalar y_m) : x(x_m), y(y_m) {}
};

using PolarPointd = PolarPoint<double>;
using CartesianPointd = CartesianPoint<double>;

/// Distance model selector: exact spherical-wave distances, or the
/// second-order Fresnel expansion used by all closed-form predictors.
enum class DistanceModel
{
    Exact,
    Fresnel
};

/// Aperture convention for near-field validity bounds.
enum class ApertureConvention
{
    FullSpan,    // D = N*d (default)
    ElementSpan  // D = (N-1)*d
};

template <typename Scalar>
CartesianPoint<Scalar> polar_to_cartesian(const PolarPoint<Scalar>& p)
{
    return CartesianPoint<Scalar>(p.r * std::cos(p.theta), p.r * std::sin(p.theta));
}

template <typename Scalar>
PolarPoint<Scalar> cartesian_to_polar(const CartesianPoint<Scalar>& p)
{
    if (!(p.x > Scalar(0)))
        throw std::invalid_argument("cartesian_to_polar: x must be positive");
    return PolarPoint<Scalar>(std::hypot(p.x, p.y), std::atan2(p.y, p.x));
}

/// Signed index of the i-th element, i = 0..N-1. Half-integers for even N.
template <typename Scalar = double>
Scalar antenna_index(int i, int n_antennas)
{
    return Scalar(i) - Scalar(n_antennas - 1) / Scalar(2);
}

/// Exact distance from the point to antenna n: sqrt(x^2 + (y - n*d)^2).
template <typename Scalar>
Scalar exact_element_distance(const CartesianPoint<Scalar>& p, Scalar n, Scalar d)
{
    return std::hypot(p.x, p.y - n * d);
}

template <typename Scalar>
Scalar exact_element_distance(const PolarPoint<Scalar>& p, Scalar n, Scalar d)
{
    return exact_element_distance(polar_to_cartesian(p), n, d);
}

/// Second-order Fresnel expansion: r - n*d*sin(theta) + (n*d)^2*cos^2(theta)/(2r).
template <typename Scalar>
Scalar fresnel_element_distance(const PolarPoint<Scalar>& p, Scalar n, Scalar d)
{
    const Scalar nd = n * d;
    const Scalar s = std::sin(p.theta);
    const Scalar c2 = Scalar(1) - s * s;
    return p.r - nd * s + nd * nd * c2 / (Scalar(2) * p.r);
}

template <typename Scalar>
Scalar element_distance(const PolarPoint<Scalar>& p, Scalar n, Scalar d, DistanceModel model)
{
    return model == DistanceModel::Exact ? exact_element_distance(p, n, d)
                                         : fresnel_element_distance(p, n, d);
}

/// Distances from the point to every antenna of an N-element ULA, as a vector
/// indexed i = 0..N-1 (signed index n = i - (N-1)/2).
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic>
element_distances(const PolarPoint<Scalar>& p, int n_antennas, Scalar d, DistanceModel model)
{
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    const Vec n = Vec::LinSpaced(n_antennas, antenna_index<Scalar>(0, n_antennas),
                                 antenna_index<Scalar>(n_antennas - 1, n_antennas));
    if (model == DistanceModel::Exact)
    {
        const CartesianPoint<Scalar> c = polar_to_cartesian(p);
        return ((n.array() * d - c.y).square() + c.x * c.x).sqrt().matrix();
    }
    const Scalar s = std::sin(p.theta);
    const Scalar c2 = Scalar(1) - s * s;
    return (p.r - n.array() * (d * s) +
            (n.array() * d).square() * (c2 / (Scalar(2) * p.r)))
        .matrix();
}

/// Near-field validity interval (lower, upper):
/// lower = 0.62*sqrt(D^3/lambda), upper = 2*D^2/lambda (Rayleigh distance).
template <typename Scalar>
std::pair<Scalar, Scalar> near_field_bounds(int n_antennas, Scalar d, Scalar lambda,
                                            ApertureConvention conv = ApertureConvention::FullSpan)
{
    if (n_antennas < 2)
        throw std::invalid_argument("near_field_bounds: need at least 2 antennas");
    if (!(d > Scalar(0)) || !(lambda > Scalar(0)))
        throw std::invalid_argument("near_field_bounds: d and lambda must be positive");
    const Scalar aper =
        (conv == ApertureConvention::FullSpan ? Scalar(n_antennas) : Scalar(n_antennas - 1)) * d;
    const Scalar lower = Scalar(0.62) * std::sqrt(aper * aper * aper / lambda);
    const Scalar upper = Scalar(2) * aper * aper / lambda;
    return {lower, upper};
}

} // namespace squintloc

#endif
