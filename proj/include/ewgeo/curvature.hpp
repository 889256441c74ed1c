#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "ewgeo/core.hpp"
#include "ewgeo/errors.hpp"
#include "ewgeo/metric.hpp"

namespace ewgeo {

namespace detail {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Coord5 = std::array<double, 5>; // (r_minus, r_plus, R, theta, phi)

// Bures tensor in the spherical chart: SD components divided by four.
inline Mat5 bures_metric_spherical(const Coord5& x) {
    SphericalPoint s;
    s.r_minus = x[0];
    s.r_plus = x[1];
    s.radius = x[2];
    s.theta = x[3];
    s.phi = x[4];
    const MetricTensor t = sd_tensor_spherical(s, VolumeElementCase::General);
    return Mat5(t.g) / 4.0;
}

inline std::array<Mat5, 5> metric_gradient(const Coord5& x, double h) {
    std::array<Mat5, 5> dg;
    for (int c = 0; c < 5; ++c) {
        Coord5 xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        dg[c] = (bures_metric_spherical(xp) - bures_metric_spherical(xm)) / (2.0 * h);
    }
    return dg;
}

// Christoffel symbols of the second kind from central differences of g.
inline std::array<Mat5, 5> christoffel(const Coord5& x, double h) {
    const Mat5 g = bures_metric_spherical(x);
    const Mat5 ginv = g.inverse();
    const std::array<Mat5, 5> dg = metric_gradient(x, h);
    std::array<Mat5, 5> gamma; // gamma[a](b, c)
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c) {
                double s = 0.0;
                for (int l = 0; l < 5; ++l)
                    s += ginv(a, l) * (dg[b](l, c) + dg[c](b, l) - dg[l](b, c));
                gamma[a](b, c) = 0.5 * s;
            }
    return gamma;
}

inline double ricci_scalar_once(const Coord5& x, double h) {
    const Mat5 g = bures_metric_spherical(x);
    const Mat5 ginv = g.inverse();
    const std::array<Mat5, 5> gamma = christoffel(x, h);
    std::array<std::array<Mat5, 5>, 5> dgamma; // dgamma[c][a](b, d) = d_c Gamma^a_bd
    for (int c = 0; c < 5; ++c) {
        Coord5 xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const std::array<Mat5, 5> gp = christoffel(xp, h);
        const std::array<Mat5, 5> gm = christoffel(xm, h);
        for (int a = 0; a < 5; ++a) dgamma[c][a] = (gp[a] - gm[a]) / (2.0 * h);
    }
    double scalar = 0.0;
    for (int b = 0; b < 5; ++b)
        for (int d = 0; d < 5; ++d) {
            double ric = 0.0;
            for (int a = 0; a < 5; ++a) {
                ric += dgamma[a][a](b, d) - dgamma[d][a](b, a);
                for (int e = 0; e < 5; ++e)
                    ric += gamma[a](a, e) * gamma[e](b, d) - gamma[a](d, e) * gamma[e](b, a);
            }
            scalar += ginv(b, d) * ric;
        }
    return scalar;
}

inline void require_stencil_interior(const SphericalPoint& s, double h) {
    // the widest stencil probe moves a single coordinate by 2h and pairs of
    // coordinates by h each
    const double r0 = s.r0();
    const double margin = std::min({s.r_minus, s.r_plus, 0.5 * (r0 - s.radius), s.radius,
                                    s.theta, kPi - s.theta});
    if (!(margin > 2.5 * h))
        throw BoundarySingularity("scalar_curvature_fd: stencil leaves the valid region");
}

} // namespace detail

// Ricci scalar of the Bures metric (SD components / 4) on the five-parameter
// family, by second-order central differences with Richardson extrapolation
// over step and step/2. The SD-normalized scalar is one quarter of this
// value.
inline double scalar_curvature_fd(const SphericalPoint& s, double step) {
    if (!(step > 0.0))
        throw InvalidParameters("scalar_curvature_fd: step must be positive");
    detail::require_stencil_interior(s, step);
    const detail::Coord5 x = {s.r_minus, s.r_plus, s.radius, s.theta, s.phi};
    const double v1 = detail::ricci_scalar_once(x, step);
    const double v2 = detail::ricci_scalar_once(x, 0.5 * step);
    return (4.0 * v2 - v1) / 3.0;
}

// Default step: 1e-3 of the distance to the nearest family boundary.
inline double scalar_curvature_fd(const SphericalPoint& s) {
    const double r0 = s.r0();
    const double scale = std::min({s.r_minus, s.r_plus, r0 - s.radius, r0});
    if (!(scale > 0.0))
        throw BoundarySingularity("scalar_curvature_fd: point on the family boundary");
    double h = 1e-3 * scale;
    const double chart_margin = std::min({s.radius, s.theta, kPi - s.theta});
    h = std::min(h, chart_margin / 8.0);
    if (!(h > 0.0))
        throw BoundarySingularity("scalar_curvature_fd: spherical chart degenerate here");
    return scalar_curvature_fd(s, h);
}

inline double sd_scalar_curvature_fd(const SphericalPoint& s) {
    return scalar_curvature_fd(s) / 4.0;
}

} // namespace ewgeo
