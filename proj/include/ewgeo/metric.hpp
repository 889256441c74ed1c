#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ewgeo/core.hpp"
#include "ewgeo/errors.hpp"

namespace ewgeo {

// Which member of the family a tensor refers to. Qubit tensors live on the
// four-parameter slice r_minus = 0; General covers every d >= 3 (the tensor
// does not depend on d).
enum class VolumeElementCase { Qubit, General };

inline const char* case_name(VolumeElementCase c) {
    return c == VolumeElementCase::Qubit ? "qubit" : "general";
}

inline VolumeElementCase case_from_name(const std::string& s) {
    if (s == "qubit") return VolumeElementCase::Qubit;
    if (s == "general") return VolumeElementCase::General;
    throw InvalidParameters("unknown case \"" + s + "\" (expected qubit|general)");
}

// Labeled symmetric matrix of metric components. Components use the SD
// normalization throughout the library; Bures components are exactly 1/4 of
// these.
struct MetricTensor {
    std::vector<std::string> labels;
    Eigen::MatrixXd g;
};

inline nlohmann::ordered_json to_json(const MetricTensor& t) {
    nlohmann::ordered_json j;
    j["labels"] = t.labels;
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < t.g.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index k = 0; k < t.g.cols(); ++k) row.push_back(t.g(i, k));
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
}

namespace detail {

inline void require_case_consistent(const EWPoint& p, VolumeElementCase c) {
    if (c == VolumeElementCase::Qubit && p.r_minus != 0.0)
        throw InvalidParameters("qubit case requires r_minus == 0 exactly");
}

inline void require_interior(const EWPoint& p, VolumeElementCase c) {
    require_case_consistent(p, c);
    const double r0 = p.r0();
    bool boundary = !(p.r_plus > 0.0) || !(r0 > 0.0) || !(p.radius2() < r0 * r0);
    if (c == VolumeElementCase::General) boundary = boundary || !(p.r_minus > 0.0);
    if (boundary)
        throw BoundarySingularity(
            "metric evaluated on the boundary of the state family");
}

} // namespace detail

// Closed-form SD tensor in the spherical chart. Exactly eight component
// families are nonzero; everything else is structurally zero. The chart is
// degenerate at R = 0 and sin(theta) = 0, so those are treated as boundary
// here even though the state itself is interior; use the cartesian form
// there.
inline MetricTensor sd_tensor_spherical(const SphericalPoint& s, VolumeElementCase c) {
    if (c == VolumeElementCase::Qubit && s.r_minus != 0.0)
        throw InvalidParameters("qubit case requires r_minus == 0 exactly");
    const double r0 = s.r0();
    const double R = s.radius;
    bool boundary = !(s.r_plus > 0.0) || !(r0 > 0.0) || !(R > 0.0) || !(R < r0) ||
                    !(s.theta > 0.0) || !(s.theta < kPi);
    if (c == VolumeElementCase::General) boundary = boundary || !(s.r_minus > 0.0);
    if (boundary)
        throw BoundarySingularity("spherical chart degenerate or point on boundary");

    const double D = r0 * r0 - R * R;
    const double a = r0 / D;       // shared by the simplex block and g_RR
    const double cmix = R / D;     // simplex-radial coupling
    const double st = std::sin(s.theta);

    if (c == VolumeElementCase::Qubit) {
        MetricTensor t;
        t.labels = {"r_plus", "R", "theta", "phi"};
        t.g = Eigen::MatrixXd::Zero(4, 4);
        t.g(0, 0) = 1.0 / s.r_plus + a;
        t.g(0, 1) = t.g(1, 0) = cmix;
        t.g(1, 1) = a;
        t.g(2, 2) = R * R / r0;
        t.g(3, 3) = R * R * st * st / r0;
        return t;
    }
    MetricTensor t;
    t.labels = {"r_minus", "r_plus", "R", "theta", "phi"};
    t.g = Eigen::MatrixXd::Zero(5, 5);
    t.g(0, 0) = 1.0 / s.r_minus + a;
    t.g(1, 1) = 1.0 / s.r_plus + a;
    t.g(0, 1) = t.g(1, 0) = a;
    t.g(0, 2) = t.g(2, 0) = cmix;
    t.g(1, 2) = t.g(2, 1) = cmix;
    t.g(2, 2) = a;
    t.g(3, 3) = R * R / r0;
    t.g(4, 4) = R * R * st * st / r0;
    return t;
}

// SD tensor in the original coordinates. Algebraically equal to
// J^T g_spherical J away from the chart degeneracies and smooth across R = 0,
// where the ball block reduces to (1/r0) * identity.
inline MetricTensor sd_tensor_cartesian(const EWPoint& p, VolumeElementCase c) {
    detail::require_interior(p, c);
    const double r0 = p.r0();
    const double D = r0 * r0 - p.radius2();
    const double a = r0 / D;
    const double r[3] = {p.r1, p.r2, p.r3};

    const int off = (c == VolumeElementCase::Qubit) ? 1 : 2;
    MetricTensor t;
    if (c == VolumeElementCase::Qubit)
        t.labels = {"r_plus", "r1", "r2", "r3"};
    else
        t.labels = {"r_minus", "r_plus", "r1", "r2", "r3"};
    t.g = Eigen::MatrixXd::Zero(off + 3, off + 3);

    if (c == VolumeElementCase::General) {
        t.g(0, 0) = 1.0 / p.r_minus + a;
        t.g(1, 1) = 1.0 / p.r_plus + a;
        t.g(0, 1) = t.g(1, 0) = a;
    } else {
        t.g(0, 0) = 1.0 / p.r_plus + a;
    }
    for (int k = 0; k < 3; ++k) {
        const double mix = r[k] / D;
        for (int s = 0; s < off; ++s) t.g(s, off + k) = t.g(off + k, s) = mix;
        for (int l = 0; l < 3; ++l)
            t.g(off + k, off + l) = r[k] * r[l] / (r0 * D) + (k == l ? 1.0 / r0 : 0.0);
    }
    return t;
}

// sqrt(det g) in the original coordinates. The quadratic under the root is
// r0^2 - R^2.
inline double volume_element(const EWPoint& p, VolumeElementCase c) {
    detail::require_interior(p, c);
    const double r0 = p.r0();
    const double D = r0 * r0 - p.radius2();
    const double simplex =
        (c == VolumeElementCase::Qubit) ? p.r_plus : p.r_minus * p.r_plus;
    return 1.0 / (r0 * std::sqrt(simplex * D));
}

// Submatrix used for boundary-area estimates: the (r1,r2,r3) block in the
// qubit case and the (r_plus,r1,r2,r3) block otherwise, plus the square root
// h of its determinant.
inline std::pair<MetricTensor, double> boundary_subtensor(const EWPoint& p,
                                                          VolumeElementCase c) {
    const MetricTensor full = sd_tensor_cartesian(p, c);
    MetricTensor sub;
    if (c == VolumeElementCase::Qubit) {
        sub.labels = {"r1", "r2", "r3"};
        sub.g = full.g.block(1, 1, 3, 3);
    } else {
        sub.labels = {"r_plus", "r1", "r2", "r3"};
        sub.g = full.g.block(1, 1, 4, 4);
    }
    const double det = sub.g.determinant();
    if (!(det > 0.0))
        throw BoundarySingularity("boundary subtensor not positive definite");
    return {std::move(sub), std::sqrt(det)};
}

} // namespace ewgeo
