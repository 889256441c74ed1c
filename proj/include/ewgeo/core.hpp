#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewgeo/errors.hpp"

namespace ewgeo {

inline constexpr double kPi = 3.14159265358979323846;

// The five coordinates of a tripartite Werner-family state. r0 is always
// derived, so the simplex identity r_plus + r_minus + r0 = 1 holds by
// construction.
struct EWPoint {
    double r_minus = 0.0;
    double r_plus = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;

    double r0() const { return 1.0 - r_minus - r_plus; }
    double radius2() const { return r1 * r1 + r2 * r2 + r3 * r3; }
    double radius() const { return std::sqrt(radius2()); }
};

// Spherical chart for the ball part.
//
// Convention: r1 is the polar axis,
//   r1 = R cos(theta), r2 = R sin(theta) cos(phi), r3 = R sin(theta) sin(phi),
// with theta in [0, pi] and phi in [0, 2*pi). This differs from the common
// r3-polar convention; all spherical-chart code in this library uses it.
struct SphericalPoint {
    double r_minus = 0.0;
    double r_plus = 0.0;
    double radius = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    double r0() const { return 1.0 - r_minus - r_plus; }
};

struct ValidationResult {
    bool valid = true;
    std::vector<std::string> violations;
};

// Membership test for the state family: r_minus, r_plus, r0 >= 0 and
// |r| <= r0. Violations are data, not errors.
inline ValidationResult validate(const EWPoint& p) {
    ValidationResult res;
    auto fail = [&res](const std::string& what) {
        res.valid = false;
        res.violations.push_back(what);
    };
    if (!(p.r_minus >= 0.0)) fail("r_minus >= 0");
    if (!(p.r_plus >= 0.0)) fail("r_plus >= 0");
    const double r0 = p.r0();
    if (!(r0 >= 0.0)) fail("r0 = 1 - r_minus - r_plus >= 0");
    if (!(r0 >= 0.0 && p.radius2() <= r0 * r0)) fail("r1^2 + r2^2 + r3^2 <= r0^2");
    return res;
}

// Slackened variant for points produced by floating arithmetic.
inline ValidationResult validate_with_slack(const EWPoint& p, double eps = 1e-12) {
    ValidationResult res;
    auto fail = [&res](const std::string& what) {
        res.valid = false;
        res.violations.push_back(what);
    };
    if (!(p.r_minus >= -eps)) fail("r_minus >= 0");
    if (!(p.r_plus >= -eps)) fail("r_plus >= 0");
    const double r0 = p.r0();
    if (!(r0 >= -eps)) fail("r0 = 1 - r_minus - r_plus >= 0");
    if (!(r0 >= -eps && p.radius() <= r0 + eps)) fail("r1^2 + r2^2 + r3^2 <= r0^2");
    return res;
}

// At R = 0 both angles are set to 0 by convention; on the polar axis phi = 0.
inline SphericalPoint to_spherical(const EWPoint& p) {
    SphericalPoint s;
    s.r_minus = p.r_minus;
    s.r_plus = p.r_plus;
    s.radius = p.radius();
    if (s.radius == 0.0) {
        s.theta = 0.0;
        s.phi = 0.0;
        return s;
    }
    double c = p.r1 / s.radius;
    c = std::min(1.0, std::max(-1.0, c));
    s.theta = std::acos(c);
    if (p.r2 == 0.0 && p.r3 == 0.0) {
        s.phi = 0.0;
    } else {
        s.phi = std::atan2(p.r3, p.r2);
        if (s.phi < 0.0) s.phi += 2.0 * kPi;
    }
    return s;
}

inline EWPoint to_cartesian(const SphericalPoint& s) {
    EWPoint p;
    p.r_minus = s.r_minus;
    p.r_plus = s.r_plus;
    const double st = std::sin(s.theta);
    p.r1 = s.radius * std::cos(s.theta);
    p.r2 = s.radius * st * std::cos(s.phi);
    p.r3 = s.radius * st * std::sin(s.phi);
    return p;
}

// Sector multiplicities of the commutant on (C^d)^x3: symmetric, antisymmetric
// and the two-fold mixed-symmetry sector.
struct Multiplicities {
    long long nu_plus = 0;
    long long nu_minus = 0;
    long long nu_zero = 0;
    int d = 0;
};

inline Multiplicities multiplicities(int d) {
    if (d < 2) throw InvalidParameters("multiplicities: d must be >= 2");
    const long long dd = d;
    Multiplicities m;
    m.d = d;
    m.nu_plus = (dd * dd * dd + 3 * dd * dd + 2 * dd) / 6;
    m.nu_minus = (dd * dd * dd - 3 * dd * dd + 2 * dd) / 6;
    m.nu_zero = (dd * dd * dd - dd) / 3;
    if (m.nu_plus + m.nu_minus + 2 * m.nu_zero != dd * dd * dd)
        throw InternalError("multiplicities: sector dimensions do not add up");
    return m;
}

struct SpectrumEntry {
    double value = 0.0;
    long long multiplicity = 0;
};

using Spectrum = std::vector<SpectrumEntry>;

inline Spectrum spectrum(const EWPoint& p, int d) {
    const ValidationResult v = validate(p);
    if (!v.valid) {
        std::string msg = "spectrum: point outside the state family:";
        for (const auto& s : v.violations) msg += " [" + s + "]";
        throw InvalidParameters(msg);
    }
    if (d == 2 && p.r_minus != 0.0)
        throw InvalidParameters("spectrum: d = 2 requires r_minus == 0");
    const Multiplicities m = multiplicities(d);
    const double r0 = p.r0();
    const double R = p.radius();
    Spectrum out;
    out.push_back({p.r_plus / static_cast<double>(m.nu_plus), m.nu_plus});
    if (m.nu_minus > 0)
        out.push_back({p.r_minus / static_cast<double>(m.nu_minus), m.nu_minus});
    out.push_back({(r0 + R) / (2.0 * static_cast<double>(m.nu_zero)), m.nu_zero});
    out.push_back({(r0 - R) / (2.0 * static_cast<double>(m.nu_zero)), m.nu_zero});
    return out;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const EWPoint& p) {
    nlohmann::ordered_json j;
    j["r_minus"] = p.r_minus;
    j["r_plus"] = p.r_plus;
    j["r"] = {p.r1, p.r2, p.r3};
    return j;
}

inline EWPoint point_from_json(const nlohmann::json& j) {
    try {
        EWPoint p;
        p.r_minus = j.value("r_minus", 0.0);
        p.r_plus = j.at("r_plus").get<double>();
        const auto& r = j.at("r");
        if (!r.is_array() || r.size() != 3)
            throw ConfigParse("point: field \"r\" must be an array of 3 numbers");
        p.r1 = r[0].get<double>();
        p.r2 = r[1].get<double>();
        p.r3 = r[2].get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParse(std::string("point: ") + e.what());
    }
}

inline EWPoint point_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigParse("point: not valid JSON: " + text);
    return point_from_json(j);
}

inline constexpr const char* kPointCsvHeader = "r_minus,r_plus,r1,r2,r3";

inline std::string to_csv_row(const EWPoint& p) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g",
                  p.r_minus, p.r_plus, p.r1, p.r2, p.r3);
    return buf;
}

inline EWPoint point_from_csv_row(const std::string& row) {
    std::istringstream in(row);
    EWPoint p;
    char comma;
    if (!(in >> p.r_minus >> comma >> p.r_plus >> comma >> p.r1 >> comma >> p.r2 >>
          comma >> p.r3))
        throw ConfigParse("point: malformed CSV row: " + row);
    return p;
}

} // namespace ewgeo
