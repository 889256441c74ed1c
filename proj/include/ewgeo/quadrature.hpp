#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "ewgeo/core.hpp"
#include "ewgeo/errors.hpp"
#include "ewgeo/metric.hpp"
#include "ewgeo/regions.hpp"

namespace ewgeo {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    long long evaluations = 0;
    std::string method;
};

namespace quad {

// 15-point Kronrod extension of the 7-point Gauss rule.
// Rows: {node, gauss weight, kronrod weight}; nodes are symmetric about 0.
inline constexpr double kG7K15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.000000000000000, 0.204432940075298},
    {0.586087235467691, 0.000000000000000, 0.169004726639267},
    {0.864864423359769, 0.000000000000000, 0.104790010322250},
    {0.991455371120813, 0.000000000000000, 0.022935322010529},
};

template <class F>
inline std::pair<double, double> gk15(F&& f, double a, double b, long long& evals) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double gauss = kG7K15[0][1] * f0;
    double kron = kG7K15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kG7K15[i][0];
        const double fs = f(mid + dx) + f(mid - dx);
        gauss += kG7K15[i][1] * fs;
        kron += kG7K15[i][2] * fs;
    }
    evals += 15;
    gauss *= half;
    kron *= half;
    return {kron, std::abs(kron - gauss)};
}

// Adaptive bisection driven by the per-interval Gauss/Kronrod discrepancy.
// The reported error is the (conservative) sum of discrepancies.
template <class F>
inline QuadratureResult adaptive(F&& f, double a, double b, double abs_tol,
                                 int max_intervals = 8000) {
    struct Interval {
        double a, b, value, error;
        bool operator<(const Interval& o) const { return error < o.error; }
    };
    QuadratureResult res;
    res.method = "adaptive-g7k15";
    if (a == b) return res;
    std::priority_queue<Interval> heap;
    auto [v0, e0] = gk15(f, a, b, res.evaluations);
    heap.push({a, b, v0, e0});
    double total_v = v0, total_e = e0;
    int n = 1;
    while (total_e > abs_tol && n < max_intervals) {
        Interval top = heap.top();
        heap.pop();
        const double m = 0.5 * (top.a + top.b);
        auto [vl, el] = gk15(f, top.a, m, res.evaluations);
        auto [vr, er] = gk15(f, m, top.b, res.evaluations);
        total_v += vl + vr - top.value;
        total_e += el + er - top.error;
        heap.push({top.a, m, vl, el});
        heap.push({m, top.b, vr, er});
        ++n;
    }
    res.value = total_v;
    res.error = total_e;
    return res;
}

// Roots of sum_k coef[k] x^k inside [lo, hi]. Degrees up to two are closed
// form; higher degrees fall back to a scan-and-bisect bracketing.
inline std::vector<double> poly_roots_in(std::vector<double> coef, double lo, double hi) {
    double maxc = 0.0;
    for (double c : coef) maxc = std::max(maxc, std::abs(c));
    std::vector<double> roots;
    if (maxc == 0.0) return roots;
    int deg = static_cast<int>(coef.size()) - 1;
    while (deg > 0 && std::abs(coef[deg]) < 1e-14 * maxc) --deg;
    coef.resize(deg + 1);

    auto push = [&](double x) {
        if (x >= lo && x <= hi) roots.push_back(x);
    };
    if (deg == 0) return roots;
    if (deg == 1) {
        push(-coef[0] / coef[1]);
        return roots;
    }
    if (deg == 2) {
        const double a = coef[2], b = coef[1], c = coef[0];
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
            push(q / a);
            if (q != 0.0) push(c / q);
        }
        return roots;
    }
    auto eval = [&](double x) {
        double v = 0.0;
        for (int k = deg; k >= 0; --k) v = v * x + coef[k];
        return v;
    };
    const int steps = 512;
    double x0 = lo, f0 = eval(lo);
    for (int i = 1; i <= steps; ++i) {
        const double x1 = lo + (hi - lo) * i / steps;
        const double f1 = eval(x1);
        if (f0 == 0.0) roots.push_back(x0);
        if (f0 * f1 < 0.0) {
            double a = x0, b = x1, fa = f0;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = eval(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0) roots.push_back(hi);
    return roots;
}

// Feasible subintervals of [lo, hi] for the variable defined by `as_poly`,
// testing all constraints at piece midpoints.
inline std::vector<std::pair<double, double>> feasible_pieces(
    const std::vector<Constraint>& constraints,
    const std::function<std::vector<double>(const Constraint&)>& as_poly,
    const std::function<bool(const Constraint&, double)>& satisfied, double lo,
    double hi) {
    std::vector<double> cuts = {lo, hi};
    for (const auto& c : constraints) {
        std::vector<double> coef = as_poly(c);
        coef[0] -= c.rhs;
        for (double r : poly_roots_in(coef, lo, hi)) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15) continue;
        const double m = 0.5 * (a + b);
        bool ok = true;
        for (const auto& c : constraints) ok = ok && satisfied(c, m);
        if (!ok) continue;
        if (!pieces.empty() && std::abs(pieces.back().second - a) < 1e-14)
            pieces.back().second = b;
        else
            pieces.emplace_back(a, b);
    }
    return pieces;
}

} // namespace quad

namespace detail {

inline void require_marginal(const RegionSpec& spec) {
    for (const auto& c : spec.constraints)
        if (!c.poly.involves_only({0, 1}))
            throw InvalidParameters(
                "quadrature: region constraints must involve only (r_minus, r_plus)");
}

// constraint polynomial in r_plus at fixed r_minus
inline std::vector<double> poly_in_rp(const Constraint& c, double rm) {
    int deg = 0;
    for (const auto& t : c.poly.terms) deg = std::max(deg, t.exp[1]);
    std::vector<double> coef(deg + 1, 0.0);
    for (const auto& t : c.poly.terms) {
        double m = t.coeff;
        for (int e = 0; e < t.exp[0]; ++e) m *= rm;
        coef[t.exp[1]] += m;
    }
    return coef;
}

inline bool constraint_at(const Constraint& c, double rm, double rp) {
    EWPoint p;
    p.r_minus = rm;
    p.r_plus = rp;
    return c.satisfied(p);
}

} // namespace detail

// Integral of the volume element over the ball |r| <= r0 at fixed simplex
// coordinates, with the radial integral done analytically:
//   general: pi^2 r0 / sqrt(r_minus r_plus),  qubit: pi^2 r0 / sqrt(r_plus).
inline double reduced_integrand_value(VolumeElementCase c, double rm, double rp) {
    const double r0 = 1.0 - rm - rp;
    if (c == VolumeElementCase::Qubit) return kPi * kPi * r0 / std::sqrt(rp);
    return kPi * kPi * r0 / std::sqrt(rm * rp);
}

inline std::function<double(double, double)> reduced_integrand(VolumeElementCase c) {
    return [c](double rm, double rp) { return reduced_integrand_value(c, rm, rp); };
}

namespace detail {

// integral of the reduced integrand (without the pi^2 factor) over the
// feasible part of the simplex; sqrt endpoint factors are removed by the
// substitution r = t^2 on both axes.
inline QuadratureResult reduced_region_integral(VolumeElementCase cse,
                                                const RegionSpec& spec, double tol,
                                                long long* evals_out) {
    const double inner_tol = tol * 0.05;
    long long evals = 0;

    auto inner_value = [&](double rm) {
        auto pieces = quad::feasible_pieces(
            spec.constraints,
            [&](const Constraint& c) { return poly_in_rp(c, rm); },
            [&](const Constraint& c, double rp) { return constraint_at(c, rm, rp); }, 0.0,
            1.0 - rm);
        double total = 0.0;
        for (auto [a, b] : pieces) {
            // u = sqrt(r_plus): integrand (1 - rm - u^2) * 2 is polynomial
            auto f = [&](double u) { return 2.0 * (1.0 - rm - u * u); };
            auto r = quad::adaptive(f, std::sqrt(a), std::sqrt(b), inner_tol);
            evals += r.evaluations;
            total += r.value;
        }
        return total;
    };

    QuadratureResult out;
    if (cse == VolumeElementCase::Qubit) {
        auto pieces = quad::feasible_pieces(
            spec.constraints,
            [&](const Constraint& c) { return poly_in_rp(c, 0.0); },
            [&](const Constraint& c, double rp) { return constraint_at(c, 0.0, rp); }, 0.0,
            1.0);
        for (auto [a, b] : pieces) {
            auto f = [&](double u) { return 2.0 * (1.0 - u * u); };
            auto r = quad::adaptive(f, std::sqrt(a), std::sqrt(b), tol * 0.5);
            evals += r.evaluations;
            out.value += r.value;
            out.error += r.error;
        }
    } else {
        // t = sqrt(r_minus)
        auto outer = [&](double t) { return 2.0 * inner_value(t * t); };
        out = quad::adaptive(outer, 0.0, 1.0, tol * 0.5);
        out.error += inner_tol * 20.0; // inner tolerance propagated
    }
    out.evaluations = evals + out.evaluations;
    out.method = "reduced-simplex-g7k15";
    if (evals_out) *evals_out = out.evaluations;
    return out;
}

} // namespace detail

// Probability assigned by the volume-element measure to a region of the
// simplex (constraints in r_minus, r_plus only). The ball factor cancels in
// the ratio via the analytic radial reduction.
inline QuadratureResult integrate_probability(VolumeElementCase cse,
                                              const RegionSpec& spec, double tol = 1e-7) {
    detail::require_marginal(spec);
    RegionSpec all;
    all.name = "full-simplex";
    all.cse = cse;
    all.constraints.push_back(detail::linear_ge(0, 1, 0.0)); // r_plus >= 0

    auto numer = detail::reduced_region_integral(cse, spec, tol * 0.5, nullptr);
    auto denom = detail::reduced_region_integral(cse, all, tol * 0.5, nullptr);
    QuadratureResult out;
    out.value = numer.value / denom.value;
    out.error = (numer.error + std::abs(out.value) * denom.error) / denom.value;
    out.evaluations = numer.evaluations + denom.evaluations;
    out.method = "reduced-simplex-ratio";
    if (!(out.error <= tol))
        throw NonConvergence("integrate_probability: error estimate above tolerance");
    return out;
}

// Full-domain integrals of the volume element, computed by quadrature.
// The general value has the closed form pi^3/2. For the qubit family this
// pipeline reproduces 4 pi^2 / 3; the commonly quoted 2 pi^2 / 3 differs by a
// factor two and is reported alongside by the CLI.
struct NormalizationConstants {
    QuadratureResult qubit;
    QuadratureResult general;
    double general_closed_form = kPi * kPi * kPi / 2.0;
    double qubit_derived = 4.0 * kPi * kPi / 3.0;
    double qubit_quoted = 2.0 * kPi * kPi / 3.0;
};

inline NormalizationConstants normalization_constants(double tol = 1e-9) {
    NormalizationConstants n;
    RegionSpec all_q;
    all_q.cse = VolumeElementCase::Qubit;
    all_q.constraints.push_back(detail::linear_ge(0, 1, 0.0));
    RegionSpec all_g = all_q;
    all_g.cse = VolumeElementCase::General;

    n.qubit = detail::reduced_region_integral(VolumeElementCase::Qubit, all_q, tol, nullptr);
    n.general =
        detail::reduced_region_integral(VolumeElementCase::General, all_g, tol, nullptr);
    n.qubit.value *= kPi * kPi;
    n.qubit.error *= kPi * kPi;
    n.general.value *= kPi * kPi;
    n.general.error *= kPi * kPi;
    if (!(n.qubit.error <= tol * 100 * kPi * kPi) ||
        !(n.general.error <= tol * 100 * kPi * kPi))
        throw NonConvergence("normalization_constants: quadrature did not converge");
    return n;
}

// Fisher-measure integral 1/sqrt(r_minus r_plus r0) over a region of the
// simplex, using the sphere substitution (r_minus, r_plus, r0) = (x^2, y^2, z^2):
// in polar form the radial part integrates in closed form and only the
// angular integral is numeric. Full simplex value: 2 pi.
inline QuadratureResult simplex_fisher_integrate(const RegionSpec& spec,
                                                 double tol = 1e-9) {
    detail::require_marginal(spec);

    auto angular = [&](double alpha) {
        const double c2 = std::cos(alpha) * std::cos(alpha);
        const double s2 = 1.0 - c2;
        // constraints as polynomials in v = rho^2 with rm = v c2, rp = v s2
        auto as_poly = [&](const Constraint& c) {
            int deg = 0;
            for (const auto& t : c.poly.terms) deg = std::max(deg, t.exp[0] + t.exp[1]);
            std::vector<double> coef(deg + 1, 0.0);
            for (const auto& t : c.poly.terms) {
                double m = t.coeff;
                for (int e = 0; e < t.exp[0]; ++e) m *= c2;
                for (int e = 0; e < t.exp[1]; ++e) m *= s2;
                coef[t.exp[0] + t.exp[1]] += m;
            }
            return coef;
        };
        auto sat = [&](const Constraint& c, double v) {
            return detail::constraint_at(c, v * c2, v * s2);
        };
        auto pieces = quad::feasible_pieces(spec.constraints, as_poly, sat, 0.0, 1.0);
        double total = 0.0;
        for (auto [v1, v2] : pieces)
            total += 4.0 * (std::sqrt(1.0 - v1) - std::sqrt(1.0 - v2));
        return total;
    };

    QuadratureResult out = quad::adaptive(angular, 0.0, 0.5 * kPi, tol);
    out.method = "fisher-polar-g7k15";
    if (!(out.error <= tol * 10))
        throw NonConvergence("simplex_fisher_integrate: error estimate above tolerance");
    return out;
}

inline QuadratureResult simplex_fisher_total(double tol = 1e-9) {
    RegionSpec all;
    all.name = "full-simplex";
    all.constraints.push_back(detail::linear_ge(0, 1, 0.0));
    return simplex_fisher_integrate(all, tol);
}

} // namespace ewgeo
