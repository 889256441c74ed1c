#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ewgeo/core.hpp"
#include "ewgeo/errors.hpp"
#include "ewgeo/metric.hpp"
#include "ewgeo/oracle.hpp"

namespace ewgeo {

// Polynomial in (r_minus, r_plus, r1, r2, r3) with per-variable exponents.
struct PolyTerm {
    double coeff = 0.0;
    std::array<int, 5> exp = {0, 0, 0, 0, 0};
};

struct Polynomial {
    std::vector<PolyTerm> terms;

    double eval(const EWPoint& p) const {
        const double vars[5] = {p.r_minus, p.r_plus, p.r1, p.r2, p.r3};
        double total = 0.0;
        for (const auto& t : terms) {
            double m = t.coeff;
            for (int v = 0; v < 5; ++v)
                for (int e = 0; e < t.exp[v]; ++e) m *= vars[v];
            total += m;
        }
        return total;
    }

    int max_degree(int var) const {
        int deg = 0;
        for (const auto& t : terms) deg = std::max(deg, t.exp[var]);
        return deg;
    }

    bool involves_only(std::initializer_list<int> vars) const {
        for (const auto& t : terms)
            for (int v = 0; v < 5; ++v) {
                if (t.exp[v] == 0) continue;
                bool listed = false;
                for (int lv : vars) listed = listed || (lv == v);
                if (!listed) return false;
            }
        return true;
    }
};

enum class Relation { LessEqual, GreaterEqual };

struct Constraint {
    Polynomial poly;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;

    // ties count as membership: regions are closed
    bool satisfied(const EWPoint& p) const {
        const double v = poly.eval(p);
        return rel == Relation::LessEqual ? v <= rhs : v >= rhs;
    }
};

struct RegionSpec {
    std::string name;
    VolumeElementCase cse = VolumeElementCase::General;
    std::vector<Constraint> constraints;
};

// ---- region spec files -----------------------------------------------------
//
// Schema: {"name": str, "case": "qubit"|"general",
//          "constraints": [{"terms": [[coeff, [e_rm, e_rp, e1, e2, e3]], ...],
//                           "rel": "<="|">=", "rhs": number}, ...]}

inline RegionSpec region_spec_from_json(const nlohmann::json& j) {
    RegionSpec spec;
    try {
        spec.name = j.at("name").get<std::string>();
        spec.cse = case_from_name(j.at("case").get<std::string>());
        const auto& cons = j.at("constraints");
        if (!cons.is_array() || cons.empty())
            throw ConfigParse("region spec: \"constraints\" must be a nonempty array");
        int ci = 0;
        for (const auto& cj : cons) {
            Constraint c;
            const std::string rel = cj.at("rel").get<std::string>();
            if (rel == "<=")
                c.rel = Relation::LessEqual;
            else if (rel == ">=")
                c.rel = Relation::GreaterEqual;
            else
                throw ConfigParse("constraints[" + std::to_string(ci) +
                                  "].rel: expected \"<=\" or \">=\"");
            c.rhs = cj.at("rhs").get<double>();
            const auto& terms = cj.at("terms");
            if (!terms.is_array() || terms.empty())
                throw ConfigParse("constraints[" + std::to_string(ci) +
                                  "].terms: must be a nonempty array");
            int ti = 0;
            for (const auto& tj : terms) {
                const std::string at = "constraints[" + std::to_string(ci) +
                                       "].terms[" + std::to_string(ti) + "]";
                if (!tj.is_array() || tj.size() != 2 || !tj[0].is_number() ||
                    !tj[1].is_array() || tj[1].size() != 5)
                    throw ConfigParse(at + ": expected [coeff, [5 integer exponents]]");
                PolyTerm term;
                term.coeff = tj[0].get<double>();
                for (int v = 0; v < 5; ++v) {
                    if (!tj[1][v].is_number_integer() || tj[1][v].get<int>() < 0)
                        throw ConfigParse(at + ": exponents must be nonnegative integers");
                    term.exp[v] = tj[1][v].get<int>();
                }
                c.poly.terms.push_back(term);
                ++ti;
            }
            spec.constraints.push_back(std::move(c));
            ++ci;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParse(std::string("region spec: ") + e.what());
    }
    return spec;
}

inline RegionSpec load_region_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParse("region spec: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigParse("region spec: " + path + " is not valid JSON");
    return region_spec_from_json(j);
}

inline nlohmann::ordered_json to_json(const RegionSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["case"] = case_name(spec.cse);
    auto cons = nlohmann::ordered_json::array();
    for (const auto& c : spec.constraints) {
        nlohmann::ordered_json cj;
        auto terms = nlohmann::ordered_json::array();
        for (const auto& t : c.poly.terms)
            terms.push_back({t.coeff, {t.exp[0], t.exp[1], t.exp[2], t.exp[3], t.exp[4]}});
        cj["terms"] = std::move(terms);
        cj["rel"] = (c.rel == Relation::LessEqual) ? "<=" : ">=";
        cj["rhs"] = c.rhs;
        cons.push_back(std::move(cj));
    }
    j["constraints"] = std::move(cons);
    return j;
}

// Membership: point must be a state of the spec's case and satisfy every
// constraint.
inline bool eval_region(const RegionSpec& spec, const EWPoint& p) {
    if (spec.cse == VolumeElementCase::Qubit && p.r_minus != 0.0) return false;
    if (!validate(p).valid) return false;
    for (const auto& c : spec.constraints)
        if (!c.satisfied(p)) return false;
    return true;
}

// ---- shipped constraint sets ----------------------------------------------
//
// These are necessary conditions only: the published triseparability system
// also contains a cubic constraint that is not carried here. Membership in
// the shipped region therefore bounds the true region from above. Full
// systems can be supplied as region spec files.

namespace detail {

inline Constraint linear_le(double c_rm, double c_rp, double rhs) {
    Constraint c;
    if (c_rm != 0.0) c.poly.terms.push_back({c_rm, {1, 0, 0, 0, 0}});
    if (c_rp != 0.0) c.poly.terms.push_back({c_rp, {0, 1, 0, 0, 0}});
    c.rel = Relation::LessEqual;
    c.rhs = rhs;
    return c;
}

inline Constraint linear_ge(double c_rm, double c_rp, double rhs) {
    Constraint c = linear_le(c_rm, c_rp, rhs);
    c.rel = Relation::GreaterEqual;
    return c;
}

// |r|^2 <= 4 (r_plus - r_minus)^2, written with expanded square
inline Constraint ball_cap_constraint() {
    Constraint c;
    c.poly.terms.push_back({1.0, {0, 0, 2, 0, 0}});
    c.poly.terms.push_back({1.0, {0, 0, 0, 2, 0}});
    c.poly.terms.push_back({1.0, {0, 0, 0, 0, 2}});
    c.poly.terms.push_back({-4.0, {2, 0, 0, 0, 0}});
    c.poly.terms.push_back({-4.0, {0, 2, 0, 0, 0}});
    c.poly.terms.push_back({8.0, {1, 1, 0, 0, 0}});
    c.rel = Relation::LessEqual;
    c.rhs = 0.0;
    return c;
}

} // namespace detail

inline RegionSpec trisep_quoted_spec(VolumeElementCase c) {
    RegionSpec spec;
    spec.cse = c;
    if (c == VolumeElementCase::General) {
        spec.name = "trisep-quoted-general";
        spec.constraints.push_back(detail::linear_le(1, 0, 1.0 / 6.0)); // r- <= 1/6
        // (1/4)(1 - 2 r-) <= r+  <=>  r+ + r-/2 >= 1/4
        spec.constraints.push_back(detail::linear_ge(0.5, 1, 0.25));
        spec.constraints.push_back(detail::linear_le(5, 1, 1.0)); // r+ <= 1 - 5 r-
    } else {
        spec.name = "trisep-quoted-qubit";
        spec.constraints.push_back(detail::linear_ge(0, 1, 0.25)); // r+ >= 1/4
        spec.constraints.push_back(detail::linear_le(0, 1, 1.0));  // r+ <= 1
    }
    spec.constraints.push_back(detail::ball_cap_constraint());
    return spec;
}

inline RegionSpec bisep_necessary_spec() {
    RegionSpec spec;
    spec.name = "bisep-necessary-general";
    spec.cse = VolumeElementCase::General;
    spec.constraints.push_back(detail::linear_le(1, 0, 1.0 / 3.0)); // r- <= 1/3
    return spec;
}

// Simplex bounds of the shipped triseparability system, without the ball cap.
inline bool trisep_simplex_bounds(const EWPoint& p) {
    return p.r_minus >= 0.0 && p.r_minus <= 1.0 / 6.0 &&
           p.r_plus >= 0.25 * (1.0 - 2.0 * p.r_minus) &&
           p.r_plus <= 1.0 - 5.0 * p.r_minus;
}

// The ball cap |r|^2 <= 4 (r_plus - r_minus)^2 required for convexity of the
// triseparable set.
inline bool trisep_ball_cap(const EWPoint& p) {
    const double s = p.r_plus - p.r_minus;
    return p.radius2() <= 4.0 * s * s;
}

// Necessary-conditions predicate for triseparability (see note above).
inline bool triseparable_shipped(const EWPoint& p) {
    return validate(p).valid && trisep_simplex_bounds(p) && trisep_ball_cap(p);
}

inline bool triseparable_shipped(const EWPoint& p, const RegionSpec& extra) {
    return triseparable_shipped(p) && eval_region(extra, p);
}

// Exact predicate from the explicit matrix: positivity of the partial
// transpose with respect to the first factor. At d = 2 this also decides
// biseparability.
inline bool ppt_oracle(const EWPoint& p, int d) {
    if (d != 2 && d != 3)
        throw InvalidParameters("ppt_oracle: d must be 2 or 3");
    return partial_transpose_min_eig(p, d) >= -1e-10;
}

// ---- cross-section raster ---------------------------------------------------

enum class CellLabel : std::uint8_t {
    OutsideEW = 0,
    EWOnly = 1,
    RegionMember = 2,
    ExcludedByBallCap = 3,
};

struct RasterGrid {
    double r_minus = 0.0;
    double r_plus = 0.0;
    int axis_u = 0; // indices into (r1, r2, r3)
    int axis_v = 1;
    int resolution = 0;
    double extent = 0.0; // half-width, equals r0
    std::vector<CellLabel> cells; // row-major, v outer, u inner

    CellLabel at(int iu, int iv) const {
        return cells[static_cast<std::size_t>(iv) * resolution + iu];
    }

    double coord(int idx) const {
        return -extent + (idx + 0.5) * (2.0 * extent / resolution);
    }

    EWPoint cell_point(int iu, int iv) const {
        EWPoint p;
        p.r_minus = r_minus;
        p.r_plus = r_plus;
        double r[3] = {0.0, 0.0, 0.0};
        r[axis_u] = coord(iu);
        r[axis_v] = coord(iv);
        p.r1 = r[0];
        p.r2 = r[1];
        p.r3 = r[2];
        return p;
    }
};

// Fixed-(r_minus, r_plus) section of the ball in one coordinate plane; the
// remaining coordinate is held at zero. Labels record membership in the
// shipped triseparable region and the set removed by the ball cap alone.
inline RasterGrid cross_section_raster(double r_minus, double r_plus,
                                       std::pair<int, int> plane, int resolution,
                                       const std::vector<RegionSpec>& extra = {}) {
    if (resolution < 16)
        throw InvalidParameters("cross_section_raster: resolution must be >= 16");
    if (plane.first < 0 || plane.first > 2 || plane.second < 0 || plane.second > 2 ||
        plane.first == plane.second)
        throw InvalidParameters("cross_section_raster: plane must name two distinct axes");
    const double r0 = 1.0 - r_minus - r_plus;
    if (!(r_minus >= 0.0 && r_plus >= 0.0 && r0 > 0.0))
        throw InvalidParameters("cross_section_raster: (r_minus, r_plus) outside the simplex");

    RasterGrid grid;
    grid.r_minus = r_minus;
    grid.r_plus = r_plus;
    grid.axis_u = plane.first;
    grid.axis_v = plane.second;
    grid.resolution = resolution;
    grid.extent = r0;
    grid.cells.resize(static_cast<std::size_t>(resolution) * resolution);

    for (int iv = 0; iv < resolution; ++iv)
        for (int iu = 0; iu < resolution; ++iu) {
            const EWPoint p = grid.cell_point(iu, iv);
            CellLabel label;
            if (!validate(p).valid) {
                label = CellLabel::OutsideEW;
            } else {
                bool extras_ok = true;
                for (const auto& spec : extra) extras_ok = extras_ok && eval_region(spec, p);
                const bool bounds = trisep_simplex_bounds(p) && extras_ok;
                if (bounds && trisep_ball_cap(p))
                    label = CellLabel::RegionMember;
                else if (bounds)
                    label = CellLabel::ExcludedByBallCap;
                else
                    label = CellLabel::EWOnly;
            }
            grid.cells[static_cast<std::size_t>(iv) * resolution + iu] = label;
        }
    return grid;
}

inline void write_pgm(const RasterGrid& grid, std::ostream& out) {
    out << "P2\n" << grid.resolution << " " << grid.resolution << "\n3\n";
    for (int iv = grid.resolution - 1; iv >= 0; --iv) { // top row = largest v
        for (int iu = 0; iu < grid.resolution; ++iu) {
            out << static_cast<int>(grid.at(iu, iv));
            out << (iu + 1 == grid.resolution ? '\n' : ' ');
        }
    }
}

inline nlohmann::ordered_json raster_legend(const RasterGrid& grid) {
    nlohmann::ordered_json j;
    j["r_minus"] = grid.r_minus;
    j["r_plus"] = grid.r_plus;
    j["extent"] = grid.extent;
    j["axes"] = {std::string("r") + std::to_string(grid.axis_u + 1),
                 std::string("r") + std::to_string(grid.axis_v + 1)};
    j["resolution"] = grid.resolution;
    j["labels"] = {{"0", "outside-EW"},
                   {"1", "EW-only"},
                   {"2", "region-member"},
                   {"3", "excluded-by-ball-cap"}};
    return j;
}

inline void write_cells_csv(const RasterGrid& grid, std::ostream& out) {
    out << "u,v,label\n";
    for (int iv = 0; iv < grid.resolution; ++iv)
        for (int iu = 0; iu < grid.resolution; ++iu) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", grid.coord(iu),
                          grid.coord(iv), static_cast<int>(grid.at(iu, iv)));
            out << buf;
        }
}

} // namespace ewgeo
