#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ewgeo/core.hpp"
#include "ewgeo/errors.hpp"
#include "ewgeo/metric.hpp"
#include "ewgeo/quadrature.hpp"
#include "ewgeo/regions.hpp"
#include "ewgeo/rng.hpp"

namespace ewgeo {

// Chunk decomposition of a raw-point budget. The random stream is addressed
// by (seed, chunk, draw), so results depend on the chunking but never on how
// chunks are distributed over threads.
struct Chunking {
    std::uint64_t chunk_size = 1ull << 20;
};

inline double pooled_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw InvalidParameters("pooled_stddev: need at least two values");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct SubsampleRecord {
    std::uint64_t accepted = 0;
    std::uint64_t discarded = 0; // accepted points within tolerance of a singular face
    double sum_weights = 0.0;
    double sum_region_weights = 0.0;
    double probability = 0.0;
};

struct EstimateReport {
    std::string region_name;
    VolumeElementCase cse = VolumeElementCase::General;
    std::uint64_t seed = 0;
    Chunking chunking;
    std::uint64_t subsamples = 0;
    std::uint64_t n_raw_per_subsample = 0;
    std::vector<SubsampleRecord> records;
    double pooled_probability = 0.0;
    double bias_adjusted_stddev = 0.0; // dispersion of the subsample estimates
    double pooled_stddev_of_mean = 0.0; // bias-adjusted stddev / sqrt(subsamples)
    double acceptance_rate = 0.0;
    std::uint64_t total_raw = 0;
    std::uint64_t total_accepted = 0;
    std::uint64_t total_discarded = 0;
};

inline nlohmann::ordered_json to_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["region"] = r.region_name;
    j["case"] = case_name(r.cse);
    j["seed"] = r.seed;
    j["chunking"] = {{"chunk_size", r.chunking.chunk_size},
                     {"subsamples", r.subsamples},
                     {"points_per_subsample", r.n_raw_per_subsample}};
    auto subs = nlohmann::ordered_json::array();
    for (const auto& s : r.records) {
        nlohmann::ordered_json sj;
        sj["accepted"] = s.accepted;
        sj["discarded"] = s.discarded;
        sj["sum_weights"] = s.sum_weights;
        sj["sum_region_weights"] = s.sum_region_weights;
        sj["probability"] = s.probability;
        subs.push_back(std::move(sj));
    }
    j["subsamples_detail"] = std::move(subs);
    j["pooled_probability"] = r.pooled_probability;
    j["bias_adjusted_stddev"] = r.bias_adjusted_stddev;
    j["pooled_stddev_of_mean"] = r.pooled_stddev_of_mean;
    j["acceptance_rate"] = r.acceptance_rate;
    j["total_raw"] = r.total_raw;
    j["total_accepted"] = r.total_accepted;
    j["total_discarded"] = r.total_discarded;
    return j;
}

using Predicate = std::function<bool(const EWPoint&)>;

namespace mc_detail {

inline constexpr double kSingularTol = 1e-12;

// Draws for one raw point; returns true when the point lies in the family.
// General case consumes 6 doubles (5 used), qubit 4, so blocks stay aligned.
inline bool draw_point(const PhiloxStream& ps, std::uint64_t index,
                       VolumeElementCase cse, EWPoint& p) {
    double buf[6];
    if (cse == VolumeElementCase::General) {
        ps.fill(index * 6, buf, 6);
        p.r_minus = buf[0];
        p.r_plus = buf[1];
        p.r1 = 2.0 * buf[2] - 1.0;
        p.r2 = 2.0 * buf[3] - 1.0;
        p.r3 = 2.0 * buf[4] - 1.0;
    } else {
        ps.fill(index * 4, buf, 4);
        p.r_minus = 0.0;
        p.r_plus = buf[0];
        p.r1 = 2.0 * buf[1] - 1.0;
        p.r2 = 2.0 * buf[2] - 1.0;
        p.r3 = 2.0 * buf[3] - 1.0;
    }
    const double r0 = p.r0();
    if (!(r0 >= 0.0)) return false;
    return p.radius2() <= r0 * r0;
}

// weight = volume element; returns false when the point is within tolerance
// of a singular face and must be discarded
inline bool point_weight(const EWPoint& p, VolumeElementCase cse, double& w) {
    const double r0 = p.r0();
    const double R = p.radius();
    if (p.r_plus < kSingularTol || r0 < kSingularTol || (r0 - R) < kSingularTol)
        return false;
    if (cse == VolumeElementCase::General && p.r_minus < kSingularTol) return false;
    const double D = r0 * r0 - R * R;
    const double simplex =
        (cse == VolumeElementCase::Qubit) ? p.r_plus : p.r_minus * p.r_plus;
    w = 1.0 / (r0 * std::sqrt(simplex * D));
    return true;
}

struct ChunkResult {
    std::uint64_t accepted = 0;
    std::uint64_t discarded = 0;
    double sum_w = 0.0;
    std::vector<double> region_w;
};

inline ChunkResult run_chunk(VolumeElementCase cse, std::uint64_t seed,
                             std::uint64_t stream, std::uint64_t n_raw,
                             const std::vector<Predicate>& preds) {
    ChunkResult res;
    res.region_w.assign(preds.size(), 0.0);
    const PhiloxStream ps(seed, stream);
    EWPoint p;
    for (std::uint64_t i = 0; i < n_raw; ++i) {
        if (!draw_point(ps, i, cse, p)) continue;
        ++res.accepted;
        double w;
        if (!point_weight(p, cse, w)) {
            ++res.discarded;
            continue;
        }
        res.sum_w += w;
        for (std::size_t k = 0; k < preds.size(); ++k)
            if (preds[k](p)) res.region_w[k] += w;
    }
    return res;
}

inline int resolve_workers(int workers, std::uint64_t n_chunks) {
    if (workers <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        workers = hc > 0 ? static_cast<int>(hc) : 1;
    }
    if (static_cast<std::uint64_t>(workers) > n_chunks)
        workers = static_cast<int>(n_chunks);
    return std::max(1, workers);
}

} // namespace mc_detail

// One pass over a shared sample, estimating several region probabilities at
// once. Chunk results merge in chunk order, so the reports are byte-stable
// for any worker count.
inline std::vector<EstimateReport> estimate_many(
    const std::vector<std::pair<std::string, Predicate>>& regions,
    VolumeElementCase cse, std::uint64_t subsamples, std::uint64_t n_raw_per,
    std::uint64_t seed, Chunking chunking = {}, int workers = 0) {
    if (subsamples < 1) throw InvalidParameters("estimate: subsamples must be >= 1");
    if (n_raw_per < 1) throw InvalidParameters("estimate: points per subsample must be >= 1");
    if (chunking.chunk_size < 1) throw InvalidParameters("estimate: chunk size must be >= 1");

    const std::uint64_t chunks_per_sub =
        (n_raw_per + chunking.chunk_size - 1) / chunking.chunk_size;
    const std::uint64_t n_chunks = subsamples * chunks_per_sub;

    std::vector<Predicate> preds;
    preds.reserve(regions.size());
    for (const auto& r : regions) preds.push_back(r.second);

    std::vector<mc_detail::ChunkResult> results(n_chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker_fn = [&]() {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            const std::uint64_t within = c % chunks_per_sub;
            const std::uint64_t lo = within * chunking.chunk_size;
            const std::uint64_t n = std::min(chunking.chunk_size, n_raw_per - lo);
            results[c] = mc_detail::run_chunk(cse, seed, c, n, preds);
        }
    };
    const int nw = mc_detail::resolve_workers(workers, n_chunks);
    if (nw == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    std::vector<EstimateReport> reports(regions.size());
    for (std::size_t k = 0; k < regions.size(); ++k) {
        EstimateReport& rep = reports[k];
        rep.region_name = regions[k].first;
        rep.cse = cse;
        rep.seed = seed;
        rep.chunking = chunking;
        rep.subsamples = subsamples;
        rep.n_raw_per_subsample = n_raw_per;
        rep.records.resize(subsamples);
    }
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        const std::uint64_t s = c / chunks_per_sub;
        const auto& r = results[c];
        for (std::size_t k = 0; k < regions.size(); ++k) {
            auto& rec = reports[k].records[s];
            rec.accepted += r.accepted;
            rec.discarded += r.discarded;
            rec.sum_weights += r.sum_w;
            rec.sum_region_weights += r.region_w[k];
        }
    }
    for (std::size_t k = 0; k < regions.size(); ++k) {
        EstimateReport& rep = reports[k];
        double tot_w = 0.0, tot_rw = 0.0;
        std::vector<double> probs;
        for (auto& rec : rep.records) {
            rep.total_accepted += rec.accepted;
            rep.total_discarded += rec.discarded;
            if (!(rec.sum_weights > 0.0))
                throw NonConvergence("estimate: a subsample accepted no usable points");
            rec.probability = rec.sum_region_weights / rec.sum_weights;
            probs.push_back(rec.probability);
            tot_w += rec.sum_weights;
            tot_rw += rec.sum_region_weights;
        }
        rep.total_raw = subsamples * n_raw_per;
        rep.pooled_probability = tot_rw / tot_w;
        rep.acceptance_rate =
            static_cast<double>(rep.total_accepted) / static_cast<double>(rep.total_raw);
        if (subsamples >= 2) {
            rep.bias_adjusted_stddev = pooled_stddev(probs);
            rep.pooled_stddev_of_mean =
                rep.bias_adjusted_stddev / std::sqrt(static_cast<double>(subsamples));
        }
    }
    return reports;
}

inline EstimateReport estimate_probability(const Predicate& predicate,
                                           const std::string& region_name,
                                           VolumeElementCase cse, std::uint64_t subsamples,
                                           std::uint64_t n_raw_per, std::uint64_t seed,
                                           Chunking chunking = {}, int workers = 0) {
    return estimate_many({{region_name, predicate}}, cse, subsamples, n_raw_per, seed,
                         chunking, workers)[0];
}

// ---- direct sampling ---------------------------------------------------------

struct SampleResult {
    std::vector<EWPoint> accepted;
    std::uint64_t n_raw = 0;
    double acceptance_rate = 0.0;
};

// Accepted stream in chunk order; deterministic for fixed (seed, chunking).
// Materializes the accepted points, so keep n_raw moderate.
inline SampleResult sample_ew(VolumeElementCase cse, std::uint64_t n_raw,
                              std::uint64_t seed, Chunking chunking = {}) {
    if (n_raw < 1) throw InvalidParameters("sample_ew: n_raw must be >= 1");
    SampleResult out;
    out.n_raw = n_raw;
    const std::uint64_t n_chunks = (n_raw + chunking.chunk_size - 1) / chunking.chunk_size;
    EWPoint p;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        const std::uint64_t lo = c * chunking.chunk_size;
        const std::uint64_t n = std::min(chunking.chunk_size, n_raw - lo);
        const PhiloxStream ps(seed, c);
        for (std::uint64_t i = 0; i < n; ++i)
            if (mc_detail::draw_point(ps, i, cse, p)) out.accepted.push_back(p);
    }
    out.acceptance_rate =
        static_cast<double>(out.accepted.size()) / static_cast<double>(n_raw);
    return out;
}

// Streaming variant used for CSV dumps: fn(point, weight) on accepted,
// non-discarded points, in stream order.
inline void for_each_accepted(VolumeElementCase cse, std::uint64_t n_raw,
                              std::uint64_t seed, Chunking chunking,
                              const std::function<void(const EWPoint&, double)>& fn) {
    const std::uint64_t n_chunks = (n_raw + chunking.chunk_size - 1) / chunking.chunk_size;
    EWPoint p;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        const std::uint64_t lo = c * chunking.chunk_size;
        const std::uint64_t n = std::min(chunking.chunk_size, n_raw - lo);
        const PhiloxStream ps(seed, c);
        for (std::uint64_t i = 0; i < n; ++i) {
            if (!mc_detail::draw_point(ps, i, cse, p)) continue;
            double w;
            if (mc_detail::point_weight(p, cse, w)) fn(p, w);
        }
    }
}

// ---- boundary areas ----------------------------------------------------------

enum class BoundaryDrawDomain { Cube, Ball };

struct BoundaryRegionStats {
    double sum_h = 0.0;
    std::uint64_t saturation_points = 0;
    std::uint64_t skipped_singular = 0;
};

struct BoundaryAreaReport {
    std::string name_a, name_b;
    VolumeElementCase cse = VolumeElementCase::General;
    std::uint64_t n_draws = 0;
    std::uint64_t seed = 0;
    BoundaryRegionStats region_a, region_b;
    double ratio = 0.0;
};

inline nlohmann::ordered_json to_json(const BoundaryAreaReport& r) {
    nlohmann::ordered_json j;
    j["region_a"] = r.name_a;
    j["region_b"] = r.name_b;
    j["case"] = case_name(r.cse);
    j["n_draws"] = r.n_draws;
    j["seed"] = r.seed;
    auto stats = [](const BoundaryRegionStats& s) {
        return nlohmann::ordered_json{{"sum_h", s.sum_h},
                                      {"saturation_points", s.saturation_points},
                                      {"skipped_singular", s.skipped_singular}};
    };
    j["a"] = stats(r.region_a);
    j["b"] = stats(r.region_b);
    j["ratio"] = r.ratio;
    return j;
}

namespace mc_detail {

// constraint as a polynomial in the saturation variable with all other
// coordinates held fixed; sat_var indexes (r_minus, r_plus, r1, r2, r3)
inline std::vector<double> saturation_poly(const Constraint& c, int sat_var,
                                           const EWPoint& p) {
    const double vars[5] = {p.r_minus, p.r_plus, p.r1, p.r2, p.r3};
    int deg = 0;
    for (const auto& t : c.poly.terms) deg = std::max(deg, t.exp[sat_var]);
    std::vector<double> coef(deg + 1, 0.0);
    for (const auto& t : c.poly.terms) {
        double m = t.coeff;
        for (int v = 0; v < 5; ++v) {
            if (v == sat_var) continue;
            for (int e = 0; e < t.exp[v]; ++e) m *= vars[v];
        }
        coef[t.exp[sat_var]] += m;
    }
    coef[0] -= c.rhs;
    return coef;
}

inline void accumulate_boundary(const RegionSpec& spec, VolumeElementCase cse,
                                const EWPoint& draw, BoundaryRegionStats& stats) {
    const int sat_var = (cse == VolumeElementCase::Qubit) ? 1 : 0;
    for (std::size_t ci = 0; ci < spec.constraints.size(); ++ci) {
        const auto coef = saturation_poly(spec.constraints[ci], sat_var, draw);
        for (double x : quad::poly_roots_in(coef, 0.0, 1.0)) {
            EWPoint p = draw;
            if (sat_var == 0)
                p.r_minus = x;
            else
                p.r_plus = x;
            if (!validate_with_slack(p, 1e-12).valid) continue;
            bool ok = true;
            for (std::size_t cj = 0; cj < spec.constraints.size() && ok; ++cj)
                if (cj != ci) ok = spec.constraints[cj].satisfied(p);
            if (!ok) continue;
            try {
                stats.sum_h += boundary_subtensor(p, cse).second;
                ++stats.saturation_points;
            } catch (const BoundarySingularity&) {
                ++stats.skipped_singular;
            }
        }
    }
}

} // namespace mc_detail

// Ratio of boundary-area accumulators between two regions, mirroring the
// saturate-one-constraint estimator: draw the free coordinates, solve each
// constraint for the saturation variable (r_plus in the qubit case, r_minus
// otherwise), keep points satisfying everything else, and sum h there. No
// surface-Jacobian correction is applied.
inline BoundaryAreaReport boundary_area_ratio(const RegionSpec& spec_a,
                                              const RegionSpec& spec_b,
                                              VolumeElementCase cse, std::uint64_t n_draws,
                                              std::uint64_t seed,
                                              BoundaryDrawDomain domain = BoundaryDrawDomain::Cube,
                                              Chunking chunking = {}) {
    if (n_draws < 1) throw InvalidParameters("boundary_area_ratio: n_draws must be >= 1");
    BoundaryAreaReport rep;
    rep.name_a = spec_a.name;
    rep.name_b = spec_b.name;
    rep.cse = cse;
    rep.n_draws = n_draws;
    rep.seed = seed;

    const std::uint64_t n_chunks = (n_draws + chunking.chunk_size - 1) / chunking.chunk_size;
    double buf[4];
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        const std::uint64_t lo = c * chunking.chunk_size;
        const std::uint64_t n = std::min(chunking.chunk_size, n_draws - lo);
        const PhiloxStream ps(seed, c);
        for (std::uint64_t i = 0; i < n; ++i) {
            ps.fill(i * 4, buf, 4);
            EWPoint draw;
            if (cse == VolumeElementCase::Qubit) {
                draw.r1 = 2.0 * buf[0] - 1.0;
                draw.r2 = 2.0 * buf[1] - 1.0;
                draw.r3 = 2.0 * buf[2] - 1.0;
            } else {
                draw.r_plus = buf[0];
                draw.r1 = 2.0 * buf[1] - 1.0;
                draw.r2 = 2.0 * buf[2] - 1.0;
                draw.r3 = 2.0 * buf[3] - 1.0;
            }
            if (domain == BoundaryDrawDomain::Ball && draw.radius2() > 1.0) continue;
            mc_detail::accumulate_boundary(spec_a, cse, draw, rep.region_a);
            mc_detail::accumulate_boundary(spec_b, cse, draw, rep.region_b);
        }
    }
    if (rep.region_a.saturation_points == 0 || rep.region_b.saturation_points == 0)
        throw NonConvergence("boundary_area_ratio: no saturation points found");
    rep.ratio = rep.region_a.sum_h / rep.region_b.sum_h;
    return rep;
}

} // namespace ewgeo
