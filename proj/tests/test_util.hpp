#pragma once

#include <vector>

#include "ewgeo/ewgeo.hpp"

namespace ewtest {

using namespace ewgeo;

// deterministic family points with a margin from every boundary face
inline std::vector<EWPoint> interior_points(VolumeElementCase cse, std::size_t n,
                                            std::uint64_t seed, double margin = 0.05) {
    std::vector<EWPoint> pts;
    const PhiloxStream ps(seed, 777);
    EWPoint p;
    for (std::uint64_t i = 0; pts.size() < n; ++i) {
        if (!mc_detail::draw_point(ps, i, cse, p)) continue;
        const double r0 = p.r0();
        if (p.r_plus < margin || r0 < margin) continue;
        if (cse == VolumeElementCase::General && p.r_minus < margin) continue;
        if (p.radius() > (1.0 - margin) * r0) continue;
        pts.push_back(p);
    }
    return pts;
}

// valid points without interior margins (boundary-ish allowed)
inline std::vector<EWPoint> family_points(VolumeElementCase cse, std::size_t n,
                                          std::uint64_t seed) {
    std::vector<EWPoint> pts;
    const PhiloxStream ps(seed, 778);
    EWPoint p;
    for (std::uint64_t i = 0; pts.size() < n; ++i)
        if (mc_detail::draw_point(ps, i, cse, p)) pts.push_back(p);
    return pts;
}

inline EWPoint paradox_point() {
    return {0.1, 0.27, 0.589304, 0.08100014, -0.138433};
}

} // namespace ewtest
