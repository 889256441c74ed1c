#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ewgeo {

inline constexpr const char* kReportSchema = "ewgeo-report/1";

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

inline void dump_value(const nlohmann::ordered_json& j, std::string& out, int indent,
                       int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (j.type()) {
        case nlohmann::ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out += pad;
                out += nlohmann::ordered_json(it.key()).dump();
                out += ": ";
                dump_value(it.value(), out, indent, depth + 1);
                out += (i + 1 < j.size()) ? ",\n" : "\n";
            }
            out += close_pad + "}";
            return;
        }
        case nlohmann::ordered_json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad;
                dump_value(j[i], out, indent, depth + 1);
                out += (i + 1 < j.size()) ? ",\n" : "\n";
            }
            out += close_pad + "]";
            return;
        }
        case nlohmann::ordered_json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v)) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out += buf;
            } else {
                out += "null";
            }
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

} // namespace detail

// Fixed key order and floats at 17 significant digits, so identical runs
// produce identical bytes.
inline std::string dump_report(const nlohmann::ordered_json& j, int indent = 2) {
    std::string out;
    detail::dump_value(j, out, indent, 0);
    out += "\n";
    return out;
}

inline std::string config_digest(const nlohmann::ordered_json& config) {
    return hex64(fnv1a64(dump_report(config, 0)));
}

} // namespace ewgeo
