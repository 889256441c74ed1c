#pragma once

#include <array>
#include <cstdint>

namespace ewgeo {

// Counter-based generator (Philox-4x32 with 10 rounds). A draw is addressed
// by (key, stream, block): the value at an address never depends on how work
// is split across threads, which is what makes chunked Monte Carlo runs
// reproducible for any worker count.
struct Philox {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t stream,
                                              std::uint64_t counter) {
        std::array<std::uint32_t, 4> x = {
            static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
            const std::array<std::uint32_t, 4> y = {
                static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
                static_cast<std::uint32_t>(p0)};
            x = y;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return x;
    }

    // Two doubles in [0, 1) per 128-bit block.
    static std::array<double, 2> uniform2(std::uint64_t key, std::uint64_t stream,
                                          std::uint64_t counter) {
        const auto b = block(key, stream, counter);
        const std::uint64_t u =
            (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
        const std::uint64_t v =
            (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
        return {static_cast<double>(u >> 11) * 0x1.0p-53,
                static_cast<double>(v >> 11) * 0x1.0p-53};
    }
};

// Convenience view of one stream: doubles are indexed consecutively.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

    // n <= 8 doubles starting at draw index base (base even keeps blocks aligned).
    void fill(std::uint64_t base, double* out, int n) const {
        int produced = 0;
        std::uint64_t idx = base;
        while (produced < n) {
            const auto two = Philox::uniform2(key_, stream_, idx / 2);
            if (idx % 2 == 0) {
                out[produced++] = two[0];
                if (produced < n) out[produced++] = two[1];
                idx += 2;
            } else {
                out[produced++] = two[1];
                idx += 1;
            }
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
};

} // namespace ewgeo
