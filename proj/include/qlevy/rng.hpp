#ifndef QLEVY_RNG_HPP
#define QLEVY_RNG_HPP

#include <cstdint>
#include <cstdlib>
#include <span>

namespace qlevy {
namespace detail {

inline std::uint64_t splitmix_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL));
    return splitmix_next(s);
}

/// Uniform draw in (0,1), never exactly 0 or 1.
inline double uniform_open(std::uint64_t& state) {
    return (static_cast<double>(splitmix_next(state) >> 11) + 0.5) * 0x1.0p-53;
}

// Ziggurat tables for the standard normal (Marsaglia & Tsang, 128 layers).
struct ZigTables {
    std::uint32_t kn[128];
    double wn[128];
    double fn[128];
    ZigTables();
};
extern const ZigTables zig;

double normal_slow_path(std::uint64_t& state, std::int32_t hz, std::uint32_t iz);

/// One standard-normal draw from a splitmix64 state.
inline double normal(std::uint64_t& state) {
    const std::uint64_t u = splitmix_next(state);
    const auto hz = static_cast<std::int32_t>(static_cast<std::uint32_t>(u >> 32));
    const auto iz = static_cast<std::uint32_t>(u & 127u);
    const std::uint32_t ahz = hz < 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(hz))
                                     : static_cast<std::uint32_t>(hz);
    if (ahz < zig.kn[iz]) return hz * zig.wn[iz];
    return normal_slow_path(state, hz, iz);
}

} // namespace detail

/// Counter-based random stream. Draws are keyed by (seed, replicate,
/// purpose, index), so two streams built from the same (seed, replicate)
/// reproduce each other exactly and series draws for a given index r are
/// identical no matter how many indices a caller consumes. That keying is
/// what makes truncated-series samples nested across truncation levels.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t replicate = 0)
        : seed_(seed), replicate_(replicate) {
        const std::uint64_t base = detail::mix_key(seed, replicate);
        state_main_ = detail::mix_key(base, kPurposeMain);
        state_tail_ = detail::mix_key(base, kPurposeTail);
        series_u_base_ = detail::mix_key(base, kPurposeSeriesU);
        series_z_base_ = detail::mix_key(base, kPurposeSeriesZ);
    }

    RandomStream child(std::uint64_t replicate) const { return RandomStream(seed_, replicate); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t replicate() const { return replicate_; }

    /// Sequential standard-normal draw (used for increment coefficients V).
    double normal() { return detail::normal(state_main_); }
    void normals(std::span<double> out) {
        for (double& x : out) x = detail::normal(state_main_);
    }

    /// Sequential draw from the dedicated tail stream (Upsilon in Algorithm 2).
    double tail_normal() { return detail::normal(state_tail_); }
    void tail_normals(std::span<double> out) {
        for (double& x : out) x = detail::normal(state_tail_);
    }

    /// Series coefficient vectors U_r and Z_r; a pure function of
    /// (seed, replicate, r) independent of all sequential draws.
    void series_u(std::uint64_t r, std::span<double> out) const {
        std::uint64_t s = detail::mix_key(series_u_base_, r);
        for (double& x : out) x = detail::normal(s);
    }
    void series_z(std::uint64_t r, std::span<double> out) const {
        std::uint64_t s = detail::mix_key(series_z_base_, r);
        for (double& x : out) x = detail::normal(s);
    }

private:
    static constexpr std::uint64_t kPurposeMain = 0x11;
    static constexpr std::uint64_t kPurposeTail = 0x22;
    static constexpr std::uint64_t kPurposeSeriesU = 0x33;
    static constexpr std::uint64_t kPurposeSeriesZ = 0x44;

    std::uint64_t seed_;
    std::uint64_t replicate_;
    std::uint64_t state_main_;
    std::uint64_t state_tail_;
    std::uint64_t series_u_base_;
    std::uint64_t series_z_base_;
};

} // namespace qlevy

#endif
