#include "qlevy/rng.hpp"

#include <cmath>

namespace qlevy {
namespace detail {

ZigTables::ZigTables() {
    const double m1 = 2147483648.0;
    double dn = 3.442619855899;
    double tn = dn;
    const double vn = 9.91256303526217e-3;
    const double q = vn / std::exp(-0.5 * dn * dn);

    kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
    kn[1] = 0;
    wn[0] = q / m1;
    wn[127] = dn / m1;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
        kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
        tn = dn;
        fn[i] = std::exp(-0.5 * dn * dn);
        wn[i] = dn / m1;
    }
}

const ZigTables zig{};

double normal_slow_path(std::uint64_t& state, std::int32_t hz, std::uint32_t iz) {
    const double r = 3.442619855899;
    for (;;) {
        double x = hz * zig.wn[iz];
        if (iz == 0) {
            // base-layer tail sample
            double xx;
            double yy;
            do {
                xx = -std::log(uniform_open(state)) / r;
                yy = -std::log(uniform_open(state));
            } while (yy + yy < xx * xx);
            return hz > 0 ? r + xx : -r - xx;
        }
        if (zig.fn[iz] + uniform_open(state) * (zig.fn[iz - 1] - zig.fn[iz]) <
            std::exp(-0.5 * x * x)) {
            return x;
        }
        const std::uint64_t u = splitmix_next(state);
        hz = static_cast<std::int32_t>(static_cast<std::uint32_t>(u >> 32));
        iz = static_cast<std::uint32_t>(u & 127u);
        const std::uint32_t ahz = hz < 0
            ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(hz))
            : static_cast<std::uint32_t>(hz);
        if (ahz < zig.kn[iz]) return hz * zig.wn[iz];
    }
}

} // namespace detail
} // namespace qlevy
