#include "qlevy/levyarea.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlevy/errors.hpp"

namespace qlevy {

namespace {

void check_consistent(const CovarianceModel& model, const WienerIncrement& inc) {
    if (inc.basis_count != model.basis_count())
        throw std::invalid_argument("increment and model disagree on basis count");
    if (inc.basis_count > kMaxBasisCount)
        throw capacity_error("basis count exceeds dense pair-matrix capacity (K <= 64)");
}

// Shared entry table for the limiting tail covariance. With eta = 1 and
// dw = sqrt(h) V this yields the unit-spectrum matrix SigmaI_inf.
Eigen::MatrixXd build_sigma_inf(const Eigen::VectorXd& eta, const Eigen::VectorXd& dw, double h,
                                const SelectionMap& map) {
    const int l = map.pair_count();
    const double s = 2.0 / h;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(l, l);
    const auto& pairs = map.pairs();
    for (int k = 0; k < l; ++k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        const double ei = eta(i - 1);
        const double ej = eta(j - 1);
        sigma(k, k) = 2.0 * ei * ej + s * (ei * dw(j - 1) * dw(j - 1) + ej * dw(i - 1) * dw(i - 1));
        for (int q = k + 1; q < l; ++q) {
            const auto [m, n] = pairs[static_cast<std::size_t>(q)];
            double val = 0.0;
            if (i == m && j != n)
                val = s * ei * dw(j - 1) * dw(n - 1);
            else if (i == n && j != m)
                val = -s * ei * dw(j - 1) * dw(m - 1);
            else if (j == m && i != n)
                val = -s * ej * dw(i - 1) * dw(n - 1);
            else if (j == n && i != m)
                val = s * ej * dw(i - 1) * dw(m - 1);
            sigma(k, q) = val;
            sigma(q, k) = val;
        }
    }
    return sigma;
}

} // namespace

double tail_constant(int truncation) {
    if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
    const int d = truncation;
    const int r_stop = d < 1000 ? 1000 : d;
    double sum = 0.0;
    for (int r = r_stop; r > d; --r) sum += 1.0 / (static_cast<double>(r) * r);
    // Euler-Maclaurin remainder past r_stop; error below 1/(30 r_stop^5)
    const double x = static_cast<double>(r_stop);
    return sum + 1.0 / x - 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x * x * x);
}

LevyAreaSample sample_area_alg1(const CovarianceModel& model, const WienerIncrement& inc,
                                int truncation, const RandomStream& stream) {
    check_consistent(model, inc);
    if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
    const int k = model.basis_count();
    SelectionMap map = pair_index_map(k);
    const int l = map.pair_count();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(l);

    Eigen::VectorXd u(k);
    Eigen::VectorXd z(k);
    const Eigen::VectorXd sq2v = std::numbers::sqrt2 * inc.v;
    for (int r = 1; r <= truncation; ++r) {
        stream.series_u(static_cast<std::uint64_t>(r), {u.data(), static_cast<std::size_t>(k)});
        stream.series_z(static_cast<std::uint64_t>(r), {z.data(), static_cast<std::size_t>(k)});
        const Eigen::VectorXd y = z - sq2v;
        const double invr = 1.0 / r;
        int p = 0;
        for (const auto& [i, j] : map.pairs()) {
            acc(p++) += invr * (u(i - 1) * y(j - 1) - u(j - 1) * y(i - 1));
        }
    }

    const double scale = inc.h / (2.0 * std::numbers::pi);
    Eigen::VectorXd values = scale * qtilde_diagonal(model.eigenvalues(), map).cwiseProduct(acc);
    return LevyAreaSample{std::move(map), Algorithm::truncated_series, truncation, inc.h,
                          std::move(values)};
}

LevyAreaSample area_alg1_from_draws(const CovarianceModel& model, const WienerIncrement& inc,
                                    const Eigen::MatrixXd& u, const Eigen::MatrixXd& z) {
    check_consistent(model, inc);
    const int k = model.basis_count();
    if (u.rows() != z.rows() || u.cols() != k || z.cols() != k)
        throw std::invalid_argument("coefficient draw matrices must be D x K");
    const int truncation = static_cast<int>(u.rows());
    SelectionMap map = pair_index_map(k);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(map.pair_count());
    const Eigen::VectorXd sq2v = std::numbers::sqrt2 * inc.v;
    for (int r = 1; r <= truncation; ++r) {
        const double invr = 1.0 / r;
        int p = 0;
        for (const auto& [i, j] : map.pairs()) {
            const double yj = z(r - 1, j - 1) - sq2v(j - 1);
            const double yi = z(r - 1, i - 1) - sq2v(i - 1);
            acc(p++) += invr * (u(r - 1, i - 1) * yj - u(r - 1, j - 1) * yi);
        }
    }
    const double scale = inc.h / (2.0 * std::numbers::pi);
    Eigen::VectorXd values = scale * qtilde_diagonal(model.eigenvalues(), map).cwiseProduct(acc);
    return LevyAreaSample{std::move(map), Algorithm::truncated_series, truncation, inc.h,
                          std::move(values)};
}

Eigen::MatrixXd sigma_infinity(const CovarianceModel& model, const WienerIncrement& inc) {
    check_consistent(model, inc);
    return build_sigma_inf(model.eigenvalues(), inc.dw, inc.h,
                           pair_index_map(model.basis_count()));
}

Eigen::MatrixXd unit_sigma_infinity(const Eigen::VectorXd& v) {
    const int k = static_cast<int>(v.size());
    if (k > kMaxBasisCount)
        throw capacity_error("basis count exceeds dense pair-matrix capacity (K <= 64)");
    // with eta = 1 and dw = sqrt(h) v the entry table loses its h dependence
    return build_sigma_inf(Eigen::VectorXd::Ones(k), v, 1.0, pair_index_map(k));
}

Eigen::MatrixXd unit_sqrt_sigma_infinity(const Eigen::VectorXd& v) {
    Eigen::MatrixXd factor = unit_sigma_infinity(v);
    const double a = std::sqrt(1.0 + v.squaredNorm());
    factor.diagonal().array() += 2.0 * a;
    factor *= 1.0 / (std::numbers::sqrt2 * (1.0 + a));
    return factor;
}

Eigen::MatrixXd sqrt_sigma_infinity(const CovarianceModel& model, const WienerIncrement& inc) {
    check_consistent(model, inc);
    SelectionMap map = pair_index_map(model.basis_count());
    return qtilde_diagonal(model.eigenvalues(), map).asDiagonal() *
           unit_sqrt_sigma_infinity(inc.v);
}

LevyAreaSample sample_area_alg2(const CovarianceModel& model, const WienerIncrement& inc,
                                int truncation, RandomStream& stream) {
    LevyAreaSample series = sample_area_alg1(model, inc, truncation, stream);
    Eigen::VectorXd upsilon(series.map.pair_count());
    stream.tail_normals({upsilon.data(), static_cast<std::size_t>(upsilon.size())});
    return area_alg2_with_tail(model, inc, series, upsilon);
}

LevyAreaSample area_alg2_with_tail(const CovarianceModel& model, const WienerIncrement& inc,
                                   const LevyAreaSample& series, const Eigen::VectorXd& upsilon) {
    check_consistent(model, inc);
    if (upsilon.size() != series.map.pair_count())
        throw std::invalid_argument("tail vector length mismatch");
    const double scale =
        inc.h / (2.0 * std::numbers::pi) * std::sqrt(tail_constant(series.truncation));
    LevyAreaSample out = series;
    out.algorithm = Algorithm::gaussian_tail;
    out.values += scale * (sqrt_sigma_infinity(model, inc) * upsilon);
    return out;
}

int choose_truncation(TruncationRule rule, double h, double gamma, const CovarianceModel& model,
                      int basis_count) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("target order must be positive");
    double bound = 1.0;
    switch (rule) {
        case TruncationRule::alg1:
            bound = std::pow(h, 1.0 - 2.0 * gamma);
            break;
        case TruncationRule::alg2_basis: {
            const double kd = static_cast<double>(basis_count);
            bound = std::pow(h, 0.5 - gamma) * std::sqrt(kd * kd * (kd - 1.0));
            break;
        }
        case TruncationRule::alg2_spectrum:
            bound = std::pow(h, 0.5 - gamma) / std::sqrt(model.min_eigenvalue());
            break;
    }
    const double d = std::ceil(bound);
    return d < 1.0 ? 1 : static_cast<int>(d);
}

} // namespace qlevy
