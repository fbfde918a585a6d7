#include "qlevy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qlevy/assembly.hpp"
#include "qlevy/errors.hpp"
#include "qlevy/kron.hpp"

namespace qlevy {

namespace {

constexpr int kBlockSize = 256;

/// Runs process(acc, rep) for rep in [0, n), one accumulator per fixed-size
/// block, and merges the block partials in block-index order. The reduction
/// order is therefore independent of the worker count, which makes the
/// result byte-identical for any `workers`.
template <typename Acc, typename Process, typename Merge>
Acc block_reduce(int n, int workers, const Acc& init, Process&& process, Merge&& merge) {
    const int blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Acc> partial(static_cast<std::size_t>(blocks), init);
    std::atomic<int> next{0};
    auto run = [&] {
        for (;;) {
            const int b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= blocks) return;
            Acc& acc = partial[static_cast<std::size_t>(b)];
            const int lo = b * kBlockSize;
            const int hi = std::min(n, lo + kBlockSize);
            for (int rep = lo; rep < hi; ++rep) process(acc, rep);
        }
    };
    const int nthreads = std::min(workers, blocks);
    if (nthreads <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    Acc total = init;
    for (const Acc& acc : partial) merge(total, acc);
    return total;
}

std::vector<int> checked_grid(std::vector<int> d_grid) {
    if (d_grid.empty()) throw std::invalid_argument("truncation grid is empty");
    std::sort(d_grid.begin(), d_grid.end());
    if (d_grid.front() < 0) throw std::invalid_argument("truncation levels must be nonnegative");
    if (std::adjacent_find(d_grid.begin(), d_grid.end()) != d_grid.end())
        throw std::invalid_argument("truncation grid has duplicate levels");
    return d_grid;
}

void check_mc_args(double h, int replicates, int workers) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (replicates < 1) throw std::invalid_argument("need replicates >= 1");
    if (workers < 1) throw std::invalid_argument("need workers >= 1");
}

/// Pair covariance induced by a second-moment matrix m ~ sum_r w_r y_r y_r^T:
/// row/column p = (i,j) has diagonal m_ii + m_jj and off-diagonal entries
/// +-m per the single-overlap pattern of the pair indices.
Eigen::MatrixXd pair_covariance_from_moment(const Eigen::MatrixXd& m, const SelectionMap& map) {
    const int l = map.pair_count();
    const auto& pairs = map.pairs();
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(l, l);
    for (int p = 0; p < l; ++p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        sigma(p, p) = m(i - 1, i - 1) + m(j - 1, j - 1);
        for (int q = p + 1; q < l; ++q) {
            const auto [a, b] = pairs[static_cast<std::size_t>(q)];
            double val = 0.0;
            if (i == a && j != b)
                val = m(j - 1, b - 1);
            else if (i == b && j != a)
                val = -m(j - 1, a - 1);
            else if (j == a && i != b)
                val = -m(i - 1, b - 1);
            else if (j == b && i != a)
                val = m(i - 1, a - 1);
            sigma(p, q) = val;
            sigma(q, p) = val;
        }
    }
    return sigma;
}

} // namespace

int reference_truncation(int truncation, Algorithm algorithm) {
    if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
    return algorithm == Algorithm::truncated_series ? std::max(32 * truncation, 2048)
                                                    : std::max(64 * truncation, 4096);
}

double alg1_mse_analytic(const CovarianceModel& model, int i, int j, double h, int truncation) {
    if (i == j) throw std::invalid_argument("need an off-diagonal pair");
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 1.5 * h * h / pi2 * model.eigenvalue(i) * model.eigenvalue(j) *
           tail_constant(truncation);
}

std::vector<PairMseRow> alg1_mse_mc(const CovarianceModel& model, double h,
                                    std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                    int workers) {
    check_mc_args(h, replicates, workers);
    d_grid = checked_grid(std::move(d_grid));
    const int k = model.basis_count();
    if (k > kMaxBasisCount)
        throw capacity_error("basis count exceeds dense pair-matrix capacity (K <= 64)");
    const SelectionMap map = pair_index_map(k);
    const int l = map.pair_count();
    const int g = static_cast<int>(d_grid.size());
    const int d_ref = reference_truncation(d_grid.back(), Algorithm::truncated_series);
    const Eigen::VectorXd qd = qtilde_diagonal(model.eigenvalues(), map);
    const double scale = h / (2.0 * std::numbers::pi);

    std::vector<int> pi(static_cast<std::size_t>(l));
    std::vector<int> pj(static_cast<std::size_t>(l));
    for (int p = 0; p < l; ++p) {
        const auto [i, j] = map.pair(p + 1);
        pi[static_cast<std::size_t>(p)] = i - 1;
        pj[static_cast<std::size_t>(p)] = j - 1;
    }

    struct Acc {
        Eigen::ArrayXXd e2, e4;
        Eigen::ArrayXd t, t2;
    };
    const Acc init{Eigen::ArrayXXd::Zero(g, l), Eigen::ArrayXXd::Zero(g, l),
                   Eigen::ArrayXd::Zero(g), Eigen::ArrayXd::Zero(g)};

    auto process = [&](Acc& acc, int rep) {
        RandomStream stream(seed, static_cast<std::uint64_t>(rep));
        Eigen::VectorXd v(k);
        stream.normals({v.data(), static_cast<std::size_t>(k)});
        const Eigen::VectorXd sq2v = std::numbers::sqrt2 * v;
        Eigen::VectorXd pair_sum = Eigen::VectorXd::Zero(l);
        Eigen::MatrixXd prefix(g, l);
        Eigen::VectorXd u(k), z(k), y(k);
        int gi = 0;
        while (gi < g && d_grid[static_cast<std::size_t>(gi)] == 0) prefix.row(gi++).setZero();
        for (int r = 1; r <= d_ref; ++r) {
            stream.series_u(static_cast<std::uint64_t>(r), {u.data(), static_cast<std::size_t>(k)});
            stream.series_z(static_cast<std::uint64_t>(r), {z.data(), static_cast<std::size_t>(k)});
            y = z - sq2v;
            const double invr = 1.0 / r;
            for (int p = 0; p < l; ++p) {
                const int i = pi[static_cast<std::size_t>(p)];
                const int j = pj[static_cast<std::size_t>(p)];
                pair_sum(p) += invr * (u(i) * y(j) - u(j) * y(i));
            }
            while (gi < g && d_grid[static_cast<std::size_t>(gi)] == r)
                prefix.row(gi++) = pair_sum.transpose();
        }
        for (int gg = 0; gg < g; ++gg) {
            double tsum = 0.0;
            for (int p = 0; p < l; ++p) {
                const double e = scale * qd(p) * (pair_sum(p) - prefix(gg, p));
                const double e2 = e * e;
                acc.e2(gg, p) += e2;
                acc.e4(gg, p) += e2 * e2;
                tsum += e2;
            }
            acc.t(gg) += tsum;
            acc.t2(gg) += tsum * tsum;
        }
    };
    auto merge = [](Acc& a, const Acc& b) {
        a.e2 += b.e2;
        a.e4 += b.e4;
        a.t += b.t;
        a.t2 += b.t2;
    };
    const Acc total = block_reduce(replicates, workers, init, process, merge);

    // The measured error stops at d_ref; the remaining tail is independent
    // of it with exactly known mean square, so add that expectation back.
    const double n = static_cast<double>(replicates);
    std::vector<PairMseRow> rows;
    rows.reserve(static_cast<std::size_t>(g));
    Eigen::VectorXd super(l);
    for (int p = 0; p < l; ++p)
        super(p) = alg1_mse_analytic(model, pi[static_cast<std::size_t>(p)] + 1,
                                     pj[static_cast<std::size_t>(p)] + 1, h, d_ref);
    for (int gg = 0; gg < g; ++gg) {
        PairMseRow row;
        row.truncation = d_grid[static_cast<std::size_t>(gg)];
        row.mse.resize(l);
        row.stderr_.resize(l);
        row.analytic.resize(l);
        for (int p = 0; p < l; ++p) {
            const double mean = total.e2(gg, p) / n;
            const double var = std::max(0.0, total.e4(gg, p) / n - mean * mean);
            row.mse(p) = mean + super(p);
            row.stderr_(p) = std::sqrt(var / n);
            row.analytic(p) = alg1_mse_analytic(model, pi[static_cast<std::size_t>(p)] + 1,
                                                pj[static_cast<std::size_t>(p)] + 1, h,
                                                row.truncation);
        }
        const double tmean = total.t(gg) / n;
        const double tvar = std::max(0.0, total.t2(gg) / n - tmean * tmean);
        row.total_mse = tmean + super.sum();
        row.total_stderr = std::sqrt(tvar / n);
        row.total_analytic = row.analytic.sum();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ScalarMseRow> alg2_mse_mc(const CovarianceModel& model, double h,
                                      std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                      int workers) {
    check_mc_args(h, replicates, workers);
    d_grid = checked_grid(std::move(d_grid));
    const int k = model.basis_count();
    if (k > kMaxBasisCount)
        throw capacity_error("basis count exceeds dense pair-matrix capacity (K <= 64)");
    const SelectionMap map = pair_index_map(k);
    const int l = map.pair_count();
    const int g = static_cast<int>(d_grid.size());
    const int d_ref = reference_truncation(d_grid.back(), Algorithm::gaussian_tail);
    const Eigen::VectorXd qd2 =
        qtilde_diagonal(model.eigenvalues(), map).array().square().matrix();
    const double pre = h / (2.0 * std::numbers::pi);

    struct Acc {
        Eigen::ArrayXd s, s2;
    };
    const Acc init{Eigen::ArrayXd::Zero(g), Eigen::ArrayXd::Zero(g)};

    auto process = [&](Acc& acc, int rep) {
        RandomStream stream(seed, static_cast<std::uint64_t>(rep));
        Eigen::VectorXd v(k);
        stream.normals({v.data(), static_cast<std::size_t>(k)});
        const Eigen::MatrixXd usq = unit_sqrt_sigma_infinity(v);
        const Eigen::VectorXd sq2v = std::numbers::sqrt2 * v;

        Eigen::MatrixXd m_total = Eigen::MatrixXd::Zero(k, k);
        std::vector<Eigen::MatrixXd> prefix(static_cast<std::size_t>(g));
        Eigen::VectorXd z(k), y(k);
        int gi = 0;
        while (gi < g && d_grid[static_cast<std::size_t>(gi)] == 0)
            prefix[static_cast<std::size_t>(gi++)] = m_total;
        for (int r = 1; r <= d_ref; ++r) {
            stream.series_z(static_cast<std::uint64_t>(r), {z.data(), static_cast<std::size_t>(k)});
            y = z - sq2v;
            const double w = 1.0 / (static_cast<double>(r) * r);
            m_total.selfadjointView<Eigen::Lower>().rankUpdate(y, w);
            while (gi < g && d_grid[static_cast<std::size_t>(gi)] == r)
                prefix[static_cast<std::size_t>(gi++)] = m_total;
        }
        m_total.triangularView<Eigen::StrictlyUpper>() =
            m_total.transpose().triangularView<Eigen::StrictlyUpper>();
        for (int gg = 0; gg < g; ++gg) {
            Eigen::MatrixXd m_tail = m_total - prefix[static_cast<std::size_t>(gg)];
            m_tail.triangularView<Eigen::StrictlyUpper>() =
                m_tail.transpose().triangularView<Eigen::StrictlyUpper>();
            const double cd = tail_constant(d_grid[static_cast<std::size_t>(gg)]);
            const Eigen::MatrixXd sigma = pair_covariance_from_moment(m_tail, map) / cd;
            const Eigen::MatrixXd diff = sym_sqrt(sigma) - usq;
            double frob = 0.0;
            for (int p = 0; p < l; ++p) frob += qd2(p) * diff.row(p).squaredNorm();
            const double val = pre * pre * cd * frob;
            acc.s(gg) += val;
            acc.s2(gg) += val * val;
        }
    };
    auto merge = [](Acc& a, const Acc& b) {
        a.s += b.s;
        a.s2 += b.s2;
    };
    const Acc total = block_reduce(replicates, workers, init, process, merge);

    const double n = static_cast<double>(replicates);
    std::vector<ScalarMseRow> rows;
    rows.reserve(static_cast<std::size_t>(g));
    for (int gg = 0; gg < g; ++gg) {
        const double mean = total.s(gg) / n;
        const double var = std::max(0.0, total.s2(gg) / n - mean * mean);
        rows.push_back(ScalarMseRow{d_grid[static_cast<std::size_t>(gg)], mean,
                                    std::sqrt(var / n)});
    }
    return rows;
}

EtaBoundReport eta_bound_check(const CovarianceModel& model, double h, int truncation,
                               std::span<const int> k_grid, int replicates, std::uint64_t seed,
                               int workers) {
    if (truncation < 1) throw std::invalid_argument("need truncation >= 1");
    if (k_grid.empty()) throw std::invalid_argument("basis-count grid is empty");
    EtaBoundReport report;
    report.rows.reserve(k_grid.size());
    const double d2 = static_cast<double>(truncation) * truncation;
    for (const int kk : k_grid) {
        const CovarianceModel sub = model.truncated(kk);
        const ScalarMseRow row =
            alg2_mse_mc(sub, h, {truncation}, replicates, seed, workers).front();
        const double ratio = row.mse * d2 * sub.min_eigenvalue() / (h * h);
        report.rows.push_back(EtaBoundRow{kk, row.mse, row.stderr_, ratio});
    }
    double lo = report.rows.front().ratio;
    double hi = lo;
    for (const auto& row : report.rows) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    report.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return report;
}

MomentReport moment_suite(const CovarianceModel& model, double h, int truncation, int replicates,
                          std::uint64_t seed, Algorithm algorithm,
                          const CovarianceModel* reference) {
    check_mc_args(h, replicates, 1);
    if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
    const int k = model.basis_count();
    const CovarianceModel& expect = reference ? *reference : model;
    if (expect.basis_count() != k)
        throw std::invalid_argument("reference spectrum has a different basis count");
    const SelectionMap map = pair_index_map(k);
    const int l = map.pair_count();

    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd s4 = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(l);
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(l);
    double max_pair_resid = 0.0;
    double max_diag_resid = 0.0;

    for (int rep = 0; rep < replicates; ++rep) {
        RandomStream stream(seed, static_cast<std::uint64_t>(rep));
        const WienerIncrement inc = sample_increment(model, h, stream);
        const LevyAreaSample area = algorithm == Algorithm::truncated_series
                                        ? sample_area_alg1(model, inc, truncation, stream)
                                        : sample_area_alg2(model, inc, truncation, stream);
        const IteratedIntegralMatrix iim = assemble(inc, area, model);
        const Eigen::MatrixXd& e = iim.entries;
        s1 += e;
        const Eigen::MatrixXd esq = e.cwiseProduct(e);
        s2 += esq;
        s4 += esq.cwiseProduct(esq);
        for (int p = 0; p < l; ++p) {
            const auto [i, j] = map.pair(p + 1);
            const double x = e(i - 1, j - 1) * e(j - 1, i - 1);
            c1(p) += x;
            c2(p) += x * x;
            const double sum = e(i - 1, j - 1) + e(j - 1, i - 1);
            const double prod = inc.dw(i - 1) * inc.dw(j - 1);
            // scale by the entry magnitudes: the sum cancels the area term,
            // so a residual of a few ulp of the entries is the exact answer
            const double den = std::max({std::abs(e(i - 1, j - 1)) + std::abs(e(j - 1, i - 1)),
                                         std::abs(prod), std::numeric_limits<double>::min()});
            max_pair_resid = std::max(max_pair_resid, std::abs(sum - prod) / den);
        }
        for (int i = 0; i < k; ++i) {
            const double ref = 0.5 * (inc.dw(i) * inc.dw(i) - model.eigenvalues()(i) * h);
            const double den = std::max({std::abs(e(i, i)), std::abs(ref),
                                         0.5 * model.eigenvalues()(i) * h});
            max_diag_resid = std::max(max_diag_resid, std::abs(e(i, i) - ref) / den);
        }
    }

    const double n = static_cast<double>(replicates);
    MomentReport report;
    report.pass = true;
    auto add_stat = [&](std::string name, double obs, double exp_val, double var) {
        const double se = std::sqrt(std::max(0.0, var) / n);
        const double z = se > 0.0 ? std::abs(obs - exp_val) / se : 0.0;
        const bool pass = z <= 4.0;
        report.pass = report.pass && pass;
        report.checks.push_back(MomentCheck{std::move(name), obs, exp_val, z, pass});
    };
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const std::string tag =
                "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
            const double mean = s1(i, j) / n;
            const double m2 = s2(i, j) / n;
            add_stat("mean" + tag, mean, 0.0, m2 - mean * mean);
            const double exp2 = 0.5 * h * h * expect.eigenvalue(i + 1) * expect.eigenvalue(j + 1);
            add_stat("second" + tag, m2, exp2, s4(i, j) / n - m2 * m2);
        }
    }
    for (int p = 0; p < l; ++p) {
        const auto [i, j] = map.pair(p + 1);
        const std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        const double mean = c1(p) / n;
        add_stat("cross" + tag, mean, 0.0, c2(p) / n - mean * mean);
    }
    auto add_exact = [&](std::string name, double resid) {
        const bool pass = resid <= 1e-12;
        report.pass = report.pass && pass;
        report.checks.push_back(MomentCheck{std::move(name), resid, 0.0, 0.0, pass});
    };
    add_exact("pair-identity", max_pair_resid);
    add_exact("diag-identity", max_diag_resid);
    return report;
}

std::pair<double, double> fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("need at least 3 points for a slope fit");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("slope fit needs positive coordinates");
        const double lx = std::log(x);
        const double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("slope fit needs distinct abscissae");
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

ConvergenceReport convergence_study(const CovarianceModel& model, double h, Algorithm algorithm,
                                    std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                    int workers) {
    const int k = model.basis_count();
    const std::string algo_name =
        algorithm == Algorithm::truncated_series ? "alg1" : "alg2";
    const std::string group = algo_name + "-k" + std::to_string(k) + "-h" + format_double(h);

    ConvergenceReport report;
    if (algorithm == Algorithm::truncated_series) {
        for (const PairMseRow& row : alg1_mse_mc(model, h, std::move(d_grid), replicates, seed,
                                                 workers))
            report.rows.push_back(ConvergenceRow{algo_name, k, h, row.truncation, replicates,
                                                 row.total_mse, row.total_stderr,
                                                 row.total_analytic, group, seed});
    } else {
        for (const ScalarMseRow& row : alg2_mse_mc(model, h, std::move(d_grid), replicates, seed,
                                                   workers))
            report.rows.push_back(ConvergenceRow{algo_name, k, h, row.truncation, replicates,
                                                 row.mse, row.stderr_,
                                                 std::numeric_limits<double>::quiet_NaN(), group,
                                                 seed});
    }

    std::vector<std::pair<double, double>> points;
    for (const auto& row : report.rows)
        if (row.truncation > 0 && row.mse > 0.0)
            points.emplace_back(static_cast<double>(row.truncation), row.mse);
    if (points.size() >= 3) {
        std::tie(report.slope, report.intercept) = fit_slope(points);
    } else {
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string convergence_csv(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "algorithm,K,h,D,N,mse,stderr,analytic,slope_group,seed\n";
    for (const auto& row : report.rows) {
        out << row.algorithm << ',' << row.basis_count << ',' << format_double(row.h) << ','
            << row.truncation << ',' << row.replicates << ',' << format_double(row.mse) << ','
            << format_double(row.stderr_) << ','
            << (std::isnan(row.analytic) ? std::string() : format_double(row.analytic)) << ','
            << row.slope_group << ',' << row.seed << '\n';
    }
    return out.str();
}

} // namespace qlevy
