#ifndef QLEVY_HARNESS_HPP
#define QLEVY_HARNESS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qlevy/covariance.hpp"
#include "qlevy/levyarea.hpp"

namespace qlevy {

/// Reference truncation level for coupled tail measurements. The series
/// study replaces the remainder past the reference level by its exact
/// expectation, so it can afford a lighter level, max(32 * D, 2048); the
/// tail-correction study has no such closed form and uses max(64 * D, 4096),
/// leaving at most 1/64 of the tail mass unmeasured.
int reference_truncation(int truncation, Algorithm algorithm);

/// Exact per-pair truncation MSE of the series sampler:
/// (3/2)(h^2/pi^2) eta_i eta_j c_D.
double alg1_mse_analytic(const CovarianceModel& model, int i, int j, double h, int truncation);

struct PairMseRow {
    int truncation;
    Eigen::VectorXd mse;      // per pair, map order
    Eigen::VectorXd stderr_;  // per pair
    Eigen::VectorXd analytic; // per pair
    double total_mse;         // per-replicate sum over pairs, then averaged
    double total_stderr;
    double total_analytic;
};

/// Coupled MC of the series truncation error for every level in the grid,
/// sharing one series sweep per replicate (levels are nested by stream
/// keying). The tail past the reference level is replaced by its exact
/// expectation, so the estimates are unbiased. Deterministic for fixed
/// (seed, grid, n) at any worker count.
std::vector<PairMseRow> alg1_mse_mc(const CovarianceModel& model, double h,
                                    std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                    int workers = 1);

struct ScalarMseRow {
    int truncation;
    double mse;
    double stderr_;
};

/// Coupled MC of the Gaussian-tail approximation error through the
/// Frobenius functional: per replicate
///   (h/2pi)^2 c_D || Qtilde (sym_sqrt(SigmaI_D) - sqrt(SigmaI_inf)) ||_F^2
/// with SigmaI_D the unit-spectrum tail covariance truncated at the
/// reference level.
std::vector<ScalarMseRow> alg2_mse_mc(const CovarianceModel& model, double h,
                                      std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                      int workers = 1);

struct EtaBoundRow {
    int basis_count;
    double mse;
    double stderr_;
    double ratio; // mse * D^2 * min_eta / h^2
};

struct EtaBoundReport {
    std::vector<EtaBoundRow> rows;
    double ratio_spread; // max ratio / min ratio; 1 for a single row
};

/// Spectrum-dependent bound study: the ratio mse * D^2 * min_j eta_j / h^2
/// should stay within a constant factor across the K grid.
EtaBoundReport eta_bound_check(const CovarianceModel& model, double h, int truncation,
                               std::span<const int> k_grid, int replicates, std::uint64_t seed,
                               int workers = 1);

struct MomentCheck {
    std::string name;
    double observed;
    double expected;
    double z; // stderr multiples; 0 for exact identity checks
    bool pass;
};

struct MomentReport {
    std::vector<MomentCheck> checks;
    bool pass;
};

/// Zero-mean, Ito-isometry, cross-moment, and exact-identity checks on
/// assembled integral matrices. Statistical checks fail at |z| > 4; identity
/// checks at 1e-12 relative. Expectations come from `reference` when given
/// (negative controls), otherwise from the sampling model.
MomentReport moment_suite(const CovarianceModel& model, double h, int truncation, int replicates,
                          std::uint64_t seed, Algorithm algorithm,
                          const CovarianceModel* reference = nullptr);

/// Ordinary least squares on (log D, log mse); needs >= 3 positive points.
std::pair<double, double> fit_slope(std::span<const std::pair<double, double>> points);

struct ConvergenceRow {
    std::string algorithm;
    int basis_count;
    double h;
    int truncation;
    int replicates;
    double mse;
    double stderr_;
    double analytic; // NaN when no closed form is available
    std::string slope_group;
    std::uint64_t seed;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double slope;     // NaN when the grid has fewer than 3 levels
    double intercept;
};

ConvergenceReport convergence_study(const CovarianceModel& model, double h, Algorithm algorithm,
                                    std::vector<int> d_grid, int replicates, std::uint64_t seed,
                                    int workers = 1);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// CSV with header algorithm,K,h,D,N,mse,stderr,analytic,slope_group,seed;
/// the analytic field is empty when no closed form exists.
std::string convergence_csv(const ConvergenceReport& report);

} // namespace qlevy

#endif
