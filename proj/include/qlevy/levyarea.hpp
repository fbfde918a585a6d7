#ifndef QLEVY_LEVYAREA_HPP
#define QLEVY_LEVYAREA_HPP

#include <Eigen/Dense>

#include "qlevy/covariance.hpp"
#include "qlevy/kron.hpp"
#include "qlevy/rng.hpp"

namespace qlevy {

/// Dense L x L storage is limited to K <= 64 (L <= 2016).
inline constexpr int kMaxBasisCount = 64;

enum class Algorithm { truncated_series = 1, gaussian_tail = 2 };

/// The L = K(K-1)/2 strictly-upper-triangular Levy areas of one step.
struct LevyAreaSample {
    SelectionMap map;
    Algorithm algorithm;
    int truncation; // D; 0 means empty series
    double h;
    Eigen::VectorXd values;
};

/// Tail constant c_D = sum_{r>D} r^-2 to absolute accuracy 1e-14, via
/// direct summation with an Euler-Maclaurin remainder correction.
double tail_constant(int truncation);

/// Truncated-series sampler. U_r, Z_r are keyed by r on the stream, so the
/// same (seed, replicate) yields nested samples across truncation levels.
LevyAreaSample sample_area_alg1(const CovarianceModel& model, const WienerIncrement& inc,
                                int truncation, const RandomStream& stream);

/// Same sampler driven by explicit coefficient draws (test hook).
/// u and z are D x K matrices, row r-1 holding U_r and Z_r.
LevyAreaSample area_alg1_from_draws(const CovarianceModel& model, const WienerIncrement& inc,
                                    const Eigen::MatrixXd& u, const Eigen::MatrixXd& z);

/// Limiting conditional covariance of the normalized tail sums, given the
/// increment: diagonal 2*eta_i*eta_j + (2/h)(eta_i dw_j^2 + eta_j dw_i^2),
/// off-diagonal entries +-(2/h) eta dw dw per the pair-overlap pattern.
Eigen::MatrixXd sigma_infinity(const CovarianceModel& model, const WienerIncrement& inc);

/// Unit-spectrum (eta = 1) tail covariance as a function of the increment
/// normals V alone: diagonal 2 + 2 v_i^2 + 2 v_j^2, off-diagonal +-2 v v.
Eigen::MatrixXd unit_sigma_infinity(const Eigen::VectorXd& v);

/// Symmetric PSD root of unit_sigma_infinity in closed form:
/// (SigmaI_inf + 2a I) / (sqrt(2)(1+a)), a = sqrt(1 + V^T V).
Eigen::MatrixXd unit_sqrt_sigma_infinity(const Eigen::VectorXd& v);

/// Closed-form factor S with S S^T = sigma_infinity:
/// S = Qtilde * unit_sqrt_sigma_infinity(V).
Eigen::MatrixXd sqrt_sigma_infinity(const CovarianceModel& model, const WienerIncrement& inc);

/// Truncated series plus Gaussian tail correction:
/// value = alg1 + (h/2pi) sqrt(c_D) * sqrt_sigma_infinity * Upsilon.
LevyAreaSample sample_area_alg2(const CovarianceModel& model, const WienerIncrement& inc,
                                int truncation, RandomStream& stream);

/// Tail correction applied to a given series sample with an explicit
/// Upsilon vector (test hook).
LevyAreaSample area_alg2_with_tail(const CovarianceModel& model, const WienerIncrement& inc,
                                   const LevyAreaSample& series, const Eigen::VectorXd& upsilon);

enum class TruncationRule { alg1, alg2_basis, alg2_spectrum };

/// Smallest D meeting the mean-square order-gamma requirement:
/// alg1: h^(1-2g); alg2_basis: h^(1/2-g) sqrt(K^2(K-1));
/// alg2_spectrum: h^(1/2-g) (min eta)^(-1/2). Minimum 1.
int choose_truncation(TruncationRule rule, double h, double gamma, const CovarianceModel& model,
                      int basis_count);

} // namespace qlevy

#endif
