#ifndef QLEVY_ASSEMBLY_HPP
#define QLEVY_ASSEMBLY_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qlevy/covariance.hpp"
#include "qlevy/levyarea.hpp"

namespace qlevy {

/// Full K x K matrix of iterated-integral approximations for one step.
struct IteratedIntegralMatrix {
    int basis_count;
    double h;
    Eigen::MatrixXd entries;
};

/// entries(i,j) = dw_i dw_j / 2 - delta_ij eta_i h / 2 + A(i,j) with A the
/// antisymmetric embedding of the Levy-area vector.
IteratedIntegralMatrix assemble(const WienerIncrement& inc, const LevyAreaSample& area,
                                const CovarianceModel& model);

/// Finite-dimensional stand-ins for the operator pair (Phi, Psi):
/// phi is d x K (column j = coordinates of Phi e_j), psi[j] is the d x d
/// matrix of x -> Psi(x, e_j).
struct TestOperatorPair {
    Eigen::MatrixXd phi;
    std::vector<Eigen::MatrixXd> psi;
};

/// sum_{i,j} entries(i,j) * Psi(Phi e_i, e_j).
Eigen::VectorXd contract(const IteratedIntegralMatrix& iim, const TestOperatorPair& ops);

struct ProjectionErrorEstimate {
    double mc;
    double stderr_;
    double analytic;
};

/// Mean-square projection error of the increment integral over the discarded
/// band K < j <= J: MC estimate of E||sum_j Phi e_j sqrt(eta_j) beta_h^j||^2
/// against the closed form h * sum_j eta_j ||Phi e_j||^2.
ProjectionErrorEstimate projection_error_sq(const CovarianceModel& model, int k, int j, double h,
                                            const Eigen::MatrixXd& phi_full, int replicates,
                                            std::uint64_t seed);

} // namespace qlevy

#endif
