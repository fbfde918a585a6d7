#include "qlevy/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "qlevy/kron.hpp"
#include "qlevy/rng.hpp"

namespace qlevy {

IteratedIntegralMatrix assemble(const WienerIncrement& inc, const LevyAreaSample& area,
                                const CovarianceModel& model) {
    const int k = model.basis_count();
    if (inc.basis_count != k || area.map.basis_count() != k)
        throw std::invalid_argument("assemble: basis count mismatch");
    if (inc.h != area.h) throw std::invalid_argument("assemble: step size mismatch");

    Eigen::MatrixXd entries = 0.5 * (inc.dw * inc.dw.transpose());
    entries.diagonal() -= 0.5 * inc.h * model.eigenvalues();
    entries += embed_antisymmetric(area.map, area.values);
    return IteratedIntegralMatrix{k, inc.h, std::move(entries)};
}

Eigen::VectorXd contract(const IteratedIntegralMatrix& iim, const TestOperatorPair& ops) {
    const int k = iim.basis_count;
    const auto d = ops.phi.rows();
    if (ops.phi.cols() != k || static_cast<int>(ops.psi.size()) != k)
        throw std::invalid_argument("contract: operator dimensions inconsistent with K");
    for (const auto& p : ops.psi)
        if (p.rows() != d || p.cols() != d)
            throw std::invalid_argument("contract: psi block dimension mismatch");

    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < k; ++j) {
        // Psi(., e_j) applied to sum_i entries(i,j) * Phi e_i
        Eigen::VectorXd x = ops.phi * iim.entries.col(j);
        out += ops.psi[static_cast<std::size_t>(j)] * x;
    }
    return out;
}

ProjectionErrorEstimate projection_error_sq(const CovarianceModel& model, int k, int j, double h,
                                            const Eigen::MatrixXd& phi_full, int replicates,
                                            std::uint64_t seed) {
    if (j <= k) throw std::invalid_argument("projection_error_sq: need J > K");
    if (phi_full.cols() < j) throw std::invalid_argument("projection_error_sq: phi has < J columns");
    if (!(h > 0.0)) throw std::invalid_argument("projection_error_sq: step size must be positive");
    if (replicates < 1) throw std::invalid_argument("projection_error_sq: need replicates >= 1");

    double analytic = 0.0;
    for (int col = k + 1; col <= j; ++col)
        analytic += model.eigenvalue(col) * phi_full.col(col - 1).squaredNorm();
    analytic *= h;

    const double sqh = std::sqrt(h);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        RandomStream stream(seed, static_cast<std::uint64_t>(rep));
        Eigen::VectorXd x = Eigen::VectorXd::Zero(phi_full.rows());
        for (int col = k + 1; col <= j; ++col) {
            const double beta = sqh * stream.normal();
            x += std::sqrt(model.eigenvalue(col)) * beta * phi_full.col(col - 1);
        }
        const double e = x.squaredNorm();
        sum += e;
        sum_sq += e * e;
    }
    const double n = static_cast<double>(replicates);
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    return ProjectionErrorEstimate{mean, std::sqrt(var > 0.0 ? var / n : 0.0), analytic};
}

} // namespace qlevy
