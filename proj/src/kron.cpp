#include "qlevy/kron.hpp"

#include <cmath>
#include <stdexcept>

#include "qlevy/errors.hpp"

namespace qlevy {

SelectionMap::SelectionMap(int basis_count) : basis_count_(basis_count) {
    if (basis_count < 1) throw std::invalid_argument("SelectionMap: basis count must be >= 1");
    pairs_.reserve(static_cast<std::size_t>(basis_count) * (basis_count - 1) / 2);
    for (int i = 1; i < basis_count; ++i)
        for (int j = i + 1; j <= basis_count; ++j) pairs_.emplace_back(i, j);
}

int SelectionMap::position(int i, int j) const {
    if (i < 1 || j <= i || j > basis_count_)
        throw std::invalid_argument("SelectionMap::position: need 1 <= i < j <= K");
    // offset of row i's block plus distance past the diagonal
    const int before = (i - 1) * basis_count_ - (i - 1) * i / 2;
    return before + (j - i);
}

SelectionMap pair_index_map(int basis_count) { return SelectionMap(basis_count); }

Eigen::VectorXd apply_selection(const SelectionMap& map, const Eigen::MatrixXd& m) {
    const int k = map.basis_count();
    if (m.rows() != k || m.cols() != k)
        throw std::invalid_argument("apply_selection: matrix dimension mismatch");
    Eigen::VectorXd out(map.pair_count());
    int p = 0;
    for (const auto& [i, j] : map.pairs()) out(p++) = m(i - 1, j - 1);
    return out;
}

Eigen::MatrixXd embed_antisymmetric(const SelectionMap& map, const Eigen::VectorXd& v) {
    const int k = map.basis_count();
    if (v.size() != map.pair_count())
        throw std::invalid_argument("embed_antisymmetric: vector length mismatch");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    int p = 0;
    for (const auto& [i, j] : map.pairs()) {
        a(i - 1, j - 1) = v(p);
        a(j - 1, i - 1) = -v(p);
        ++p;
    }
    return a;
}

Eigen::MatrixXd commutation_apply(int basis_count, const Eigen::MatrixXd& m) {
    if (m.rows() != basis_count || m.cols() != basis_count)
        throw std::invalid_argument("commutation_apply: matrix dimension mismatch");
    return m.transpose();
}

Eigen::VectorXd qtilde_diagonal(const Eigen::VectorXd& eigenvalues, const SelectionMap& map) {
    if (eigenvalues.size() < map.basis_count())
        throw std::invalid_argument("qtilde_diagonal: spectrum shorter than basis count");
    Eigen::VectorXd d(map.pair_count());
    int p = 0;
    for (const auto& [i, j] : map.pairs())
        d(p++) = std::sqrt(eigenvalues(i - 1) * eigenvalues(j - 1));
    return d;
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sym_sqrt: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("sym_sqrt: eigensolver failed");
    const double scale = m.norm();
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -tol * scale)
            throw not_psd_error("sym_sqrt: matrix is not positive semidefinite");
        if (lam(i) < 0.0) lam(i) = 0.0;
    }
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

} // namespace qlevy
