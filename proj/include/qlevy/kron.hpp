#ifndef QLEVY_KRON_HPP
#define QLEVY_KRON_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qlevy {

/// Row-major enumeration of the strict upper triangle of a K x K matrix:
/// (1,2),(1,3),...,(1,K),(2,3),...,(K-1,K). Indices are 1-based at this
/// interface; storage is 0-based internally.
class SelectionMap {
public:
    explicit SelectionMap(int basis_count);

    int basis_count() const { return basis_count_; }
    int pair_count() const { return static_cast<int>(pairs_.size()); }

    /// 1-based pair (i, j) at 1-based position p.
    std::pair<int, int> pair(int p) const { return pairs_.at(static_cast<std::size_t>(p - 1)); }
    /// 1-based position of pair (i, j), requires 1 <= i < j <= K.
    int position(int i, int j) const;

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

private:
    int basis_count_;
    std::vector<std::pair<int, int>> pairs_;
};

SelectionMap pair_index_map(int basis_count);

/// Strict-upper-triangle entries of m in map order; the action of the
/// selection operator H_K on vec(m^T) without materializing H_K.
Eigen::VectorXd apply_selection(const SelectionMap& map, const Eigen::MatrixXd& m);

/// Antisymmetric K x K matrix A with A(i,j) = v(p), A(j,i) = -v(p) and zero
/// diagonal; equals the reshaping of (I - S_K) H_K^T v.
Eigen::MatrixXd embed_antisymmetric(const SelectionMap& map, const Eigen::VectorXd& v);

/// Action of the commutation operator S_K on vec(m): the transpose of m.
Eigen::MatrixXd commutation_apply(int basis_count, const Eigen::MatrixXd& m);

/// Diagonal of the L x L pair scaling matrix: sqrt(eta_i * eta_j) per pair.
Eigen::VectorXd qtilde_diagonal(const Eigen::VectorXd& eigenvalues, const SelectionMap& map);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-tol*||m||, 0) are clamped to zero; anything lower throws not_psd_error.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m, double tol = 1e-12);

} // namespace qlevy

#endif
