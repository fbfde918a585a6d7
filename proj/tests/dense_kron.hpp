#ifndef QLEVY_TESTS_DENSE_KRON_HPP
#define QLEVY_TESTS_DENSE_KRON_HPP

// Dense brute-force constructions of the pair-selection and commutation
// operators for small K. Vectorization is row-major: vec(m)[i*K+j] = m(i,j),
// matching the library's "H acts on vec(m^T)" convention.

#include <Eigen/Dense>

namespace qlevy_test {

inline Eigen::VectorXd vec_rowmajor(const Eigen::MatrixXd& m) {
    const int k = static_cast<int>(m.rows());
    Eigen::VectorXd v(k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) v(i * k + j) = m(i, j);
    return v;
}

inline Eigen::MatrixXd unvec_rowmajor(const Eigen::VectorXd& v, int k) {
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = v(i * k + j);
    return m;
}

/// L x K^2 selection matrix picking the strict upper triangle row-major.
inline Eigen::MatrixXd dense_selection(int k) {
    const int l = k * (k - 1) / 2;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(l, k * k);
    int p = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) h(p++, i * k + j) = 1.0;
    return h;
}

/// K^2 x K^2 commutation matrix: S vec(m) = vec(m^T).
inline Eigen::MatrixXd dense_commutation(int k) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k * k, k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) s(i * k + j, j * k + i) = 1.0;
    return s;
}

} // namespace qlevy_test

#endif
