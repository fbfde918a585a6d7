#include <doctest.h>

#include "qlevy/covariance.hpp"
#include "qlevy/errors.hpp"

using namespace qlevy;

TEST_CASE("power-law spectrum: values, trace, and extension past K") {
    const CovarianceModel model = CovarianceModel::power_law(1.0, 2.0, 4);
    CHECK(model.basis_count() == 4);
    CHECK(model.eigenvalue(1) == doctest::Approx(1.0));
    CHECK(model.eigenvalue(2) == doctest::Approx(0.25));
    CHECK(model.eigenvalue(4) == doctest::Approx(0.0625));
    CHECK(model.min_eigenvalue() == doctest::Approx(0.0625));
    CHECK(model.trace() == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0 + 0.0625));
    CHECK(model.is_power_law());
    // extends beyond the retained basis
    CHECK(model.eigenvalue(5) == doctest::Approx(0.04));
    CHECK_THROWS_AS((void)model.eigenvalue(0), std::invalid_argument);
}

TEST_CASE("power-law decay must exceed 1 unless cylindrical is allowed") {
    CHECK_THROWS_AS(CovarianceModel::power_law(1.0, 1.0, 3), spectrum_error);
    CHECK_THROWS_AS(CovarianceModel::power_law(1.0, 0.0, 3), spectrum_error);
    CHECK_THROWS_AS(CovarianceModel::power_law(0.0, 2.0, 3), spectrum_error);
    const CovarianceModel cyl = CovarianceModel::power_law(1.0, 0.0, 3, true);
    CHECK(cyl.eigenvalue(3) == doctest::Approx(1.0));
}

TEST_CASE("explicit spectra must be positive and nonincreasing") {
    const CovarianceModel model = CovarianceModel::explicit_spectrum({2.0, 1.0, 1.0});
    CHECK(model.basis_count() == 3);
    CHECK_FALSE(model.is_power_law());
    CHECK_THROWS_AS((void)model.eigenvalue(4), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::explicit_spectrum({}), spectrum_error);
    CHECK_THROWS_AS(CovarianceModel::explicit_spectrum({1.0, 0.0}), spectrum_error);
    CHECK_THROWS_AS(CovarianceModel::explicit_spectrum({1.0, -2.0}), spectrum_error);
    CHECK_THROWS_AS(CovarianceModel::explicit_spectrum({1.0, 2.0}), spectrum_error);
    CHECK(CovarianceModel::explicit_spectrum({1.0, 2.0}, true).eigenvalue(2) ==
          doctest::Approx(2.0));
}

TEST_CASE("spectrum strings parse or fail loudly") {
    const CovarianceModel pow = CovarianceModel::parse("pow:2:3", 3);
    CHECK(pow.eigenvalue(2) == doctest::Approx(0.25));
    const CovarianceModel list = CovarianceModel::parse("list:1,0.5,0.25", 3);
    CHECK(list.eigenvalue(3) == doctest::Approx(0.25));

    CHECK_THROWS_AS(CovarianceModel::parse("list:1,0.5,0.25", 4), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::parse("pow:1", 3), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::parse("pow:a:b", 3), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::parse("gauss:1", 3), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::parse("", 3), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::parse("pow:1:2", 0), std::invalid_argument);
}

TEST_CASE("truncated keeps the leading eigenvalues") {
    const CovarianceModel model = CovarianceModel::power_law(1.0, 2.0, 8);
    const CovarianceModel sub = model.truncated(3);
    CHECK(sub.basis_count() == 3);
    CHECK(sub.eigenvalue(3) == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS_AS(model.truncated(0), std::invalid_argument);
    CHECK_THROWS_AS(model.truncated(9), std::invalid_argument);
}

TEST_CASE("increments scale the driving normals by sqrt(h eta_j)") {
    const CovarianceModel model = CovarianceModel::parse("list:4,1", 2);
    Eigen::VectorXd v(2);
    v << 1.5, -2.0;
    const WienerIncrement inc = increment_from_normals(model, 0.25, v);
    CHECK(inc.basis_count == 2);
    CHECK(inc.h == doctest::Approx(0.25));
    CHECK(inc.dw(0) == doctest::Approx(std::sqrt(0.25 * 4.0) * 1.5));
    CHECK(inc.dw(1) == doctest::Approx(std::sqrt(0.25 * 1.0) * -2.0));
    CHECK_THROWS_AS(increment_from_normals(model, 0.0, v), std::invalid_argument);
    CHECK_THROWS_AS(increment_from_normals(model, 0.25, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("sample_increment is reproducible for a fixed (seed, replicate)") {
    const CovarianceModel model = CovarianceModel::power_law(1.0, 2.0, 4);
    RandomStream a(9, 3);
    RandomStream b(9, 3);
    const WienerIncrement x = sample_increment(model, 0.01, a);
    const WienerIncrement y = sample_increment(model, 0.01, b);
    CHECK((x.dw - y.dw).norm() == 0.0);
    RandomStream c(9, 4);
    const WienerIncrement z = sample_increment(model, 0.01, c);
    CHECK((x.dw - z.dw).norm() != 0.0);
}

TEST_CASE("projection tail sup over the discarded band") {
    const CovarianceModel model = CovarianceModel::power_law(1.0, 2.0, 2);
    CHECK(projection_tail_sup(model, 2, 2) == 0.0);
    CHECK(projection_tail_sup(model, 2, 4) == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS_AS(projection_tail_sup(model, 3, 2), std::invalid_argument);
}
