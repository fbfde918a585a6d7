#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "qlevy.h"
#include "qlevy/assembly.hpp"
#include "qlevy/harness.hpp"

TEST_CASE("status strings exist for every code") {
    for (int s = 0; s <= 6; ++s) {
        const char* text = qlevy_status_string(static_cast<qlevy_status>(s));
        REQUIRE(text != nullptr);
        CHECK(std::strlen(text) > 0);
    }
}

TEST_CASE("model lifecycle through the C interface") {
    qlevy_model* model = nullptr;
    REQUIRE(qlevy_model_parse("pow:1:2", 4, &model) == QLEVY_OK);
    REQUIRE(model != nullptr);
    CHECK(qlevy_model_basis_count(model) == 4);
    double eta = 0.0;
    CHECK(qlevy_model_eigenvalue(model, 2, &eta) == QLEVY_OK);
    CHECK(eta == doctest::Approx(0.25));
    CHECK(qlevy_model_eigenvalue(model, 0, &eta) == QLEVY_ERR_INVALID_ARGUMENT);
    CHECK(qlevy_model_trace(model) == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0 + 0.0625));
    qlevy_model_free(model);

    CHECK(qlevy_model_parse("pow:1:0.5", 4, &model) == QLEVY_ERR_SPECTRUM);
    CHECK(qlevy_model_parse("nonsense", 4, &model) == QLEVY_ERR_INVALID_ARGUMENT);
    CHECK(qlevy_model_parse(nullptr, 4, &model) == QLEVY_ERR_INVALID_ARGUMENT);

    const double values[3] = {1.0, 0.5, 0.25};
    REQUIRE(qlevy_model_from_list(values, 3, &model) == QLEVY_OK);
    CHECK(qlevy_model_basis_count(model) == 3);
    qlevy_model_free(model);
    const double bad[2] = {0.5, 1.0};
    CHECK(qlevy_model_from_list(bad, 2, &model) == QLEVY_ERR_SPECTRUM);
}

TEST_CASE("pair bookkeeping mirrors the selection map") {
    CHECK(qlevy_pair_count(4) == 6);
    CHECK(qlevy_pair_count(1) == 0);
    int i = 0, j = 0;
    REQUIRE(qlevy_pair_at(4, 4, &i, &j) == QLEVY_OK);
    CHECK(i == 2);
    CHECK(j == 3);
    CHECK(qlevy_pair_at(4, 7, &i, &j) == QLEVY_ERR_INVALID_ARGUMENT);
    CHECK(qlevy_pair_at(4, 1, nullptr, &j) == QLEVY_ERR_INVALID_ARGUMENT);
}

TEST_CASE("truncation selection exposes all three rules") {
    qlevy_model* model = nullptr;
    REQUIRE(qlevy_model_parse("pow:1:2", 4, &model) == QLEVY_OK);
    int d = 0;
    CHECK(qlevy_choose_d(model, QLEVY_D_SERIES, 0.01, 1.0, &d) == QLEVY_OK);
    CHECK(d == 100);
    CHECK(qlevy_choose_d(model, QLEVY_D_TAIL_BASIS, 0.01, 1.0, &d) == QLEVY_OK);
    CHECK(d == 70);
    CHECK(qlevy_choose_d(model, QLEVY_D_TAIL_SPECTRUM, 0.01, 1.0, &d) == QLEVY_OK);
    CHECK(d == 40);
    CHECK(qlevy_choose_d(model, QLEVY_D_SERIES, -1.0, 1.0, &d) == QLEVY_ERR_INVALID_ARGUMENT);
    qlevy_model_free(model);
}

TEST_CASE("sampled steps agree with the native library path") {
    qlevy_model* model = nullptr;
    REQUIRE(qlevy_model_parse("pow:1:2", 3, &model) == QLEVY_OK);
    double dw[3];
    double areas[3];
    double integrals[9];
    REQUIRE(qlevy_sample_step(model, 0.01, 2, 8, 42, 5, dw, areas, integrals) == QLEVY_OK);

    const qlevy::CovarianceModel native = qlevy::CovarianceModel::parse("pow:1:2", 3);
    qlevy::RandomStream stream(42, 5);
    const qlevy::WienerIncrement inc = qlevy::sample_increment(native, 0.01, stream);
    const qlevy::LevyAreaSample area = qlevy::sample_area_alg2(native, inc, 8, stream);
    const qlevy::IteratedIntegralMatrix iim = qlevy::assemble(inc, area, native);
    for (int k = 0; k < 3; ++k) CHECK(dw[k] == inc.dw(k));
    for (int p = 0; p < 3; ++p) CHECK(areas[p] == area.values(p));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(integrals[r * 3 + c] == iim.entries(r, c));

    CHECK(qlevy_sample_step(model, 0.01, 3, 8, 42, 5, dw, areas, integrals) ==
          QLEVY_ERR_INVALID_ARGUMENT);
    CHECK(qlevy_sample_step(model, -0.01, 1, 8, 42, 5, dw, areas, integrals) ==
          QLEVY_ERR_INVALID_ARGUMENT);
    qlevy_model_free(model);
}

TEST_CASE("convergence CSV uses the two-call buffer protocol") {
    qlevy_model* model = nullptr;
    REQUIRE(qlevy_model_parse("pow:1:2", 2, &model) == QLEVY_OK);
    const int grid[3] = {1, 4, 16};
    size_t len = 0;
    double slope = 0.0;
    REQUIRE(qlevy_convergence_csv(model, 0.01, 1, grid, 3, 300, 7, 1, nullptr, 0, &len, &slope) ==
            QLEVY_OK);
    CHECK(len > 0);
    CHECK(slope < -0.5);

    std::string csv(len, '\0');
    char tiny[8];
    CHECK(qlevy_convergence_csv(model, 0.01, 1, grid, 3, 300, 7, 1, tiny, sizeof(tiny), &len,
                                nullptr) == QLEVY_ERR_BUFFER_TOO_SMALL);
    REQUIRE(qlevy_convergence_csv(model, 0.01, 1, grid, 3, 300, 7, 1, csv.data(), len + 1, &len,
                                  nullptr) == QLEVY_OK);
    CHECK(csv.rfind("algorithm,K,h,D,N,mse,stderr,analytic,slope_group,seed\n", 0) == 0);
    CHECK(qlevy_convergence_csv(model, 0.01, 1, nullptr, 0, 300, 7, 1, nullptr, 0, &len,
                                nullptr) == QLEVY_ERR_INVALID_ARGUMENT);
    qlevy_model_free(model);
}

TEST_CASE("verification reports run through the C interface") {
    qlevy_model* model = nullptr;
    REQUIRE(qlevy_model_parse("pow:1:2", 2, &model) == QLEVY_OK);
    int pass = 0;
    size_t len = 0;
    REQUIRE(qlevy_moment_report(model, 0.01, 1, 32, 2000, 11, &pass, nullptr, 0, &len) ==
            QLEVY_OK);
    CHECK(pass == 1);
    CHECK(len > 0);
    std::string report(len, '\0');
    REQUIRE(qlevy_moment_report(model, 0.01, 1, 32, 2000, 11, &pass, report.data(), len + 1,
                                &len) == QLEVY_OK);
    CHECK(report.find("pair-identity") != std::string::npos);

    REQUIRE(qlevy_factor_report(model, 0.01, 50, 11, &pass, nullptr, 0, &len) == QLEVY_OK);
    CHECK(pass == 1);
    qlevy_model_free(model);

    // factor check is undefined for K = 1
    REQUIRE(qlevy_model_parse("pow:1:2", 1, &model) == QLEVY_OK);
    CHECK(qlevy_factor_report(model, 0.01, 50, 11, &pass, nullptr, 0, &len) ==
          QLEVY_ERR_INVALID_ARGUMENT);
    qlevy_model_free(model);
}
