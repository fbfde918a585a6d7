#include "qlevy.h"

#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlevy/assembly.hpp"
#include "qlevy/covariance.hpp"
#include "qlevy/errors.hpp"
#include "qlevy/harness.hpp"
#include "qlevy/levyarea.hpp"

struct qlevy_model {
    qlevy::CovarianceModel impl;
};

namespace {

template <typename Fn>
qlevy_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const qlevy::spectrum_error&) {
        return QLEVY_ERR_SPECTRUM;
    } catch (const qlevy::capacity_error&) {
        return QLEVY_ERR_CAPACITY;
    } catch (const qlevy::not_psd_error&) {
        return QLEVY_ERR_NOT_PSD;
    } catch (const std::invalid_argument&) {
        return QLEVY_ERR_INVALID_ARGUMENT;
    } catch (const std::out_of_range&) {
        return QLEVY_ERR_INVALID_ARGUMENT;
    } catch (...) {
        return QLEVY_ERR_INTERNAL;
    }
}

qlevy::Algorithm to_algorithm(int algorithm) {
    if (algorithm == 1) return qlevy::Algorithm::truncated_series;
    if (algorithm == 2) return qlevy::Algorithm::gaussian_tail;
    throw std::invalid_argument("algorithm must be 1 or 2");
}

/* Copies text into the caller's buffer under the two-call length protocol. */
qlevy_status emit_text(const std::string& text, char* buffer, size_t buffer_size, size_t* len) {
    if (len != nullptr) *len = text.size();
    if (buffer == nullptr) return QLEVY_OK;
    if (buffer_size < text.size() + 1) return QLEVY_ERR_BUFFER_TOO_SMALL;
    std::memcpy(buffer, text.data(), text.size());
    buffer[text.size()] = '\0';
    return QLEVY_OK;
}

} // namespace

extern "C" {

const char* qlevy_status_string(qlevy_status status) {
    switch (status) {
        case QLEVY_OK: return "ok";
        case QLEVY_ERR_INVALID_ARGUMENT: return "invalid argument";
        case QLEVY_ERR_SPECTRUM: return "invalid covariance spectrum";
        case QLEVY_ERR_CAPACITY: return "basis count exceeds capacity";
        case QLEVY_ERR_NOT_PSD: return "matrix is not positive semidefinite";
        case QLEVY_ERR_BUFFER_TOO_SMALL: return "output buffer too small";
        case QLEVY_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

qlevy_status qlevy_model_parse(const char* spec, int basis_count, qlevy_model** out) {
    if (spec == nullptr || out == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto* handle = new qlevy_model{qlevy::CovarianceModel::parse(spec, basis_count)};
        *out = handle;
        return QLEVY_OK;
    });
}

qlevy_status qlevy_model_from_list(const double* eigenvalues, int basis_count,
                                   qlevy_model** out) {
    if (eigenvalues == nullptr || out == nullptr || basis_count < 1)
        return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::vector<double> values(eigenvalues, eigenvalues + basis_count);
        auto* handle =
            new qlevy_model{qlevy::CovarianceModel::explicit_spectrum(std::move(values))};
        *out = handle;
        return QLEVY_OK;
    });
}

void qlevy_model_free(qlevy_model* model) { delete model; }

int qlevy_model_basis_count(const qlevy_model* model) {
    return model == nullptr ? 0 : model->impl.basis_count();
}

qlevy_status qlevy_model_eigenvalue(const qlevy_model* model, int j, double* out) {
    if (model == nullptr || out == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = model->impl.eigenvalue(j);
        return QLEVY_OK;
    });
}

double qlevy_model_trace(const qlevy_model* model) {
    return model == nullptr ? 0.0 : model->impl.trace();
}

int qlevy_pair_count(int basis_count) {
    return basis_count < 2 ? 0 : basis_count * (basis_count - 1) / 2;
}

qlevy_status qlevy_pair_at(int basis_count, int position, int* i, int* j) {
    if (i == nullptr || j == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto [a, b] = qlevy::pair_index_map(basis_count).pair(position);
        *i = a;
        *j = b;
        return QLEVY_OK;
    });
}

qlevy_status qlevy_choose_d(const qlevy_model* model, qlevy_d_rule rule, double h, double gamma,
                            int* out) {
    if (model == nullptr || out == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        qlevy::TruncationRule r;
        switch (rule) {
            case QLEVY_D_SERIES: r = qlevy::TruncationRule::alg1; break;
            case QLEVY_D_TAIL_BASIS: r = qlevy::TruncationRule::alg2_basis; break;
            case QLEVY_D_TAIL_SPECTRUM: r = qlevy::TruncationRule::alg2_spectrum; break;
            default: throw std::invalid_argument("unknown truncation rule");
        }
        *out = qlevy::choose_truncation(r, h, gamma, model->impl, model->impl.basis_count());
        return QLEVY_OK;
    });
}

qlevy_status qlevy_sample_step(const qlevy_model* model, double h, int algorithm, int truncation,
                               uint64_t seed, uint64_t replicate, double* dw, double* areas,
                               double* integrals) {
    if (model == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const qlevy::Algorithm algo = to_algorithm(algorithm);
        qlevy::RandomStream stream(seed, replicate);
        const qlevy::WienerIncrement inc = qlevy::sample_increment(model->impl, h, stream);
        const qlevy::LevyAreaSample area =
            algo == qlevy::Algorithm::truncated_series
                ? qlevy::sample_area_alg1(model->impl, inc, truncation, stream)
                : qlevy::sample_area_alg2(model->impl, inc, truncation, stream);
        const int k = model->impl.basis_count();
        if (dw != nullptr)
            for (int idx = 0; idx < k; ++idx) dw[idx] = inc.dw(idx);
        if (areas != nullptr)
            for (int p = 0; p < area.map.pair_count(); ++p) areas[p] = area.values(p);
        if (integrals != nullptr) {
            const qlevy::IteratedIntegralMatrix iim = qlevy::assemble(inc, area, model->impl);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) integrals[r * k + c] = iim.entries(r, c);
        }
        return QLEVY_OK;
    });
}

qlevy_status qlevy_convergence_csv(const qlevy_model* model, double h, int algorithm,
                                   const int* d_grid, int d_count, int replicates, uint64_t seed,
                                   int workers, char* buffer, size_t buffer_size, size_t* csv_len,
                                   double* slope) {
    if (model == nullptr || d_grid == nullptr || d_count < 1) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const qlevy::ConvergenceReport report =
            qlevy::convergence_study(model->impl, h, to_algorithm(algorithm),
                                     std::vector<int>(d_grid, d_grid + d_count), replicates, seed,
                                     workers);
        if (slope != nullptr) *slope = report.slope;
        return emit_text(qlevy::convergence_csv(report), buffer, buffer_size, csv_len);
    });
}

qlevy_status qlevy_moment_report(const qlevy_model* model, double h, int algorithm,
                                 int truncation, int replicates, uint64_t seed, int* pass,
                                 char* buffer, size_t buffer_size, size_t* report_len) {
    if (model == nullptr || pass == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const qlevy::MomentReport report = qlevy::moment_suite(
            model->impl, h, truncation, replicates, seed, to_algorithm(algorithm));
        *pass = report.pass ? 1 : 0;
        std::string text;
        for (const auto& check : report.checks) {
            text += check.name;
            text += " observed=" + qlevy::format_double(check.observed);
            text += " expected=" + qlevy::format_double(check.expected);
            text += " z=" + qlevy::format_double(check.z);
            text += check.pass ? " pass\n" : " FAIL\n";
        }
        return emit_text(text, buffer, buffer_size, report_len);
    });
}

qlevy_status qlevy_factor_report(const qlevy_model* model, double h, int increments,
                                 uint64_t seed, int* pass, char* buffer, size_t buffer_size,
                                 size_t* report_len) {
    if (model == nullptr || pass == nullptr) return QLEVY_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        if (increments < 1) throw std::invalid_argument("need increments >= 1");
        const int k = model->impl.basis_count();
        if (k < 2) throw std::invalid_argument("factor check needs K >= 2");
        const Eigen::VectorXd& eta = model->impl.eigenvalues();
        const double lambda_floor = 2.0 * eta(k - 2) * eta(k - 1);
        double max_resid = 0.0;
        double min_lambda = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < increments; ++rep) {
            qlevy::RandomStream stream(seed, static_cast<std::uint64_t>(rep));
            const qlevy::WienerIncrement inc = qlevy::sample_increment(model->impl, h, stream);
            const Eigen::MatrixXd sigma = qlevy::sigma_infinity(model->impl, inc);
            const Eigen::MatrixXd s = qlevy::sqrt_sigma_infinity(model->impl, inc);
            max_resid = std::max(max_resid,
                                 (s * s.transpose() - sigma).norm() / sigma.norm());
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                                    Eigen::EigenvaluesOnly);
            min_lambda = std::min(min_lambda, es.eigenvalues().minCoeff());
        }
        const bool resid_ok = max_resid <= 1e-10;
        const bool lambda_ok = min_lambda >= lambda_floor;
        *pass = (resid_ok && lambda_ok) ? 1 : 0;
        std::string text;
        text += "factor-residual max=" + qlevy::format_double(max_resid) +
                (resid_ok ? " pass\n" : " FAIL\n");
        text += "lambda-min observed=" + qlevy::format_double(min_lambda) +
                " floor=" + qlevy::format_double(lambda_floor) +
                (lambda_ok ? " pass\n" : " FAIL\n");
        return emit_text(text, buffer, buffer_size, report_len);
    });
}

} // extern "C"
