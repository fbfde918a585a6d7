#include "qlevy/covariance.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qlevy/errors.hpp"

namespace qlevy {

CovarianceModel CovarianceModel::explicit_spectrum(std::vector<double> eigenvalues,
                                                   bool allow_increasing) {
    if (eigenvalues.empty()) throw spectrum_error("spectrum must contain at least one eigenvalue");
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (!(eigenvalues[i] > 0.0))
            throw spectrum_error("spectrum eigenvalues must be positive");
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1] && !allow_increasing)
            throw spectrum_error("spectrum must be nonincreasing");
    }
    CovarianceModel m;
    m.eigenvalues_ = Eigen::Map<Eigen::VectorXd>(eigenvalues.data(),
                                                 static_cast<Eigen::Index>(eigenvalues.size()));
    return m;
}

CovarianceModel CovarianceModel::power_law(double scale, double decay, int basis_count,
                                           bool allow_cylindrical) {
    if (basis_count < 1) throw std::invalid_argument("basis count must be >= 1");
    if (!(scale > 0.0)) throw spectrum_error("power-law scale must be positive");
    if (!(decay > 1.0) && !allow_cylindrical)
        throw spectrum_error("power-law decay must exceed 1 for a trace-class spectrum");
    if (decay < 0.0) throw spectrum_error("power-law decay must be nonnegative");
    CovarianceModel m;
    m.power_law_ = true;
    m.scale_ = scale;
    m.decay_ = decay;
    m.eigenvalues_.resize(basis_count);
    for (int j = 1; j <= basis_count; ++j)
        m.eigenvalues_(j - 1) = scale * std::pow(static_cast<double>(j), -decay);
    return m;
}

CovarianceModel CovarianceModel::parse(const std::string& spec, int basis_count) {
    if (spec.rfind("pow:", 0) == 0) {
        std::string body = spec.substr(4);
        bool cylindrical = false;
        // "pow:<c>:<rho>:cyl" marks a deliberate non-trace-class study
        if (body.size() > 4 && body.compare(body.size() - 4, 4, ":cyl") == 0) {
            cylindrical = true;
            body.resize(body.size() - 4);
        }
        std::istringstream is(body);
        double c = 0.0;
        double rho = 0.0;
        char sep = 0;
        if (!(is >> c >> sep >> rho) || sep != ':')
            throw std::invalid_argument("malformed power-law spectrum: " + spec);
        return power_law(c, rho, basis_count, cylindrical);
    }
    if (spec.rfind("list:", 0) == 0) {
        std::vector<double> eta;
        std::istringstream is(spec.substr(5));
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) throw std::invalid_argument("malformed spectrum list: " + spec);
            eta.push_back(std::stod(tok));
        }
        if (static_cast<int>(eta.size()) != basis_count) {
            throw std::invalid_argument("spectrum length " + std::to_string(eta.size()) +
                                        " != K = " + std::to_string(basis_count));
        }
        return explicit_spectrum(std::move(eta));
    }
    throw std::invalid_argument("spectrum spec must start with 'pow:' or 'list:'");
}

double CovarianceModel::eigenvalue(int j) const {
    if (j < 1) throw std::invalid_argument("eigenvalue index must be >= 1");
    if (j <= basis_count()) return eigenvalues_(j - 1);
    if (!power_law_)
        throw std::invalid_argument("explicit spectrum has no eigenvalue beyond its list");
    return scale_ * std::pow(static_cast<double>(j), -decay_);
}

CovarianceModel CovarianceModel::truncated(int k) const {
    if (k < 1 || k > basis_count())
        throw std::invalid_argument("truncation level out of range");
    CovarianceModel m(*this);
    m.eigenvalues_ = eigenvalues_.head(k).eval();
    return m;
}

WienerIncrement sample_increment(const CovarianceModel& model, double h, RandomStream& stream) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    Eigen::VectorXd v(model.basis_count());
    stream.normals({v.data(), static_cast<std::size_t>(v.size())});
    return increment_from_normals(model, h, v);
}

WienerIncrement increment_from_normals(const CovarianceModel& model, double h,
                                       const Eigen::VectorXd& v) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (v.size() != model.basis_count())
        throw std::invalid_argument("normal vector length mismatch");
    WienerIncrement inc{model.basis_count(), h, v, Eigen::VectorXd(v.size())};
    for (Eigen::Index j = 0; j < v.size(); ++j)
        inc.dw(j) = std::sqrt(h * model.eigenvalues()(j)) * v(j);
    return inc;
}

double projection_tail_sup(const CovarianceModel& model, int k, int j) {
    if (j < k) throw std::invalid_argument("full level J must be >= truncation level K");
    if (j == k) return 0.0;
    // nonincreasing spectrum: the sup over the band is its first element
    return model.eigenvalue(k + 1);
}

} // namespace qlevy
