#ifndef QLEVY_COVARIANCE_HPP
#define QLEVY_COVARIANCE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlevy/rng.hpp"

namespace qlevy {

/// Spectrum {eta_j} of the trace-class covariance operator Q, either as an
/// explicit positive nonincreasing list or as the power law eta_j = c*j^-rho.
class CovarianceModel {
public:
    static CovarianceModel explicit_spectrum(std::vector<double> eigenvalues,
                                             bool allow_increasing = false);
    /// rho <= 1 is rejected unless allow_cylindrical is set (the spectrum is
    /// then not trace class; eta_j = 1 covers the cylindrical case).
    static CovarianceModel power_law(double scale, double decay, int basis_count,
                                     bool allow_cylindrical = false);
    /// Parses "pow:<c>:<rho>" or "list:<v1>,<v2>,...". For a list spec the
    /// length must equal basis_count.
    static CovarianceModel parse(const std::string& spec, int basis_count);

    int basis_count() const { return static_cast<int>(eigenvalues_.size()); }
    /// eta_j for 1-based j. Power-law models extend past basis_count.
    double eigenvalue(int j) const;
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    double trace() const { return eigenvalues_.sum(); }
    double min_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }
    bool is_power_law() const { return power_law_; }

    /// Same spectrum restricted to the first k eigenvalues.
    CovarianceModel truncated(int k) const;

private:
    CovarianceModel() = default;
    Eigen::VectorXd eigenvalues_;
    bool power_law_ = false;
    double scale_ = 0.0;
    double decay_ = 0.0;
};

/// One step's Q-Wiener increment coefficients: dw_j = sqrt(h*eta_j) * v_j.
struct WienerIncrement {
    int basis_count;
    double h;
    Eigen::VectorXd v;  // underlying standard normals
    Eigen::VectorXd dw; // increment coefficients
};

WienerIncrement sample_increment(const CovarianceModel& model, double h, RandomStream& stream);

/// Builds the increment from given standard normals (test hook).
WienerIncrement increment_from_normals(const CovarianceModel& model, double h,
                                       const Eigen::VectorXd& v);

/// sup of eta_j over the discarded band K < j <= J; 0 for an empty band.
double projection_tail_sup(const CovarianceModel& model, int k, int j);

} // namespace qlevy

#endif
