#ifndef QLEVY_ERRORS_HPP
#define QLEVY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qlevy {

/// Spectrum fails the model preconditions (nonpositive or increasing eigenvalues).
class spectrum_error : public std::invalid_argument {
public:
    explicit spectrum_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested basis count exceeds the dense L x L storage limit.
class capacity_error : public std::length_error {
public:
    explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

/// Matrix has an eigenvalue below the negative tolerance band.
class not_psd_error : public std::runtime_error {
public:
    explicit not_psd_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qlevy

#endif
