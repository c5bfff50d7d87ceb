#pragma once

#include <stdexcept>
#include <string>

namespace oppenheim {

/// Argument outside the mathematical domain of an operation (k < phi(h), u < 1, x outside (0,1)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Conditional digit law does not carry total mass 1.
class ImproperModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sampled digit exceeded the configured cap, or a run lies outside the
/// feasibility envelope of the exact backend.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lattice operation requested on a model/lattice pair that has not passed
/// the integrality certification.
class CertificationMissing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration (model file, CLI flags, verify config).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

} // namespace oppenheim
