#pragma once

#include <stdexcept>
#include <string>

namespace nfnls {

/// Invalid input or a computation that cannot produce a meaningful value.
/// The CLI maps every DomainError to exit code 1.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what, std::string kind = "domain_error")
        : std::runtime_error(what), kind_(std::move(kind)) {}

    /// Short machine-readable tag, e.g. "size_error".
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Requested enumeration exceeds the configured complexity guard.
class SizeError : public DomainError {
public:
    explicit SizeError(const std::string& what) : DomainError(what, "size_error") {}
};

/// Time integration left the representable range (truncation blow-up).
class IntegrationError : public DomainError {
public:
    explicit IntegrationError(const std::string& what) : DomainError(what, "integration_error") {}
};

/// Picard iteration did not reach the requested tolerance.
class ConvergenceError : public DomainError {
public:
    explicit ConvergenceError(const std::string& what) : DomainError(what, "convergence_error") {}
};

/// Time grid too coarse to resolve the phases an identity check depends on.
class GridTooCoarse : public DomainError {
public:
    explicit GridTooCoarse(const std::string& what) : DomainError(what, "grid_too_coarse") {}
};

}  // namespace nfnls
