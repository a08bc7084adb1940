#pragma once

#include <stdexcept>
#include <string>

namespace hyperswitch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// core_model
class NotHyperbolic : public Error { using Error::Error; };
class BoundaryNotReducible : public Error { using Error::Error; };
class BadPartition : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// densela
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};
class KernelMismatch : public Error { using Error::Error; };

// certifier
class PreconditionViolated : public Error { using Error::Error; };
class CommutationViolated : public Error { using Error::Error; };
class WrongSignStructure : public Error { using Error::Error; };
class VariantPreconditionViolated : public Error { using Error::Error; };
class CertificateMismatch : public Error { using Error::Error; };

// simulator
class CflViolation : public Error { using Error::Error; };
class DegenerateWindow : public Error { using Error::Error; };

// io
class ParseError : public Error { using Error::Error; };

}  // namespace hyperswitch
