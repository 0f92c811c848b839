#pragma once

#include <stdexcept>
#include <string>

namespace hcj {

// Exit-code categories used by the CLI: validation failures exit 2,
// numerical-guard failures exit 3, I/O failures exit 4.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

class NumericError : public std::runtime_error {
public:
    NumericError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
    const std::string& code() const {
        static const std::string c = "IoError";
        return c;
    }
};

struct EmptyPhase : ValidationError {
    explicit EmptyPhase(const std::string& what) : ValidationError("EmptyPhase", what) {}
};
struct AsymmetricKernel : ValidationError {
    explicit AsymmetricKernel(const std::string& what) : ValidationError("AsymmetricKernel", what) {}
};
struct UnboundedContrast : ValidationError {
    explicit UnboundedContrast(const std::string& what) : ValidationError("UnboundedContrast", what) {}
};
struct AsymmetricContrast : ValidationError {
    explicit AsymmetricContrast(const std::string& what) : ValidationError("AsymmetricContrast", what) {}
};
struct DisconnectedFastPhase : ValidationError {
    explicit DisconnectedFastPhase(const std::string& what)
        : ValidationError("DisconnectedFastPhase", what) {}
};

struct CompatibilityViolated : NumericError {
    explicit CompatibilityViolated(const std::string& what)
        : NumericError("CompatibilityViolated", what) {}
};
struct SingularSystem : NumericError {
    explicit SingularSystem(const std::string& what) : NumericError("SingularSystem", what) {}
};
struct ThetaMismatch : NumericError {
    explicit ThetaMismatch(const std::string& what) : NumericError("ThetaMismatch", what) {}
};
struct StepBudgetExceeded : NumericError {
    explicit StepBudgetExceeded(const std::string& what)
        : NumericError("StepBudgetExceeded", what) {}
};
struct PerronFailure : NumericError {
    explicit PerronFailure(const std::string& what) : NumericError("PerronFailure", what) {}
};
struct ConvolutionGridTooCoarse : NumericError {
    explicit ConvolutionGridTooCoarse(const std::string& what)
        : NumericError("ConvolutionGridTooCoarse", what) {}
};
struct QuadratureUnderResolved : NumericError {
    explicit QuadratureUnderResolved(const std::string& what)
        : NumericError("QuadratureUnderResolved", what) {}
};
struct SampleSizeTooSmall : NumericError {
    explicit SampleSizeTooSmall(const std::string& what)
        : NumericError("SampleSizeTooSmall", what) {}
};

} // namespace hcj
