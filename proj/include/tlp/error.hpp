#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

/// Base of every error raised by the library. `kind()` is a stable,
/// machine-readable tag that the CLI forwards in its error JSON.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind))
    {
    }

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct LookupError : Error
{
    explicit LookupError(const std::string& what) : Error("lookup", what) {}
};

struct InfeasibleError : Error
{
    explicit InfeasibleError(const std::string& what) : Error("infeasible", what) {}
};

struct ParameterError : Error
{
    explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

struct SingularMatrixError : Error
{
    explicit SingularMatrixError(const std::string& what) : Error("singular", what) {}
};

struct CalibrationError : Error
{
    explicit CalibrationError(const std::string& what) : Error("calibration", what) {}
};

struct SizeError : Error
{
    explicit SizeError(const std::string& what) : Error("size", what) {}
};

struct IoError : Error
{
    explicit IoError(const std::string& what) : Error("io", what) {}
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace tlp
