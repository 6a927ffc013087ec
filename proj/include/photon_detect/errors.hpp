#pragma once

#include <stdexcept>
#include <string>

namespace photon_detect {

/// Base for every error raised by the library. `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind { Config, Index, Shape, Domain, Usage, Lookup, Numeric, OutcomeImpossible, IO };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(Kind::Config, "config error: " + w) {}
};
struct IndexError : Error {
    explicit IndexError(const std::string& w) : Error(Kind::Index, "index error: " + w) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& w) : Error(Kind::Shape, "shape error: " + w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(Kind::Domain, "domain error: " + w) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& w) : Error(Kind::Usage, "usage error: " + w) {}
};
struct LookupError : Error {
    explicit LookupError(const std::string& w) : Error(Kind::Lookup, "lookup error: " + w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(Kind::Numeric, "numeric error: " + w) {}
};
struct IOError : Error {
    explicit IOError(const std::string& w) : Error(Kind::IO, "I/O error: " + w) {}
};

/// Requested a post-measurement state for an outcome whose probability is (numerically) zero.
struct OutcomeImpossible : Error {
    explicit OutcomeImpossible(double p)
        : Error(Kind::OutcomeImpossible, "outcome impossible: p = " + std::to_string(p)), probability(p) {}
    double probability;
};

} // namespace photon_detect
