#ifndef MPD_ERRORS_HPP
#define MPD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mpd {

// Non-finite value produced while stepping a path. Carries the sub-step index.
class NumericalBlowup : public std::runtime_error {
public:
    NumericalBlowup(const std::string& what, long step_index)
        : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
          step(step_index) {}
    long step;
};

// A positivity-constrained state left its domain. Samplers treat this as a
// rejection; everything else propagates it.
class DomainExit : public std::runtime_error {
public:
    DomainExit(const std::string& what, long step_index)
        : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
          step(step_index) {}
    long step;
};

// Invalid evaluation point for a density or kernel (log of non-positive, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad time grid request.
class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Importance weights collapsed (effective sample size below usable floor).
class DegenerateWeights : public std::runtime_error {
public:
    explicit DegenerateWeights(double ess_)
        : std::runtime_error("importance weights degenerate, ESS = " + std::to_string(ess_)),
          ess(ess_) {}
    double ess;
};

// Rejection loop hit its proposal cap without accepting.
class MaxProposalsExceeded : public std::runtime_error {
public:
    explicit MaxProposalsExceeded(long cap)
        : std::runtime_error("rejection sampler exceeded " + std::to_string(cap) + " proposals") {}
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// File parsing problems, with a 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ")"), line(line_) {}
    long line;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateSample : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mpd

#endif
