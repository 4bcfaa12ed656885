#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groupsim {

/// Base class for every error raised by the library. The CLI maps the three
/// families below onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that violates a documented invariant (exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Failure talking to, or understanding, the reply source (exit code 3).
class OracleError : public Error {
public:
    using Error::Error;
};

/// Filesystem trouble (exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

class MalformedEvent : public ValidationError {
public:
    MalformedEvent(std::string field, std::string reason)
        : ValidationError("malformed event: " + field + ": " + reason),
          field_(std::move(field)),
          reason_(std::move(reason)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

class EmptyPopulation : public ValidationError {
public:
    EmptyPopulation() : ValidationError("total population is zero") {}
};

class MalformedTree : public ValidationError {
public:
    MalformedTree(std::size_t line, std::string reason)
        : ValidationError("malformed group tree at line " + std::to_string(line) + ": " +
                          reason),
          line_(line),
          reason_(std::move(reason)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class MissingEntry : public ValidationError {
public:
    MissingEntry(const std::string& country, const std::string& domain)
        : ValidationError("no group tree for (" + country + ", " + domain + ")") {}
};

class LayerOutOfRange : public ValidationError {
public:
    LayerOutOfRange(int layer, int depth)
        : ValidationError("layer " + std::to_string(layer) + " outside 1.." +
                          std::to_string(depth)),
          layer_(layer),
          depth_(depth) {}

    int layer() const noexcept { return layer_; }
    int depth() const noexcept { return depth_; }

private:
    int layer_;
    int depth_;
};

class DuplicateGroup : public ValidationError {
public:
    explicit DuplicateGroup(std::string name)
        : ValidationError("duplicate group: " + name), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class MissingSlot : public OracleError {
public:
    explicit MissingSlot(std::string name)
        : OracleError("missing prompt slot: {" + name + "}"), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class OracleUnavailable : public OracleError {
public:
    using OracleError::OracleError;
};

class UnparseableReply : public OracleError {
public:
    using OracleError::OracleError;
};

class IllegalAction : public OracleError {
public:
    explicit IllegalAction(std::string name)
        : OracleError("illegal action: " + name), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NegativeCount : public UnparseableReply {
public:
    explicit NegativeCount(const std::string& field)
        : UnparseableReply("negative count for " + field) {}
};

class MixedDates : public ValidationError {
public:
    MixedDates() : ValidationError("engagements span more than one day") {}
};

class NoOptions : public ValidationError {
public:
    NoOptions() : ValidationError("prediction needs at least one option") {}
};

class DuplicateSeed : public ValidationError {
public:
    explicit DuplicateSeed(unsigned long long seed)
        : ValidationError("seed listed twice: " + std::to_string(seed)) {}
};

class LengthMismatch : public ValidationError {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : ValidationError("series lengths differ: " + std::to_string(a) + " vs " +
                          std::to_string(b)) {}
};

class EmptyList : public ValidationError {
public:
    EmptyList() : ValidationError("empty list") {}
};

class TooFewPairs : public ValidationError {
public:
    TooFewPairs() : ValidationError("paired t-test needs at least two pairs") {}
};

class TooFewReplicates : public ValidationError {
public:
    TooFewReplicates() : ValidationError("z-scores need at least two replicates") {}
};

class AllZeroActual : public ValidationError {
public:
    AllZeroActual() : ValidationError("every actual value is zero") {}
};

}  // namespace groupsim
