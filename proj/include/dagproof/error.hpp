#ifndef DAGPROOF_ERROR_HPP
#define DAGPROOF_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dagproof {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed formula text. `position` is the 0-based offset of the offending character.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Input that is well-formed text but violates a data-model contract
/// (dangling ids, bad arity, a rejected rule for the requested operation).
class InputError : public Error {
public:
    using Error::Error;
};

/// A budget (depth, node count, weight bound) was exhausted.
class ResourceLimit : public Error {
public:
    ResourceLimit(const std::string& what, std::string limit)
        : Error(what), limit_(std::move(limit)) {}

    const std::string& limit() const noexcept { return limit_; }

private:
    std::string limit_;
};

}

#endif
