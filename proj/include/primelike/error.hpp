#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace primelike {

// Precondition violated by the caller (value outside an operation's domain).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or unreadable external input. line() is 0 when not line-oriented.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace primelike
