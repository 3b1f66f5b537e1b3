#ifndef VALIRON_ERRORS_HPP
#define VALIRON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace valiron {

// Precondition / domain violations. The CLI maps these to exit code 2 with an
// error JSON on stdout; anything else escaping to main is an internal error
// (exit 1).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what_, std::string where_ = {})
        : std::runtime_error(what_), where(std::move(where_)) {}
    std::string where;  // optional location hint (flag name, JSON pointer)
};

// Numeric construction failures that are not the caller's fault a priori but
// indicate the requested object cannot be built (e.g. monotonicity search
// exhausted, phi bracket outside 2^+-1024).
class construction_error : public std::runtime_error {
public:
    explicit construction_error(const std::string& what_)
        : std::runtime_error(what_) {}
};

}  // namespace valiron

#endif
