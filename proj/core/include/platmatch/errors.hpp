#pragma once

#include <stdexcept>
#include <string>

namespace platmatch {

enum class errc {
    input,        // unknown id, value outside a support, malformed argument
    validation,   // scenario or spec invariant violated at load
    structure,    // a solver/proposition precondition does not hold
    size,         // enumeration cap exceeded
    incentive,    // allocation not implementable (non-monotone)
    numeric,      // non-finite evaluation
    consistency,  // two computation routes disagree
};

const char* to_string(errc kind);

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

}  // namespace platmatch
