#pragma once

#include <stdexcept>
#include <string>

namespace cmfiber {

enum class errc {
    invalid_argument,   // malformed input, violated precondition
    hypothesis,         // a global hypothesis (H.1-H.3, admissibility) fails
    resource_limit,     // enumeration cap or size guard exceeded
    internal,           // an invariant of the library itself was violated
};

class error : public std::runtime_error {
    errc code_;

public:
    error(errc code, std::string const & what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }
};

[[noreturn]] inline void throw_invalid(std::string const & what)
{
    throw error(errc::invalid_argument, what);
}

[[noreturn]] inline void throw_resource(std::string const & what)
{
    throw error(errc::resource_limit, what);
}

[[noreturn]] inline void throw_internal(std::string const & what)
{
    throw error(errc::internal, "internal invariant violated: " + what);
}

} // namespace cmfiber
