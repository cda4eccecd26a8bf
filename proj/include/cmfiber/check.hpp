#pragma once

#include <string>
#include <vector>

namespace cmfiber {

// One verified identity: what was expected, what was computed.
struct Check {
    std::string name;
    bool pass = false;
    std::string expected;
    std::string actual;
};

inline bool all_pass(std::vector<Check> const & checks)
{
    for (auto const & c : checks)
        if (!c.pass)
            return false;
    return true;
}

} // namespace cmfiber
