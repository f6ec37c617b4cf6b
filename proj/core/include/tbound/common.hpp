#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tbound {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A bound on a risk, in raw loss units plus the [0,1] presentation value.
///
/// `raw` is the formula's value; `clamped` is min(raw / loss_bound, 1).
/// Curves and comparisons use `raw` so crossovers above 1 stay visible.
/// `valid` is false when the bound's side conditions were not met and the
/// value was replaced by the trivial bound.
struct BoundValue {
    double raw = 0.0;
    double clamped = 0.0;
    std::string name;
    bool valid = true;

    static BoundValue make(std::string name, double raw, double loss_bound = 1.0)
    {
        BoundValue v;
        v.raw = raw;
        v.clamped = std::min(raw / loss_bound, 1.0);
        v.name = std::move(name);
        return v;
    }
};

inline void require(bool condition, const char* message)
{
    if (!condition)
        throw DomainError(message);
}

}  // namespace tbound
