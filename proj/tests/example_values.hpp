#pragma once

#include <array>
#include <map>
#include <string>

// Frozen reference values for the bundled binomial instances, produced by
// tools/oracle.py (fractions and brute force, no shared code).
// Per model: E_1 at u, E_1 at d, E_0.

namespace rvt::example {

using Row = std::array<const char*, 3>;
using Table = std::map<std::string, Row>;

inline const Table& phi_table() {
    static const Table t{
        {"theta1", {"(4,4)", "(4,4)", "(4,4)"}},   {"theta2", {"(6,2)", "(2,2)", "(4,2)"}},
        {"theta3", {"(6,2)", "(4,4)", "(5,3)"}},   {"theta4", {"(4,4)", "(2,2)", "(3,3)"}},
        {"theta5", {"(4,4)", "(4,4)", "(4,4)"}},   {"theta6", {"(4,4)", "(2,2)", "(5/2,5/2)"}},
        {"theta7", {"(6,2)", "(4,4)", "(9/2,7/2)"}}, {"theta8", {"(6,2)", "(2,2)", "(3,2)"}},
    };
    return t;
}

inline const Table& psi_table() {
    static const Table t{
        {"theta1", {"(0,4)", "(6,4)", "(9/2,4)"}}, {"theta2", {"(0,6)", "(6,2)", "(3,4)"}},
        {"theta3", {"(0,6)", "(6,4)", "(3,5)"}},   {"theta4", {"(0,4)", "(6,2)", "(3,3)"}},
        {"theta5", {"(0,4)", "(6,4)", "(3,4)"}},   {"theta6", {"(0,4)", "(6,2)", "(9/2,5/2)"}},
        {"theta7", {"(0,6)", "(6,4)", "(9/2,9/2)"}}, {"theta8", {"(0,6)", "(6,2)", "(9/2,3)"}},
    };
    return t;
}

// Time-1 suprema (u, d) and nested time-0 suprema; identical for both families.
inline constexpr std::array<const char*, 2> kPhiSupT1{"(6,4)", "(4,4)"};
inline constexpr std::array<const char*, 2> kPsiSupT1{"(0,6)", "(6,4)"};
inline constexpr const char* kPhiNested = "(5,4)";
inline constexpr const char* kPsiNested = "(9/2,5)";

inline constexpr const char* kV0Theta = "{(5,4), (9/2,5)}";
inline constexpr const char* kV0Theta0 = "{(4,4), (9/2,4)}";
inline constexpr const char* kB0Both = "{(5,4), (9/2,5)}";

}  // namespace rvt::example
