#pragma once

#include <cstddef>
#include <vector>

#include "robust_vdp/rational.hpp"

namespace robust_vdp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Scalar> x;  // one value per user variable (free variables recombined)
    Scalar objective;
};

/// Small dense linear program over the rationals, solved by the two-phase
/// simplex method with Bland's anti-cycling rule. Intended for the handful of
/// variables and constraints that cone membership and suprema need.
class LinearProgram {
public:
    enum class Sense { LessEq, GreaterEq, Equal };

    /// Returns the variable index. Non-free variables are constrained x >= 0.
    std::size_t add_variable(bool free = false);
    std::size_t add_variables(std::size_t count, bool free = false);
    std::size_t num_variables() const noexcept { return free_.size(); }

    /// `coeffs` has one entry per variable; shorter vectors are zero-padded.
    void add_constraint(std::vector<Scalar> coeffs, Sense sense, Scalar rhs);

    /// Objective to minimize; shorter vectors are zero-padded.
    void set_objective(std::vector<Scalar> cost);

    LpResult minimize() const;
    LpResult find_feasible() const;

private:
    struct Row {
        std::vector<Scalar> coeffs;
        Sense sense;
        Scalar rhs;
    };

    LpResult solve(bool with_objective) const;

    std::vector<bool> free_;
    std::vector<Row> rows_;
    std::vector<Scalar> cost_;
};

}  // namespace robust_vdp
