#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "robust_vdp/stochastic.hpp"

namespace robust_vdp {

inline constexpr std::size_t kDefaultBudget = 1'000'000;

/// Controlled dynamics S_{t+1} = F(t, S_t, a, Z_{t+1}) on a finite state space.
/// Rules without a time apply at every time; a timed rule wins over an untimed one.
struct DynamicsSpec {
    struct Admissible {
        std::optional<int> time;
        std::string state;
        std::vector<std::string> controls;
        friend bool operator==(const Admissible&, const Admissible&) = default;
    };
    struct Transition {
        std::optional<int> time;
        std::string state;
        std::string control;
        std::string branch;  // edge label of the tree
        std::string next;
        friend bool operator==(const Transition&, const Transition&) = default;
    };

    std::vector<std::string> states;
    std::string initial_state;
    std::vector<Admissible> admissible;
    std::vector<Transition> transitions;
    std::map<std::string, Vec> loss;  // terminal state -> loss vector

    friend bool operator==(const DynamicsSpec&, const DynamicsSpec&) = default;
};

/// A strategy given only through its terminal losses. `controls` optionally
/// labels the decision taken at internal nodes (by NodeIndex); strategies
/// sharing labels along a path are indistinguishable up to that point.
/// Unlabelled nodes use the strategy name, so distinct strategies part at the root.
struct TabulatedStrategy {
    std::string name;
    AdaptedVector loss;  // at the horizon
    std::map<NodeIndex, std::string> controls;

    friend bool operator==(const TabulatedStrategy&, const TabulatedStrategy&) = default;
};

struct TabulatedSpec {
    std::vector<TabulatedStrategy> strategies;
    friend bool operator==(const TabulatedSpec&, const TabulatedSpec&) = default;
};

struct EngineOptions {
    std::size_t budget = kDefaultBudget;  // cap on strategies and on selector products
    bool prune = false;                   // drop non-extremal elements of backward sets
    VsupLimits limits;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const EngineOptions& a, const EngineOptions& b) {
        return a.budget == b.budget && a.prune == b.prune && a.limits.max_dim == b.limits.max_dim &&
               a.limits.max_inequalities == b.limits.max_inequalities && a.seed == b.seed;
    }
};

struct ControlledProblem {
    ScenarioTree tree;
    ModelFamily family;
    Cone cone;
    std::variant<DynamicsSpec, TabulatedSpec> spec;
    EngineOptions options;

    std::size_t dim() const noexcept { return cone.dim(); }
    bool tabulated() const noexcept { return std::holds_alternative<TabulatedSpec>(spec); }

    friend bool operator==(const ControlledProblem&, const ControlledProblem&) = default;
};

/// Checks every invariant on the reachable part of the problem: admissible
/// sets nonempty, F and the loss total, dimensions consistent. Throws
/// Error(Validation) with a description of the first violation.
void validate_problem(const ControlledProblem& problem);

}  // namespace robust_vdp
