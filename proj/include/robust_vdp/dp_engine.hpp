#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "robust_vdp/problem.hpp"

namespace robust_vdp {

/// One decision of a strategy: the control used at `node` when the induced state is `state`.
struct Choice {
    NodeIndex node = 0;
    std::string state;
    std::string control;

    friend bool operator==(const Choice&, const Choice&) = default;
};

/// Adapted strategy from (start node, start state) to the horizon, one choice
/// per reachable (node, state) pair in depth-first order.
struct Strategy {
    NodeIndex start = 0;
    std::string start_state;
    std::vector<Choice> choices;
    std::string name;  // tabulated strategies carry their table name

    std::optional<std::string> control_at(NodeIndex node, const std::string& state) const;
    /// Table name when set, else "node:control" pairs.
    std::string describe(const ScenarioTree& tree) const;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Value set at one (node, state) pair.
struct LocalValueSet {
    NodeIndex node = 0;
    std::string state;
    VectorSet elements;
    std::vector<std::string> provenance;  // parallel to elements (first generator kept)
};

/// Value sets at time t, one per reachable (node, state) pair. The set of
/// adapted vectors for a given state assignment is the product of the locals.
struct ValueSet {
    int time = 0;
    std::vector<LocalValueSet> locals;

    const LocalValueSet* find(NodeIndex node, const std::string& state) const;
    const LocalValueSet& at(NodeIndex node, const std::string& state) const;
    std::size_t total_elements() const;

    /// Elements as AdaptedVectors given one state per time-t node (by position).
    std::vector<AdaptedVector> adapted_elements(const ScenarioTree& tree, const std::vector<std::string>& states,
                                                std::size_t budget = kDefaultBudget) const;
};

/// Compiled transition structure shared by both problem modes. Tabulated
/// problems use states "{a,b,...}" naming the strategies still consistent
/// with the controls observed so far.
class ControlSystem {
public:
    explicit ControlSystem(const ControlledProblem& problem);

    const ControlledProblem& problem() const noexcept { return *problem_; }
    const std::string& initial_state() const noexcept { return initial_; }
    /// Throws Error(Validation) when no rule applies or the set is empty.
    std::vector<std::string> controls(NodeIndex node, const std::string& state) const;
    std::string next_state(NodeIndex node, const std::string& state, const std::string& control,
                           NodeIndex child) const;
    Vec loss(NodeIndex leaf, const std::string& state) const;

    /// Reachable (node, state) pairs at time t, breadth-first discovery order.
    const std::vector<std::pair<NodeIndex, std::string>>& reachable(int t) const;

    /// Tabulated mode: indices of the strategies encoded by a state.
    std::vector<std::size_t> members(const std::string& state) const;

private:
    using RuleKey = std::pair<int, std::string>;  // time -1 matches every time
    using TransitionKey = std::tuple<int, std::string, std::string, std::string>;

    void build_dynamics(const DynamicsSpec& spec);
    void build_tabulated(const TabulatedSpec& spec);
    void explore();
    std::string encode(const std::vector<std::size_t>& members) const;

    const ControlledProblem* problem_;
    std::string initial_;
    std::map<RuleKey, std::vector<std::string>> admissible_;
    std::map<TransitionKey, std::string> transition_;
    std::map<std::string, std::size_t, std::less<>> strategy_index_;
    std::vector<std::vector<std::pair<NodeIndex, std::string>>> reachable_;
};

/// Number of strategies from (node, state); any count above `cap` is reported as cap + 1.
std::size_t count_strategies(const ControlSystem& system, NodeIndex node, const std::string& state,
                             std::size_t cap);

std::vector<Strategy> enumerate_strategies(const ControlledProblem& problem, int t, NodeIndex node,
                                           const std::string& state);
/// From the root and the initial state.
std::vector<Strategy> enumerate_strategies(const ControlledProblem& problem);

/// Loss on every leaf; the strategy must start at the root.
AdaptedVector terminal_loss(const ControlledProblem& problem, const Strategy& strategy);
/// Loss on the leaves below the strategy's start node, left to right.
std::vector<Vec> subtree_loss(const ControlledProblem& problem, const Strategy& strategy);

ValueSet value_function(const ControlledProblem& problem, int t);

/// B_T .. B_0, indexed by time. `prune` overrides the problem option; pruning
/// keeps the minimal and the maximal elements, so B + C and B - C are unchanged.
std::vector<ValueSet> backward_value(const ControlledProblem& problem);
std::vector<ValueSet> backward_value(const ControlledProblem& problem, bool prune);

/// One backward step from arbitrary time-(t+1) sets.
ValueSet one_step_R(const ControlledProblem& problem, int t, const ValueSet& next);

enum class RelationKind { Weak, Strong, Equality };

struct RelationResult {
    std::string id;       // e.g. "B <= V + C"
    RelationKind kind = RelationKind::Weak;
    bool holds = true;
    std::size_t locations = 0;  // (node, state) pairs checked
    std::string witness;        // first failure
};

struct BellmanTimeReport {
    int time = 0;
    std::vector<RelationResult> relations;
    const RelationResult& relation(const std::string& id) const;
};

struct BellmanReport {
    bool m_rectangular = false;
    bool componentwise = false;
    bool pointed = false;
    bool strong_expected = false;    // rectangular family, componentwise cone
    bool equality_expected = false;  // additionally a pointed cone
    bool backward_pruned = false;    // B holds extremal elements only; equality reads ext(V) = B
    std::vector<ValueSet> value;     // V_0..V_T
    std::vector<ValueSet> one_step;  // R_0..R_{T-1}
    std::vector<ValueSet> backward;  // B_0..B_T
    std::vector<BellmanTimeReport> times;  // t = 0..T-1

    bool holds(RelationKind kind) const;
    bool holds(RelationKind kind, int t) const;
    /// Weak holds and some reverse inclusion fails at time t.
    bool strict_weak(int t) const;
    /// Every relation expected by the hypotheses holds.
    bool expectations_met() const;
};

struct BellmanOptions {
    bool prune_backward = false;
};

BellmanReport check_bellman(const ControlledProblem& problem, BellmanOptions options = {});

/// Minimal elements: drops x when another element y satisfies y <= x.
/// Requires a pointed cone.
VectorSet prune_pareto(const VectorSet& set, const Cone& cone);
ValueSet prune_pareto(const ValueSet& set, const Cone& cone);

/// Pareto generators of V_t; the upper image is generators + R^d_+.
ValueSet upper_image(const ControlledProblem& problem, int t);

struct UpperImageReport {
    bool m_rectangular = false;
    std::size_t combinations = 0;
    bool inclusion_holds = true;
    std::optional<bool> equality_holds;  // set only for rectangular families
    std::string witness;

    std::string summary() const;
};

UpperImageReport check_upper_image_recursion(const ControlledProblem& problem);

}  // namespace robust_vdp
