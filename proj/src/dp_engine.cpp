#include "robust_vdp/dp_engine.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include "robust_vdp/error.hpp"
#include "robust_vdp/rectangular.hpp"

namespace robust_vdp {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

std::size_t saturate(std::size_t cap) { return cap == std::numeric_limits<std::size_t>::max() ? cap : cap + 1; }

std::size_t sat_add(std::size_t a, std::size_t b, std::size_t cap) {
    std::size_t r = 0;
    if (__builtin_add_overflow(a, b, &r) || r > cap) return saturate(cap);
    return r;
}

std::size_t sat_mul(std::size_t a, std::size_t b, std::size_t cap) {
    std::size_t r = 0;
    if (__builtin_mul_overflow(a, b, &r) || r > cap) return saturate(cap);
    return r;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string at_node(const ScenarioTree& tree, NodeIndex n, const std::string& state) {
    return "node " + quoted(tree.node(n).name) + " (state " + state + ")";
}

const std::string& tabulated_label(const TabulatedStrategy& s, NodeIndex n) {
    auto it = s.controls.find(n);
    return it == s.controls.end() ? s.name : it->second;
}

}  // namespace

// ---------------------------------------------------------------- strategies

std::optional<std::string> Strategy::control_at(NodeIndex node, const std::string& state) const {
    for (const auto& c : choices) {
        if (c.node == node && c.state == state) return c.control;
    }
    return std::nullopt;
}

std::string Strategy::describe(const ScenarioTree& tree) const {
    if (!name.empty()) return name;
    if (choices.empty()) return "terminal";
    std::string s;
    for (const auto& c : choices) {
        if (!s.empty()) s += ' ';
        s += tree.node(c.node).name + ":" + c.control;
    }
    return s;
}

// ---------------------------------------------------------------- value sets

const LocalValueSet* ValueSet::find(NodeIndex node, const std::string& state) const {
    for (const auto& l : locals) {
        if (l.node == node && l.state == state) return &l;
    }
    return nullptr;
}

const LocalValueSet& ValueSet::at(NodeIndex node, const std::string& state) const {
    if (const auto* l = find(node, state)) return *l;
    throw Error(ErrorCode::InvalidArgument, "value set at time " + std::to_string(time) + " has no entry for node #" +
                                                std::to_string(node) + " in state " + state);
}

std::size_t ValueSet::total_elements() const {
    std::size_t n = 0;
    for (const auto& l : locals) n += l.elements.size();
    return n;
}

std::vector<AdaptedVector> ValueSet::adapted_elements(const ScenarioTree& tree, const std::vector<std::string>& states,
                                                      std::size_t budget) const {
    const auto& level = tree.level(time);
    if (states.size() != level.size()) {
        throw Error(ErrorCode::DimensionMismatch, "adapted_elements: one state per time-" + std::to_string(time) +
                                                      " node required");
    }
    std::vector<const VectorSet*> sets;
    std::size_t product = 1;
    for (std::size_t p = 0; p < level.size(); ++p) {
        sets.push_back(&at(level[p], states[p]).elements);
        product = sat_mul(product, sets.back()->size(), budget);
    }
    if (product > budget) {
        throw Error(ErrorCode::DeskScaleExceeded, "adapted value set exceeds budget " + std::to_string(budget));
    }
    std::vector<AdaptedVector> out;
    if (product == 0) return out;
    std::vector<std::size_t> idx(sets.size(), 0);
    for (;;) {
        AdaptedVector x{time, {}};
        for (std::size_t p = 0; p < sets.size(); ++p) x.values.push_back((*sets[p])[idx[p]]);
        out.push_back(std::move(x));
        std::size_t k = sets.size();
        while (k > 0) {
            --k;
            if (++idx[k] < sets[k]->size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
    }
}

// ---------------------------------------------------------------- control system

ControlSystem::ControlSystem(const ControlledProblem& problem) : problem_(&problem) {
    if (problem.tree.horizon() < 1) invalid("tree: horizon must be at least 1");
    if (auto* d = std::get_if<DynamicsSpec>(&problem.spec)) {
        build_dynamics(*d);
    } else {
        build_tabulated(std::get<TabulatedSpec>(problem.spec));
    }
    explore();
}

void ControlSystem::build_dynamics(const DynamicsSpec& spec) {
    const int horizon = problem_->tree.horizon();
    std::set<std::string> states(spec.states.begin(), spec.states.end());
    if (states.empty()) invalid("dynamics: empty state space");
    if (states.size() != spec.states.size()) invalid("dynamics: duplicate state token");
    auto known = [&](const std::string& s, const std::string& where) {
        if (!states.count(s)) invalid(where + ": unknown state " + quoted(s));
    };
    auto check_time = [&](const std::optional<int>& t, const std::string& where) {
        if (t && (*t < 0 || *t >= horizon)) {
            invalid(where + ": time " + std::to_string(*t) + " outside 0.." + std::to_string(horizon - 1));
        }
    };
    known(spec.initial_state, "dynamics: initial state");
    initial_ = spec.initial_state;

    for (const auto& rule : spec.admissible) {
        const std::string where = "admissible for state " + quoted(rule.state);
        known(rule.state, "admissible");
        check_time(rule.time, where);
        if (rule.controls.empty()) invalid(where + ": empty control set");
        std::set<std::string> uniq(rule.controls.begin(), rule.controls.end());
        if (uniq.size() != rule.controls.size()) invalid(where + ": duplicate control");
        if (!admissible_.emplace(RuleKey{rule.time.value_or(-1), rule.state}, rule.controls).second) {
            invalid(where + ": defined twice");
        }
    }
    for (const auto& rule : spec.transitions) {
        const std::string where = "transition (" + rule.state + ", " + rule.control + ", " + rule.branch + ")";
        known(rule.state, "transition");
        known(rule.next, where);
        check_time(rule.time, where);
        TransitionKey key{rule.time.value_or(-1), rule.state, rule.control, rule.branch};
        if (!transition_.emplace(key, rule.next).second) invalid(where + ": defined twice");
    }
    for (const auto& [state, v] : spec.loss) {
        known(state, "loss");
        if (v.dim() != problem_->dim()) {
            throw Error(ErrorCode::DimensionMismatch, "loss for state " + quoted(state) + " has dimension " +
                                                          std::to_string(v.dim()) + ", expected " +
                                                          std::to_string(problem_->dim()));
        }
    }
}

void ControlSystem::build_tabulated(const TabulatedSpec& spec) {
    const auto& tree = problem_->tree;
    if (spec.strategies.empty()) invalid("strategies: at least one strategy required");
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < spec.strategies.size(); ++i) {
        const auto& s = spec.strategies[i];
        if (s.name.empty()) invalid("strategies[" + std::to_string(i) + "]: empty name");
        if (s.name.find_first_of(",{}") != std::string::npos) {
            invalid("strategy " + quoted(s.name) + ": name may not contain ',', '{' or '}'");
        }
        if (!strategy_index_.emplace(s.name, i).second) invalid("duplicate strategy name " + quoted(s.name));
        if (s.loss.time != tree.horizon()) invalid("strategy " + quoted(s.name) + ": loss must live at the horizon");
        if (s.loss.values.size() != tree.level(tree.horizon()).size()) {
            invalid("strategy " + quoted(s.name) + ": loss must give a value on every leaf");
        }
        for (const auto& v : s.loss.values) {
            if (v.dim() != problem_->dim()) {
                throw Error(ErrorCode::DimensionMismatch, "strategy " + quoted(s.name) + ": loss has dimension " +
                                                              std::to_string(v.dim()) + ", expected " +
                                                              std::to_string(problem_->dim()));
            }
        }
        for (const auto& [n, label] : s.controls) {
            if (n >= tree.num_nodes() || tree.is_leaf(n)) {
                invalid("strategy " + quoted(s.name) + ": controls may only label non-terminal nodes");
            }
            if (label.empty()) invalid("strategy " + quoted(s.name) + ": empty control label");
        }
        all.push_back(i);
    }
    initial_ = encode(all);
}

std::string ControlSystem::encode(const std::vector<std::size_t>& members) const {
    const auto& spec = std::get<TabulatedSpec>(problem_->spec);
    std::string s = "{";
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (k) s += ',';
        s += spec.strategies[members[k]].name;
    }
    return s + "}";
}

std::vector<std::size_t> ControlSystem::members(const std::string& state) const {
    if (!problem_->tabulated()) throw Error(ErrorCode::InvalidArgument, "members: not a tabulated problem");
    if (state.size() < 2 || state.front() != '{' || state.back() != '}') {
        throw Error(ErrorCode::InvalidArgument, "malformed tabulated state " + state);
    }
    std::vector<std::size_t> out;
    std::size_t pos = 1;
    const std::size_t end = state.size() - 1;
    while (pos < end) {
        std::size_t comma = state.find(',', pos);
        if (comma == std::string::npos || comma > end) comma = end;
        auto it = strategy_index_.find(state.substr(pos, comma - pos));
        if (it == strategy_index_.end()) throw Error(ErrorCode::InvalidArgument, "unknown strategy in state " + state);
        out.push_back(it->second);
        pos = comma + 1;
    }
    return out;
}

std::vector<std::string> ControlSystem::controls(NodeIndex node, const std::string& state) const {
    const auto& tree = problem_->tree;
    const int t = tree.node(node).time;
    if (t >= tree.horizon()) return {};
    if (problem_->tabulated()) {
        const auto& spec = std::get<TabulatedSpec>(problem_->spec);
        std::vector<std::string> out;
        for (auto i : members(state)) {
            const auto& label = tabulated_label(spec.strategies[i], node);
            if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
        }
        if (out.empty()) invalid("empty control set at " + at_node(tree, node, state));
        return out;
    }
    auto it = admissible_.find({t, state});
    if (it == admissible_.end()) it = admissible_.find({-1, state});
    if (it == admissible_.end()) {
        invalid("admissible: no control set for state " + quoted(state) + " at time " + std::to_string(t));
    }
    return it->second;
}

std::string ControlSystem::next_state(NodeIndex node, const std::string& state, const std::string& control,
                                      NodeIndex child) const {
    const auto& tree = problem_->tree;
    if (problem_->tabulated()) {
        const auto& spec = std::get<TabulatedSpec>(problem_->spec);
        std::vector<std::size_t> kept;
        for (auto i : members(state)) {
            if (tabulated_label(spec.strategies[i], node) == control) kept.push_back(i);
        }
        if (kept.empty()) invalid("control " + quoted(control) + " is not admissible at " + at_node(tree, node, state));
        return encode(kept);
    }
    const int t = tree.node(node).time;
    const auto& branch = tree.node(child).label;
    auto it = transition_.find({t, state, control, branch});
    if (it == transition_.end()) it = transition_.find({-1, state, control, branch});
    if (it == transition_.end()) {
        invalid("transition: F undefined for (time " + std::to_string(t) + ", state " + quoted(state) +
                ", control " + quoted(control) + ", branch " + quoted(branch) + ")");
    }
    return it->second;
}

Vec ControlSystem::loss(NodeIndex leaf, const std::string& state) const {
    const auto& tree = problem_->tree;
    if (!tree.is_leaf(leaf)) throw Error(ErrorCode::InvalidArgument, "loss: not a terminal node");
    if (problem_->tabulated()) {
        const auto& spec = std::get<TabulatedSpec>(problem_->spec);
        const auto ids = members(state);
        const auto pos = tree.node(leaf).position;
        const Vec& first = spec.strategies[ids.front()].loss.values[pos];
        for (auto i : ids) {
            if (spec.strategies[i].loss.values[pos] != first) {
                invalid("strategies " + quoted(spec.strategies[ids.front()].name) + " and " +
                        quoted(spec.strategies[i].name) + " share controls on the path to leaf " +
                        quoted(tree.node(leaf).name) + " but differ in loss");
            }
        }
        return first;
    }
    const auto& spec = std::get<DynamicsSpec>(problem_->spec);
    auto it = spec.loss.find(state);
    if (it == spec.loss.end()) invalid("loss: undefined for terminal state " + quoted(state));
    return it->second;
}

void ControlSystem::explore() {
    const auto& tree = problem_->tree;
    reachable_.assign(static_cast<std::size_t>(tree.horizon()) + 1, {});
    reachable_[0].push_back({tree.root(), initial_});
    for (int t = 0; t < tree.horizon(); ++t) {
        std::set<std::pair<NodeIndex, std::string>> seen;
        auto& next = reachable_[static_cast<std::size_t>(t) + 1];
        for (const auto& [n, s] : reachable_[static_cast<std::size_t>(t)]) {
            for (const auto& a : controls(n, s)) {
                for (auto c : tree.node(n).children) {
                    std::pair<NodeIndex, std::string> key{c, next_state(n, s, a, c)};
                    if (seen.insert(key).second) next.push_back(std::move(key));
                }
            }
        }
    }
    for (const auto& [leaf, s] : reachable_.back()) (void)loss(leaf, s);
}

const std::vector<std::pair<NodeIndex, std::string>>& ControlSystem::reachable(int t) const {
    if (t < 0 || t >= static_cast<int>(reachable_.size())) {
        throw Error(ErrorCode::InvalidArgument, "time " + std::to_string(t) + " outside the horizon");
    }
    return reachable_[static_cast<std::size_t>(t)];
}

void validate_problem(const ControlledProblem& problem) {
    if (problem.dim() == 0) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
    for (const auto& m : problem.family.models()) validate_model(problem.tree, m);
    ControlSystem system(problem);
    (void)system;
}

// ---------------------------------------------------------------- enumeration

namespace {

using StateKey = std::pair<NodeIndex, std::string>;

std::size_t count_impl(const ControlSystem& sys, NodeIndex n, const std::string& s, std::size_t cap,
                       std::map<StateKey, std::size_t>& memo) {
    if (sys.problem().tree.is_leaf(n)) return 1;
    StateKey key{n, s};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t total = 0;
    for (const auto& a : sys.controls(n, s)) {
        std::size_t prod = 1;
        for (auto c : sys.problem().tree.node(n).children) {
            prod = sat_mul(prod, count_impl(sys, c, sys.next_state(n, s, a, c), cap, memo), cap);
        }
        total = sat_add(total, prod, cap);
    }
    memo.emplace(std::move(key), total);
    return total;
}

/// One strategy outcome at a (node, state) pair: the conditional expected
/// loss at that node under every model, plus the choices producing it.
struct Outcome {
    std::vector<Vec> per_model;
    std::string control;
    std::vector<std::size_t> child_index;  // into the children's outcome lists
};

class Evaluator {
public:
    explicit Evaluator(const ControlledProblem& problem) : problem_(problem), sys_(problem) {}

    const ControlSystem& system() const noexcept { return sys_; }

    void require_budget(NodeIndex n, const std::string& s) {
        const auto budget = problem_.options.budget;
        if (count_impl(sys_, n, s, budget, counts_) > budget) {
            throw Error(ErrorCode::DeskScaleExceeded, "strategy enumeration from " + at_node(problem_.tree, n, s) +
                                                          " exceeds the budget of " + std::to_string(budget) +
                                                          " strategies");
        }
    }

    const std::vector<Outcome>& outcomes(NodeIndex n, const std::string& s) {
        StateKey key{n, s};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const auto& tree = problem_.tree;
        const auto& models = problem_.family.models();
        std::vector<Outcome> out;
        if (tree.is_leaf(n)) {
            out.push_back(Outcome{std::vector<Vec>(models.size(), sys_.loss(n, s)), {}, {}});
            return memo_.emplace(std::move(key), std::move(out)).first->second;
        }
        const auto& kids = tree.node(n).children;
        for (const auto& a : sys_.controls(n, s)) {
            std::vector<const std::vector<Outcome>*> lists;
            for (auto c : kids) lists.push_back(&outcomes(c, sys_.next_state(n, s, a, c)));
            std::vector<std::size_t> idx(kids.size(), 0);
            for (;;) {
                Outcome o;
                o.control = a;
                o.child_index = idx;
                o.per_model.reserve(models.size());
                for (std::size_t m = 0; m < models.size(); ++m) {
                    const auto& p = models[m].transition[n];
                    Vec acc(problem_.dim());
                    for (std::size_t k = 0; k < kids.size(); ++k) {
                        if (p[k] != 0) acc += p[k] * (*lists[k])[idx[k]].per_model[m];
                    }
                    o.per_model.push_back(std::move(acc));
                }
                out.push_back(std::move(o));
                std::size_t k = kids.size();
                bool done = true;
                while (k > 0) {
                    --k;
                    if (++idx[k] < lists[k]->size()) {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if (done) break;
            }
        }
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    Strategy strategy(NodeIndex n, const std::string& s, std::size_t index) {
        Strategy st;
        st.start = n;
        st.start_state = s;
        collect(n, s, index, st.choices);
        if (problem_.tabulated()) st.name = tabulated_name(s, st.choices);
        return st;
    }

    ValueSet value_set(int t) {
        const auto& tree = problem_.tree;
        ValueSet vs;
        vs.time = t;
        for (const auto& [n, s] : sys_.reachable(t)) {
            LocalValueSet local{n, s, {}, {}};
            if (t == tree.horizon()) {
                local.elements.insert(sys_.loss(n, s));
                local.provenance.push_back("terminal");
            } else {
                require_budget(n, s);
                const auto& outs = outcomes(n, s);
                for (std::size_t j = 0; j < outs.size(); ++j) {
                    SupResult r = vsup(problem_.cone, outs[j].per_model, problem_.options.limits);
                    if (!r.exists()) {
                        throw Error(ErrorCode::SupNotExists,
                                    "no supremum over models for strategy " +
                                        quoted(strategy(n, s, j).describe(tree)) + " at " + at_node(tree, n, s) +
                                        ": " + r.explanation);
                    }
                    if (local.elements.insert(*r.value)) local.provenance.push_back(strategy(n, s, j).describe(tree));
                }
            }
            vs.locals.push_back(std::move(local));
        }
        return vs;
    }

private:
    void collect(NodeIndex n, const std::string& s, std::size_t index, std::vector<Choice>& out) {
        const auto& tree = problem_.tree;
        if (tree.is_leaf(n)) return;
        const auto& o = outcomes(n, s).at(index);
        out.push_back(Choice{n, s, o.control});
        const auto& kids = tree.node(n).children;
        for (std::size_t k = 0; k < kids.size(); ++k) {
            collect(kids[k], sys_.next_state(n, s, o.control, kids[k]), o.child_index[k], out);
        }
    }

    std::string tabulated_name(const std::string& state, const std::vector<Choice>& choices) const {
        const auto& spec = std::get<TabulatedSpec>(problem_.spec);
        for (auto i : sys_.members(state)) {
            const auto& cand = spec.strategies[i];
            bool match = std::all_of(choices.begin(), choices.end(),
                                     [&](const Choice& c) { return tabulated_label(cand, c.node) == c.control; });
            if (match) return cand.name;
        }
        return {};
    }

    const ControlledProblem& problem_;
    ControlSystem sys_;
    std::map<StateKey, std::vector<Outcome>> memo_;
    std::map<StateKey, std::size_t> counts_;
};

}  // namespace

std::size_t count_strategies(const ControlSystem& system, NodeIndex node, const std::string& state,
                             std::size_t cap) {
    std::map<StateKey, std::size_t> memo;
    return count_impl(system, node, state, cap, memo);
}

std::vector<Strategy> enumerate_strategies(const ControlledProblem& problem, int t, NodeIndex node,
                                           const std::string& state) {
    Evaluator ev(problem);
    if (problem.tree.node(node).time != t) {
        throw Error(ErrorCode::InvalidArgument, "node " + quoted(problem.tree.node(node).name) + " is not at time " +
                                                    std::to_string(t));
    }
    const auto& reach = ev.system().reachable(t);
    if (std::find(reach.begin(), reach.end(), std::pair<NodeIndex, std::string>{node, state}) == reach.end()) {
        throw Error(ErrorCode::InvalidArgument, "state " + quoted(state) + " is not reachable at node " +
                                                    quoted(problem.tree.node(node).name));
    }
    ev.require_budget(node, state);
    const auto count = ev.outcomes(node, state).size();
    std::vector<Strategy> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(ev.strategy(node, state, j));
    return out;
}

std::vector<Strategy> enumerate_strategies(const ControlledProblem& problem) {
    ControlSystem sys(problem);
    return enumerate_strategies(problem, 0, problem.tree.root(), sys.initial_state());
}

std::vector<Vec> subtree_loss(const ControlledProblem& problem, const Strategy& strategy) {
    ControlSystem sys(problem);
    const auto& tree = problem.tree;
    std::vector<Vec> out;
    std::function<void(NodeIndex, const std::string&)> walk = [&](NodeIndex n, const std::string& s) {
        if (tree.is_leaf(n)) {
            out.push_back(sys.loss(n, s));
            return;
        }
        auto a = strategy.control_at(n, s);
        if (!a) {
            throw Error(ErrorCode::Validation, "strategy " + quoted(strategy.describe(tree)) + " has no control at " +
                                                   at_node(tree, n, s));
        }
        for (auto c : tree.node(n).children) walk(c, sys.next_state(n, s, *a, c));
    };
    walk(strategy.start, strategy.start_state);
    return out;
}

AdaptedVector terminal_loss(const ControlledProblem& problem, const Strategy& strategy) {
    if (strategy.start != problem.tree.root()) {
        throw Error(ErrorCode::InvalidArgument, "terminal_loss: strategy must start at the root");
    }
    return AdaptedVector{problem.tree.horizon(), subtree_loss(problem, strategy)};
}

ValueSet value_function(const ControlledProblem& problem, int t) {
    if (t < 0 || t > problem.tree.horizon()) {
        throw Error(ErrorCode::InvalidArgument, "time " + std::to_string(t) + " outside 0.." +
                                                    std::to_string(problem.tree.horizon()));
    }
    Evaluator ev(problem);
    return ev.value_set(t);
}

// ---------------------------------------------------------------- selectors

namespace {

using Lookup = std::function<const LocalValueSet&(NodeIndex, const std::string&)>;

/// { vsup_theta E_t[X] : a admissible, X selects one element per child from `next` }.
ValueSet selector_step(const ControlSystem& sys, int t, const Lookup& next) {
    const auto& problem = sys.problem();
    const auto& tree = problem.tree;
    const auto& models = problem.family.models();
    const auto budget = problem.options.budget;
    ValueSet out;
    out.time = t;
    for (const auto& [n, s] : sys.reachable(t)) {
        LocalValueSet local{n, s, {}, {}};
        const auto& kids = tree.node(n).children;
        std::size_t total = 0;
        for (const auto& a : sys.controls(n, s)) {
            std::vector<const VectorSet*> sets;
            std::size_t product = 1;
            for (auto c : kids) {
                sets.push_back(&next(c, sys.next_state(n, s, a, c)).elements);
                product = sat_mul(product, sets.back()->size(), budget);
            }
            total = sat_add(total, product, budget);
            if (total > budget) {
                throw Error(ErrorCode::DeskScaleExceeded, "selector product at " + at_node(tree, n, s) +
                                                              " exceeds the budget of " + std::to_string(budget));
            }
            if (product == 0) continue;
            std::vector<std::size_t> idx(kids.size(), 0);
            for (;;) {
                std::vector<Vec> per_model;
                for (const auto& m : models) {
                    const auto& p = m.transition[n];
                    Vec acc(problem.dim());
                    for (std::size_t k = 0; k < kids.size(); ++k) {
                        if (p[k] != 0) acc += p[k] * (*sets[k])[idx[k]];
                    }
                    per_model.push_back(std::move(acc));
                }
                SupResult r = vsup(problem.cone, per_model, problem.options.limits);
                auto describe = [&] {
                    std::string d = a + ":";
                    for (std::size_t k = 0; k < kids.size(); ++k) {
                        d += " " + tree.node(kids[k]).name + "=" + to_string((*sets[k])[idx[k]]);
                    }
                    return d;
                };
                if (!r.exists()) {
                    throw Error(ErrorCode::SupNotExists, "no supremum over models for selection [" + describe() +
                                                             "] at " + at_node(tree, n, s) + ": " + r.explanation);
                }
                if (local.elements.insert(*r.value)) local.provenance.push_back(describe());
                std::size_t k = kids.size();
                bool done = true;
                while (k > 0) {
                    --k;
                    if (++idx[k] < sets[k]->size()) {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if (done) break;
            }
        }
        out.locals.push_back(std::move(local));
    }
    return out;
}

ValueSet terminal_set(const ControlSystem& sys) {
    const int horizon = sys.problem().tree.horizon();
    ValueSet vs;
    vs.time = horizon;
    for (const auto& [n, s] : sys.reachable(horizon)) {
        LocalValueSet local{n, s, {}, {}};
        local.elements.insert(sys.loss(n, s));
        local.provenance.push_back("terminal");
        vs.locals.push_back(std::move(local));
    }
    return vs;
}

void require_pointed(const Cone& cone) {
    if (!cone.is_pointed()) {
        throw Error(ErrorCode::UnsupportedCone, "Pareto pruning requires a pointed cone");
    }
}

enum class Keep { Minimal, Extremal };

/// Minimal keeps x unless some other y <= x. Extremal also keeps every
/// maximal x, so both S + C and S - C are unchanged.
VectorSet prune_unchecked(const VectorSet& set, const Cone& cone, Keep keep = Keep::Minimal,
                          std::vector<bool>* kept = nullptr) {
    VectorSet out;
    if (kept) kept->assign(set.size(), false);
    for (std::size_t i = 0; i < set.size(); ++i) {
        bool above = false;
        bool below = keep == Keep::Minimal;
        for (std::size_t j = 0; j < set.size() && !(above && below); ++j) {
            if (j == i) continue;
            above = above || leq(cone, set[j], set[i]);
            below = below || leq(cone, set[i], set[j]);
        }
        if (!above || !below) {
            out.insert(set[i]);
            if (kept) (*kept)[i] = true;
        }
    }
    return out;
}

ValueSet prune_unchecked(const ValueSet& set, const Cone& cone, Keep keep = Keep::Minimal) {
    ValueSet out;
    out.time = set.time;
    for (const auto& local : set.locals) {
        LocalValueSet l{local.node, local.state, {}, {}};
        std::vector<bool> kept;
        l.elements = prune_unchecked(local.elements, cone, keep, &kept);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i] && i < local.provenance.size()) l.provenance.push_back(local.provenance[i]);
        }
        out.locals.push_back(std::move(l));
    }
    return out;
}

}  // namespace

VectorSet prune_pareto(const VectorSet& set, const Cone& cone) {
    require_pointed(cone);
    return prune_unchecked(set, cone);
}

ValueSet prune_pareto(const ValueSet& set, const Cone& cone) {
    require_pointed(cone);
    return prune_unchecked(set, cone);
}

std::vector<ValueSet> backward_value(const ControlledProblem& problem) {
    return backward_value(problem, problem.options.prune);
}

std::vector<ValueSet> backward_value(const ControlledProblem& problem, bool prune) {
    if (prune) require_pointed(problem.cone);
    ControlSystem sys(problem);
    const int horizon = problem.tree.horizon();
    std::vector<ValueSet> out(static_cast<std::size_t>(horizon) + 1);
    out.back() = terminal_set(sys);
    for (int t = horizon - 1; t >= 0; --t) {
        const auto& next = out[static_cast<std::size_t>(t) + 1];
        auto step = selector_step(sys, t, [&](NodeIndex c, const std::string& s) -> const LocalValueSet& {
            return next.at(c, s);
        });
        out[static_cast<std::size_t>(t)] = prune ? prune_unchecked(step, problem.cone, Keep::Extremal) : std::move(step);
    }
    return out;
}

ValueSet one_step_R(const ControlledProblem& problem, int t, const ValueSet& next) {
    if (t < 0 || t >= problem.tree.horizon()) {
        throw Error(ErrorCode::InvalidArgument, "one_step_R: time " + std::to_string(t) + " outside 0.." +
                                                    std::to_string(problem.tree.horizon() - 1));
    }
    if (next.time != t + 1) {
        throw Error(ErrorCode::InvalidArgument, "one_step_R: next-step sets must live at time " +
                                                    std::to_string(t + 1));
    }
    ControlSystem sys(problem);
    return selector_step(sys, t, [&](NodeIndex c, const std::string& s) -> const LocalValueSet& {
        return next.at(c, s);
    });
}

// ---------------------------------------------------------------- Bellman relations

const RelationResult& BellmanTimeReport::relation(const std::string& id) const {
    for (const auto& r : relations) {
        if (r.id == id) return r;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown relation " + id);
}

bool BellmanReport::holds(RelationKind kind, int t) const {
    for (const auto& tr : times) {
        if (tr.time != t) continue;
        for (const auto& r : tr.relations) {
            if (r.kind == kind && !r.holds) return false;
        }
    }
    return true;
}

bool BellmanReport::holds(RelationKind kind) const {
    return std::all_of(times.begin(), times.end(), [&](const BellmanTimeReport& tr) { return holds(kind, tr.time); });
}

bool BellmanReport::strict_weak(int t) const { return holds(RelationKind::Weak, t) && !holds(RelationKind::Strong, t); }

bool BellmanReport::expectations_met() const {
    if (!holds(RelationKind::Weak)) return false;
    if (strong_expected && !holds(RelationKind::Strong)) return false;
    if (equality_expected && !holds(RelationKind::Equality)) return false;
    return true;
}

namespace {

struct RelationSpec {
    const char* id;
    RelationKind kind;
    std::function<std::optional<Vec>(const VectorSet& v, const VectorSet& r, const VectorSet& b)> violation;
};

std::optional<Vec> first_difference(const VectorSet& a, const VectorSet& b) {
    for (const auto& x : a) {
        if (!b.contains(x)) return x;
    }
    for (const auto& x : b) {
        if (!a.contains(x)) return x;
    }
    return std::nullopt;
}

/// With pruned backward sets, B equals the extremal part of the exact B,
/// so equality is checked against the extremal part of V.
std::vector<RelationSpec> relation_specs(const Cone& cone_ref, bool pruned) {
    // A ⊆ B + C is precurly(B, A); A ⊆ B − C is curlyprec(A, B).
    const Cone* c = &cone_ref;
    RelationSpec backward_equality =
        pruned ? RelationSpec{"ext(V) = B", RelationKind::Equality,
                              [c](auto& v, auto&, auto& b) {
                                  return first_difference(prune_unchecked(v, *c, Keep::Extremal), b);
                              }}
               : RelationSpec{"V = B", RelationKind::Equality,
                              [](auto& v, auto&, auto& b) { return first_difference(v, b); }};
    return {
        {"R ⊆ V + C", RelationKind::Weak, [c](auto& v, auto& r, auto&) { return precurly_violation(*c, v, r); }},
        {"V ⊆ R − C", RelationKind::Weak, [c](auto& v, auto& r, auto&) { return curlyprec_violation(*c, v, r); }},
        {"B ⊆ V + C", RelationKind::Weak, [c](auto& v, auto&, auto& b) { return precurly_violation(*c, v, b); }},
        {"V ⊆ B − C", RelationKind::Weak, [c](auto& v, auto&, auto& b) { return curlyprec_violation(*c, v, b); }},
        {"V ⊆ R + C", RelationKind::Strong, [c](auto& v, auto& r, auto&) { return precurly_violation(*c, r, v); }},
        {"R ⊆ V − C", RelationKind::Strong, [c](auto& v, auto& r, auto&) { return curlyprec_violation(*c, r, v); }},
        {"V ⊆ B + C", RelationKind::Strong, [c](auto& v, auto&, auto& b) { return precurly_violation(*c, b, v); }},
        {"B ⊆ V − C", RelationKind::Strong, [c](auto& v, auto&, auto& b) { return curlyprec_violation(*c, b, v); }},
        {"V = R", RelationKind::Equality, [](auto& v, auto& r, auto&) { return first_difference(v, r); }},
        std::move(backward_equality),
    };
}

}  // namespace

BellmanReport check_bellman(const ControlledProblem& problem, BellmanOptions options) {
    BellmanReport report;
    const auto& tree = problem.tree;
    const int horizon = tree.horizon();
    report.m_rectangular = is_m_rectangular(tree, problem.family);
    report.componentwise = problem.cone.kind() == ConeKind::ComponentWise;
    report.pointed = problem.cone.is_pointed();
    report.strong_expected = report.m_rectangular && report.componentwise;
    report.equality_expected = report.strong_expected && report.pointed;
    report.backward_pruned = options.prune_backward;

    Evaluator ev(problem);
    for (int t = 0; t <= horizon; ++t) report.value.push_back(ev.value_set(t));
    report.backward = backward_value(problem, options.prune_backward);
    for (int t = 0; t < horizon; ++t) {
        const auto& next = report.value[static_cast<std::size_t>(t) + 1];
        report.one_step.push_back(selector_step(ev.system(), t, [&](NodeIndex c, const std::string& s)
                                                                    -> const LocalValueSet& { return next.at(c, s); }));
    }

    const auto specs = relation_specs(problem.cone, options.prune_backward);
    for (int t = 0; t < horizon; ++t) {
        BellmanTimeReport tr;
        tr.time = t;
        for (const auto& spec : specs) tr.relations.push_back(RelationResult{spec.id, spec.kind, true, 0, {}});
        const auto idx = static_cast<std::size_t>(t);
        for (const auto& [n, s] : ev.system().reachable(t)) {
            const auto& v = report.value[idx].at(n, s).elements;
            const auto& r = report.one_step[idx].at(n, s).elements;
            const auto& b = report.backward[idx].at(n, s).elements;
            for (std::size_t k = 0; k < specs.size(); ++k) {
                auto& res = tr.relations[k];
                ++res.locations;
                if (!res.holds) continue;
                if (auto w = specs[k].violation(v, r, b)) {
                    res.holds = false;
                    res.witness = at_node(tree, n, s) + ": " + to_string(*w);
                }
            }
        }
        report.times.push_back(std::move(tr));
    }
    return report;
}

// ---------------------------------------------------------------- upper images

namespace {

void require_componentwise(const Cone& cone, const char* what) {
    if (cone.kind() != ConeKind::ComponentWise) {
        throw Error(ErrorCode::UnsupportedCone, std::string(what) + " requires the componentwise cone");
    }
}

}  // namespace

ValueSet upper_image(const ControlledProblem& problem, int t) {
    require_componentwise(problem.cone, "upper_image");
    return prune_unchecked(value_function(problem, t), problem.cone);
}

std::string UpperImageReport::summary() const {
    std::string s = "checked on " + std::to_string(combinations) + " selector/perturbation combinations; inclusion " +
                    (inclusion_holds ? "holds" : "fails");
    if (equality_holds) {
        s += std::string("; generator-level equality ") + (*equality_holds ? "holds" : "fails");
    } else {
        s += "; equality not asserted (family not m-rectangular)";
    }
    return s;
}

UpperImageReport check_upper_image_recursion(const ControlledProblem& problem) {
    require_componentwise(problem.cone, "check_upper_image_recursion");
    UpperImageReport report;
    report.m_rectangular = is_m_rectangular(problem.tree, problem.family);
    if (report.m_rectangular) report.equality_holds = true;

    const auto& tree = problem.tree;
    const auto& cone = problem.cone;
    const auto d = problem.dim();
    const auto budget = problem.options.budget;
    Evaluator ev(problem);
    const auto& sys = ev.system();
    std::vector<ValueSet> gens;
    for (int t = 0; t <= tree.horizon(); ++t) gens.push_back(prune_unchecked(ev.value_set(t), cone));

    std::vector<Vec> perturbations{Vec::zero(d)};
    for (std::size_t i = 0; i < d; ++i) perturbations.push_back(Vec::unit(d, i));
    perturbations.push_back(Vec::ones(d));

    auto dominated_by = [&](const VectorSet& lower, const Vec& y) {
        return std::any_of(lower.begin(), lower.end(), [&](const Vec& g) { return leq(cone, g, y); });
    };

    for (int t = 0; t < tree.horizon(); ++t) {
        const auto& next = gens[static_cast<std::size_t>(t) + 1];
        std::map<StateKey, LocalValueSet> perturbed;
        auto perturbed_at = [&](NodeIndex c, const std::string& s) -> const LocalValueSet& {
            StateKey key{c, s};
            auto it = perturbed.find(key);
            if (it != perturbed.end()) return it->second;
            LocalValueSet l{c, s, {}, {}};
            for (const auto& g : next.at(c, s).elements) {
                for (const auto& k : perturbations) l.elements.insert(g + k);
            }
            return perturbed.emplace(key, std::move(l)).first->second;
        };
        auto generator_at = [&](NodeIndex c, const std::string& s) -> const LocalValueSet& { return next.at(c, s); };

        // Combination count first, so an oversized check fails before any work.
        for (const auto& [n, s] : sys.reachable(t)) {
            for (const auto& a : sys.controls(n, s)) {
                std::size_t prod = 1;
                for (auto c : tree.node(n).children) {
                    prod = sat_mul(prod, perturbed_at(c, sys.next_state(n, s, a, c)).elements.size(), budget);
                }
                report.combinations = sat_add(report.combinations, prod, budget);
            }
        }
        if (report.combinations > budget) {
            throw Error(ErrorCode::DeskScaleExceeded, "upper-image check exceeds the budget of " +
                                                          std::to_string(budget) + " combinations");
        }

        const auto forward = selector_step(sys, t, perturbed_at);
        for (const auto& local : forward.locals) {
            const auto& target = gens[static_cast<std::size_t>(t)].at(local.node, local.state).elements;
            for (const auto& y : local.elements) {
                if (report.inclusion_holds && !dominated_by(target, y)) {
                    report.inclusion_holds = false;
                    report.witness = at_node(tree, local.node, local.state) + ": " + to_string(y) +
                                     " is not in the upper image";
                }
            }
        }
        if (!report.m_rectangular) continue;
        const auto over_generators = selector_step(sys, t, generator_at);
        for (const auto& [n, s] : sys.reachable(t)) {
            for (const auto& a : sys.controls(n, s)) {
                std::size_t prod = 1;
                for (auto c : tree.node(n).children) {
                    prod = sat_mul(prod, next.at(c, sys.next_state(n, s, a, c)).elements.size(), budget);
                }
                report.combinations = sat_add(report.combinations, prod, budget);
            }
        }
        for (const auto& local : over_generators.locals) {
            for (const auto& g : gens[static_cast<std::size_t>(t)].at(local.node, local.state).elements) {
                if (*report.equality_holds && !dominated_by(local.elements, g)) {
                    report.equality_holds = false;
                    if (report.witness.empty()) {
                        report.witness = at_node(tree, local.node, local.state) + ": generator " + to_string(g) +
                                         " is not reached by the recursion";
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace robust_vdp
