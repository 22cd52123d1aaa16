#include "robust_vdp/stochastic.hpp"

#include <set>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

}  // namespace

ScenarioTree ScenarioTree::build(const std::vector<std::vector<std::string>>& levels, const Adjacency& children) {
    if (levels.size() < 2) invalid("tree: horizon must be at least 1 (need two or more levels)");
    if (levels.front().size() != 1) invalid("tree: level 0 must contain exactly one root node");

    ScenarioTree tree;
    for (std::size_t t = 0; t < levels.size(); ++t) {
        if (levels[t].empty()) invalid("tree: level " + std::to_string(t) + " is empty");
        std::vector<NodeIndex> level;
        for (std::size_t p = 0; p < levels[t].size(); ++p) {
            const auto& name = levels[t][p];
            if (name.empty()) invalid("tree: empty node name at level " + std::to_string(t));
            NodeIndex idx = tree.nodes_.size();
            if (!tree.by_name_.emplace(name, idx).second) invalid("tree: duplicate node name \"" + name + "\"");
            TreeNode node;
            node.name = name;
            node.time = static_cast<int>(t);
            node.position = p;
            tree.nodes_.push_back(std::move(node));
            level.push_back(idx);
        }
        tree.levels_.push_back(std::move(level));
    }

    for (const auto& [parent_name, kids] : children) {
        auto pit = tree.by_name_.find(parent_name);
        if (pit == tree.by_name_.end()) invalid("tree: dangling node reference \"" + parent_name + "\" in children");
        NodeIndex parent = pit->second;
        const int t = tree.nodes_[parent].time;
        if (t == tree.horizon()) {
            if (!kids.empty()) invalid("tree: terminal node \"" + parent_name + "\" cannot have children");
            continue;
        }
        for (const auto& kid : kids) {
            auto cit = tree.by_name_.find(kid.node);
            if (cit == tree.by_name_.end()) {
                invalid("tree: dangling node reference \"" + kid.node + "\" (child of \"" + parent_name + "\")");
            }
            auto& child = tree.nodes_[cit->second];
            if (child.time != t + 1) {
                invalid("tree: child \"" + kid.node + "\" of \"" + parent_name + "\" is not on the next level");
            }
            if (child.parent) invalid("tree: node \"" + kid.node + "\" has more than one parent");
            child.parent = parent;
            child.label = kid.label.empty() ? kid.node : kid.label;
            tree.nodes_[parent].children.push_back(cit->second);
        }
    }

    for (const auto& node : tree.nodes_) {
        if (node.time < tree.horizon() && node.children.empty()) {
            invalid("tree: non-terminal node \"" + node.name + "\" has no children");
        }
        if (node.time > 0 && !node.parent) invalid("tree: node \"" + node.name + "\" is not reachable from the root");
    }
    return tree;
}

ScenarioTree ScenarioTree::from_children(const std::string& root, const Adjacency& children) {
    std::vector<std::vector<std::string>> levels{{root}};
    std::set<std::string> seen{root};
    for (;;) {
        std::vector<std::string> next;
        std::size_t with_children = 0;
        for (const auto& name : levels.back()) {
            auto it = children.find(name);
            if (it == children.end() || it->second.empty()) continue;
            ++with_children;
            for (const auto& kid : it->second) {
                if (!seen.insert(kid.node).second) invalid("tree: node \"" + kid.node + "\" appears twice");
                next.push_back(kid.node);
            }
        }
        if (with_children == 0) break;
        if (with_children != levels.back().size()) {
            invalid("tree: leaves must all sit at the horizon (level " + std::to_string(levels.size() - 1) +
                    " mixes leaves and internal nodes)");
        }
        levels.push_back(std::move(next));
    }
    return build(levels, children);
}

const std::vector<NodeIndex>& ScenarioTree::level(int t) const {
    if (t < 0 || t > horizon()) {
        throw Error(ErrorCode::InvalidArgument,
                    "time " + std::to_string(t) + " outside 0.." + std::to_string(horizon()));
    }
    return levels_[static_cast<std::size_t>(t)];
}

std::optional<NodeIndex> ScenarioTree::find(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

NodeIndex ScenarioTree::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) invalid("unknown node \"" + std::string(name) + "\"");
    return *idx;
}

std::vector<NodeIndex> ScenarioTree::internal_nodes() const {
    std::vector<NodeIndex> out;
    for (int t = 0; t < horizon(); ++t) {
        for (auto n : levels_[static_cast<std::size_t>(t)]) out.push_back(n);
    }
    return out;
}

std::vector<NodeIndex> ScenarioTree::leaves_under(NodeIndex n) const {
    if (is_leaf(n)) return {n};
    std::vector<NodeIndex> out;
    for (auto c : nodes_.at(n).children) {
        auto sub = leaves_under(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

std::vector<std::vector<std::string>> ScenarioTree::level_names() const {
    std::vector<std::vector<std::string>> out;
    for (const auto& level : levels_) {
        std::vector<std::string> names;
        for (auto n : level) names.push_back(nodes_[n].name);
        out.push_back(std::move(names));
    }
    return out;
}

ScenarioTree::Adjacency ScenarioTree::adjacency() const {
    Adjacency adj;
    for (const auto& node : nodes_) {
        if (node.children.empty()) continue;
        auto& kids = adj[node.name];
        for (auto c : node.children) kids.push_back({nodes_[c].name, nodes_[c].label});
    }
    return adj;
}

void validate_probability_vector(const std::vector<Scalar>& p, std::size_t n, const std::string& where) {
    if (p.size() != n) {
        invalid(where + ": expected " + std::to_string(n) + " probabilities, got " + std::to_string(p.size()));
    }
    Scalar sum = 0;
    for (const auto& x : p) {
        if (x < 0) invalid(where + ": negative probability " + to_string(x));
        sum += x;
    }
    if (sum != 1) invalid(where + ": sum " + to_string(sum) + " ≠ 1");
}

void validate_model(const ScenarioTree& tree, const Model& model) {
    if (model.transition.size() != tree.num_nodes()) {
        invalid("model \"" + model.id + "\": transition table does not match the tree");
    }
    for (NodeIndex n = 0; n < tree.num_nodes(); ++n) {
        const auto& node = tree.node(n);
        if (node.children.empty()) {
            if (!model.transition[n].empty()) {
                invalid("model \"" + model.id + "\": terminal node \"" + node.name + "\" has transitions");
            }
            continue;
        }
        validate_probability_vector(model.transition[n], node.children.size(),
                                    "model \"" + model.id + "\" at node \"" + node.name + "\"");
    }
}

ModelFamily::ModelFamily(const ScenarioTree& tree, std::vector<Model> models) : models_(std::move(models)) {
    if (models_.empty()) invalid("Θ must be nonempty");
    std::set<std::string> ids;
    for (const auto& m : models_) {
        if (!ids.insert(m.id).second) invalid("duplicate model id \"" + m.id + "\"");
        validate_model(tree, m);
    }
}

const Model& ModelFamily::by_id(std::string_view id) const {
    for (const auto& m : models_) {
        if (m.id == id) return m;
    }
    invalid("unknown model id \"" + std::string(id) + "\"");
}

ModelFamily ModelFamily::subset(const ScenarioTree& tree, const std::vector<std::string>& ids) const {
    std::vector<Model> out;
    for (const auto& id : ids) out.push_back(by_id(id));
    return ModelFamily(tree, std::move(out));
}

AdaptedVector constant_adapted(const ScenarioTree& tree, int time, const Vec& value) {
    AdaptedVector x;
    x.time = time;
    x.values.assign(tree.level(time).size(), value);
    return x;
}

void validate_adapted(const ScenarioTree& tree, const AdaptedVector& x) {
    if (x.time < 0 || x.time > tree.horizon()) {
        invalid("adapted vector at time " + std::to_string(x.time) + " outside 0.." + std::to_string(tree.horizon()));
    }
    if (x.values.size() != tree.level(x.time).size()) {
        invalid("adapted vector at time " + std::to_string(x.time) + " has " + std::to_string(x.values.size()) +
                " values for " + std::to_string(tree.level(x.time).size()) + " nodes");
    }
    for (const auto& v : x.values) {
        if (v.dim() != x.values.front().dim()) {
            throw Error(ErrorCode::DimensionMismatch, "adapted vector mixes dimensions");
        }
    }
}

Vec one_step_expect(const ScenarioTree& tree, const Model& model, NodeIndex n, const AdaptedVector& x) {
    const auto& node = tree.node(n);
    if (x.time != node.time + 1) {
        throw Error(ErrorCode::InvalidArgument, "one_step_expect: vector must live one step after the node");
    }
    const auto& p = model.transition.at(n);
    Vec acc(x.dim());
    for (std::size_t k = 0; k < node.children.size(); ++k) {
        if (p[k] == 0) continue;
        acc += p[k] * x.values[tree.node(node.children[k]).position];
    }
    return acc;
}

AdaptedVector cond_expect(const ScenarioTree& tree, const Model& model, const AdaptedVector& x, int t) {
    validate_adapted(tree, x);
    if (t < 0 || t > x.time) {
        throw Error(ErrorCode::InvalidArgument, "cond_expect: time " + std::to_string(t) + " not in 0.." +
                                                    std::to_string(x.time));
    }
    AdaptedVector cur = x;
    while (cur.time > t) {
        AdaptedVector prev;
        prev.time = cur.time - 1;
        for (auto n : tree.level(prev.time)) prev.values.push_back(one_step_expect(tree, model, n, cur));
        cur = std::move(prev);
    }
    return cur;
}

bool leq_t(const Cone& cone, const AdaptedVector& x, const AdaptedVector& y) {
    if (x.time != y.time || x.values.size() != y.values.size()) {
        throw Error(ErrorCode::DimensionMismatch, "leq_t: adapted vectors live at different times");
    }
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (!leq(cone, x.values[i], y.values[i])) return false;
    }
    return true;
}

AdaptedSupResult vsup_adapted(const Cone& cone, const std::vector<AdaptedVector>& xs, VsupLimits limits) {
    if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "vsup_adapted: empty collection");
    const auto& first = xs.front();
    for (const auto& x : xs) {
        if (x.time != first.time || x.values.size() != first.values.size()) {
            throw Error(ErrorCode::DimensionMismatch, "vsup_adapted: adapted vectors live at different times");
        }
    }
    AdaptedSupResult out;
    out.status = SupStatus::Unique;
    AdaptedVector value{first.time, {}};
    AdaptedVector witness{first.time, {}};
    for (std::size_t i = 0; i < first.values.size(); ++i) {
        std::vector<Vec> column;
        column.reserve(xs.size());
        for (const auto& x : xs) column.push_back(x.values[i]);
        SupResult r = vsup(cone, column, limits);
        if (!r.exists()) {
            out.status = SupStatus::NotExists;
        } else {
            if (r.status == SupStatus::NonUniqueWitness && out.status == SupStatus::Unique) {
                out.status = SupStatus::NonUniqueWitness;
            }
            value.values.push_back(*r.value);
            witness.values.push_back(r.witness ? *r.witness : *r.value);
        }
        out.per_node.push_back(std::move(r));
    }
    if (out.exists()) {
        out.value = std::move(value);
        if (out.status == SupStatus::NonUniqueWitness) out.witness = std::move(witness);
    }
    return out;
}

}  // namespace robust_vdp
