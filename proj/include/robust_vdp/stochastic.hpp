#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robust_vdp/vsup.hpp"

namespace robust_vdp {

using NodeIndex = std::size_t;

struct TreeNode {
    std::string name;
    int time = 0;
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children;
    std::string label;         // realisation of the factor on the edge from the parent
    std::size_t position = 0;  // index within its time level

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Finite filtered probability space as a rooted tree. Node indices are
/// assigned level by level, so level(t) lists the atoms of F_t.
class ScenarioTree {
public:
    struct ChildSpec {
        std::string node;
        std::string label;  // empty means "use the child's name"
    };
    using Adjacency = std::map<std::string, std::vector<ChildSpec>>;

    /// `levels[t]` lists the names of the time-t nodes.
    static ScenarioTree build(const std::vector<std::vector<std::string>>& levels, const Adjacency& children);
    /// Levels derived breadth-first from the root.
    static ScenarioTree from_children(const std::string& root, const Adjacency& children);

    int horizon() const noexcept { return static_cast<int>(levels_.size()) - 1; }
    NodeIndex root() const noexcept { return 0; }
    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    const TreeNode& node(NodeIndex n) const { return nodes_.at(n); }
    const std::vector<NodeIndex>& level(int t) const;
    bool is_leaf(NodeIndex n) const { return nodes_.at(n).children.empty(); }

    std::optional<NodeIndex> find(std::string_view name) const;
    /// Throws Error(Validation) for unknown names.
    NodeIndex index_of(std::string_view name) const;

    /// All non-terminal nodes, level order.
    std::vector<NodeIndex> internal_nodes() const;
    /// Leaves below `n` in left-to-right order.
    std::vector<NodeIndex> leaves_under(NodeIndex n) const;

    /// The names per level and adjacency, suitable for build().
    std::vector<std::vector<std::string>> level_names() const;
    Adjacency adjacency() const;

    friend bool operator==(const ScenarioTree&, const ScenarioTree&) = default;

private:
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<NodeIndex>> levels_;
    std::map<std::string, NodeIndex, std::less<>> by_name_;
};

/// One probability model: a transition vector over the children of every
/// non-terminal node (indexed by NodeIndex; leaves hold empty vectors).
struct Model {
    std::string id;
    std::vector<std::vector<Scalar>> transition;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Throws Error(Validation) unless `p` is a probability vector of length `n`.
void validate_probability_vector(const std::vector<Scalar>& p, std::size_t n, const std::string& where);
void validate_model(const ScenarioTree& tree, const Model& model);

/// Finite nonempty family Theta of models on one tree, unique ids.
class ModelFamily {
public:
    ModelFamily(const ScenarioTree& tree, std::vector<Model> models);

    const std::vector<Model>& models() const noexcept { return models_; }
    std::size_t size() const noexcept { return models_.size(); }
    const Model& operator[](std::size_t i) const { return models_[i]; }
    const Model& by_id(std::string_view id) const;

    /// Subfamily with the given ids, in the given order.
    ModelFamily subset(const ScenarioTree& tree, const std::vector<std::string>& ids) const;

    friend bool operator==(const ModelFamily&, const ModelFamily&) = default;

private:
    std::vector<Model> models_;
};

/// An F_t-measurable R^d random vector: one value per time-t node, indexed by
/// the node's position within level t.
struct AdaptedVector {
    int time = 0;
    std::vector<Vec> values;

    std::size_t dim() const { return values.empty() ? 0 : values.front().dim(); }
    friend bool operator==(const AdaptedVector&, const AdaptedVector&) = default;
};

AdaptedVector constant_adapted(const ScenarioTree& tree, int time, const Vec& value);
/// Throws Error(Validation) if `x` does not fit level `x.time` of the tree.
void validate_adapted(const ScenarioTree& tree, const AdaptedVector& x);

/// E^theta[x | F_t] for x measurable at time s >= t.
AdaptedVector cond_expect(const ScenarioTree& tree, const Model& model, const AdaptedVector& x, int t);

/// Probability-weighted average of x over the children of `n` (x lives at time(n) + 1).
Vec one_step_expect(const ScenarioTree& tree, const Model& model, NodeIndex n, const AdaptedVector& x);

/// X <=^t Y: node-wise order.
bool leq_t(const Cone& cone, const AdaptedVector& x, const AdaptedVector& y);

struct AdaptedSupResult {
    SupStatus status = SupStatus::NotExists;
    std::optional<AdaptedVector> value;
    std::optional<AdaptedVector> witness;  // differs from value at every non-unique node
    std::vector<SupResult> per_node;

    bool exists() const noexcept { return status != SupStatus::NotExists; }
};

/// Node-wise supremum of a nonempty collection of adapted vectors at one time.
AdaptedSupResult vsup_adapted(const Cone& cone, const std::vector<AdaptedVector>& xs, VsupLimits limits = {});

}  // namespace robust_vdp
