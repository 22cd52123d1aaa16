#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "robust_vdp/dp_engine.hpp"
#include "robust_vdp/instance_io.hpp"
#include "robust_vdp/linalg.hpp"
#include "robust_vdp/rectangular.hpp"

namespace rvt {

using namespace robust_vdp;

inline std::string data_path(const std::string& name) { return std::string(ROBUST_VDP_DATA_DIR) + "/" + name; }

inline Instance bundled(const std::string& name) { return load_instance(data_path(name)); }

/// Vec from string components: V({"9/2", "5"}).
inline Vec V(std::initializer_list<const char*> xs) {
    std::vector<Scalar> c;
    for (const char* x : xs) c.push_back(parse_scalar(x));
    return Vec(std::move(c));
}

inline VectorSet S(std::initializer_list<Vec> xs) { return VectorSet(xs); }

/// "(9/2,5)" -> Vec.
inline Vec parse_vec(std::string_view text) {
    std::vector<Scalar> c;
    std::string_view body = text.substr(1, text.size() - 2);
    while (!body.empty()) {
        const auto comma = body.find(',');
        c.push_back(parse_scalar(body.substr(0, comma)));
        body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    }
    return Vec(std::move(c));
}

/// "{(5,4), (9/2,5)}" -> VectorSet; "∅" -> empty.
inline VectorSet parse_set(std::string_view text) {
    VectorSet out;
    std::size_t pos = 0;
    while ((pos = text.find('(', pos)) != std::string_view::npos) {
        const auto close = text.find(')', pos);
        out.insert(parse_vec(text.substr(pos, close - pos + 1)));
        pos = close;
    }
    return out;
}

/// Deterministic random generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// p/q with |p| <= range, q in {1, 2, 3, 4}.
    Scalar rational(int range = 8) { return robust_vdp::rational(integer(-range, range), integer(1, 4)); }
    Scalar nonnegative(int range = 8) { return robust_vdp::rational(integer(0, range), integer(1, 4)); }

    Vec vec(std::size_t d, int range = 8) {
        Vec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = rational(range);
        return v;
    }

    std::vector<Vec> vecs(std::size_t n, std::size_t d, int range = 8) {
        std::vector<Vec> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(vec(d, range));
        return out;
    }

    /// Probability vector of length n with small denominators; entries may be zero.
    std::vector<Scalar> probability(std::size_t n) {
        std::vector<int> w(n);
        int total = 0;
        while (total == 0) {
            total = 0;
            for (auto& x : w) total += (x = integer(0, 3));
        }
        std::vector<Scalar> p;
        for (int x : w) p.push_back(robust_vdp::rational(x, total));
        return p;
    }

    /// Linearly independent dual vectors, k <= d.
    std::vector<Vec> independent_duals(std::size_t d, std::size_t k) {
        for (;;) {
            std::vector<Vec> b;
            for (std::size_t i = 0; i < k; ++i) {
                Vec v(d);
                for (std::size_t j = 0; j < d; ++j) v[j] = integer(-2, 3);
                b.push_back(v);
            }
            if (linalg::linearly_independent(b, d)) return b;
        }
    }

    /// Mix of componentwise, halfspace and independent-dual cones in R^d.
    Cone simple_cone(std::size_t d) {
        switch (integer(0, 2)) {
            case 0: return Cone::componentwise(d);
            case 1: {
                Vec w(d);
                while (w.is_zero()) {
                    for (std::size_t j = 0; j < d; ++j) w[j] = integer(-2, 2);
                }
                return Cone::halfspace(w);
            }
            default: return Cone::from_duals(independent_duals(d, static_cast<std::size_t>(integer(1, static_cast<int>(d)))));
        }
    }

    /// A nonnegative combination of cone elements.
    Vec cone_element(const Cone& cone) {
        const auto d = cone.dim();
        if (cone.has_generators()) {
            Vec acc(d);
            for (const auto& g : cone.generators()) acc += nonnegative(3) * g;
            return acc;
        }
        // rejection sampling on small integer points
        for (;;) {
            Vec v(d);
            for (std::size_t j = 0; j < d; ++j) v[j] = robust_vdp::rational(integer(-6, 6), integer(1, 2));
            if (cone.contains(v)) return v;
        }
    }

    /// Random tree: depth levels, 1..max_children children per node.
    ScenarioTree tree(int depth, int max_children) {
        ScenarioTree::Adjacency adj;
        std::vector<std::string> frontier{"n"};
        for (int t = 0; t < depth; ++t) {
            std::vector<std::string> next;
            for (const auto& name : frontier) {
                const int k = integer(1, max_children);
                for (int c = 0; c < k; ++c) {
                    const auto child = name + std::to_string(c);
                    adj[name].push_back({child, "z" + std::to_string(c)});
                    next.push_back(child);
                }
            }
            frontier = std::move(next);
        }
        return ScenarioTree::from_children("n", adj);
    }

    MarginalSets marginals(const ScenarioTree& tree, int max_candidates) {
        MarginalSets m;
        m.candidates.resize(tree.num_nodes());
        for (auto n : tree.internal_nodes()) {
            const int k = integer(1, max_candidates);
            for (int i = 0; i < k; ++i) m.candidates[n].push_back(probability(tree.node(n).children.size()));
        }
        return m;
    }

    std::vector<Model> models(const ScenarioTree& tree, std::size_t count) {
        std::vector<Model> out;
        for (std::size_t i = 0; i < count; ++i) {
            Model m;
            m.id = "m" + std::to_string(i + 1);
            m.transition.resize(tree.num_nodes());
            for (auto n : tree.internal_nodes()) m.transition[n] = probability(tree.node(n).children.size());
            out.push_back(std::move(m));
        }
        return out;
    }

    /// Dynamics over states {s0, s1, s2}: every (time, state) gets 1..max_controls
    /// controls, every (time, state, control, branch) a random successor.
    DynamicsSpec dynamics(const ScenarioTree& tree, std::size_t d, int max_controls, int loss_range = 8) {
        DynamicsSpec spec;
        spec.states = {"s0", "s1", "s2"};
        spec.initial_state = "s0";
        int max_kids = 0;
        for (NodeIndex n = 0; n < tree.num_nodes(); ++n) {
            max_kids = std::max(max_kids, static_cast<int>(tree.node(n).children.size()));
        }
        for (int t = 0; t < tree.horizon(); ++t) {
            for (const auto& s : spec.states) {
                const int k = integer(1, max_controls);
                DynamicsSpec::Admissible rule{t, s, {}};
                for (int c = 0; c < k; ++c) rule.controls.push_back(std::string(1, static_cast<char>('a' + c)));
                for (const auto& a : rule.controls) {
                    for (int b = 0; b < max_kids; ++b) {
                        spec.transitions.push_back(
                            {t, s, a, "z" + std::to_string(b), spec.states[static_cast<std::size_t>(integer(0, 2))]});
                    }
                }
                spec.admissible.push_back(std::move(rule));
            }
        }
        for (const auto& s : spec.states) spec.loss[s] = vec(d, loss_range);
        return spec;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace rvt
