#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robust_vdp/problem.hpp"
#include "robust_vdp/rectangular.hpp"

namespace robust_vdp {

inline constexpr std::string_view kInstanceVersion = "robust-vdp/1";

/// A parsed instance document. `marginals` is kept when the family was given
/// node-wise, so serialization reproduces the same document shape.
struct Instance {
    ControlledProblem problem;
    std::string family_label = "Theta";
    std::optional<MarginalSets> marginals;
    std::string model_prefix = "theta";

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// Errors: Error(Syntax) with the byte offset for malformed JSON; other codes
/// with a JSON-pointer path ("/models/0/transitions/root: sum 5/4 ≠ 1").
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

/// Pretty-printed JSON with rationals as strings; parse(serialize(x)) == x.
std::string serialize_instance(const Instance& instance);

/// Cone document: {"kind": "componentwise", "dimension": d} | {"kind": "halfspace", "w": [..]} |
/// {"kind": "dual", "b": [[..]]} | {"kind": "generators", "g": [[..]], "b"?: [[..]]}.
Cone parse_cone(std::string_view text);
/// {"points": [[..], ..]} or a bare array of points.
std::vector<Vec> parse_points(std::string_view text);
/// Terminal test vectors: {"vectors": [ {leaf: [..]} | [[..] per leaf] ]}.
std::vector<AdaptedVector> parse_test_vectors(std::string_view text, const ScenarioTree& tree);

std::string read_file(const std::string& path);

}  // namespace robust_vdp
