#include "robust_vdp/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg, ErrorCode code = ErrorCode::Validation) {
    throw Error(code, (path.empty() ? std::string("/") : path) + ": " + msg);
}

std::string child_path(const std::string& path, const std::string& key) {
    std::string escaped;
    for (char ch : key) {
        if (ch == '~') {
            escaped += "~0";
        } else if (ch == '/') {
            escaped += "~1";
        } else {
            escaped += ch;
        }
    }
    return path + "/" + escaped;
}

std::string child_path(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

/// Re-raises library errors with the document path prepended.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        fail(path, e.what(), e.code());
    }
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::string msg = e.what();
        if (auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw Error(ErrorCode::Syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + msg);
    }
}

const Json& expect_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

const Json& expect_array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

std::string expect_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

const Json& member(const Json& obj, const std::string& key, const std::string& path) {
    expect_object(obj, path);
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field \"" + key + "\"");
    return *it;
}

const Json* optional_member(const Json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

long long expect_integer(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) {
        auto v = j.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) fail(path, "integer out of range");
        return static_cast<long long>(v);
    }
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
}

Scalar scalar(const Json& j, const std::string& path) {
    if (j.is_string()) return at_path(path, [&] { return parse_scalar(j.get<std::string>()); });
    if (j.is_number_unsigned()) return Scalar(mpz_class(std::to_string(j.get<std::uint64_t>()), 10));
    if (j.is_number_integer()) return Scalar(mpz_class(std::to_string(j.get<long long>()), 10));
    if (j.is_number_float()) fail(path, "non-integer numbers must be written as strings (\"p/q\" or \"0.25\")");
    fail(path, "expected a rational (\"p/q\" string or integer)");
}

std::vector<Scalar> scalars(const Json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar(j[i], child_path(path, i)));
    return out;
}

Vec vec(const Json& j, const std::string& path, std::optional<std::size_t> dim = std::nullopt) {
    Vec v(scalars(j, path));
    if (dim && v.dim() != *dim) {
        fail(path, "vector of dimension " + std::to_string(v.dim()) + ", expected " + std::to_string(*dim),
             ErrorCode::DimensionMismatch);
    }
    return v;
}

std::vector<Vec> vecs(const Json& j, const std::string& path, std::optional<std::size_t> dim = std::nullopt) {
    expect_array(j, path);
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec(j[i], child_path(path, i), dim));
    return out;
}

Json scalar_json(const Scalar& x) { return to_string(x); }

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(scalar_json(v[i]));
    return a;
}

Json scalars_json(const std::vector<Scalar>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(scalar_json(x));
    return a;
}

// ---------------------------------------------------------------- cone

Cone cone_from_json(const Json& j, const std::string& path, std::optional<std::size_t> dim) {
    expect_object(j, path);
    const auto kind = expect_string(member(j, "kind", path), child_path(path, "kind"));
    if (const auto* d = optional_member(j, "dimension")) {
        auto v = expect_integer(*d, child_path(path, "dimension"));
        if (v < 1) fail(child_path(path, "dimension"), "dimension must be positive");
        if (dim && static_cast<std::size_t>(v) != *dim) {
            fail(child_path(path, "dimension"), "cone dimension differs from the instance dimension",
                 ErrorCode::DimensionMismatch);
        }
        dim = static_cast<std::size_t>(v);
    }
    Cone cone = at_path(path, [&]() -> Cone {
        if (kind == "componentwise") {
            if (!dim) fail(path, "componentwise cone needs a \"dimension\"");
            return Cone::componentwise(*dim);
        }
        if (kind == "halfspace") return Cone::halfspace(vec(member(j, "w", path), child_path(path, "w"), dim));
        if (kind == "dual") return Cone::from_duals(vecs(member(j, "b", path), child_path(path, "b"), dim));
        if (kind == "generators") {
            auto gens = vecs(member(j, "g", path), child_path(path, "g"), dim);
            std::optional<std::vector<Vec>> duals;
            if (const auto* b = optional_member(j, "b")) duals = vecs(*b, child_path(path, "b"), dim);
            return Cone::from_generators(std::move(gens), std::move(duals));
        }
        fail(child_path(path, "kind"), "unknown cone kind \"" + kind +
                                           "\" (componentwise, halfspace, dual or generators)");
    });
    if (dim && cone.dim() != *dim) {
        fail(path, "cone dimension " + std::to_string(cone.dim()) + " differs from " + std::to_string(*dim),
             ErrorCode::DimensionMismatch);
    }
    return cone;
}

Json cone_json(const Cone& cone) {
    Json j;
    j["kind"] = to_string(cone.kind());
    switch (cone.kind()) {
        case ConeKind::ComponentWise: j["dimension"] = cone.dim(); break;
        case ConeKind::Halfspace: j["w"] = vec_json(cone.normal()); break;
        case ConeKind::PolyhedralDual: {
            Json b = Json::array();
            for (const auto& v : cone.duals()) b.push_back(vec_json(v));
            j["b"] = b;
            break;
        }
        case ConeKind::PolyhedralGenerators: {
            Json g = Json::array();
            for (const auto& v : cone.generators()) g.push_back(vec_json(v));
            j["g"] = g;
            if (cone.has_duals()) {
                Json b = Json::array();
                for (const auto& v : cone.duals()) b.push_back(vec_json(v));
                j["b"] = b;
            }
            break;
        }
    }
    return j;
}

// ---------------------------------------------------------------- tree

ScenarioTree tree_from_json(const Json& j, const std::string& path) {
    expect_object(j, path);
    const std::string cpath = child_path(path, "children");
    const auto& children = expect_object(member(j, "children", path), cpath);
    ScenarioTree::Adjacency adj;
    for (auto it = children.begin(); it != children.end(); ++it) {
        const auto kpath = child_path(cpath, it.key());
        expect_array(it.value(), kpath);
        auto& kids = adj[it.key()];
        for (std::size_t i = 0; i < it.value().size(); ++i) {
            const auto& k = it.value()[i];
            const auto ipath = child_path(kpath, i);
            if (k.is_string()) {
                kids.push_back({k.get<std::string>(), {}});
            } else {
                auto node = expect_string(member(k, "node", ipath), child_path(ipath, "node"));
                std::string label;
                if (const auto* l = optional_member(k, "label")) label = expect_string(*l, child_path(ipath, "label"));
                kids.push_back({std::move(node), std::move(label)});
            }
        }
    }
    if (const auto* levels = optional_member(j, "levels")) {
        const auto lpath = child_path(path, "levels");
        expect_array(*levels, lpath);
        std::vector<std::vector<std::string>> names;
        for (std::size_t t = 0; t < levels->size(); ++t) {
            const auto tpath = child_path(lpath, t);
            expect_array((*levels)[t], tpath);
            std::vector<std::string> level;
            for (std::size_t i = 0; i < (*levels)[t].size(); ++i) {
                level.push_back(expect_string((*levels)[t][i], child_path(tpath, i)));
            }
            names.push_back(std::move(level));
        }
        return at_path(path, [&] { return ScenarioTree::build(names, adj); });
    }
    const auto root = expect_string(member(j, "root", path), child_path(path, "root"));
    return at_path(path, [&] { return ScenarioTree::from_children(root, adj); });
}

Json tree_json(const ScenarioTree& tree) {
    Json j;
    j["levels"] = tree.level_names();
    Json children = Json::object();
    for (NodeIndex n = 0; n < tree.num_nodes(); ++n) {
        const auto& node = tree.node(n);
        if (node.children.empty()) continue;
        Json kids = Json::array();
        for (auto c : node.children) {
            const auto& child = tree.node(c);
            if (child.label == child.name) {
                kids.push_back(child.name);
            } else {
                kids.push_back(Json{{"node", child.name}, {"label", child.label}});
            }
        }
        children[node.name] = kids;
    }
    j["children"] = children;
    return j;
}

NodeIndex node_ref(const ScenarioTree& tree, const std::string& name, const std::string& path) {
    auto idx = tree.find(name);
    if (!idx) fail(path, "dangling node reference \"" + name + "\"");
    return *idx;
}

// ---------------------------------------------------------------- models

std::vector<std::vector<Scalar>> transitions_from_json(const ScenarioTree& tree, const Json& j,
                                                       const std::string& path, const std::string& what) {
    expect_object(j, path);
    std::vector<std::vector<Scalar>> table(tree.num_nodes());
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto npath = child_path(path, it.key());
        auto n = node_ref(tree, it.key(), npath);
        if (tree.is_leaf(n)) fail(npath, "terminal node \"" + it.key() + "\" has no transitions");
        table[n] = scalars(it.value(), npath);
        at_path(npath, [&] {
            validate_probability_vector(table[n], tree.node(n).children.size(),
                                        what + " at node \"" + it.key() + "\"");
        });
    }
    for (auto n : tree.internal_nodes()) {
        if (table[n].empty()) fail(path, "no transition vector for node \"" + tree.node(n).name + "\"");
    }
    return table;
}

ModelFamily models_from_json(const ScenarioTree& tree, const Json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<Model> models;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto mpath = child_path(path, i);
        Model m;
        m.id = expect_string(member(j[i], "id", mpath), child_path(mpath, "id"));
        m.transition = transitions_from_json(tree, member(j[i], "transitions", mpath),
                                             child_path(mpath, "transitions"), "model \"" + m.id + "\"");
        models.push_back(std::move(m));
    }
    return at_path(path, [&] { return ModelFamily(tree, std::move(models)); });
}

MarginalSets marginals_from_json(const ScenarioTree& tree, const Json& j, const std::string& path) {
    expect_object(j, path);
    MarginalSets m;
    m.candidates.resize(tree.num_nodes());
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto npath = child_path(path, it.key());
        auto n = node_ref(tree, it.key(), npath);
        if (tree.is_leaf(n)) fail(npath, "terminal node \"" + it.key() + "\" has no transitions");
        expect_array(it.value(), npath);
        for (std::size_t k = 0; k < it.value().size(); ++k) {
            m.candidates[n].push_back(scalars(it.value()[k], child_path(npath, k)));
        }
    }
    at_path(path, [&] { validate_marginals(tree, m); });
    return m;
}

Json transitions_json(const ScenarioTree& tree, const std::vector<std::vector<Scalar>>& table) {
    Json j = Json::object();
    for (auto n : tree.internal_nodes()) j[tree.node(n).name] = scalars_json(table[n]);
    return j;
}

// ---------------------------------------------------------------- problem

std::optional<int> optional_time(const Json& rule, const std::string& path) {
    const auto* t = optional_member(rule, "time");
    if (!t || t->is_null()) return std::nullopt;
    return static_cast<int>(expect_integer(*t, child_path(path, "time")));
}

DynamicsSpec dynamics_from_json(const Json& j, const std::string& path, std::size_t dim) {
    DynamicsSpec spec;
    const auto spath = child_path(path, "states");
    const auto& states = expect_array(member(j, "states", path), spath);
    for (std::size_t i = 0; i < states.size(); ++i) spec.states.push_back(expect_string(states[i], child_path(spath, i)));
    spec.initial_state = expect_string(member(j, "initial_state", path), child_path(path, "initial_state"));

    const auto apath = child_path(path, "admissible");
    const auto& adm = expect_array(member(j, "admissible", path), apath);
    for (std::size_t i = 0; i < adm.size(); ++i) {
        const auto rpath = child_path(apath, i);
        DynamicsSpec::Admissible rule;
        rule.time = optional_time(adm[i], rpath);
        rule.state = expect_string(member(adm[i], "state", rpath), child_path(rpath, "state"));
        const auto cpath = child_path(rpath, "controls");
        const auto& ctrls = expect_array(member(adm[i], "controls", rpath), cpath);
        if (ctrls.empty()) fail(cpath, "empty control set");
        for (std::size_t k = 0; k < ctrls.size(); ++k) rule.controls.push_back(expect_string(ctrls[k], child_path(cpath, k)));
        spec.admissible.push_back(std::move(rule));
    }

    const auto tpath = child_path(path, "transitions");
    const auto& trs = expect_array(member(j, "transitions", path), tpath);
    for (std::size_t i = 0; i < trs.size(); ++i) {
        const auto rpath = child_path(tpath, i);
        DynamicsSpec::Transition rule;
        rule.time = optional_time(trs[i], rpath);
        rule.state = expect_string(member(trs[i], "state", rpath), child_path(rpath, "state"));
        rule.control = expect_string(member(trs[i], "control", rpath), child_path(rpath, "control"));
        rule.branch = expect_string(member(trs[i], "branch", rpath), child_path(rpath, "branch"));
        rule.next = expect_string(member(trs[i], "next", rpath), child_path(rpath, "next"));
        spec.transitions.push_back(std::move(rule));
    }

    const auto lpath = child_path(path, "loss");
    const auto& loss = expect_object(member(j, "loss", path), lpath);
    for (auto it = loss.begin(); it != loss.end(); ++it) {
        spec.loss.emplace(it.key(), vec(it.value(), child_path(lpath, it.key()), dim));
    }
    return spec;
}

TabulatedSpec tabulated_from_json(const ScenarioTree& tree, const Json& j, const std::string& path,
                                  std::size_t dim) {
    TabulatedSpec spec;
    const auto spath = child_path(path, "strategies");
    const auto& list = expect_array(member(j, "strategies", path), spath);
    const auto& leaves = tree.level(tree.horizon());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto ipath = child_path(spath, i);
        TabulatedStrategy s;
        s.name = expect_string(member(list[i], "name", ipath), child_path(ipath, "name"));
        s.loss.time = tree.horizon();
        const auto lpath = child_path(ipath, "loss");
        const auto& loss = member(list[i], "loss", ipath);
        if (loss.is_array()) {
            if (loss.size() != leaves.size()) {
                fail(lpath, "expected " + std::to_string(leaves.size()) + " leaf values, got " +
                                std::to_string(loss.size()));
            }
            s.loss.values = vecs(loss, lpath, dim);
        } else {
            expect_object(loss, lpath);
            s.loss.values.assign(leaves.size(), Vec());
            std::vector<bool> seen(leaves.size(), false);
            for (auto it = loss.begin(); it != loss.end(); ++it) {
                const auto npath = child_path(lpath, it.key());
                auto n = node_ref(tree, it.key(), npath);
                if (!tree.is_leaf(n)) fail(npath, "\"" + it.key() + "\" is not a terminal node");
                const auto pos = tree.node(n).position;
                s.loss.values[pos] = vec(it.value(), npath, dim);
                seen[pos] = true;
            }
            for (std::size_t p = 0; p < leaves.size(); ++p) {
                if (!seen[p]) fail(lpath, "no value for leaf \"" + tree.node(leaves[p]).name + "\"");
            }
        }
        if (const auto* ctrls = optional_member(list[i], "controls")) {
            const auto cpath = child_path(ipath, "controls");
            expect_object(*ctrls, cpath);
            for (auto it = ctrls->begin(); it != ctrls->end(); ++it) {
                const auto npath = child_path(cpath, it.key());
                auto n = node_ref(tree, it.key(), npath);
                s.controls[n] = expect_string(it.value(), npath);
            }
        }
        spec.strategies.push_back(std::move(s));
    }
    return spec;
}

Json problem_json(const ScenarioTree& tree, const ControlledProblem& problem) {
    Json j;
    if (const auto* d = std::get_if<DynamicsSpec>(&problem.spec)) {
        j["mode"] = "dynamics";
        j["states"] = d->states;
        j["initial_state"] = d->initial_state;
        Json adm = Json::array();
        for (const auto& r : d->admissible) {
            Json rule;
            if (r.time) rule["time"] = *r.time;
            rule["state"] = r.state;
            rule["controls"] = r.controls;
            adm.push_back(rule);
        }
        j["admissible"] = adm;
        Json trs = Json::array();
        for (const auto& r : d->transitions) {
            Json rule;
            if (r.time) rule["time"] = *r.time;
            rule["state"] = r.state;
            rule["control"] = r.control;
            rule["branch"] = r.branch;
            rule["next"] = r.next;
            trs.push_back(rule);
        }
        j["transitions"] = trs;
        Json loss = Json::object();
        for (const auto& [s, v] : d->loss) loss[s] = vec_json(v);
        j["loss"] = loss;
        return j;
    }
    const auto& spec = std::get<TabulatedSpec>(problem.spec);
    j["mode"] = "tabulated";
    Json list = Json::array();
    const auto& leaves = tree.level(tree.horizon());
    for (const auto& s : spec.strategies) {
        Json item;
        item["name"] = s.name;
        Json loss = Json::object();
        for (std::size_t p = 0; p < leaves.size(); ++p) loss[tree.node(leaves[p]).name] = vec_json(s.loss.values[p]);
        item["loss"] = loss;
        if (!s.controls.empty()) {
            Json ctrls = Json::object();
            for (const auto& [n, label] : s.controls) ctrls[tree.node(n).name] = label;
            item["controls"] = ctrls;
        }
        list.push_back(item);
    }
    j["strategies"] = list;
    return j;
}

EngineOptions options_from_json(const Json& j, const std::string& path) {
    EngineOptions o;
    expect_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto kpath = child_path(path, it.key());
        if (it.key() == "budget") {
            auto v = expect_integer(it.value(), kpath);
            if (v < 1) fail(kpath, "budget must be positive");
            o.budget = static_cast<std::size_t>(v);
        } else if (it.key() == "prune") {
            if (!it.value().is_boolean()) fail(kpath, "expected true or false");
            o.prune = it.value().get<bool>();
        } else if (it.key() == "seed") {
            auto v = expect_integer(it.value(), kpath);
            if (v < 0) fail(kpath, "seed must be nonnegative");
            o.seed = static_cast<std::uint64_t>(v);
        } else {
            fail(kpath, "unknown option \"" + it.key() + "\"");
        }
    }
    return o;
}

}  // namespace

Instance parse_instance(std::string_view text) {
    const Json doc = parse_json(text);
    expect_object(doc, "");
    const auto version = expect_string(member(doc, "version", ""), "/version");
    if (version != kInstanceVersion) {
        fail("/version", "unsupported version \"" + version + "\" (expected \"" + std::string(kInstanceVersion) + "\")");
    }
    const auto d = expect_integer(member(doc, "dimension", ""), "/dimension");
    if (d < 1) fail("/dimension", "dimension must be positive");
    const auto dim = static_cast<std::size_t>(d);

    Cone cone = cone_from_json(member(doc, "cone", ""), "/cone", dim);
    ScenarioTree tree = tree_from_json(member(doc, "tree", ""), "/tree");

    std::string label = "Theta";
    if (const auto* l = optional_member(doc, "family_label")) label = expect_string(*l, "/family_label");
    std::string prefix = "theta";
    if (const auto* p = optional_member(doc, "model_prefix")) prefix = expect_string(*p, "/model_prefix");

    const auto* models = optional_member(doc, "models");
    const auto* marginals = optional_member(doc, "marginals");
    if (models && marginals) fail("/", "give either \"models\" or \"marginals\", not both");
    if (!models && !marginals) fail("/", "missing field \"models\" (or \"marginals\")");
    std::optional<MarginalSets> marg;
    std::optional<ModelFamily> family;
    if (models) {
        family = models_from_json(tree, *models, "/models");
    } else {
        marg = marginals_from_json(tree, *marginals, "/marginals");
        family = at_path("/marginals", [&] { return rectangularize(tree, *marg, prefix); });
    }

    const auto& pj = expect_object(member(doc, "problem", ""), "/problem");
    const auto mode = expect_string(member(pj, "mode", "/problem"), "/problem/mode");
    std::variant<DynamicsSpec, TabulatedSpec> spec;
    if (mode == "dynamics") {
        spec = dynamics_from_json(pj, "/problem", dim);
    } else if (mode == "tabulated") {
        spec = tabulated_from_json(tree, pj, "/problem", dim);
    } else {
        fail("/problem/mode", "unknown mode \"" + mode + "\" (dynamics or tabulated)");
    }

    EngineOptions options;
    if (const auto* o = optional_member(doc, "options")) options = options_from_json(*o, "/options");

    Instance inst{ControlledProblem{std::move(tree), std::move(*family), std::move(cone), std::move(spec), options},
                  std::move(label), std::move(marg), std::move(prefix)};
    at_path("/problem", [&] { validate_problem(inst.problem); });
    return inst;
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string serialize_instance(const Instance& instance) {
    const auto& p = instance.problem;
    Json doc;
    doc["version"] = kInstanceVersion;
    doc["dimension"] = p.dim();
    doc["family_label"] = instance.family_label;
    doc["cone"] = cone_json(p.cone);
    doc["tree"] = tree_json(p.tree);
    if (instance.marginals) {
        doc["model_prefix"] = instance.model_prefix;
        Json m = Json::object();
        for (auto n : p.tree.internal_nodes()) {
            Json cands = Json::array();
            for (const auto& c : instance.marginals->candidates[n]) cands.push_back(scalars_json(c));
            m[p.tree.node(n).name] = cands;
        }
        doc["marginals"] = m;
    } else {
        Json models = Json::array();
        for (const auto& m : p.family.models()) {
            models.push_back(Json{{"id", m.id}, {"transitions", transitions_json(p.tree, m.transition)}});
        }
        doc["models"] = models;
    }
    doc["problem"] = problem_json(p.tree, p);
    Json options;
    options["budget"] = p.options.budget;
    options["prune"] = p.options.prune;
    if (p.options.seed) options["seed"] = *p.options.seed;
    doc["options"] = options;
    return doc.dump(2) + "\n";
}

Cone parse_cone(std::string_view text) { return cone_from_json(parse_json(text), "", std::nullopt); }

std::vector<Vec> parse_points(std::string_view text) {
    const Json doc = parse_json(text);
    const Json* arr = &doc;
    std::string path;
    if (doc.is_object()) {
        arr = &member(doc, "points", "");
        path = "/points";
    }
    auto pts = vecs(*arr, path);
    if (pts.empty()) fail(path, "at least one point required");
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].dim() != pts[0].dim()) {
            fail(child_path(path, i), "points differ in dimension", ErrorCode::DimensionMismatch);
        }
    }
    return pts;
}

std::vector<AdaptedVector> parse_test_vectors(std::string_view text, const ScenarioTree& tree) {
    const Json doc = parse_json(text);
    const Json* arr = &doc;
    std::string path;
    if (doc.is_object()) {
        arr = &member(doc, "vectors", "");
        path = "/vectors";
    }
    expect_array(*arr, path);
    const auto& leaves = tree.level(tree.horizon());
    std::vector<AdaptedVector> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto ipath = child_path(path, i);
        const auto& item = (*arr)[i];
        AdaptedVector x;
        x.time = tree.horizon();
        if (item.is_array()) {
            if (item.size() != leaves.size()) fail(ipath, "expected one value per leaf");
            x.values = vecs(item, ipath);
        } else {
            expect_object(item, ipath);
            x.values.assign(leaves.size(), Vec());
            std::vector<bool> seen(leaves.size(), false);
            for (auto it = item.begin(); it != item.end(); ++it) {
                const auto npath = child_path(ipath, it.key());
                auto n = node_ref(tree, it.key(), npath);
                if (!tree.is_leaf(n)) fail(npath, "\"" + it.key() + "\" is not a terminal node");
                x.values[tree.node(n).position] = vec(it.value(), npath);
                seen[tree.node(n).position] = true;
            }
            for (std::size_t p = 0; p < leaves.size(); ++p) {
                if (!seen[p]) fail(ipath, "no value for leaf \"" + tree.node(leaves[p]).name + "\"");
            }
        }
        at_path(ipath, [&] { validate_adapted(tree, x); });
        out.push_back(std::move(x));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace robust_vdp
