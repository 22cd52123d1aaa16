#include "robust_vdp/report.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "robust_vdp/error.hpp"

namespace robust_vdp {

namespace {

using Json = nlohmann::ordered_json;

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(to_string(v[i]));
    return a;
}

Json vec_decimal_json(const Vec& v) {
    Json a = Json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(to_decimal(v[i]));
    return a;
}

Json set_json(const VectorSet& s) {
    Json a = Json::array();
    for (const auto& v : s) a.push_back(vec_json(v));
    return a;
}

Json set_decimal_json(const VectorSet& s) {
    Json a = Json::array();
    for (const auto& v : s) a.push_back(vec_decimal_json(v));
    return a;
}

bool integral(const Vec& v) {
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (v[i].get_den() != 1) return false;
    }
    return true;
}

bool integral(const VectorSet& s) {
    return std::all_of(s.begin(), s.end(), [](const Vec& v) { return integral(v); });
}

std::size_t display_width(const std::string& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char ch) { return (static_cast<unsigned char>(ch) & 0xC0) != 0x80; }));
}

/// Left-aligned columns separated by two spaces; trailing blanks trimmed.
std::string render_table(const std::vector<std::vector<std::string>>& rows, const std::string& indent) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], display_width(r[c]));
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line = indent;
        for (std::size_t c = 0; c < r.size(); ++c) {
            line += r[c];
            if (c + 1 < r.size()) line += std::string(width[c] - display_width(r[c]) + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    return out;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string pass_fail(bool b) { return b ? "pass" : "FAIL"; }

std::string cone_summary(const Cone& cone) {
    return to_string(cone.kind()) + (cone.is_pointed() ? ", pointed" : ", not pointed");
}

// ---------------------------------------------------------------- expectation tables

struct Column {
    int time;
    NodeIndex node;
};

struct StrategyTable {
    std::string name;
    AdaptedVector loss;
    std::vector<Column> columns;
    std::vector<std::vector<std::optional<Vec>>> per_model;  // [model][column]
    std::vector<std::optional<Vec>> direct;                  // vsup_theta E_t[loss]
    std::vector<std::optional<Vec>> nested;                  // vsup_theta E_t[nested_{t+1}]
};

std::optional<Vec> cell(const std::optional<AdaptedVector>& x, const ScenarioTree& tree, NodeIndex n) {
    if (!x) return std::nullopt;
    return x->values[tree.node(n).position];
}

StrategyTable build_table(const ControlledProblem& p, const Strategy& s) {
    const auto& tree = p.tree;
    StrategyTable t;
    t.name = s.describe(tree);
    t.loss = terminal_loss(p, s);
    for (int time = tree.horizon() - 1; time >= 0; --time) {
        for (auto n : tree.level(time)) t.columns.push_back({time, n});
    }
    std::vector<std::vector<AdaptedVector>> by_time(static_cast<std::size_t>(tree.horizon()));
    for (int time = 0; time < tree.horizon(); ++time) {
        for (const auto& m : p.family.models()) by_time[static_cast<std::size_t>(time)].push_back(cond_expect(tree, m, t.loss, time));
    }
    t.per_model.assign(p.family.size(), {});
    for (std::size_t m = 0; m < p.family.size(); ++m) {
        for (const auto& c : t.columns) t.per_model[m].push_back(cell(by_time[static_cast<std::size_t>(c.time)][m], tree, c.node));
    }
    std::vector<std::optional<AdaptedVector>> direct(static_cast<std::size_t>(tree.horizon()));
    std::vector<std::optional<AdaptedVector>> nested(static_cast<std::size_t>(tree.horizon()));
    std::optional<AdaptedVector> inner = t.loss;
    for (int time = tree.horizon() - 1; time >= 0; --time) {
        auto d = vsup_adapted(p.cone, by_time[static_cast<std::size_t>(time)], p.options.limits);
        if (d.exists()) direct[static_cast<std::size_t>(time)] = d.value;
        if (inner) {
            std::vector<AdaptedVector> ex;
            for (const auto& m : p.family.models()) ex.push_back(cond_expect(tree, m, *inner, time));
            auto r = vsup_adapted(p.cone, ex, p.options.limits);
            inner = r.exists() ? r.value : std::nullopt;
            nested[static_cast<std::size_t>(time)] = inner;
        }
    }
    for (const auto& c : t.columns) {
        t.direct.push_back(cell(direct[static_cast<std::size_t>(c.time)], tree, c.node));
        t.nested.push_back(cell(nested[static_cast<std::size_t>(c.time)], tree, c.node));
    }
    return t;
}

std::string text_cell(const std::optional<Vec>& v, bool decimal) {
    if (!v) return "n/a";
    return decimal ? to_decimal(*v) : to_string(*v);
}

std::string render_strategy_table(const ControlledProblem& p, const StrategyTable& t, bool decimal) {
    const auto& tree = p.tree;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"model"};
    for (const auto& c : t.columns) head.push_back("t=" + std::to_string(c.time) + " " + tree.node(c.node).name);
    rows.push_back(head);
    for (std::size_t m = 0; m < t.per_model.size(); ++m) {
        std::vector<std::string> r{p.family[m].id};
        for (const auto& v : t.per_model[m]) r.push_back(text_cell(v, decimal));
        rows.push_back(r);
    }
    std::vector<std::string> d{"vsup"};
    for (const auto& v : t.direct) d.push_back(text_cell(v, decimal));
    rows.push_back(d);
    std::vector<std::string> n{"nested vsup"};
    for (const auto& v : t.nested) n.push_back(text_cell(v, decimal));
    rows.push_back(n);
    return render_table(rows, "  ");
}

bool table_integral(const StrategyTable& t) {
    auto ok = [](const std::optional<Vec>& v) { return !v || integral(*v); };
    for (const auto& row : t.per_model) {
        if (!std::all_of(row.begin(), row.end(), ok)) return false;
    }
    return std::all_of(t.direct.begin(), t.direct.end(), ok) && std::all_of(t.nested.begin(), t.nested.end(), ok);
}

Json table_json(const ControlledProblem& p, const StrategyTable& t) {
    const auto& tree = p.tree;
    auto opt = [](const std::optional<Vec>& v) { return v ? vec_json(*v) : Json(nullptr); };
    Json j;
    j["strategy"] = t.name;
    Json loss = Json::object();
    const auto& leaves = tree.level(tree.horizon());
    for (std::size_t k = 0; k < leaves.size(); ++k) loss[tree.node(leaves[k]).name] = vec_json(t.loss.values[k]);
    j["terminal_loss"] = loss;
    Json cols = Json::array();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        Json col;
        col["time"] = t.columns[c].time;
        col["node"] = tree.node(t.columns[c].node).name;
        Json models = Json::object();
        for (std::size_t m = 0; m < t.per_model.size(); ++m) models[p.family[m].id] = opt(t.per_model[m][c]);
        col["expectations"] = models;
        col["vsup"] = opt(t.direct[c]);
        col["nested_vsup"] = opt(t.nested[c]);
        cols.push_back(col);
    }
    j["columns"] = cols;
    return j;
}

// ---------------------------------------------------------------- sets and verdicts

std::string subscripted(const std::string& symbol, int t, const std::string& label) {
    return symbol + std::to_string(t) + "(" + label + ")";
}

bool at_root_only(const Instance& instance, const ValueSet& set) {
    return set.time == 0 && set.locals.size() == 1 && set.locals.front().node == instance.problem.tree.root();
}

void text_sets(std::ostringstream& out, const Instance& instance, const std::string& symbol, const ValueSet& set) {
    for (const auto& local : set.locals) {
        out << set_name(symbol, instance, set, local) << " = " << to_string(local.elements) << "\n";
        if (!integral(local.elements)) out << "  ≈ " << to_decimal(local.elements) << "\n";
    }
}

Json sets_json(const Instance& instance, const ValueSet& set) {
    Json a = Json::array();
    for (const auto& local : set.locals) {
        Json j;
        j["time"] = set.time;
        j["node"] = instance.problem.tree.node(local.node).name;
        j["state"] = local.state;
        j["elements"] = set_json(local.elements);
        j["decimal"] = set_decimal_json(local.elements);
        j["provenance"] = local.provenance;
        a.push_back(j);
    }
    return a;
}

std::vector<int> selected_times(const BellmanReport& report, std::optional<int> time) {
    std::vector<int> out;
    for (const auto& tr : report.times) {
        if (!time || *time == tr.time) out.push_back(tr.time);
    }
    return out;
}

std::string kind_name(RelationKind k) {
    switch (k) {
        case RelationKind::Weak: return "weak";
        case RelationKind::Strong: return "strong";
        case RelationKind::Equality: return "equality";
    }
    return "";
}

std::string principle_summary(const Instance& instance, const BellmanReport& report) {
    const auto& label = instance.family_label;
    if (!report.holds(RelationKind::Weak)) return "weak relations FAIL for " + label;
    if (report.holds(RelationKind::Equality)) {
        const auto v = subscripted("V", 0, label);
        return "all relations hold: " + (report.backward_pruned ? "ext(" + v + ")" : v) + " = " +
               subscripted("B", 0, label) + ", " + v + " = " + subscripted("R", 0, label);
    }
    if (report.holds(RelationKind::Strong)) return "weak and strong relations hold for " + label + "; the sets differ";
    return "weak relations hold for " + label + "; strong relations fail";
}

void text_verdicts(std::ostringstream& out, const Instance& instance, const BellmanReport& report,
                   const std::vector<int>& times) {
    const auto& label = instance.family_label;
    out << "Bellman relations for " << label << " (m-rectangular: " << yes_no(report.m_rectangular)
        << "; cone: " << cone_summary(instance.problem.cone) << ")\n";
    out << "  expected: weak always";
    if (report.strong_expected) out << ", strong";
    if (report.equality_expected) out << ", equality";
    out << "\n";
    for (int t : times) {
        const auto& tr = report.times[static_cast<std::size_t>(t)];
        out << "t=" << t << "\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : tr.relations) rows.push_back({kind_name(r.kind), r.id, pass_fail(r.holds)});
        out << render_table(rows, "  ");
        for (const auto& r : tr.relations) {
            if (!r.holds) out << "  witness for " << r.id << " failure at " << r.witness << "\n";
        }
        const auto ts = std::to_string(t);
        if (report.strict_weak(t)) {
            if (!tr.relation("V ⊆ B + C").holds) {
                out << "  strict: B" << ts << "(" << label << ") + C ⊊ V" << ts << "(" << label << ") + C\n";
            }
            if (!tr.relation("B ⊆ V − C").holds) {
                out << "  strict: V" << ts << "(" << label << ") − C ⊊ B" << ts << "(" << label << ") − C\n";
            }
            if (!tr.relation("V ⊆ R + C").holds) {
                out << "  strict: R" << ts << "(" << label << ") + C ⊊ V" << ts << "(" << label << ") + C\n";
            }
            if (!tr.relation("R ⊆ V − C").holds) {
                out << "  strict: V" << ts << "(" << label << ") − C ⊊ R" << ts << "(" << label << ") − C\n";
            }
        }
    }
    out << "summary: " << principle_summary(instance, report) << "\n";
    if (!report.expectations_met()) out << "summary: a relation expected under the hypotheses FAILED\n";
}

Json verdicts_json(const Instance& instance, const BellmanReport& report, const std::vector<int>& times) {
    Json j;
    j["m_rectangular"] = report.m_rectangular;
    j["componentwise"] = report.componentwise;
    j["pointed"] = report.pointed;
    j["strong_expected"] = report.strong_expected;
    j["equality_expected"] = report.equality_expected;
    Json ts = Json::array();
    for (int t : times) {
        const auto& tr = report.times[static_cast<std::size_t>(t)];
        Json tj;
        tj["time"] = t;
        tj["strict_weak"] = report.strict_weak(t);
        Json rels = Json::array();
        for (const auto& r : tr.relations) {
            Json rj;
            rj["relation"] = r.id;
            rj["kind"] = kind_name(r.kind);
            rj["holds"] = r.holds;
            rj["locations"] = r.locations;
            if (!r.holds) rj["witness"] = r.witness;
            rels.push_back(rj);
        }
        tj["relations"] = rels;
        ts.push_back(tj);
    }
    j["times"] = ts;
    j["summary"] = principle_summary(instance, report);
    j["expectations_met"] = report.expectations_met();
    return j;
}

void text_all_sets(std::ostringstream& out, const Instance& instance, const BellmanReport& report,
                   const std::vector<int>& times) {
    for (int t : times) {
        const auto idx = static_cast<std::size_t>(t);
        text_sets(out, instance, "V", report.value[idx]);
        text_sets(out, instance, "R", report.one_step[idx]);
        text_sets(out, instance, "B", report.backward[idx]);
    }
}

Json all_sets_json(const Instance& instance, const BellmanReport& report, const std::vector<int>& times) {
    Json j;
    Json v = Json::array(), r = Json::array(), b = Json::array();
    for (int t : times) {
        const auto idx = static_cast<std::size_t>(t);
        for (auto& x : sets_json(instance, report.value[idx])) v.push_back(x);
        for (auto& x : sets_json(instance, report.one_step[idx])) r.push_back(x);
        for (auto& x : sets_json(instance, report.backward[idx])) b.push_back(x);
    }
    j["V"] = v;
    j["R"] = r;
    j["B"] = b;
    return j;
}

void check_time(const BellmanReport& report, std::optional<int> time) {
    if (time && (*time < 0 || *time >= static_cast<int>(report.times.size()))) {
        throw Error(ErrorCode::InvalidArgument, "--time " + std::to_string(*time) + " outside 0.." +
                                                    std::to_string(static_cast<int>(report.times.size()) - 1));
    }
}

std::string header(const Instance& instance) {
    const auto& p = instance.problem;
    return "family " + instance.family_label + ": " + std::to_string(p.family.size()) + " models, d = " +
           std::to_string(p.dim()) + ", horizon " + std::to_string(p.tree.horizon()) + ", cone " +
           to_string(p.cone.kind()) + ", " + (p.tabulated() ? "tabulated" : "dynamics") + " problem\n";
}

}  // namespace

std::string set_name(const std::string& symbol, const Instance& instance, const ValueSet& set,
                     const LocalValueSet& local) {
    std::string s = subscripted(symbol, set.time, instance.family_label);
    if (!at_root_only(instance, set)) {
        s += "[" + instance.problem.tree.node(local.node).name + ", " + local.state + "]";
    }
    return s;
}

std::string emit_tables(const Instance& instance, const BellmanReport& report, std::optional<int> time,
                        OutputFormat format) {
    check_time(report, time);
    const auto& p = instance.problem;
    const auto times = selected_times(report, time);
    const auto strategies = enumerate_strategies(p);
    std::vector<StrategyTable> tables;
    if (strategies.size() <= kMaxTabulatedStrategies) {
        for (const auto& s : strategies) tables.push_back(build_table(p, s));
    }

    if (format == OutputFormat::Json) {
        Json j;
        j["family"] = instance.family_label;
        j["dimension"] = p.dim();
        j["horizon"] = p.tree.horizon();
        j["cone"] = to_string(p.cone.kind());
        Json names = Json::array();
        for (const auto& s : strategies) names.push_back(s.describe(p.tree));
        j["strategies"] = names;
        Json tj = Json::array();
        for (const auto& t : tables) tj.push_back(table_json(p, t));
        j["tables"] = tj;
        j["sets"] = all_sets_json(instance, report, times);
        j["bellman"] = verdicts_json(instance, report, times);
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << header(instance);
    out << "strategies: ";
    for (std::size_t i = 0; i < strategies.size(); ++i) out << (i ? ", " : "") << strategies[i].describe(p.tree);
    out << "\n";
    if (tables.empty()) {
        out << "(" << strategies.size() << " strategies; per-strategy tables omitted above "
            << kMaxTabulatedStrategies << ")\n";
    }
    for (const auto& t : tables) {
        out << "\n[" << t.name << "] terminal loss:";
        const auto& leaves = p.tree.level(p.tree.horizon());
        for (std::size_t k = 0; k < leaves.size(); ++k) {
            out << "  " << p.tree.node(leaves[k]).name << " " << to_string(t.loss.values[k]);
        }
        out << "\n[" << t.name << "] conditional expectations\n";
        out << render_strategy_table(p, t, false);
        if (!table_integral(t)) {
            out << "[" << t.name << "] decimal\n";
            out << render_strategy_table(p, t, true);
        }
    }
    out << "\n";
    text_all_sets(out, instance, report, times);
    out << "\n";
    text_verdicts(out, instance, report, times);
    return out.str();
}

std::string emit_bellman(const Instance& instance, const BellmanReport& report, std::optional<int> time,
                         OutputFormat format) {
    check_time(report, time);
    const auto times = selected_times(report, time);
    if (format == OutputFormat::Json) {
        Json j;
        j["family"] = instance.family_label;
        j["sets"] = all_sets_json(instance, report, times);
        j["bellman"] = verdicts_json(instance, report, times);
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << header(instance);
    text_all_sets(out, instance, report, times);
    out << "\n";
    text_verdicts(out, instance, report, times);
    return out.str();
}

std::string emit_vsup(const Cone& cone, const std::vector<Vec>& points, const SupResult& result, OutputFormat format) {
    if (format == OutputFormat::Json) {
        Json j;
        j["cone"] = to_string(cone.kind());
        Json pts = Json::array();
        for (const auto& v : points) pts.push_back(vec_json(v));
        j["points"] = pts;
        j["status"] = to_string(result.status);
        auto put = [&](const char* key, const std::optional<Vec>& v) {
            if (v) j[key] = vec_json(*v);
        };
        put("value", result.value);
        put("witness", result.witness);
        put("candidate", result.candidate);
        put("certificate", result.certificate);
        if (!result.explanation.empty()) j["explanation"] = result.explanation;
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "cone: " << cone_summary(cone) << "\n";
    out << "points:";
    for (const auto& v : points) out << " " << to_string(v);
    out << "\nstatus: " << to_string(result.status) << "\n";
    auto line = [&](const char* key, const std::optional<Vec>& v) {
        if (!v) return;
        out << key << " = " << to_string(*v);
        if (!integral(*v)) out << "  ≈ " << to_decimal(*v);
        out << "\n";
    };
    line("vsup", result.value);
    line("witness", result.witness);
    line("candidate", result.candidate);
    line("certificate", result.certificate);
    if (!result.explanation.empty()) out << "note: " << result.explanation << "\n";
    return out.str();
}

std::string emit_rect(const Instance& instance, const RectOutcome& outcome, OutputFormat format) {
    const auto& tree = instance.problem.tree;
    const auto& rep = outcome.preorder;
    if (format == OutputFormat::Json) {
        Json j;
        j["family"] = instance.family_label;
        j["m_rectangular"] = outcome.m_rectangular;
        Json m = Json::object();
        for (auto n : tree.internal_nodes()) {
            Json c = Json::array();
            for (const auto& p : outcome.marginals.candidates[n]) {
                Json v = Json::array();
                for (const auto& x : p) v.push_back(to_string(x));
                c.push_back(v);
            }
            m[tree.node(n).name] = c;
        }
        j["marginals"] = m;
        Json r;
        r["vectors_checked"] = rep.vectors_checked;
        r["counterexamples"] = rep.counterexamples;
        r["reverse_failures"] = rep.reverse_failures;
        r["nonexistent"] = rep.nonexistent;
        if (rep.seed) r["seed"] = *rep.seed;
        r["summary"] = rep.summary();
        Json ex = Json::array();
        for (const auto& e : rep.entries) {
            if (e.nested_below_direct && e.note.empty()) continue;
            Json ej;
            ej["vector"] = e.vector_index;
            ej["time"] = e.time;
            if (!e.note.empty()) ej["note"] = e.note;
            ex.push_back(ej);
        }
        r["failures"] = ex;
        j["preorder_rectangularity"] = r;
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "family " << instance.family_label << ": " << instance.problem.family.size() << " models\n";
    out << "m-rectangular: " << yes_no(outcome.m_rectangular) << "\n";
    out << "marginals:\n";
    for (auto n : tree.internal_nodes()) {
        out << "  " << tree.node(n).name << ":";
        for (const auto& p : outcome.marginals.candidates[n]) {
            out << " [";
            for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << to_string(p[k]);
            out << "]";
        }
        out << "\n";
    }
    std::size_t product = 1;
    for (auto n : tree.internal_nodes()) product *= outcome.marginals.candidates[n].size();
    out << "rectangular hull: " << product << " models\n";
    out << "preorder rectangularity: " << rep.summary() << "\n";
    std::size_t shown = 0;
    for (const auto& e : rep.entries) {
        if (e.nested_below_direct && e.note.empty()) continue;
        if (++shown > 5) break;
        out << "  vector " << e.vector_index << ", t=" << e.time << ": ";
        if (!e.note.empty()) {
            out << e.note << "\n";
        } else {
            out << "nested supremum is not below the direct one\n";
        }
    }
    return out.str();
}

std::string emit_pareto(const Instance& instance, const std::vector<ValueSet>& generators,
                        const UpperImageReport& recursion, OutputFormat format) {
    if (format == OutputFormat::Json) {
        Json j;
        j["family"] = instance.family_label;
        Json g = Json::array();
        for (const auto& vs : generators) {
            for (auto& x : sets_json(instance, vs)) g.push_back(x);
        }
        j["generators"] = g;
        j["m_rectangular"] = recursion.m_rectangular;
        j["combinations"] = recursion.combinations;
        j["inclusion_holds"] = recursion.inclusion_holds;
        j["equality_holds"] = recursion.equality_holds ? Json(*recursion.equality_holds) : Json(nullptr);
        if (!recursion.witness.empty()) j["witness"] = recursion.witness;
        j["summary"] = recursion.summary();
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << header(instance);
    out << "Pareto generators (upper image = generators + R^d_+):\n";
    for (const auto& vs : generators) text_sets(out, instance, "P", vs);
    out << "upper-image recursion: " << recursion.summary() << "\n";
    if (!recursion.witness.empty()) out << "  witness: " << recursion.witness << "\n";
    return out.str();
}

}  // namespace robust_vdp
