#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robust_vdp/dp_engine.hpp"
#include "robust_vdp/error.hpp"
#include "robust_vdp/instance_io.hpp"
#include "robust_vdp/rectangular.hpp"
#include "robust_vdp/report.hpp"

namespace {

using namespace robust_vdp;

constexpr int kExitOk = 0;
constexpr int kExitRelationFails = 1;
constexpr int kExitInput = 2;
constexpr int kExitScale = 3;

struct CommonArgs {
    std::string instance;
    std::optional<int> time;
    bool prune = false;
    std::optional<std::size_t> budget;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_instance = true) {
    auto* opt = cmd->add_option("--instance", args.instance, "instance file (JSON)");
    if (needs_instance) opt->required();
    cmd->add_option("--time", args.time, "restrict output to one time");
    cmd->add_flag("--prune", args.prune, "keep only extremal elements of backward sets");
    cmd->add_option("--budget", args.budget, "enumeration / selector budget")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--format", args.format, "output format")->check(CLI::IsMember({"text", "json"}));
}

OutputFormat format_of(const CommonArgs& args) {
    return args.format == "json" ? OutputFormat::Json : OutputFormat::Text;
}

/// Precedence: --budget, then ROBUST_VDP_BUDGET, then the instance, then the default.
void apply_overrides(Instance& inst, const CommonArgs& args) {
    auto& opts = inst.problem.options;
    if (args.budget) {
        opts.budget = *args.budget;
    } else if (const char* env = std::getenv("ROBUST_VDP_BUDGET"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used != std::string(env).size() || v == 0) throw std::invalid_argument(env);
            opts.budget = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument,
                        "ROBUST_VDP_BUDGET must be a positive integer, got \"" + std::string(env) + "\"");
        }
    }
    if (args.prune) opts.prune = true;
    if (args.seed) opts.seed = args.seed;
}

Instance load(const CommonArgs& args) {
    Instance inst = load_instance(args.instance);
    apply_overrides(inst, args);
    return inst;
}

int run_solve(const CommonArgs& args) {
    auto inst = load(args);
    auto report = check_bellman(inst.problem, BellmanOptions{inst.problem.options.prune});
    std::cout << emit_tables(inst, report, args.time, format_of(args));
    return kExitOk;
}

int run_check_bellman(const CommonArgs& args) {
    auto inst = load(args);
    auto report = check_bellman(inst.problem, BellmanOptions{inst.problem.options.prune});
    std::cout << emit_bellman(inst, report, args.time, format_of(args));
    for (const auto& tr : report.times) {
        if (args.time && *args.time != tr.time) continue;
        for (const auto& r : tr.relations) {
            if (!r.holds) return kExitRelationFails;
        }
    }
    return kExitOk;
}

int run_rect(const CommonArgs& args, const std::string& vectors_file, std::optional<std::size_t> random_count) {
    auto inst = load(args);
    const auto& p = inst.problem;
    RectOutcome outcome;
    outcome.m_rectangular = is_m_rectangular(p.tree, p.family);
    outcome.marginals = extract_marginals(p.tree, p.family);
    std::vector<AdaptedVector> vectors;
    std::optional<std::uint64_t> seed;
    if (!vectors_file.empty()) {
        vectors = parse_test_vectors(read_file(vectors_file), p.tree);
    } else {
        seed = p.options.seed.value_or(0);
        vectors = random_test_vectors(p.tree, p.dim(), random_count.value_or(100), *seed);
    }
    outcome.preorder = check_preorder_rectangularity(p.cone, p.tree, p.family, vectors, p.options.limits);
    outcome.preorder.seed = seed;
    std::cout << emit_rect(inst, outcome, format_of(args));
    return outcome.m_rectangular && outcome.preorder.no_counterexample() ? kExitOk : kExitRelationFails;
}

int run_vsup(const CommonArgs& args, const std::string& cone_file, const std::string& points_file) {
    Cone cone = parse_cone(read_file(cone_file));
    auto points = parse_points(read_file(points_file));
    for (const auto& x : points) {
        if (x.dim() != cone.dim()) throw Error(ErrorCode::DimensionMismatch, "points and cone differ in dimension");
    }
    SupResult r = vsup(cone, points);
    std::cout << emit_vsup(cone, points, r, format_of(args));
    return r.exists() ? kExitOk : kExitScale;
}

int run_pareto(const CommonArgs& args) {
    auto inst = load(args);
    const auto& p = inst.problem;
    std::vector<ValueSet> gens;
    for (int t = 0; t <= p.tree.horizon(); ++t) {
        if (args.time && *args.time != t) continue;
        gens.push_back(upper_image(p, t));
    }
    if (args.time && gens.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--time " + std::to_string(*args.time) + " outside 0.." +
                                                    std::to_string(p.tree.horizon()));
    }
    auto rec = check_upper_image_recursion(p);
    std::cout << emit_pareto(inst, gens, rec, format_of(args));
    const bool ok = rec.inclusion_holds && rec.equality_holds.value_or(true);
    return ok ? kExitOk : kExitRelationFails;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust multi-objective dynamic programming on scenario trees"};
    app.require_subcommand(1);

    CommonArgs solve_args, bellman_args, rect_args, vsup_args, pareto_args;
    auto* solve = app.add_subcommand("solve", "value sets, expectation tables and Bellman verdicts");
    add_common(solve, solve_args);
    auto* bellman = app.add_subcommand("check-bellman", "check the set-valued Bellman relations");
    add_common(bellman, bellman_args);

    auto* rect = app.add_subcommand("rect", "rectangularity of the model family");
    add_common(rect, rect_args);
    std::string vectors_file;
    std::optional<std::size_t> random_count;
    auto* tv = rect->add_option("--test-vectors", vectors_file, "terminal test vectors (JSON)");
    rect->add_option("--random", random_count, "number of random test vectors")->excludes(tv);

    auto* vs = app.add_subcommand("vsup", "ideal-point supremum of a point list");
    add_common(vs, vsup_args, false);
    std::string cone_file, points_file;
    vs->add_option("--cone", cone_file, "cone file (JSON)")->required();
    vs->add_option("--points", points_file, "points file (JSON)")->required();

    auto* pareto = app.add_subcommand("pareto", "Pareto generators of the upper images");
    add_common(pareto, pareto_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*solve) return run_solve(solve_args);
        if (*bellman) return run_check_bellman(bellman_args);
        if (*rect) return run_rect(rect_args, vectors_file, random_count);
        if (*vs) return run_vsup(vsup_args, cone_file, points_file);
        if (*pareto) return run_pareto(pareto_args);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::DeskScaleExceeded || e.code() == ErrorCode::SupNotExists ? kExitScale
                                                                                                : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
