#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robust_vdp/dp_engine.hpp"
#include "robust_vdp/instance_io.hpp"
#include "robust_vdp/rectangular.hpp"

namespace robust_vdp {

enum class OutputFormat { Text, Json };

/// Strategies beyond this count are summarised instead of tabulated.
inline constexpr std::size_t kMaxTabulatedStrategies = 16;

/// "V0(Theta)" at the root, "V1(Theta)[u, {phi}]" elsewhere.
std::string set_name(const std::string& symbol, const Instance& instance, const ValueSet& set,
                     const LocalValueSet& local);

/// Per-strategy conditional expectation tables, suprema rows, value sets and
/// Bellman verdicts. Output depends only on the inputs (byte-stable).
/// `time` restricts the value-set section to one time.
std::string emit_tables(const Instance& instance, const BellmanReport& report, std::optional<int> time = std::nullopt,
                        OutputFormat format = OutputFormat::Text);

/// Value sets and relation verdicts only.
std::string emit_bellman(const Instance& instance, const BellmanReport& report, std::optional<int> time = std::nullopt,
                         OutputFormat format = OutputFormat::Text);

std::string emit_vsup(const Cone& cone, const std::vector<Vec>& points, const SupResult& result,
                      OutputFormat format = OutputFormat::Text);

struct RectOutcome {
    bool m_rectangular = false;
    MarginalSets marginals;
    RectangularityReport preorder;
};

std::string emit_rect(const Instance& instance, const RectOutcome& outcome, OutputFormat format = OutputFormat::Text);

/// `generators[t]` holds the Pareto generators of V_t.
std::string emit_pareto(const Instance& instance, const std::vector<ValueSet>& generators,
                        const UpperImageReport& recursion, OutputFormat format = OutputFormat::Text);

}  // namespace robust_vdp
