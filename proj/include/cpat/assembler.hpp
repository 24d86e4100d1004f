// Constraint-model text emission from detected patterns.
//
// Emitted models are plain text in two dialects (MiniZinc-style and
// OPL-style); instance data is inlined. No solver is invoked on the output —
// the embedded branch-and-bound solver consumes ProblemInstance directly.
// Templates are versioned (js.mzn.v1, fs.mzn.v1, js.opl.v1, fs.opl.v1);
// the flow-shop templates use the streamlined job x machine layout that the
// shared route makes possible.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpat/detection.hpp"
#include "cpat/instance.hpp"

namespace cpat {

enum class Dialect { MiniZinc, Opl };

struct ModelArtifact {
    Dialect dialect = Dialect::MiniZinc;
    std::string text;
    /// OPL with split data: the companion .dat content. Empty when inlined.
    std::string data_text;
    std::vector<std::string> patterns_used;
    std::string instance_digest;
    std::string template_id;
};

struct EmitOptions {
    /// OPL only: put instance data into a separate .dat artifact.
    bool split_data = false;
};

/// Emits the MiniZinc-dialect model: one integer start variable per
/// operation, one precedence constraint per consecutive route pair, one
/// disjunctive constraint per machine, makespan objective. Requires
/// "JobShop" in `patterns` (PreconditionViolated); metadata-only ids and ids
/// without a template raise UnsupportedPattern. With "FlowShop" the
/// streamlined layout is used (requires inst.flow_shop).
ModelArtifact emit_minizinc(const ProblemInstance& inst,
                            const std::vector<std::string>& patterns);

/// OPL dialect: one interval variable per operation, per-job precedence
/// constraints, a sequence variable with a no-overlap constraint per
/// machine, makespan objective. Same pattern requirements as emit_minizinc.
ModelArtifact emit_opl(const ProblemInstance& inst, const std::vector<std::string>& patterns,
                       const EmitOptions& options = {});

struct VariantSelection {
    std::string pattern;
    std::string template_id;
};

/// Chooses the most specific applicable template set for a report: the
/// flow-shop template when FlowShop holds, the job-shop template when only
/// JobShop holds, nothing otherwise.
std::vector<VariantSelection> select_variants(const DetectionReport& report, Dialect dialect);

/// Patterns to pass to the emitters for a report (JobShop plus FlowShop when
/// it holds), empty when nothing is assemblable.
std::vector<std::string> assemblable_patterns(const DetectionReport& report);

}  // namespace cpat
