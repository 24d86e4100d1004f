#include "cpat/assembler.hpp"

#include <algorithm>
#include <sstream>

#include "cpat/errors.hpp"

namespace cpat {

namespace {

struct PatternUse {
    bool flow_shop = false;
    std::vector<std::string> used;
};

PatternUse validate_patterns(const ProblemInstance& inst,
                             const std::vector<std::string>& patterns) {
    PatternUse use;
    bool job_shop = false;
    for (const std::string& id : patterns) {
        if (id == "JobShop") {
            job_shop = true;
        } else if (id == "FlowShop") {
            use.flow_shop = true;
        } else {
            throw UnsupportedPattern(id, "assemble: no modelling variant for pattern '" + id +
                                             "' (metadata-only or unpublished)");
        }
    }
    if (!job_shop)
        throw PreconditionViolated("assemble: the JobShop pattern is required (FlowShop forces it)");
    if (use.flow_shop && !routes_are_flow_shop(inst))
        throw PreconditionViolated(
            "assemble: FlowShop template requested but the instance routes are not a flow shop");
    use.used.push_back("JobShop");
    if (use.flow_shop) use.used.push_back("FlowShop");
    return use;
}

const char* unit_comment(const ProblemInstance& inst) {
    return inst.unit == TimeUnit::Milliseconds ? "milliseconds" : "abstract time units";
}

// Flattened view of a ragged instance, job-major in route order, 1-based.
struct FlatOps {
    std::vector<std::size_t> job, pos, machine;
    std::vector<std::int64_t> duration;
    std::vector<std::size_t> job_first;  // first flat index of each job (1-based)

    explicit FlatOps(const ProblemInstance& inst) {
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            job_first.push_back(job.size() + 1);
            for (std::size_t k = 0; k < inst.route[j].size(); ++k) {
                job.push_back(j + 1);
                pos.push_back(k + 1);
                machine.push_back(inst.route[j][k] + 1);
                duration.push_back(inst.duration[j][k]);
            }
        }
    }

    std::size_t size() const { return job.size(); }
};

template <typename T>
std::string int_list(const std::vector<T>& values) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ", ";
        out << values[i];
    }
    out << ']';
    return out.str();
}

}  // namespace

ModelArtifact emit_minizinc(const ProblemInstance& inst,
                            const std::vector<std::string>& patterns) {
    PatternUse use = validate_patterns(inst, patterns);
    const std::int64_t horizon = inst.total_duration();
    std::ostringstream out;

    if (use.flow_shop) {
        out << "% flow-shop schedule, minimize makespan (template fs.mzn.v1)\n";
        out << "% " << inst.n_jobs << " jobs, " << inst.n_machines << " machines, "
            << inst.total_operations() << " operations; durations in " << unit_comment(inst)
            << "\n";
        out << "include \"disjunctive.mzn\";\n\n";
        out << "int: n_jobs = " << inst.n_jobs << ";\n";
        out << "int: n_machines = " << inst.n_machines << ";\n";
        out << "int: horizon = " << horizon << ";\n";
        std::vector<std::size_t> shared_route;
        if (!inst.route.empty())
            for (std::size_t m : inst.route.front()) shared_route.push_back(m + 1);
        out << "% machine visited at each route position, shared by all jobs\n";
        out << "array[1..n_machines] of int: route = " << int_list(shared_route) << ";\n";
        out << "array[1..n_jobs, 1..n_machines] of int: duration = [|";
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            if (j) out << " |";
            for (std::size_t k = 0; k < inst.duration[j].size(); ++k)
                out << (k ? ", " : " ") << inst.duration[j][k];
        }
        out << " |];\n\n";
        out << "array[1..n_jobs, 1..n_machines] of var 0..horizon: start;\n";
        out << "var 0..horizon: makespan;\n\n";
        out << "% each operation waits for its job predecessor\n";
        for (std::size_t j = 1; j <= inst.n_jobs; ++j)
            for (std::size_t k = 2; k <= inst.n_machines; ++k)
                out << "constraint start[" << j << ", " << k << "] >= start[" << j << ", " << k - 1
                    << "] + duration[" << j << ", " << k - 1 << "];\n";
        out << "\n% one operation at a time per machine\n";
        for (std::size_t m = 1; m <= inst.n_machines; ++m) {
            std::size_t position = 1;
            for (std::size_t k = 0; k < shared_route.size(); ++k)
                if (shared_route[k] == m) position = k + 1;
            out << "constraint disjunctive([start[j, " << position << "] | j in 1..n_jobs], "
                << "[duration[j, " << position << "] | j in 1..n_jobs]);\n";
        }
        out << "\n% makespan covers the last operation of every job\n";
        for (std::size_t j = 1; j <= inst.n_jobs; ++j)
            out << "constraint makespan >= start[" << j << ", n_machines] + duration[" << j
                << ", n_machines];\n";
        out << "\nsolve :: int_search([start[j, k] | j in 1..n_jobs, k in 1..n_machines], "
               "smallest, indomain_min) minimize makespan;\n";
        out << "\noutput [\"makespan = \", show(makespan), \"\\n\"];\n";
    } else {
        FlatOps flat(inst);
        out << "% job-shop schedule, minimize makespan (template js.mzn.v1)\n";
        out << "% " << inst.n_jobs << " jobs, " << inst.n_machines << " machines, " << flat.size()
            << " operations; durations in " << unit_comment(inst) << "\n";
        out << "include \"disjunctive.mzn\";\n\n";
        out << "int: n_ops = " << flat.size() << ";\n";
        out << "int: n_machines = " << inst.n_machines << ";\n";
        out << "int: horizon = " << horizon << ";\n";
        out << "% operations flattened job-major in route order\n";
        out << "array[1..n_ops] of int: op_job = " << int_list(flat.job) << ";\n";
        out << "array[1..n_ops] of int: op_pos = " << int_list(flat.pos) << ";\n";
        out << "array[1..n_ops] of int: op_machine = " << int_list(flat.machine) << ";\n";
        out << "array[1..n_ops] of int: op_duration = " << int_list(flat.duration) << ";\n\n";
        out << "array[1..n_ops] of var 0..horizon: start;\n";
        out << "var 0..horizon: makespan;\n\n";
        out << "% each operation waits for its job predecessor\n";
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            std::size_t first = flat.job_first[j];
            for (std::size_t k = 1; k < inst.route[j].size(); ++k)
                out << "constraint start[" << first + k << "] >= start[" << first + k - 1
                    << "] + op_duration[" << first + k - 1 << "];\n";
        }
        out << "\n% one operation at a time per machine\n";
        for (std::size_t m = 1; m <= inst.n_machines; ++m) {
            std::vector<std::size_t> ops;
            for (std::size_t o = 0; o < flat.size(); ++o)
                if (flat.machine[o] == m) ops.push_back(o + 1);
            out << "constraint disjunctive([start[o] | o in " << int_list(ops)
                << "], [op_duration[o] | o in " << int_list(ops) << "]);\n";
        }
        out << "\n% makespan covers the last operation of every job\n";
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            if (inst.route[j].empty()) continue;
            std::size_t last = flat.job_first[j] + inst.route[j].size() - 1;
            out << "constraint makespan >= start[" << last << "] + op_duration[" << last << "];\n";
        }
        out << "\nsolve :: int_search(start, smallest, indomain_min) minimize makespan;\n";
        out << "\noutput [\"makespan = \", show(makespan), \"\\n\"];\n";
    }

    ModelArtifact artifact;
    artifact.dialect = Dialect::MiniZinc;
    artifact.text = out.str();
    artifact.patterns_used = use.used;
    artifact.instance_digest = instance_digest(inst);
    artifact.template_id = use.flow_shop ? "fs.mzn.v1" : "js.mzn.v1";
    return artifact;
}

ModelArtifact emit_opl(const ProblemInstance& inst, const std::vector<std::string>& patterns,
                       const EmitOptions& options) {
    PatternUse use = validate_patterns(inst, patterns);
    std::ostringstream out;
    std::ostringstream dat;

    // Data declarations: inline "int x = v;" or external "int x = ...;" plus
    // a .dat assignment.
    auto data_decl = [&](const std::string& decl, const std::string& name,
                         const std::string& value) {
        if (options.split_data) {
            out << decl << " = ...;\n";
            dat << name << " = " << value << ";\n";
        } else {
            out << decl << " = " << value << ";\n";
        }
    };

    if (use.flow_shop) {
        out << "// flow-shop schedule, minimize makespan (template fs.opl.v1)\n";
        out << "// " << inst.n_jobs << " jobs, " << inst.n_machines << " machines, "
            << inst.total_operations() << " operations; durations in " << unit_comment(inst)
            << "\n";
        out << "using CP;\n\n";
        data_decl("int nJobs", "nJobs", std::to_string(inst.n_jobs));
        data_decl("int nMachines", "nMachines", std::to_string(inst.n_machines));
        out << "range Jobs = 1..nJobs;\n";
        out << "range Positions = 1..nMachines;\n";
        std::vector<std::size_t> shared_route;
        if (!inst.route.empty())
            for (std::size_t m : inst.route.front()) shared_route.push_back(m + 1);
        data_decl("int route[Positions]", "route", int_list(shared_route));
        {
            std::ostringstream rows;
            rows << '[';
            for (std::size_t j = 0; j < inst.n_jobs; ++j) {
                if (j) rows << ", ";
                rows << int_list(inst.duration[j]);
            }
            rows << ']';
            data_decl("int duration[Jobs][Positions]", "duration", rows.str());
        }
        out << "\n// one interval decision variable per operation (" << inst.n_machines
            << " per job)\n";
        out << "dvar interval op[j in Jobs][k in Positions] size duration[j][k];\n";
        out << "// one sequence decision variable per machine\n";
        out << "dvar sequence machineSeq[m in 1..nMachines] in "
               "all(j in Jobs, k in Positions: route[k] == m) op[j][k];\n\n";
        out << "minimize max(j in Jobs) endOf(op[j][nMachines]);\n";
        out << "subject to {\n";
        for (std::size_t j = 1; j <= inst.n_jobs; ++j)
            for (std::size_t k = 2; k <= inst.n_machines; ++k)
                out << "  endBeforeStart(op[" << j << "][" << k - 1 << "], op[" << j << "][" << k
                    << "]);\n";
        for (std::size_t m = 1; m <= inst.n_machines; ++m)
            out << "  noOverlap(machineSeq[" << m << "]);\n";
        out << "}\n";
    } else {
        FlatOps flat(inst);
        out << "// job-shop schedule, minimize makespan (template js.opl.v1)\n";
        out << "// " << inst.n_jobs << " jobs, " << inst.n_machines << " machines, " << flat.size()
            << " operations; durations in " << unit_comment(inst) << "\n";
        out << "using CP;\n\n";
        data_decl("int nOps", "nOps", std::to_string(flat.size()));
        data_decl("int nMachines", "nMachines", std::to_string(inst.n_machines));
        out << "range Ops = 1..nOps;\n";
        out << "// operations flattened job-major in route order\n";
        data_decl("int opJob[Ops]", "opJob", int_list(flat.job));
        data_decl("int opPos[Ops]", "opPos", int_list(flat.pos));
        data_decl("int opMachine[Ops]", "opMachine", int_list(flat.machine));
        data_decl("int opDuration[Ops]", "opDuration", int_list(flat.duration));
        out << "\n// one interval decision variable per operation\n";
        out << "dvar interval op[o in Ops] size opDuration[o];\n";
        out << "// one sequence decision variable per machine\n";
        out << "dvar sequence machineSeq[m in 1..nMachines] in "
               "all(o in Ops: opMachine[o] == m) op[o];\n\n";
        out << "minimize max(o in Ops) endOf(op[o]);\n";
        out << "subject to {\n";
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            std::size_t first = flat.job_first[j];
            for (std::size_t k = 1; k < inst.route[j].size(); ++k)
                out << "  endBeforeStart(op[" << first + k - 1 << "], op[" << first + k << "]);\n";
        }
        for (std::size_t m = 1; m <= inst.n_machines; ++m)
            out << "  noOverlap(machineSeq[" << m << "]);\n";
        out << "}\n";
    }

    ModelArtifact artifact;
    artifact.dialect = Dialect::Opl;
    artifact.text = out.str();
    artifact.data_text = dat.str();
    artifact.patterns_used = use.used;
    artifact.instance_digest = instance_digest(inst);
    artifact.template_id = use.flow_shop ? "fs.opl.v1" : "js.opl.v1";
    return artifact;
}

std::vector<VariantSelection> select_variants(const DetectionReport& report, Dialect dialect) {
    const bool mzn = dialect == Dialect::MiniZinc;
    const Verdict* job_shop = report.find("JobShop");
    const Verdict* flow_shop = report.find("FlowShop");
    if (!job_shop || !job_shop->holds()) return {};
    if (flow_shop && flow_shop->holds())
        return {{"FlowShop", mzn ? "fs.mzn.v1" : "fs.opl.v1"}};
    return {{"JobShop", mzn ? "js.mzn.v1" : "js.opl.v1"}};
}

std::vector<std::string> assemblable_patterns(const DetectionReport& report) {
    const Verdict* job_shop = report.find("JobShop");
    if (!job_shop || !job_shop->holds()) return {};
    std::vector<std::string> patterns{"JobShop"};
    const Verdict* flow_shop = report.find("FlowShop");
    if (flow_shop && flow_shop->holds()) patterns.push_back("FlowShop");
    return patterns;
}

}  // namespace cpat
