#include "cpat/registry.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cpat/errors.hpp"

namespace cpat {

void Registry::add(PatternDescriptor descriptor) {
    auto [it, inserted] = index_.try_emplace(descriptor.id, patterns_.size());
    if (!inserted) throw Error("registry: duplicate pattern id '" + descriptor.id + "'");
    patterns_.push_back(std::move(descriptor));
}

const PatternDescriptor* Registry::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &patterns_[it->second];
}

const PatternDescriptor& Registry::get(const std::string& id) const {
    const PatternDescriptor* p = find(id);
    if (!p) throw std::out_of_range("registry: unknown pattern '" + id + "'");
    return *p;
}

std::vector<std::string> Registry::evaluation_order() const {
    std::vector<std::string> order;
    std::map<std::string, int> state;  // 0 unseen, 1 visiting, 2 done
    auto visit = [&](auto&& self, const PatternDescriptor& p) -> void {
        int& s = state[p.id];
        if (s == 2) return;
        if (s == 1) throw Error("registry: cycle through necessary edges at '" + p.id + "'");
        s = 1;
        for (const std::string& dep : p.necessary)
            if (const PatternDescriptor* d = find(dep)) self(self, *d);
        s = 2;
        order.push_back(p.id);
    };
    for (const PatternDescriptor& p : patterns_) visit(visit, p);
    return order;
}

Registry load_registry() {
    Registry reg;

    PatternDescriptor job_shop;
    job_shop.id = "JobShop";
    job_shop.intent =
        "Jobs are processed on machines along a fixed per-job route, possibly visiting a machine "
        "more than once; a job runs at most one operation at a time and a machine processes at "
        "most one operation at a time.";
    job_shop.motivation =
        "The default machine environment of discrete manufacturing lines, where every product "
        "follows its own routing through shared equipment.";
    job_shop.applicability =
        "Every processing operation names a machine; operations of one job do not overlap; "
        "operations on one machine do not overlap; an activity always runs on the same machine. "
        "Timing comparisons tolerate the configured noise margin.";
    job_shop.has_evaluator = true;
    job_shop.relationships.enables = {"FlowShop", "NoWait", "MachineSetup"};
    job_shop.modelling_variants = {{"minizinc", "js.mzn.v1"}, {"opl", "js.opl.v1"}};
    job_shop.search_strategies = {"earliest-start-time"};
    job_shop.diagram_ref = "gantt: jobs routed individually across machines";
    reg.add(std::move(job_shop));

    PatternDescriptor flow_shop;
    flow_shop.id = "FlowShop";
    flow_shop.intent =
        "Every job visits every machine exactly once, and all jobs share one machine order.";
    flow_shop.motivation =
        "Production lines with a fixed station sequence; the shared order makes a streamlined "
        "variable layout possible.";
    flow_shop.applicability =
        "Job Shop holds; each job has exactly one operation per machine and all jobs traverse the "
        "machines in the same order.";
    flow_shop.necessary = {"JobShop"};
    flow_shop.has_evaluator = true;
    flow_shop.relationships.forces = {"JobShop"};
    flow_shop.relationships.enables = {"NoWait"};
    flow_shop.relationships.compatible_with = {"DistinguishableResources",
                                               "IndistinguishableResources"};
    flow_shop.modelling_variants = {{"minizinc", "fs.mzn.v1"}, {"opl", "fs.opl.v1"}};
    flow_shop.search_strategies = {"earliest-start-time"};
    flow_shop.diagram_ref = "gantt: identical machine order for all jobs";
    reg.add(std::move(flow_shop));

    PatternDescriptor no_wait;
    no_wait.id = "NoWait";
    no_wait.intent =
        "Consecutive operations of a job follow each other without waiting time in between.";
    no_wait.motivation =
        "Processes where material must not cool down, set or decay between steps.";
    no_wait.applicability =
        "Job Shop holds; within every job the gap between an operation's completion and the next "
        "operation's start stays within the noise margin.";
    no_wait.necessary = {"JobShop"};
    no_wait.has_evaluator = true;
    reg.add(std::move(no_wait));

    PatternDescriptor machine_setup;
    machine_setup.id = "MachineSetup";
    machine_setup.intent = "Machines need setup time between two consecutive operations.";
    machine_setup.motivation = "Tool changes and cleaning between different products.";
    machine_setup.applicability = "No executable conditions registered (metadata-only entry).";
    machine_setup.necessary = {"JobShop"};
    reg.add(std::move(machine_setup));

    PatternDescriptor dist;
    dist.id = "DistinguishableResources";
    dist.intent = "Operations require named resources that are individually distinguishable.";
    dist.applicability = "No executable conditions registered (metadata-only entry).";
    reg.add(std::move(dist));

    PatternDescriptor indist;
    indist.id = "IndistinguishableResources";
    indist.intent = "Operations draw from a pool of interchangeable resources.";
    indist.applicability = "No executable conditions registered (metadata-only entry).";
    reg.add(std::move(indist));

    return reg;
}

namespace {

void check_refs_exist(const Registry& reg, const PatternDescriptor& p,
                      const std::vector<std::string>& ids, const char* rule,
                      std::vector<RegistryViolation>& out) {
    for (const std::string& id : ids)
        if (!reg.find(id))
            out.push_back({p.id, rule, "references unknown pattern '" + id + "'"});
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b,
                std::string& witness) {
    for (const std::string& x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) {
            witness = x;
            return true;
        }
    return false;
}

}  // namespace

std::vector<RegistryViolation> validate_relationships(const Registry& registry) {
    std::vector<RegistryViolation> out;
    for (const PatternDescriptor& p : registry.patterns()) {
        check_refs_exist(registry, p, p.necessary, "unknown-necessary", out);
        check_refs_exist(registry, p, p.relationships.forces, "unknown-forces", out);
        check_refs_exist(registry, p, p.relationships.enables, "unknown-enables", out);
        check_refs_exist(registry, p, p.relationships.incompatible_with, "unknown-incompatible",
                         out);
        check_refs_exist(registry, p, p.relationships.compatible_with, "unknown-compatible", out);
        check_refs_exist(registry, p, p.relationships.similar_to, "unknown-similar", out);

        std::string witness;
        if (intersects(p.relationships.incompatible_with, p.relationships.compatible_with,
                       witness))
            out.push_back({p.id, "incompatible-and-compatible",
                           "'" + witness + "' is listed as both incompatible and compatible"});
        if (intersects(p.relationships.incompatible_with, p.relationships.forces, witness))
            out.push_back({p.id, "incompatible-and-forced",
                           "'" + witness + "' is listed as both incompatible and forced"});

        if (p.has_evaluator)
            for (const std::string& dep : p.necessary)
                if (const PatternDescriptor* d = registry.find(dep); d && !d->has_evaluator)
                    out.push_back({p.id, "undetectable-prerequisite",
                                   "evaluated pattern requires metadata-only '" + dep + "'"});
    }

    // Forces edges must be acyclic.
    std::map<std::string, int> state;
    auto visit = [&](auto&& self, const PatternDescriptor& p) -> bool {
        int& s = state[p.id];
        if (s == 2) return false;
        if (s == 1) return true;
        s = 1;
        bool cyclic = false;
        for (const std::string& next : p.relationships.forces)
            if (const PatternDescriptor* d = registry.find(next))
                if (self(self, *d)) cyclic = true;
        s = 2;
        return cyclic;
    };
    for (const PatternDescriptor& p : registry.patterns())
        if (state[p.id] == 0 && visit(visit, p))
            out.push_back({p.id, "forces-cycle", "forces edges form a cycle reachable from here"});

    return out;
}

namespace {

nlohmann::json to_json_array(const std::vector<std::string>& v) {
    return nlohmann::json(v);
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
    std::vector<std::string> out;
    if (!j.contains(field)) return out;
    for (const auto& item : j.at(field)) out.push_back(item.get<std::string>());
    return out;
}

}  // namespace

std::string Registry::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const PatternDescriptor& p : patterns_) {
        nlohmann::json j;
        j["id"] = p.id;
        j["intent"] = p.intent;
        j["motivation"] = p.motivation;
        j["applicability"] = p.applicability;
        j["necessary"] = to_json_array(p.necessary);
        j["has_evaluator"] = p.has_evaluator;
        j["relationships"] = {{"forces", to_json_array(p.relationships.forces)},
                              {"enables", to_json_array(p.relationships.enables)},
                              {"incompatible_with", to_json_array(p.relationships.incompatible_with)},
                              {"compatible_with", to_json_array(p.relationships.compatible_with)},
                              {"similar_to", to_json_array(p.relationships.similar_to)}};
        nlohmann::json variants = nlohmann::json::array();
        for (const ModellingVariant& v : p.modelling_variants)
            variants.push_back({{"dialect", v.dialect}, {"template", v.template_id}});
        j["modelling_variants"] = variants;
        j["search_strategies"] = to_json_array(p.search_strategies);
        if (!p.diagram_ref.empty()) j["diagram_ref"] = p.diagram_ref;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

void Registry::merge_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
        throw ParseError(ParseError::Kind::BadJson, 0, "registry: expected a JSON array");
    try {
        for (const auto& j : arr) {
            PatternDescriptor p;
            p.id = j.at("id").get<std::string>();
            p.intent = j.value("intent", "");
            p.motivation = j.value("motivation", "");
            p.applicability = j.value("applicability", "");
            p.necessary = string_list(j, "necessary");
            p.has_evaluator = false;  // evaluators are code-only
            if (j.contains("relationships")) {
                const auto& r = j.at("relationships");
                p.relationships.forces = string_list(r, "forces");
                p.relationships.enables = string_list(r, "enables");
                p.relationships.incompatible_with = string_list(r, "incompatible_with");
                p.relationships.compatible_with = string_list(r, "compatible_with");
                p.relationships.similar_to = string_list(r, "similar_to");
            }
            if (j.contains("modelling_variants"))
                for (const auto& v : j.at("modelling_variants"))
                    p.modelling_variants.push_back(
                        {v.value("dialect", ""), v.value("template", "")});
            p.search_strategies = string_list(j, "search_strategies");
            p.diagram_ref = j.value("diagram_ref", "");
            add(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, 0,
                         std::string("registry: malformed descriptor: ") + e.what());
    }
}

}  // namespace cpat
