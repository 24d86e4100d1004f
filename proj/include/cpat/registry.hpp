// Pattern registry: descriptors for the shipped scheduling patterns and the
// relationship graph between them.
//
// Descriptors are template metadata (intent, applicability, relationships,
// modelling variants, search strategies). Condition evaluators are code, so
// patterns loaded from JSON are always metadata-only.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace cpat {

struct RelationshipSet {
    std::vector<std::string> forces;             // must hold if this pattern holds
    std::vector<std::string> enables;            // have this pattern as prerequisite
    std::vector<std::string> incompatible_with;
    std::vector<std::string> compatible_with;
    std::vector<std::string> similar_to;         // informational only
};

struct ModellingVariant {
    std::string dialect;      // "minizinc" | "opl"
    std::string template_id;  // versioned template name, e.g. "js.mzn.v1"
};

struct PatternDescriptor {
    std::string id;
    std::string intent;
    std::string motivation;
    std::string applicability;  // prose summary of the checked conditions
    std::vector<std::string> necessary;  // prerequisite patterns
    bool has_evaluator = false;
    RelationshipSet relationships;
    std::vector<ModellingVariant> modelling_variants;
    std::vector<std::string> search_strategies;
    std::string diagram_ref;
};

struct RegistryViolation {
    std::string pattern;
    std::string rule;  // short rule id, e.g. "forces-cycle"
    std::string detail;
};

class Registry {
public:
    void add(PatternDescriptor descriptor);

    const PatternDescriptor* find(const std::string& id) const;
    /// Throws std::out_of_range for unknown ids.
    const PatternDescriptor& get(const std::string& id) const;

    /// Patterns in registration order.
    const std::vector<PatternDescriptor>& patterns() const { return patterns_; }

    /// Pattern ids ordered so every pattern comes after its prerequisites.
    /// Throws Error if the `necessary` edges contain a cycle.
    std::vector<std::string> evaluation_order() const;

    std::string to_json() const;

    /// Adds metadata-only patterns from a JSON registry export. Evaluators
    /// cannot be loaded from data; has_evaluator is forced to false.
    /// Throws ParseError{BadJson} on malformed input.
    void merge_json(const std::string& text);

private:
    std::vector<PatternDescriptor> patterns_;
    std::map<std::string, std::size_t> index_;
};

/// The built-in registry: JobShop, FlowShop and NoWait (with evaluators),
/// MachineSetup, DistinguishableResources and IndistinguishableResources
/// (metadata-only).
Registry load_registry();

/// Checks referential integrity and relationship consistency: every referenced
/// id exists, incompatible_with is disjoint from compatible_with and forces,
/// forces edges are acyclic, and evaluator patterns only require evaluator
/// patterns. Returns all violations found.
std::vector<RegistryViolation> validate_relationships(const Registry& registry);

}  // namespace cpat
