#pragma once

// In-memory triple store of biomedical concepts: subsumption closure and the
// fixed set of parameterized graph queries used during reasoning.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cohortc/error.hpp"

namespace cohortc::kb {

enum class CodeSystem { ICD10, SNOMED, LOINC, RXNORM };

const char* to_string(CodeSystem s);
std::optional<CodeSystem> code_system_from_string(std::string_view s);

struct Code {
    CodeSystem system = CodeSystem::ICD10;
    std::string code;
    auto operator<=>(const Code&) const = default;
};

struct Concept {
    std::string cui;
    std::string preferred_name;
    std::set<std::string> semantic_types;
    std::set<Code> codes;

    bool has_semantic_type(std::string_view t) const { return semantic_types.contains(std::string(t)); }
    bool has_system(CodeSystem s) const;
    std::vector<std::string> codes_in(CodeSystem s) const;
};

enum class Predicate { Isa, Treats, ContraindicatedWith, Affects, HasSymptom, LabMapsToPhenotype };

const char* to_string(Predicate p);
std::optional<Predicate> predicate_from_string(std::string_view s);

struct Triple {
    std::string subject;
    Predicate predicate = Predicate::Isa;
    std::string object;
    std::optional<std::string> qualifier;
    bool operator==(const Triple&) const = default;
};

std::string to_string(const Triple& t);

/// How a member of a concept set was reached.
struct Provenance {
    std::string cui;
    std::string rule;
    std::vector<Triple> path;
    bool operator==(const Provenance&) const = default;
};

class ConceptSet {
public:
    /// Adds a member with one derivation; repeated identical derivations are ignored.
    void add(const std::string& cui, std::string rule, std::vector<Triple> path = {});
    void merge(const ConceptSet& other);

    bool contains(std::string_view cui) const { return members_.contains(std::string(cui)); }
    bool empty() const { return members_.empty(); }
    std::size_t size() const { return members_.size(); }

    const std::set<std::string>& members() const { return members_; }
    const std::vector<Provenance>& provenance() const { return provenance_; }

    /// The first recorded derivation path for a member (empty when none).
    std::vector<Triple> path_to(std::string_view cui) const;

    bool operator==(const ConceptSet&) const = default;

private:
    std::set<std::string> members_;
    std::vector<Provenance> provenance_;
};

enum class Template {
    DrugsTreating,
    ContraindicationsForDrugs,
    ConditionsAffecting,
    SymptomsOf,
    PhenotypesForLab,
};

const char* to_string(Template t);
std::optional<Template> template_from_string(std::string_view s);

/// Template arguments. Set-valued templates read `concepts`;
/// conditions_affecting reads `cui`; phenotypes_for_lab reads `loinc_code`
/// and `flag`.
struct Bindings {
    ConceptSet concepts;
    std::string cui;
    std::string loinc_code;
    std::string flag;
};

class UnknownConcept : public Error {
public:
    explicit UnknownConcept(const std::string& cui)
        : Error("UnknownConcept", "unknown concept " + cui), cui_(cui) {}
    const std::string& cui() const noexcept { return cui_; }

private:
    std::string cui_;
};

class CycleDetected : public Error {
public:
    explicit CycleDetected(std::vector<std::string> cuis);
    const std::vector<std::string>& cuis() const noexcept { return cuis_; }

private:
    std::vector<std::string> cuis_;
};

class KnowledgeBase {
public:
    KnowledgeBase() = default;

    /// Indexes the concepts and triples; throws UnknownConcept for dangling
    /// triple endpoints and CycleDetected when isa edges are not a DAG.
    KnowledgeBase(std::vector<Concept> concepts, std::vector<Triple> triples);

    static KnowledgeBase parse(std::string_view concepts_text, std::string_view triples_text);
    static KnowledgeBase load(const std::filesystem::path& concepts_file,
                              const std::filesystem::path& triples_file);

    std::size_t size() const { return concepts_.size(); }
    const std::vector<Concept>& concepts() const { return concepts_; }
    const std::vector<Triple>& triples() const { return triples_; }
    const Concept* find(std::string_view cui) const;
    const Concept& at(std::string_view cui) const;

    /// Concepts owning a given code.
    std::vector<const Concept*> concepts_with_code(CodeSystem system, std::string_view code) const;

    /// Reflexive-transitive closure over reversed isa edges.
    ConceptSet descendants(std::string_view cui) const;
    bool subsumes(std::string_view ancestor, std::string_view cui) const;

    ConceptSet query(Template t, const Bindings& bindings) const;
    ConceptSet query(std::string_view template_name, const Bindings& bindings) const;

    ConceptSet drugs_treating(const ConceptSet& conditions) const;
    ConceptSet contraindications_for_drugs(const ConceptSet& drugs) const;
    ConceptSet conditions_affecting(std::string_view function_cui) const;
    ConceptSet symptoms_of(const ConceptSet& conditions) const;
    ConceptSet phenotypes_for_lab(std::string_view loinc_code, std::string_view flag) const;

    /// conditions_affecting, then drugs_treating, then contraindications_for_drugs.
    ConceptSet contraindications_to_drugs_for_conditions_affecting(std::string_view function_cui) const;

    /// Triples with the concept as subject (outgoing) or object (incoming).
    std::vector<const Triple*> outgoing(std::string_view cui, Predicate p) const;
    std::vector<const Triple*> incoming(std::string_view cui, Predicate p) const;

private:
    std::vector<Concept> concepts_;
    std::vector<Triple> triples_;
    std::map<std::string, std::size_t, std::less<>> index_;
    // [predicate][concept] -> triple indices, sorted by the far endpoint's cui.
    std::vector<std::vector<std::vector<std::size_t>>> out_;
    std::vector<std::vector<std::vector<std::size_t>>> in_;

    std::size_t index_of(std::string_view cui) const;
    ConceptSet hop(const ConceptSet& from, Predicate p, bool follow_incoming, const char* rule) const;
};

}  // namespace cohortc::kb
