#include "cohortc/kb.hpp"

#include "util.hpp"

#include <algorithm>
#include <deque>

namespace cohortc::kb {

namespace {

constexpr std::size_t kPredicateCount = 6;

using detail::read_file;
using detail::skip_line;
using detail::split;
using detail::trim;

bool valid_flag(std::string_view q) {
    return q == "high" || q == "low" || q == "abnormal" || q == "normal";
}

}  // namespace

const char* to_string(CodeSystem s) {
    switch (s) {
        case CodeSystem::ICD10: return "ICD10";
        case CodeSystem::SNOMED: return "SNOMED";
        case CodeSystem::LOINC: return "LOINC";
        case CodeSystem::RXNORM: return "RXNORM";
    }
    return "?";
}

std::optional<CodeSystem> code_system_from_string(std::string_view s) {
    for (auto c : {CodeSystem::ICD10, CodeSystem::SNOMED, CodeSystem::LOINC, CodeSystem::RXNORM}) {
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

bool Concept::has_system(CodeSystem s) const {
    return std::any_of(codes.begin(), codes.end(), [&](const Code& c) { return c.system == s; });
}

std::vector<std::string> Concept::codes_in(CodeSystem s) const {
    std::vector<std::string> out;
    for (const auto& c : codes) {
        if (c.system == s) out.push_back(c.code);
    }
    return out;
}

const char* to_string(Predicate p) {
    switch (p) {
        case Predicate::Isa: return "isa";
        case Predicate::Treats: return "treats";
        case Predicate::ContraindicatedWith: return "contraindicated_with";
        case Predicate::Affects: return "affects";
        case Predicate::HasSymptom: return "has_symptom";
        case Predicate::LabMapsToPhenotype: return "lab_maps_to_phenotype";
    }
    return "?";
}

std::optional<Predicate> predicate_from_string(std::string_view s) {
    for (auto p : {Predicate::Isa, Predicate::Treats, Predicate::ContraindicatedWith, Predicate::Affects,
                   Predicate::HasSymptom, Predicate::LabMapsToPhenotype}) {
        if (s == to_string(p)) return p;
    }
    return std::nullopt;
}

std::string to_string(const Triple& t) {
    std::string s = t.subject + " " + to_string(t.predicate) + " " + t.object;
    if (t.qualifier) s += " [" + *t.qualifier + "]";
    return s;
}

void ConceptSet::add(const std::string& cui, std::string rule, std::vector<Triple> path) {
    members_.insert(cui);
    Provenance p{cui, std::move(rule), std::move(path)};
    if (std::find(provenance_.begin(), provenance_.end(), p) == provenance_.end()) {
        provenance_.push_back(std::move(p));
    }
}

void ConceptSet::merge(const ConceptSet& other) {
    for (const auto& p : other.provenance_) add(p.cui, p.rule, p.path);
    for (const auto& m : other.members_) members_.insert(m);
}

std::vector<Triple> ConceptSet::path_to(std::string_view cui) const {
    for (const auto& p : provenance_) {
        if (p.cui == cui) return p.path;
    }
    return {};
}

const char* to_string(Template t) {
    switch (t) {
        case Template::DrugsTreating: return "drugs_treating";
        case Template::ContraindicationsForDrugs: return "contraindications_for_drugs";
        case Template::ConditionsAffecting: return "conditions_affecting";
        case Template::SymptomsOf: return "symptoms_of";
        case Template::PhenotypesForLab: return "phenotypes_for_lab";
    }
    return "?";
}

std::optional<Template> template_from_string(std::string_view s) {
    for (auto t : {Template::DrugsTreating, Template::ContraindicationsForDrugs,
                   Template::ConditionsAffecting, Template::SymptomsOf, Template::PhenotypesForLab}) {
        if (s == to_string(t)) return t;
    }
    return std::nullopt;
}

CycleDetected::CycleDetected(std::vector<std::string> cuis)
    : Error("CycleDetected",
            [&] {
                std::string m = "isa cycle:";
                for (const auto& c : cuis) m += " " + c;
                return m;
            }()),
      cuis_(std::move(cuis)) {}

KnowledgeBase::KnowledgeBase(std::vector<Concept> concepts, std::vector<Triple> triples)
    : concepts_(std::move(concepts)), triples_(std::move(triples)) {
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        if (!index_.emplace(concepts_[i].cui, i).second) {
            throw Error("DuplicateConcept", "duplicate concept " + concepts_[i].cui);
        }
    }
    out_.assign(kPredicateCount, std::vector<std::vector<std::size_t>>(concepts_.size()));
    in_.assign(kPredicateCount, std::vector<std::vector<std::size_t>>(concepts_.size()));
    for (std::size_t t = 0; t < triples_.size(); ++t) {
        const auto& tr = triples_[t];
        auto p = static_cast<std::size_t>(tr.predicate);
        out_[p][index_of(tr.subject)].push_back(t);
        in_[p][index_of(tr.object)].push_back(t);
    }
    for (std::size_t p = 0; p < kPredicateCount; ++p) {
        for (auto& list : out_[p]) {
            std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return triples_[a].object < triples_[b].object;
            });
        }
        for (auto& list : in_[p]) {
            std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return triples_[a].subject < triples_[b].subject;
            });
        }
    }

    // isa must be acyclic: iterative DFS with colors over child -> parent edges.
    const auto isa = static_cast<std::size_t>(Predicate::Isa);
    std::vector<int> color(concepts_.size(), 0);
    std::vector<std::size_t> parent(concepts_.size(), SIZE_MAX);
    for (std::size_t root = 0; root < concepts_.size(); ++root) {
        if (color[root]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& edges = out_[isa][node];
            if (next == edges.size()) {
                color[node] = 2;
                stack.pop_back();
                continue;
            }
            std::size_t to = index_of(triples_[edges[next++]].object);
            if (color[to] == 0) {
                color[to] = 1;
                parent[to] = node;
                stack.emplace_back(to, 0);
            } else if (color[to] == 1) {
                std::vector<std::string> cycle{concepts_[to].cui};
                for (std::size_t cur = node; cur != to; cur = parent[cur]) {
                    cycle.push_back(concepts_[cur].cui);
                }
                std::reverse(cycle.begin() + 1, cycle.end());
                throw CycleDetected(std::move(cycle));
            }
        }
    }
}

std::size_t KnowledgeBase::index_of(std::string_view cui) const {
    auto it = index_.find(cui);
    if (it == index_.end()) throw UnknownConcept(std::string(cui));
    return it->second;
}

KnowledgeBase KnowledgeBase::parse(std::string_view concepts_text, std::string_view triples_text) {
    std::vector<Concept> concepts;
    std::set<std::string> seen;
    {
        std::istringstream in{std::string(concepts_text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto f = split(line, '\t');
            if (f.size() < 2 || f.size() > 4 || trim(f[0]).empty()) {
                throw LineError("ParseError", lineno, "expected cui<TAB>name<TAB>semtypes<TAB>codes");
            }
            Concept c;
            c.cui = trim(f[0]);
            c.preferred_name = trim(f[1]);
            if (f.size() > 2) {
                for (auto& t : split(f[2], ',')) {
                    if (auto s = trim(t); !s.empty()) c.semantic_types.insert(s);
                }
            }
            if (f.size() > 3) {
                for (auto& code : split(f[3], ';')) {
                    auto s = trim(code);
                    if (s.empty()) continue;
                    auto colon = s.find(':');
                    auto sys = colon == std::string::npos ? std::nullopt
                                                          : code_system_from_string(s.substr(0, colon));
                    if (!sys || colon + 1 >= s.size()) {
                        throw LineError("ParseError", lineno, "bad code '" + s + "'");
                    }
                    c.codes.insert({*sys, s.substr(colon + 1)});
                }
            }
            if (!seen.insert(c.cui).second) {
                throw LineError("ParseError", lineno, "duplicate concept " + c.cui);
            }
            concepts.push_back(std::move(c));
        }
    }

    std::vector<Triple> triples;
    {
        std::istringstream in{std::string(triples_text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto f = split(line, '\t');
            if (f.size() < 3 || f.size() > 4) {
                throw LineError("ParseError", lineno, "expected subject<TAB>predicate<TAB>object");
            }
            auto pred = predicate_from_string(trim(f[1]));
            if (!pred) throw LineError("UnknownPredicate", lineno, "unknown predicate '" + trim(f[1]) + "'");
            Triple t{trim(f[0]), *pred, trim(f[2]), std::nullopt};
            if (f.size() == 4 && !trim(f[3]).empty()) t.qualifier = trim(f[3]);
            if (!seen.contains(t.subject) || !seen.contains(t.object)) {
                throw LineError("ParseError", lineno, "triple references an undeclared concept");
            }
            if (t.predicate == Predicate::LabMapsToPhenotype && (!t.qualifier || !valid_flag(*t.qualifier))) {
                throw LineError("ParseError", lineno, "lab_maps_to_phenotype needs high|low|abnormal|normal");
            }
            triples.push_back(std::move(t));
        }
    }
    return KnowledgeBase(std::move(concepts), std::move(triples));
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& concepts_file,
                                  const std::filesystem::path& triples_file) {
    return parse(read_file(concepts_file), read_file(triples_file));
}

const Concept* KnowledgeBase::find(std::string_view cui) const {
    auto it = index_.find(cui);
    return it == index_.end() ? nullptr : &concepts_[it->second];
}

const Concept& KnowledgeBase::at(std::string_view cui) const { return concepts_[index_of(cui)]; }

std::vector<const Concept*> KnowledgeBase::concepts_with_code(CodeSystem system, std::string_view code) const {
    std::vector<const Concept*> out;
    for (const auto& c : concepts_) {
        if (c.codes.contains(Code{system, std::string(code)})) out.push_back(&c);
    }
    return out;
}

ConceptSet KnowledgeBase::descendants(std::string_view cui) const {
    const std::size_t root = index_of(cui);
    const auto isa = static_cast<std::size_t>(Predicate::Isa);
    ConceptSet out;
    out.add(concepts_[root].cui, "self");
    std::vector<bool> seen(concepts_.size(), false);
    seen[root] = true;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
        std::size_t node = queue.front();
        queue.pop_front();
        auto prefix = out.path_to(concepts_[node].cui);
        for (std::size_t t : in_[isa][node]) {
            std::size_t child = index_of(triples_[t].subject);
            if (seen[child]) continue;
            seen[child] = true;
            auto path = prefix;
            path.push_back(triples_[t]);
            out.add(concepts_[child].cui, "descendant", std::move(path));
            queue.push_back(child);
        }
    }
    return out;
}

bool KnowledgeBase::subsumes(std::string_view ancestor, std::string_view cui) const {
    const std::size_t target = index_of(ancestor);
    const auto isa = static_cast<std::size_t>(Predicate::Isa);
    std::vector<bool> seen(concepts_.size(), false);
    std::vector<std::size_t> stack{index_of(cui)};
    while (!stack.empty()) {
        std::size_t node = stack.back();
        stack.pop_back();
        if (node == target) return true;
        if (seen[node]) continue;
        seen[node] = true;
        for (std::size_t t : out_[isa][node]) stack.push_back(index_of(triples_[t].object));
    }
    return false;
}

std::vector<const Triple*> KnowledgeBase::outgoing(std::string_view cui, Predicate p) const {
    std::vector<const Triple*> out;
    for (std::size_t t : out_[static_cast<std::size_t>(p)][index_of(cui)]) out.push_back(&triples_[t]);
    return out;
}

std::vector<const Triple*> KnowledgeBase::incoming(std::string_view cui, Predicate p) const {
    std::vector<const Triple*> out;
    for (std::size_t t : in_[static_cast<std::size_t>(p)][index_of(cui)]) out.push_back(&triples_[t]);
    return out;
}

ConceptSet KnowledgeBase::hop(const ConceptSet& from, Predicate p, bool follow_incoming,
                              const char* rule) const {
    ConceptSet out;
    for (const auto& m : from.members()) {
        const auto& edges = follow_incoming ? in_[static_cast<std::size_t>(p)][index_of(m)]
                                            : out_[static_cast<std::size_t>(p)][index_of(m)];
        for (const auto& prov : from.provenance()) {
            if (prov.cui != m) continue;
            for (std::size_t t : edges) {
                const Triple& tr = triples_[t];
                auto path = prov.path;
                path.push_back(tr);
                out.add(follow_incoming ? tr.subject : tr.object, rule, std::move(path));
            }
        }
        if (std::none_of(from.provenance().begin(), from.provenance().end(),
                         [&](const Provenance& pr) { return pr.cui == m; })) {
            for (std::size_t t : edges) {
                const Triple& tr = triples_[t];
                out.add(follow_incoming ? tr.subject : tr.object, rule, {tr});
            }
        }
    }
    return out;
}

ConceptSet KnowledgeBase::drugs_treating(const ConceptSet& conditions) const {
    return hop(conditions, Predicate::Treats, true, "drugs_treating");
}

ConceptSet KnowledgeBase::contraindications_for_drugs(const ConceptSet& drugs) const {
    return hop(drugs, Predicate::ContraindicatedWith, true, "contraindications_for_drugs");
}

ConceptSet KnowledgeBase::conditions_affecting(std::string_view function_cui) const {
    ConceptSet start;
    start.add(at(function_cui).cui, "self");
    return hop(start, Predicate::Affects, true, "conditions_affecting");
}

ConceptSet KnowledgeBase::symptoms_of(const ConceptSet& conditions) const {
    return hop(conditions, Predicate::HasSymptom, false, "symptoms_of");
}

ConceptSet KnowledgeBase::phenotypes_for_lab(std::string_view loinc_code, std::string_view flag) const {
    ConceptSet out;
    for (const Concept* lab : concepts_with_code(CodeSystem::LOINC, loinc_code)) {
        for (const Triple* t : outgoing(lab->cui, Predicate::LabMapsToPhenotype)) {
            if (t->qualifier && *t->qualifier == flag) out.add(t->object, "phenotypes_for_lab", {*t});
        }
    }
    return out;
}

ConceptSet KnowledgeBase::contraindications_to_drugs_for_conditions_affecting(
    std::string_view function_cui) const {
    return contraindications_for_drugs(drugs_treating(conditions_affecting(function_cui)));
}

ConceptSet KnowledgeBase::query(Template t, const Bindings& b) const {
    for (const auto& m : b.concepts.members()) (void)index_of(m);
    switch (t) {
        case Template::DrugsTreating: return drugs_treating(b.concepts);
        case Template::ContraindicationsForDrugs: return contraindications_for_drugs(b.concepts);
        case Template::ConditionsAffecting: return conditions_affecting(b.cui);
        case Template::SymptomsOf: return symptoms_of(b.concepts);
        case Template::PhenotypesForLab: return phenotypes_for_lab(b.loinc_code, b.flag);
    }
    return {};
}

ConceptSet KnowledgeBase::query(std::string_view template_name, const Bindings& b) const {
    auto t = template_from_string(template_name);
    if (!t) throw Error("UnknownTemplate", "unknown query template '" + std::string(template_name) + "'");
    return query(*t, b);
}

}  // namespace cohortc::kb
