#include "cohortc/smm.hpp"

#include "util.hpp"

namespace cohortc::smm {

namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path, std::string("missing '") + key + "'");
    return obj.at(key);
}

std::string string_member(const json& obj, const char* key, const std::string& path) {
    const json& v = member(obj, key, path);
    if (!v.is_string() || v.get<std::string>().empty()) {
        throw SchemaError(path + "." + key, "expected non-empty string");
    }
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return string_member(obj, key, path);
}

std::set<std::string> concept_list(const json& obj, const char* key, const std::string& path) {
    std::set<std::string> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) throw SchemaError(path + "." + key, "expected array of concept ids");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) throw SchemaError(path + "." + key + "[" + std::to_string(i) + "]", "expected string");
        out.insert(v[i].get<std::string>());
    }
    return out;
}

void check_concepts(const std::set<std::string>& cuis, const std::string& path, const kb::KnowledgeBase* kb,
                    std::vector<std::string>& diagnostics) {
    if (!kb) return;
    for (const auto& c : cuis) {
        if (!kb->find(c)) diagnostics.push_back(path + ": unknown concept " + c);
    }
}

TableMapping load_table(const json& t, const std::string& path, const kb::KnowledgeBase* kb,
                        std::vector<std::string>& diagnostics) {
    TableMapping out;
    out.table_name = string_member(t, "name", path);
    out.person_id_column = string_member(t, "person_id_column", path);
    out.date_column = optional_string(t, "date_column", path);
    auto strategy = string_member(t, "strategy", path);
    if (strategy == "tall") {
        out.strategy = Strategy::Tall;
    } else if (strategy == "pivoted") {
        out.strategy = Strategy::Pivoted;
    } else {
        throw SchemaError(path + ".strategy", "expected \"tall\" or \"pivoted\"");
    }
    out.tag_concepts = concept_list(t, "concepts", path);
    check_concepts(out.tag_concepts, path + ".concepts", kb, diagnostics);
    if (out.strategy == Strategy::Tall) {
        const json& cc = member(t, "code_column", path);
        CodeColumn col;
        col.name = string_member(cc, "name", path + ".code_column");
        auto sys = kb::code_system_from_string(string_member(cc, "system", path + ".code_column"));
        if (!sys) throw SchemaError(path + ".code_column.system", "unknown code system");
        col.system = *sys;
        out.code_column = col;
        out.value_column = optional_string(t, "value_column", path);
        if (out.tag_concepts.empty()) throw SchemaError(path + ".concepts", "tall table needs concept tags");
    } else {
        const json& cols = member(t, "columns", path);
        if (!cols.is_array() || cols.empty()) throw SchemaError(path + ".columns", "pivoted table needs tagged columns");
        for (std::size_t i = 0; i < cols.size(); ++i) {
            std::string cpath = path + ".columns[" + std::to_string(i) + "]";
            TaggedColumn c;
            c.name = string_member(cols[i], "name", cpath);
            c.concepts = concept_list(cols[i], "concepts", cpath);
            if (c.concepts.empty()) throw SchemaError(cpath + ".concepts", "column needs concept tags");
            check_concepts(c.concepts, cpath + ".concepts", kb, diagnostics);
            auto role = cols[i].value("role", std::string("value"));
            if (role == "value") {
                c.role = ColumnRole::Value;
            } else if (role == "flag") {
                c.role = ColumnRole::Flag;
            } else {
                throw SchemaError(cpath + ".role", "expected \"value\" or \"flag\"");
            }
            out.columns.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace

const char* to_string(Strategy s) { return s == Strategy::Tall ? "tall" : "pivoted"; }
const char* to_string(ColumnRole r) { return r == ColumnRole::Value ? "value" : "flag"; }

const TableMapping* SemanticMetadataMapping::find_table(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.table_name == name) return &t;
    }
    return nullptr;
}

SemanticMetadataMapping load_smm(const nlohmann::json& doc, const kb::KnowledgeBase* kb) {
    SemanticMetadataMapping out;
    out.name = string_member(doc, "name", "$");
    const json& dbs = member(doc, "databases", "$");
    if (!dbs.is_array() || dbs.size() != 1) throw SchemaError("$.databases", "expected exactly one database");
    const json& db = dbs[0];
    out.database = string_member(db, "name", "$.databases[0]");
    if (db.contains("person")) {
        const std::string p = "$.databases[0].person";
        const json& pj = db.at("person");
        PersonTable person;
        person.table_name = string_member(pj, "name", p);
        person.person_id_column = string_member(pj, "person_id_column", p);
        person.birth_date_column = string_member(pj, "birth_date_column", p);
        const json& g = member(pj, "gender_column", p);
        person.gender_column.name = string_member(g, "name", p + ".gender_column");
        person.gender_column.female = string_member(g, "female", p + ".gender_column");
        person.gender_column.male = string_member(g, "male", p + ".gender_column");
        out.person = person;
    }
    const json& tables = member(db, "tables", "$.databases[0]");
    if (!tables.is_array()) throw SchemaError("$.databases[0].tables", "expected array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto t = load_table(tables[i], "$.databases[0].tables[" + std::to_string(i) + "]", kb, out.diagnostics);
        if (!names.insert(t.table_name).second) throw DuplicateTable(t.table_name);
        out.tables.push_back(std::move(t));
    }
    return out;
}

SemanticMetadataMapping load_smm(std::string_view text, const kb::KnowledgeBase* kb) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", e.what());
    }
    return load_smm(doc, kb);
}

SemanticMetadataMapping load_smm_file(const std::filesystem::path& path, const kb::KnowledgeBase* kb) {
    return load_smm(std::string_view(detail::read_file(path)), kb);
}

nlohmann::json to_json(const SemanticMetadataMapping& smm) {
    json db;
    db["name"] = smm.database;
    if (smm.person) {
        const auto& p = *smm.person;
        db["person"] = {{"name", p.table_name},
                        {"person_id_column", p.person_id_column},
                        {"birth_date_column", p.birth_date_column},
                        {"gender_column",
                         {{"name", p.gender_column.name}, {"female", p.gender_column.female}, {"male", p.gender_column.male}}}};
    }
    json tables = json::array();
    for (const auto& t : smm.tables) {
        json j;
        j["name"] = t.table_name;
        j["strategy"] = to_string(t.strategy);
        j["person_id_column"] = t.person_id_column;
        if (t.date_column) j["date_column"] = *t.date_column;
        j["concepts"] = t.tag_concepts;
        if (t.code_column) j["code_column"] = {{"name", t.code_column->name}, {"system", kb::to_string(t.code_column->system)}};
        if (t.value_column) j["value_column"] = *t.value_column;
        if (!t.columns.empty()) {
            json cols = json::array();
            for (const auto& c : t.columns) {
                cols.push_back({{"name", c.name}, {"concepts", c.concepts}, {"role", to_string(c.role)}});
            }
            j["columns"] = cols;
        }
        tables.push_back(j);
    }
    db["tables"] = tables;
    return {{"name", smm.name}, {"databases", json::array({db})}};
}

}  // namespace cohortc::smm
