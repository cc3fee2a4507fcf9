#include "cohortc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "cohortc/reasoner.hpp"
#include "cohortc/text.hpp"
#include "util.hpp"

namespace cohortc::engine {

using nlohmann::json;

const char* to_string(InputMode m) {
    switch (m) {
        case InputMode::RawText: return "raw";
        case InputMode::Augmented: return "augmented";
        case InputMode::LogicalForm: return "logical_form";
    }
    return "?";
}

std::optional<InputMode> input_mode_from_string(std::string_view s) {
    for (auto m : {InputMode::RawText, InputMode::Augmented, InputMode::LogicalForm}) {
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Request and response documents

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_array()) throw InvalidRequest(std::string(key) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j[key]) {
        if (!v.is_string()) throw InvalidRequest(std::string(key) + " must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw InvalidRequest(std::string(key) + " must be a string");
    return j[key].get<std::string>();
}

json nullable(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

QueryRequest request_from_json(const json& j) {
    if (!j.is_object()) throw InvalidRequest("request must be an object");
    QueryRequest r;
    r.inclusion = string_list(j, "inclusion");
    r.exclusion = string_list(j, "exclusion");
    if (auto m = optional_string(j, "input_mode")) {
        auto mode = input_mode_from_string(*m);
        if (!mode) throw InvalidRequest("unknown input_mode '" + *m + "'");
        r.input_mode = *mode;
    }
    auto smm = optional_string(j, "smm");
    if (!smm) throw InvalidRequest("smm is required");
    r.smm_name = *smm;
    r.pin_date = optional_string(j, "pin_date");
    r.today = optional_string(j, "today");
    if (auto d = optional_string(j, "dialect")) {
        auto dialect = codegen::dialect_from_string(*d);
        if (!dialect) throw InvalidRequest("unknown dialect '" + *d + "'");
        r.dialect = *dialect;
    }
    if (j.contains("timing")) {
        if (!j["timing"].is_boolean()) throw InvalidRequest("timing must be a boolean");
        r.timing = j["timing"].get<bool>();
    }
    if (j.contains("overrides") && !j["overrides"].is_null()) {
        if (!j["overrides"].is_array()) throw InvalidRequest("overrides must be an array");
        for (const auto& o : j["overrides"]) {
            if (!o.is_object() || !o.contains("line") || !o["line"].is_number_unsigned()) {
                throw InvalidRequest("each override needs a positive line number");
            }
            Override ov;
            ov.line = o["line"].get<std::size_t>();
            ov.path = optional_string(o, "path").value_or("");
            ov.concepts = string_list(o, "concepts");
            if (o.contains("expand")) {
                if (!o["expand"].is_boolean()) throw InvalidRequest("expand must be a boolean");
                ov.expand = o["expand"].get<bool>();
            }
            r.overrides.push_back(std::move(ov));
        }
    }
    return r;
}

json to_json(const QueryRequest& r) {
    json overrides = json::array();
    for (const auto& o : r.overrides) {
        overrides.push_back({{"line", o.line}, {"path", o.path}, {"concepts", o.concepts}, {"expand", o.expand}});
    }
    return {
        {"inclusion", r.inclusion},
        {"exclusion", r.exclusion},
        {"input_mode", to_string(r.input_mode)},
        {"smm", r.smm_name},
        {"pin_date", nullable(r.pin_date)},
        {"today", nullable(r.today)},
        {"dialect", codegen::to_string(r.dialect)},
        {"overrides", overrides},
        {"timing", r.timing},
    };
}

QueryRequest request_from_criteria_tsv(std::string_view text) {
    QueryRequest r;
    std::size_t lineno = 0;
    for (const auto& row : detail::split(text, '\n')) {
        ++lineno;
        if (detail::skip_line(row)) continue;
        auto tab = row.find('\t');
        auto polarity = tab == std::string::npos ? std::nullopt : llf::polarity_from_string(detail::trim(row.substr(0, tab)));
        if (!polarity) throw LineError("ParseError", lineno, "expected INC or EXC, a tab, then the criterion");
        std::string body(detail::trim(row.substr(tab + 1)));
        if (body.empty()) throw LineError("ParseError", lineno, "empty criterion");
        (*polarity == llf::Polarity::Inclusion ? r.inclusion : r.exclusion).push_back(std::move(body));
    }
    return r;
}

json to_json(const QueryResponse& r) {
    json lines = json::array();
    for (const auto& l : r.lines) {
        lines.push_back({
            {"line", l.line_number},
            {"polarity", llf::to_string(l.polarity)},
            {"raw_text", l.raw_text},
            {"augmented_text", nullable(l.augmented_text)},
            {"logical_form", nullable(l.logical_form)},
            {"status", codegen::to_string(l.status)},
            {"reason", l.reason},
            {"detail", l.detail},
            {"explanation", l.explanation},
            {"sql", nullable(l.sql)},
        });
    }
    json out{{"lines", lines}, {"plan", codegen::to_json(r.plan)}, {"plan_id", r.plan_id}};
    if (r.timing_ms) out["timing_ms"] = *r.timing_ms;
    return out;
}

std::string plan_id(const codegen::QueryPlan& plan) {
    const std::string text = codegen::to_json(plan).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json to_json(const ExecutionResult& r) {
    json lines = json::array();
    for (const auto& l : r.lines) {
        lines.push_back({
            {"line", l.line_number},
            {"polarity", llf::to_string(l.polarity)},
            {"status", codegen::to_string(l.status)},
            {"reason", l.reason},
            {"count", l.cohort.size()},
            {"person_ids", l.cohort},
            {"cumulative_count", l.cumulative_size},
        });
    }
    return {{"lines", lines}, {"count", r.cohort.size()}, {"person_ids", r.cohort}, {"universe_count", r.universe.size()}};
}

// ---------------------------------------------------------------------------
// Execution

ExecutionResult execute(const codegen::QueryPlan& plan, sql::Database& db, const smm::SemanticMetadataMapping* smm,
                        const ExecuteOptions& options) {
    ExecutionResult out;
    const bool has_person = smm && smm->person;
    if (has_person) {
        const auto& p = *smm->person;
        try {
            out.universe = db.person_ids("SELECT DISTINCT " + p.person_id_column + " FROM " + p.table_name);
        } catch (const sql::SqliteError& e) {
            throw ExecutionError(0, e.what());
        }
    }
    std::vector<std::set<std::int64_t>> cohorts(plan.lines.size());
    for (std::size_t i = 0; i < plan.lines.size(); ++i) {
        const auto& l = plan.lines[i];
        if (l.status != codegen::LineStatus::Executed || !l.sql) continue;
        try {
            cohorts[i] = db.person_ids(*l.sql);
        } catch (const sql::SqliteError& e) {
            throw ExecutionError(l.line_number, e.what());
        }
        if (!has_person) out.universe.insert(cohorts[i].begin(), cohorts[i].end());
    }
    std::set<std::int64_t> current = out.universe;
    for (std::size_t i = 0; i < plan.lines.size(); ++i) {
        const auto& l = plan.lines[i];
        LineCohortResult r{l.line_number, l.polarity, l.status, l.reason, std::move(cohorts[i]), 0};
        if (r.status == codegen::LineStatus::Executed) {
            std::set<std::int64_t> next;
            if (l.polarity == llf::Polarity::Inclusion) {
                std::set_intersection(current.begin(), current.end(), r.cohort.begin(), r.cohort.end(),
                                      std::inserter(next, next.end()));
            } else {
                std::set_difference(current.begin(), current.end(), r.cohort.begin(), r.cohort.end(),
                                    std::inserter(next, next.end()));
            }
            if (options.skip_zero && next.empty() && !current.empty()) {
                r.status = codegen::LineStatus::Skipped;
                r.reason = "ZeroResult";
            } else {
                current = std::move(next);
            }
        }
        r.cumulative_size = current.size();
        out.lines.push_back(std::move(r));
    }
    out.cohort = std::move(current);
    return out;
}

sql::Database open_database(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (fs::is_directory(path)) return open_database(path / "database.sql");
    if (!fs::exists(path)) throw Error("IoError", "no database at " + path.string());
    if (path.extension() == ".sql") {
        sql::Database db;
        db.exec(detail::read_file(path));
        return db;
    }
    return sql::Database(path.string());
}

// ---------------------------------------------------------------------------
// Configuration

std::filesystem::path Config::resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : data_dir / p;
}

Config config_from_json(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw Error("ConfigError", "configuration must be an object");
    Config c;
    auto path_of = [&](const json& obj, const char* key, std::filesystem::path& dst) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_string()) throw Error("ConfigError", std::string(key) + " must be a string");
        dst = obj[key].get<std::string>();
    };
    try {
        path_of(j, "data_dir", c.data_dir);
        if (c.data_dir.is_relative()) c.data_dir = base / c.data_dir;
        if (j.contains("kb")) {
            path_of(j["kb"], "concepts", c.concepts_file);
            path_of(j["kb"], "triples", c.triples_file);
        }
        path_of(j, "lexicon", c.lexicon_file);
        path_of(j, "smm_dir", c.smm_dir);
        if (j.contains("catalog") && !j["catalog"].is_null()) c.catalog_file = j["catalog"].get<std::string>();
        if (j.contains("host")) c.host = j["host"].get<std::string>();
        if (j.contains("port")) c.port = j["port"].get<int>();
        if (j.contains("log_level")) c.log_level = j["log_level"].get<std::string>();
        if (j.contains("databases")) {
            for (const auto& [name, p] : j["databases"].items()) c.databases[name] = p.get<std::string>();
        }
    } catch (const json::exception& e) {
        throw Error("ConfigError", e.what());
    }
    return c;
}

void apply_environment(Config& c) {
    if (const char* dir = std::getenv("COHORTC_DATA_DIR"); dir && *dir) c.data_dir = dir;
    if (const char* port = std::getenv("COHORTC_PORT"); port && *port) {
        try {
            c.port = std::stoi(port);
        } catch (const std::exception&) {
            throw Error("ConfigError", std::string("COHORTC_PORT is not a number: ") + port);
        }
    }
}

Config load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(detail::read_file(path));
    } catch (const json::exception& e) {
        throw Error("ConfigError", e.what());
    }
    Config c = config_from_json(j, path.parent_path());
    apply_environment(c);
    return c;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(kb::KnowledgeBase kb, norm::Lexicon lexicon, std::vector<smm::SemanticMetadataMapping> smms,
               llf::FunctionCatalog catalog)
    : kb_(std::make_unique<kb::KnowledgeBase>(std::move(kb))),
      smms_(std::make_unique<std::vector<smm::SemanticMetadataMapping>>(std::move(smms))),
      catalog_(std::move(catalog)) {
    normalizer_ = std::make_unique<norm::Normalizer>(std::move(lexicon), *kb_);
    std::set<std::string> names;
    for (const auto& s : *smms_) {
        if (!names.insert(s.name).second) throw Error("DuplicateSmm", "two SMMs named '" + s.name + "'");
    }
}

Engine Engine::from_config(const Config& config) {
    auto kb = kb::KnowledgeBase::load(config.resolve(config.concepts_file), config.resolve(config.triples_file));
    auto lexicon = norm::Lexicon::load(config.resolve(config.lexicon_file));
    auto catalog = llf::FunctionCatalog::builtin();
    if (config.catalog_file) catalog.extend(llf::FunctionCatalog::load(config.resolve(*config.catalog_file)));
    std::vector<std::filesystem::path> files;
    const auto dir = config.resolve(config.smm_dir);
    if (!std::filesystem::is_directory(dir)) throw Error("IoError", "SMM directory " + dir.string() + " not found");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<smm::SemanticMetadataMapping> smms;
    for (const auto& f : files) smms.push_back(smm::load_smm_file(f, &kb));
    return Engine(std::move(kb), std::move(lexicon), std::move(smms), std::move(catalog));
}

const smm::SemanticMetadataMapping* Engine::find_smm(std::string_view name) const {
    for (const auto& s : *smms_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

namespace {

class Stopwatch {
public:
    explicit Stopwatch(double* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
    ~Stopwatch() {
        *sink_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    double* sink_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

QueryResponse Engine::generate(const QueryRequest& request) const {
    if (request.inclusion.empty() && request.exclusion.empty()) throw InvalidRequest("no criteria given");
    const auto* smm = find_smm(request.smm_name);
    if (!smm) throw UnknownSmm(request.smm_name);
    codegen::CompileOptions options;
    options.dialect = request.dialect;
    if (request.pin_date) {
        options.pin_date = date::parse_date(*request.pin_date);
        if (!options.pin_date) throw InvalidRequest("pin_date must be YYYY-MM-DD");
    }
    if (request.today) {
        options.today = date::parse_date(*request.today);
        if (!options.today) throw InvalidRequest("today must be YYYY-MM-DD");
    }

    double t_translate = 0, t_reason = 0, t_compile = 0;
    std::vector<llf::Criterion> criteria;
    std::vector<ResponseLine> lines;
    std::vector<std::optional<reason::ReasonedNode>> reasoned;
    auto add_line = [&](const std::string& text, llf::Polarity polarity) {
        const std::size_t number = lines.size() + 1;
        ResponseLine line;
        line.line_number = number;
        line.polarity = polarity;
        line.raw_text = text;
        std::optional<llf::LfNode> lf;
        {
            Stopwatch sw(&t_translate);
            if (request.input_mode == InputMode::LogicalForm) {
                try {
                    lf = llf::parse(text, catalog_);
                } catch (const PositionedError& e) {
                    throw MalformedLogicalForm(number, e.position(), e.what());
                } catch (const Error& e) {
                    throw MalformedLogicalForm(number, 0, e.what());
                }
                auto diags = llf::validate(*lf, catalog_);
                if (!diags.empty()) throw MalformedLogicalForm(number, 0, diags[0].code + ": " + diags[0].message);
            } else {
                std::string augmented = text;
                if (request.input_mode == InputMode::RawText) augmented = text::augment(text, normalizer_->lexicon()).augmented;
                line.augmented_text = augmented;
                auto t = text::translate(augmented, polarity, catalog_);
                if (auto* n = std::get_if<llf::LfNode>(&t)) {
                    lf = std::move(*n);
                } else {
                    line.reason = "NotTranslatable";
                    line.detail = std::get<text::NotTranslatable>(t).reason;
                }
            }
        }
        if (lf) {
            line.logical_form = llf::serialize(*lf);
            Stopwatch sw(&t_reason);
            reasoned.push_back(reason::reason(*lf, *kb_, *normalizer_));
        } else {
            reasoned.push_back(std::nullopt);
        }
        llf::Criterion c;
        c.polarity = polarity;
        c.raw_text = text;
        c.augmented_text = line.augmented_text;
        c.logical_form = lf;
        c.line_number = number;
        criteria.push_back(std::move(c));
        lines.push_back(std::move(line));
    };
    for (const auto& t : request.inclusion) add_line(t, llf::Polarity::Inclusion);
    for (const auto& t : request.exclusion) add_line(t, llf::Polarity::Exclusion);

    for (const auto& o : request.overrides) {
        if (o.line == 0 || o.line > lines.size()) throw InvalidRequest("override line " + std::to_string(o.line) + " out of range");
        auto& r = reasoned[o.line - 1];
        if (!r) throw InvalidRequest("override line " + std::to_string(o.line) + " has no logical form");
        auto path = llf::parse_path(o.path);
        if (!path) throw reason::InvalidPath(o.path);
        kb::ConceptSet set;
        for (const auto& cui : o.concepts) {
            if (!kb_->find(cui)) throw InvalidRequest("unknown concept " + cui);
            set.add(cui, "override");
        }
        r = reason::apply_override(*r, *path, set, o.expand ? kb_.get() : nullptr);
    }

    QueryResponse response;
    {
        Stopwatch sw(&t_compile);
        response.plan = codegen::compile_trial(criteria, reasoned, *smm, *kb_, options);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto& line = lines[i];
        auto& pl = response.plan.lines[i];
        if (line.reason == "NotTranslatable") pl.detail = line.detail;
        line.status = pl.status;
        line.reason = pl.reason;
        line.detail = pl.detail;
        line.sql = pl.sql;
        line.explanation = reasoned[i] ? reason::explain(*reasoned[i], *kb_) : json(nullptr);
    }
    response.lines = std::move(lines);
    response.plan_id = plan_id(response.plan);
    if (request.timing) {
        response.timing_ms = std::map<std::string, double>{
            {"translate", t_translate}, {"reason", t_reason}, {"compile", t_compile}};
    }
    return response;
}

ExecutionResult Engine::execute(const codegen::QueryPlan& plan, sql::Database& db, const ExecuteOptions& options) const {
    const auto* smm = find_smm(plan.smm_name);
    if (!smm) throw UnknownSmm(plan.smm_name);
    return engine::execute(plan, db, smm, options);
}

}  // namespace cohortc::engine
