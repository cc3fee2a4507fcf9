#include "cohortc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "util.hpp"

namespace cohortc::harness {

namespace {

using reason::Direction;
using reason::ReasonedNode;

const std::map<std::string, LabInfo>& known_labs() {
    // LOINC -> column, range in tenths, unit. Table is filled in per panel.
    static const std::map<std::string, LabInfo> labs{
        {"777-3", {"platelet_count", "", 200, 4500, "10*3/uL"}},
        {"718-7", {"hemoglobin", "", 70, 180, "g/dL"}},
        {"6690-2", {"wbc_count", "", 20, 150, "10*3/uL"}},
        {"751-8", {"neutrophil_count", "", 5, 100, "10*3/uL"}},
        {"2160-0", {"creatinine", "", 4, 40, "mg/dL"}},
        {"2164-8", {"creatinine_clearance", "", 100, 1500, "mL/min"}},
        {"33914-3", {"egfr", "", 100, 1200, "mL/min/1.73m2"}},
        {"2345-7", {"glucose", "", 600, 3000, "mg/dL"}},
        {"4548-4", {"hba1c", "", 40, 120, "%"}},
        {"1742-6", {"alt", "", 50, 1500, "U/L"}},
        {"1975-2", {"total_bilirubin", "", 1, 50, "mg/dL"}},
        {"2823-3", {"potassium", "", 25, 65, "mmol/L"}},
        {"1751-7", {"albumin", "", 20, 55, "g/dL"}},
        {"39156-5", {"bmi", "", 150, 500, "kg/m2"}},
        {"8480-6", {"systolic_bp", "", 800, 2000, "mm[Hg]"}},
        {"59408-5", {"spo2", "", 800, 1000, "%"}},
        {"8310-5", {"body_temperature", "", 340, 410, "Cel"}},
    };
    return labs;
}

std::string slug(std::string_view name) {
    std::string out;
    for (unsigned char c : name) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (out.size() > 48) out.resize(48);
    return out;
}

std::string panel_table(const kb::KnowledgeBase& kb, const std::string& cui) {
    for (const auto* t : kb.outgoing(cui, kb::Predicate::Isa)) {
        const auto& parent = kb.at(t->object).preferred_name;
        if (parent == "Blood count") return "complete_blood_counts";
        if (parent == "Chemistry test") return "chemistry_panel";
        if (parent == "Vital sign measurement") return "vital_signs";
    }
    return "other_labs";
}

const std::vector<std::string> kPanelTables{"complete_blood_counts", "chemistry_panel", "vital_signs", "other_labs"};

std::string timestamp(std::int64_t minute) { return date::format_timestamp_minutes(minute); }

std::int64_t day_minute(const date::Date& d) {
    return static_cast<std::int64_t>(std::chrono::sys_days{d}.time_since_epoch().count()) * 1440;
}

/// Codes of a concept that events of its category are recorded with.
std::vector<kb::Code> event_codes(const kb::Concept& c, Category cat) {
    std::vector<kb::Code> out;
    for (const auto& code : c.codes) {
        bool ok = false;
        switch (cat) {
            case Category::Condition:
                ok = code.system == kb::CodeSystem::SNOMED || code.system == kb::CodeSystem::ICD10;
                break;
            case Category::Procedure: ok = code.system == kb::CodeSystem::SNOMED; break;
            case Category::Drug: ok = code.system == kb::CodeSystem::RXNORM; break;
            case Category::Measurement: ok = code.system == kb::CodeSystem::LOINC; break;
        }
        if (ok) out.push_back(code);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema and SMMs

Schema Schema::build(const kb::KnowledgeBase& kb) {
    Schema s;
    std::set<std::string> used_columns;
    for (const auto& c : kb.concepts()) {
        std::optional<Category> cat;
        if (c.cui != s.disease_root && kb.find(s.disease_root) && kb.subsumes(s.disease_root, c.cui)) cat = Category::Condition;
        else if (c.cui != s.finding_root && kb.find(s.finding_root) && kb.subsumes(s.finding_root, c.cui)) cat = Category::Condition;
        else if (kb.find(s.procedure_root) && kb.subsumes(s.procedure_root, c.cui)) cat = Category::Procedure;
        else if (kb.find(s.drug_root) && kb.subsumes(s.drug_root, c.cui)) cat = Category::Drug;
        else if (kb.find(s.lab_root) && kb.subsumes(s.lab_root, c.cui)) cat = Category::Measurement;
        if (!cat || event_codes(c, *cat).empty()) continue;
        s.event_concepts[c.cui] = *cat;
        if (*cat == Category::Condition) {
            std::string col = "c_" + slug(c.preferred_name);
            if (!used_columns.insert(col).second) {
                col += "_" + slug(c.cui);
                used_columns.insert(col);
            }
            s.flag_columns[c.cui] = col;
        } else if (*cat == Category::Measurement) {
            const auto loinc = c.codes_in(kb::CodeSystem::LOINC).front();
            LabInfo info;
            auto it = known_labs().find(loinc);
            if (it != known_labs().end()) {
                info = it->second;
            } else {
                info.column = slug(c.preferred_name);
            }
            info.table = panel_table(kb, c.cui);
            s.labs[c.cui] = info;
        }
    }
    return s;
}

const char* to_string(Variant v) { return v == Variant::Tall ? "tall" : "pivoted"; }

smm::SemanticMetadataMapping make_smm(const Schema& s, Variant variant) {
    using smm::Strategy;
    smm::SemanticMetadataMapping m;
    m.name = variant == Variant::Tall ? "omop_tall" : "omop_pivoted";
    m.database = m.name;
    m.person = smm::PersonTable{"person", "person_id", "birth_date", {"gender", "F", "M"}};
    auto tall = [](std::string name, std::string date, std::set<std::string> tags, std::string code_col,
                   kb::CodeSystem sys, std::optional<std::string> value = std::nullopt) {
        smm::TableMapping t;
        t.table_name = std::move(name);
        t.person_id_column = "person_id";
        t.date_column = std::move(date);
        t.strategy = Strategy::Tall;
        t.tag_concepts = std::move(tags);
        t.code_column = smm::CodeColumn{std::move(code_col), sys};
        t.value_column = std::move(value);
        return t;
    };
    if (variant == Variant::Tall) {
        m.tables.push_back(tall("condition_occurrence", "start_datetime", {s.disease_root, s.finding_root}, "code",
                                kb::CodeSystem::SNOMED));
        m.tables.push_back(tall("problem_list", "noted_datetime", {s.disease_root, s.finding_root}, "icd10_code",
                                kb::CodeSystem::ICD10));
    } else {
        smm::TableMapping flags;
        flags.table_name = "condition_flags";
        flags.person_id_column = "person_id";
        flags.date_column = "recorded_at";
        flags.strategy = Strategy::Pivoted;
        flags.tag_concepts = {s.disease_root, s.finding_root};
        for (const auto& [cui, col] : s.flag_columns) flags.columns.push_back({col, {cui}, smm::ColumnRole::Flag});
        std::sort(flags.columns.begin(), flags.columns.end(), [](auto& a, auto& b) { return a.name < b.name; });
        m.tables.push_back(std::move(flags));
    }
    m.tables.push_back(tall("procedure_occurrence", "procedure_datetime", {s.procedure_root}, "code",
                            kb::CodeSystem::SNOMED));
    m.tables.push_back(tall("drug_exposure", "exposure_datetime", {s.drug_root}, "rxnorm_code", kb::CodeSystem::RXNORM));
    if (variant == Variant::Tall) {
        m.tables.push_back(tall("measurement", "measurement_datetime", {s.lab_root}, "loinc_code",
                                kb::CodeSystem::LOINC, "value_num"));
    } else {
        for (const auto& panel : kPanelTables) {
            smm::TableMapping t;
            t.table_name = panel;
            t.person_id_column = "person_id";
            t.date_column = "measured_at";
            t.strategy = Strategy::Pivoted;
            t.tag_concepts = {s.lab_root};
            for (const auto& [cui, info] : s.labs) {
                if (info.table == panel) t.columns.push_back({info.column, {cui}, smm::ColumnRole::Value});
            }
            std::sort(t.columns.begin(), t.columns.end(), [](auto& a, auto& b) { return a.name < b.name; });
            if (!t.columns.empty()) m.tables.push_back(std::move(t));
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Materialization

std::vector<TableData> materialize(const SyntheticDb& db, const Schema& s, Variant variant) {
    std::vector<TableData> out;
    TableData person{"person", {{"person_id", "INTEGER"}, {"birth_date", "TEXT"}, {"gender", "TEXT"}}, {}, {}};
    for (const auto& p : db.persons) person.rows.push_back({p.id, p.birth_date, p.gender});
    out.push_back(std::move(person));

    TableData cond{"condition_occurrence",
                   {{"person_id", "INTEGER"}, {"code_system", "TEXT"}, {"code", "TEXT"}, {"start_datetime", "TEXT"}},
                   {},
                   {"code"}};
    TableData problems{"problem_list", {{"person_id", "INTEGER"}, {"icd10_code", "TEXT"}, {"noted_datetime", "TEXT"}}, {}, {"icd10_code"}};
    TableData procs{"procedure_occurrence",
                    {{"person_id", "INTEGER"}, {"code_system", "TEXT"}, {"code", "TEXT"}, {"procedure_datetime", "TEXT"}},
                    {},
                    {"code"}};
    TableData drugs{"drug_exposure", {{"person_id", "INTEGER"}, {"rxnorm_code", "TEXT"}, {"exposure_datetime", "TEXT"}}, {}, {"rxnorm_code"}};
    TableData meas{"measurement",
                   {{"person_id", "INTEGER"}, {"loinc_code", "TEXT"}, {"value_num", "REAL"}, {"unit", "TEXT"},
                    {"measurement_datetime", "TEXT"}},
                   {},
                   {"loinc_code"}};

    // Pivoted tables: column order is sorted, matching the SMM.
    TableData flags{"condition_flags", {{"person_id", "INTEGER"}, {"recorded_at", "TEXT"}}, {}, {}};
    std::map<std::string, std::size_t> flag_index;
    {
        std::vector<std::string> cols;
        for (const auto& [_, col] : s.flag_columns) cols.push_back(col);
        std::sort(cols.begin(), cols.end());
        for (const auto& c : cols) {
            flag_index[c] = flags.columns.size();
            flags.columns.push_back({c, "INTEGER"});
        }
    }
    std::map<std::string, TableData> panels;
    std::map<std::string, std::map<std::string, std::size_t>> panel_index;
    for (const auto& panel : kPanelTables) {
        std::vector<std::string> cols;
        for (const auto& [_, info] : s.labs) {
            if (info.table == panel) cols.push_back(info.column);
        }
        if (cols.empty()) continue;
        std::sort(cols.begin(), cols.end());
        TableData t{panel, {{"person_id", "INTEGER"}, {"measured_at", "TEXT"}}, {}, {}};
        for (const auto& c : cols) {
            panel_index[panel][c] = t.columns.size();
            t.columns.push_back({c, "REAL"});
        }
        panels[panel] = std::move(t);
    }

    for (const auto& e : db.events) {
        const std::string ts = timestamp(e.minute);
        switch (e.category) {
            case Category::Condition:
                if (variant == Variant::Pivoted) {
                    std::vector<sql::Value> row(flags.columns.size(), nullptr);
                    row[0] = e.person_id;
                    row[1] = ts;
                    row[flag_index.at(s.flag_columns.at(e.cui))] = std::int64_t{1};
                    flags.rows.push_back(std::move(row));
                } else if (e.system == kb::CodeSystem::ICD10) {
                    problems.rows.push_back({e.person_id, e.code, ts});
                } else {
                    cond.rows.push_back({e.person_id, std::string(kb::to_string(e.system)), e.code, ts});
                }
                break;
            case Category::Procedure:
                procs.rows.push_back({e.person_id, std::string(kb::to_string(e.system)), e.code, ts});
                break;
            case Category::Drug: drugs.rows.push_back({e.person_id, e.code, ts}); break;
            case Category::Measurement:
                if (variant == Variant::Pivoted) {
                    const auto& info = s.labs.at(e.cui);
                    auto& t = panels.at(info.table);
                    std::vector<sql::Value> row(t.columns.size(), nullptr);
                    row[0] = e.person_id;
                    row[1] = ts;
                    if (e.value) row[panel_index[info.table].at(info.column)] = *e.value;
                    t.rows.push_back(std::move(row));
                } else {
                    meas.rows.push_back({e.person_id, e.code, e.value ? sql::Value(*e.value) : sql::Value(nullptr), e.unit, ts});
                }
                break;
        }
    }
    if (variant == Variant::Tall) {
        out.push_back(std::move(cond));
        out.push_back(std::move(problems));
    } else {
        out.push_back(std::move(flags));
    }
    out.push_back(std::move(procs));
    out.push_back(std::move(drugs));
    if (variant == Variant::Tall) {
        out.push_back(std::move(meas));
    } else {
        for (const auto& panel : kPanelTables) {
            if (panels.contains(panel)) out.push_back(std::move(panels[panel]));
        }
    }
    return out;
}

namespace {

std::string render_value(const sql::Value& v) {
    if (std::holds_alternative<std::nullptr_t>(v)) return "NULL";
    if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&v)) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
        (void)ec;
        std::string s(buf, end);
        if (s.find_first_of(".e") == std::string::npos) s += ".0";
        return s;
    }
    std::string out = "'";
    for (char c : std::get<std::string>(v)) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    return out + "'";
}

std::string render_tsv(const sql::Value& v) {
    if (std::holds_alternative<std::nullptr_t>(v)) return "";
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    return render_value(v);
}

std::string ddl(const TableData& t) {
    std::string s = "CREATE TABLE " + t.name + " (";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) s += ", ";
        s += t.columns[i].name + " " + t.columns[i].type;
    }
    s += ");\n";
    for (const auto& col : t.indexed) s += "CREATE INDEX idx_" + t.name + "_" + col + " ON " + t.name + " (" + col + ");\n";
    return s;
}

}  // namespace

std::string to_sql_script(const std::vector<TableData>& tables) {
    std::string out = "BEGIN TRANSACTION;\n";
    for (const auto& t : tables) out += ddl(t);
    for (const auto& t : tables) {
        for (const auto& row : t.rows) {
            out += "INSERT INTO " + t.name + " VALUES (";
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ", ";
                out += render_value(row[i]);
            }
            out += ");\n";
        }
    }
    out += "COMMIT;\n";
    return out;
}

void write_tsv(const std::vector<TableData>& tables, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& t : tables) {
        std::string s;
        for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "\t" : "") + t.columns[i].name;
        s += "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "\t" : "") + render_tsv(row[i]);
            s += "\n";
        }
        detail::write_file(dir / (t.name + ".tsv"), s);
    }
}

void load(sql::Database& target, const std::vector<TableData>& tables) {
    target.exec("BEGIN TRANSACTION");
    for (const auto& t : tables) {
        target.exec(ddl(t));
        std::string insert = "INSERT INTO " + t.name + " VALUES (";
        for (std::size_t i = 0; i < t.columns.size(); ++i) insert += i ? ", ?" : "?";
        insert += ")";
        auto st = target.prepare(insert);
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) st.bind(static_cast<int>(i + 1), row[i]);
            st.step();
            st.reset();
        }
    }
    target.exec("COMMIT");
}

// ---------------------------------------------------------------------------
// Generation

namespace {

class Generator {
public:
    Generator(const GenerateOptions& o, const kb::KnowledgeBase& kb, const Schema& s)
        : opts_(o), kb_(kb), schema_(s), rng_(o.seed) {
        for (const auto& [cui, _] : s.event_concepts) pool_.push_back(cui);
        first_ = day_minute(o.first_day);
        last_ = day_minute(o.last_day) + 1439;
    }

    GeneratedDb run(std::span<const Plant> plants) {
        GeneratedDb out;
        background(out.db);
        fixed_gender_.assign(opts_.n_patients, false);
        fixed_birth_.assign(opts_.n_patients, false);
        for (const auto& plant : plants) {
            if (plant.count > opts_.n_patients) {
                throw InfeasiblePlant("cannot plant " + std::to_string(plant.count) + " of " +
                                      std::to_string(opts_.n_patients) + " patients");
            }
            std::vector<PersonId> ids(opts_.n_patients);
            std::iota(ids.begin(), ids.end(), PersonId{1});
            std::shuffle(ids.begin(), ids.end(), rng_);
            ids.resize(plant.count);
            Cohort chosen(ids.begin(), ids.end());
            for (PersonId id : chosen) {
                std::int64_t t = uniform(first_ + 2 * 10080, last_ - 2 * 10080);
                satisfy(plant.node, out.db, id, t);
            }
            for (std::size_t k = 0; k < plant.count && chosen.size() < opts_.n_patients; ++k) {
                PersonId other = 0;
                do {
                    other = uniform(1, static_cast<std::int64_t>(opts_.n_patients));
                } while (chosen.contains(other));
                near_miss(plant.node, out.db, other, uniform(first_ + 2 * 10080, last_ - 2 * 10080));
            }
            out.planted.push_back(std::move(chosen));
        }
        std::stable_sort(out.db.events.begin(), out.db.events.end(), [](const Event& a, const Event& b) {
            return std::tie(a.person_id, a.minute) < std::tie(b.person_id, b.minute);
        });
        return out;
    }

private:
    const GenerateOptions& opts_;
    const kb::KnowledgeBase& kb_;
    const Schema& schema_;
    std::mt19937_64 rng_;
    std::vector<std::string> pool_;
    std::int64_t first_ = 0, last_ = 0;
    std::vector<bool> fixed_gender_, fixed_birth_;

    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }

    Event make_event(PersonId pid, const std::string& cui, std::int64_t minute, std::optional<double> value = {}) {
        const auto& c = kb_.at(cui);
        Category cat = schema_.event_concepts.at(cui);
        auto codes = event_codes(c, cat);
        const auto& code = codes[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(codes.size()) - 1))];
        Event e{pid, cui, cat, code.system, code.code, minute, std::nullopt, ""};
        if (cat == Category::Measurement) {
            const auto& lab = schema_.labs.at(cui);
            e.value = value ? *value : static_cast<double>(uniform(lab.lo_tenths, lab.hi_tenths)) / 10.0;
            e.unit = lab.unit;
        }
        return e;
    }

    void background(SyntheticDb& db) {
        const auto lo = std::chrono::sys_days{date::Date{std::chrono::year{1930}, std::chrono::January, std::chrono::day{1}}};
        const auto hi = std::chrono::sys_days{date::Date{std::chrono::year{2015}, std::chrono::December, std::chrono::day{31}}};
        for (std::size_t i = 0; i < opts_.n_patients; ++i) {
            PersonId id = static_cast<PersonId>(i + 1);
            auto days = uniform(lo.time_since_epoch().count(), hi.time_since_epoch().count());
            date::Date birth{std::chrono::sys_days{std::chrono::days{days}}};
            db.persons.push_back({id, date::format_date(birth), uniform(0, 1) ? "F" : "M"});
            // Events cluster on a few encounter days so that short windows occur.
            std::vector<std::int64_t> encounters;
            for (int k = 0; k < 3; ++k) encounters.push_back(uniform(first_ / 1440, last_ / 1440) * 1440);
            auto n = uniform(0, static_cast<std::int64_t>(2 * opts_.mean_events));
            for (std::int64_t k = 0; k < n; ++k) {
                const auto& cui = pool_[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(pool_.size()) - 1))];
                std::int64_t day = encounters[static_cast<std::size_t>(uniform(0, 2))];
                db.events.push_back(make_event(id, cui, day + uniform(0, 1439)));
            }
        }
    }

    std::optional<double> value_for(const std::vector<reason::NumericFilter>& filters, const LabInfo& lab) {
        // Thresholds first, so planted values sit on the boundary when it qualifies.
        std::vector<double> candidates;
        for (const auto& f : filters) {
            for (double d : {0.0, -0.1, 0.1}) candidates.push_back(std::round((f.value + d) * 10.0) / 10.0);
        }
        for (int t = lab.lo_tenths; t <= lab.hi_tenths; t += std::max(1, (lab.hi_tenths - lab.lo_tenths) / 50)) {
            candidates.push_back(t / 10.0);
        }
        for (double v : candidates) {
            bool ok = std::all_of(filters.begin(), filters.end(),
                                  [&](const reason::NumericFilter& f) { return reason::compare(v, f.op, f.value); });
            if (ok) return v;
        }
        return std::nullopt;
    }

    std::string plantable_concept(const ReasonedNode& n) {
        for (const auto& m : n.concepts.members()) {
            if (!schema_.event_concepts.contains(m)) continue;
            if (!n.numeric.empty() && schema_.event_concepts.at(m) != Category::Measurement) continue;
            return m;
        }
        throw InfeasiblePlant("no plantable concept for " + llf::serialize(n.source));
    }

    void set_birth(SyntheticDb& db, PersonId id, const std::vector<reason::NumericFilter>& filters) {
        auto& p = db.persons[static_cast<std::size_t>(id - 1)];
        auto satisfies = [&](int age) {
            return std::all_of(filters.begin(), filters.end(),
                               [&](const reason::NumericFilter& f) { return reason::compare(age, f.op, f.value); });
        };
        if (fixed_birth_[static_cast<std::size_t>(id - 1)]) {
            if (satisfies(date::age_at(*date::parse_date(p.birth_date), opts_.reference))) return;
            throw InfeasiblePlant("conflicting age plants for person " + std::to_string(id));
        }
        for (int age = 18; age <= 110; ++age) {
            if (!satisfies(age)) continue;
            // Mid-year birthday keeps the age unambiguous at the reference date.
            auto birth = std::chrono::sys_days{date::minus_years(opts_.reference, age)} - std::chrono::days{uniform(30, 300)};
            p.birth_date = date::format_date(date::Date{birth});
            fixed_birth_[static_cast<std::size_t>(id - 1)] = true;
            return;
        }
        throw InfeasiblePlant("no age satisfies the age filters");
    }

    void set_gender(SyntheticDb& db, PersonId id, const std::string& g) {
        auto& p = db.persons[static_cast<std::size_t>(id - 1)];
        if (fixed_gender_[static_cast<std::size_t>(id - 1)] && p.gender != g) {
            throw InfeasiblePlant("conflicting gender plants for person " + std::to_string(id));
        }
        p.gender = g;
        fixed_gender_[static_cast<std::size_t>(id - 1)] = true;
    }

    static std::int64_t window_minutes(const reason::TemporalFilter& tf) {
        const double factor = tf.window->unit == "minutes" ? 1 : tf.window->unit == "hours" ? 60
                                                              : tf.window->unit == "days"  ? 1440
                                                                                           : 10080;
        return std::llround(tf.window->value * factor);
    }

    /// Distance from the event to its anchor. Planted pairs favour the
    /// edges: zero and the full window for within, one minute for before
    /// and after.
    std::int64_t planted_gap(const reason::TemporalFilter& tf) {
        const auto pick = uniform(0, 3);
        if (tf.direction == Direction::Within) {
            const auto w = window_minutes(tf);
            return pick == 0 ? 0 : pick == 1 ? w : pick == 2 ? w / 2 : uniform(0, w);
        }
        return pick == 0 ? 1 : pick == 1 ? 60 : uniform(1, 1440);
    }

    /// Offset that just fails the predicate; same sign convention as planted_gap.
    std::int64_t missed_gap(const reason::TemporalFilter& tf) {
        if (tf.direction == Direction::Within) return uniform(0, 1) ? window_minutes(tf) + 1 : -1;
        return 0;
    }

    static bool plain_entity(const ReasonedNode& n) {
        return reason::is_entity_function(n.function()) && n.temporal.empty() && n.conditional.empty();
    }

    /// Near miss on another person: the event and its anchors one minute
    /// outside the temporal predicate, or a lab value on a threshold. Only
    /// for plain anchors, so that decoys never touch demographics.
    void near_miss(const ReasonedNode& n, SyntheticDb& db, PersonId id, std::int64_t t) {
        if (!n.computable()) return;
        if (n.function() == "intersect" || n.function() == "union") {
            for (const auto& c : n.children) near_miss(c, db, id, t);
            return;
        }
        if (!reason::is_entity_function(n.function()) || !n.conditional.empty()) return;
        if (n.temporal.empty()) {
            // A value exactly on one threshold; whether it qualifies depends on the operator.
            if (n.numeric.empty()) return;
            const auto& f = n.numeric[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n.numeric.size()) - 1))];
            db.events.push_back(make_event(id, plantable_concept(n), t, std::round(f.value * 10.0) / 10.0));
            return;
        }
        for (const auto& tf : n.temporal) {
            if (!plain_entity(n.children[tf.anchor])) return;
        }
        const std::string cui = plantable_concept(n);
        std::optional<double> value;
        if (!n.numeric.empty()) {
            value = value_for(n.numeric, schema_.labs.at(cui));
            if (!value) return;
        }
        db.events.push_back(make_event(id, cui, t, value));
        for (const auto& tf : n.temporal) {
            const std::int64_t gap = missed_gap(tf);
            satisfy(n.children[tf.anchor], db, id, tf.direction == Direction::Before ? t + gap : t - gap);
        }
    }

    void satisfy(const ReasonedNode& n, SyntheticDb& db, PersonId id, std::int64_t t) {
        if (!n.computable()) throw InfeasiblePlant("non-computable plant " + llf::serialize(n.source));
        const auto& f = n.function();
        if (f == "intersect") {
            for (const auto& c : n.children) satisfy(c, db, id, t);
        } else if (f == "union") {
            for (const auto& c : n.children) {
                if (c.computable()) return satisfy(c, db, id, t);
            }
        } else if (f == "not") {
            throw InfeasiblePlant("cannot plant a negation");
        } else if (f == "female" || f == "male") {
            set_gender(db, id, f == "female" ? "F" : "M");
        } else if (f == "age") {
            set_birth(db, id, n.numeric);
        } else {
            const std::string cui = plantable_concept(n);
            std::optional<double> value;
            if (!n.numeric.empty()) {
                value = value_for(n.numeric, schema_.labs.at(cui));
                if (!value) throw InfeasiblePlant("no value satisfies the numeric filters");
            }
            db.events.push_back(make_event(id, cui, t, value));
            for (const auto& tf : n.temporal) {
                const std::int64_t gap = planted_gap(tf);
                satisfy(n.children[tf.anchor], db, id, tf.direction == Direction::Before ? t + gap : t - gap);
            }
            for (const auto& c : n.conditional) satisfy(n.children[c.consequent], db, id, t);
        }
    }
};

}  // namespace

std::vector<Plant> parse_plants(std::string_view text, const llf::FunctionCatalog& catalog,
                                const kb::KnowledgeBase& kb, const norm::Normalizer& normalizer) {
    std::vector<Plant> out;
    std::size_t lineno = 0;
    for (const auto& row : detail::split(text, '\n')) {
        ++lineno;
        if (detail::skip_line(row)) continue;
        auto tab = row.find('\t');
        std::size_t count = 0;
        const std::string field = detail::trim(row.substr(0, tab == std::string::npos ? row.size() : tab));
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), count);
        if (tab == std::string::npos || ec != std::errc() || ptr != field.data() + field.size()) {
            throw LineError("ParseError", lineno, "expected a count, a tab, then a logical form");
        }
        llf::LfNode lf;
        try {
            lf = llf::parse(row.substr(tab + 1), catalog);
        } catch (const Error& e) {
            throw LineError(e.code(), lineno, e.what());
        }
        auto diags = llf::validate(lf, catalog);
        if (!diags.empty()) throw LineError(diags[0].code, lineno, diags[0].message);
        out.push_back({reason::reason(lf, kb, normalizer), count});
    }
    return out;
}

GeneratedDb generate_db(const GenerateOptions& options, std::span<const Plant> plants, const kb::KnowledgeBase& kb,
                        const Schema& schema) {
    if (options.n_patients == 0) throw InfeasiblePlant("n_patients must be at least 1");
    Generator g(options, kb, schema);
    return g.run(plants);
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

class Oracle {
public:
    Oracle(const SyntheticDb& db, const kb::KnowledgeBase& kb, const OracleOptions& o) : db_(db), kb_(kb), opts_(o) {
        for (const auto& p : db.persons) all_.insert(p.id);
        if (o.pin_date) pin_limit_ = day_minute(*o.pin_date) + 1439;
    }

    Cohort eval(const ReasonedNode& n) {
        const auto& f = n.function();
        if (f == "intersect") {
            Cohort acc = all_;
            for (const auto& c : n.children) acc = intersect(acc, eval(c));
            return acc;
        }
        if (f == "union") {
            Cohort acc;
            for (const auto& c : n.children) {
                if (c.computable()) acc.merge(eval(c));
            }
            return acc;
        }
        if (f == "not") return minus(all_, eval(n.children.at(0)));
        if (f == "female" || f == "male" || f == "age") return demographic(n);
        Cohort base;
        for (const Event* e : events(n)) base.insert(e->person_id);
        if (n.conditional.empty()) return base;
        Cohort then = base;
        for (const auto& c : n.conditional) then = intersect(then, eval(n.children[c.consequent]));
        Cohort out = minus(all_, base);
        out.merge(then);
        return out;
    }

private:
    const SyntheticDb& db_;
    const kb::KnowledgeBase& kb_;
    const OracleOptions& opts_;
    Cohort all_;
    std::optional<std::int64_t> pin_limit_;

    static Cohort intersect(const Cohort& a, const Cohort& b) {
        Cohort out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
        return out;
    }
    static Cohort minus(const Cohort& a, const Cohort& b) {
        Cohort out;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
        return out;
    }

    Cohort demographic(const ReasonedNode& n) {
        const date::Date ref = opts_.pin_date ? *opts_.pin_date : opts_.today;
        Cohort out;
        for (const auto& p : db_.persons) {
            bool ok = true;
            if (n.function() == "female") ok = p.gender == "F";
            if (n.function() == "male") ok = p.gender == "M";
            if (n.function() == "age") {
                const double age = date::age_at(*date::parse_date(p.birth_date), ref);
                for (const auto& f : n.numeric) ok = ok && reason::compare(age, f.op, f.value);
            }
            if (ok) out.insert(p.id);
        }
        return out;
    }

    std::vector<const Event*> events(const ReasonedNode& n) {
        std::set<kb::Code> codes;
        for (const auto& m : n.concepts.members()) {
            if (const auto* c = kb_.find(m)) codes.insert(c->codes.begin(), c->codes.end());
        }
        std::vector<const Event*> out;
        for (const auto& e : db_.events) {
            if (pin_limit_ && e.minute > *pin_limit_) continue;
            if (!codes.contains(kb::Code{e.system, e.code})) continue;
            bool ok = true;
            for (const auto& f : n.numeric) ok = ok && e.value && reason::compare(*e.value, f.op, f.value);
            if (ok) out.push_back(&e);
        }
        for (const auto& tf : n.temporal) {
            auto anchors = events(n.children[tf.anchor]);
            std::int64_t window = 0;
            if (tf.window) {
                double factor = tf.window->unit == "minutes" ? 1 : tf.window->unit == "hours" ? 60
                                                               : tf.window->unit == "days"  ? 1440
                                                                                            : 10080;
                window = std::llround(tf.window->value * factor);
            }
            std::vector<const Event*> kept;
            for (const Event* x : out) {
                bool hit = std::any_of(anchors.begin(), anchors.end(), [&](const Event* y) {
                    if (y->person_id != x->person_id) return false;
                    switch (tf.direction) {
                        case Direction::Before: return x->minute < y->minute;
                        case Direction::After: return x->minute > y->minute;
                        case Direction::Within: return y->minute <= x->minute && x->minute <= y->minute + window;
                    }
                    return false;
                });
                if (hit) kept.push_back(x);
            }
            out = std::move(kept);
        }
        return out;
    }
};

}  // namespace

Cohort oracle_eval(const ReasonedNode& node, const SyntheticDb& db, const kb::KnowledgeBase& kb,
                   const OracleOptions& options) {
    Oracle o(db, kb, options);
    return o.eval(node);
}

// ---------------------------------------------------------------------------
// Recall

std::vector<Cohort> cumulative_cohorts(std::span<const LineCohort> lines, const Cohort& universe) {
    std::vector<Cohort> out;
    Cohort current = universe;
    for (const auto& l : lines) {
        if (l.executed) {
            Cohort next;
            if (l.polarity == llf::Polarity::Inclusion) {
                std::set_intersection(current.begin(), current.end(), l.cohort.begin(), l.cohort.end(),
                                      std::inserter(next, next.end()));
            } else {
                std::set_difference(current.begin(), current.end(), l.cohort.begin(), l.cohort.end(),
                                    std::inserter(next, next.end()));
            }
            current = std::move(next);
        }
        out.push_back(current);
    }
    return out;
}

RecallCurve recall_curve(std::span<const LineCohort> lines, const Cohort& gold, const Cohort& universe) {
    if (gold.empty()) throw EmptyGold();
    RecallCurve curve;
    curve.gold = gold;
    auto cumulative = cumulative_cohorts(lines, universe);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::size_t hits = 0;
        for (PersonId p : gold) hits += cumulative[i].contains(p);
        curve.points.push_back({lines[i].line_number, lines[i].executed, cumulative[i].size(),
                                static_cast<double>(hits) / static_cast<double>(gold.size())});
    }
    return curve;
}

std::string to_tsv(const RecallCurve& curve) {
    std::string out = "line\trecall\n";
    for (const auto& p : curve.points) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", p.recall);
        out += std::to_string(p.line_number) + "\t" + buf + "\n";
    }
    return out;
}

Cohort read_cohort_file(const std::filesystem::path& path) {
    Cohort out;
    std::size_t lineno = 0;
    for (const auto& line : detail::split(detail::read_file(path), '\n')) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        auto field = detail::trim(detail::split(line, '\t')[0]);
        PersonId id = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            throw LineError("ParseError", lineno, "expected a person id");
        }
        out.insert(id);
    }
    return out;
}

}  // namespace cohortc::harness
