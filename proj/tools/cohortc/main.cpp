// cohortc: command-line front end over the cohort query library.
//
// Every failure prints `error: <Code>: <message>` on stderr and exits 1;
// usage errors exit 2.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cohortc/engine.hpp"
#include "cohortc/harness.hpp"
#include "cohortc/llf.hpp"
#include "cohortc/metrics.hpp"
#include "cohortc/service.hpp"

namespace fs = std::filesystem;
using namespace cohortc;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& s) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write " + p.string());
    out << s;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::vector<std::string> out;
    std::istringstream in(read_text(p));
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

struct Globals {
    std::string config_file;
    std::string data_dir;
    std::string log_level = "warn";
};

engine::Config make_config(const Globals& g) {
    engine::Config c;
    if (!g.config_file.empty()) {
        c = engine::load_config(g.config_file);
    } else {
        c.data_dir = COHORTC_SOURCE_DATA_DIR;
        engine::apply_environment(c);
    }
    if (!g.data_dir.empty()) c.data_dir = g.data_dir;
    for (const auto& p : {c.resolve(c.concepts_file), c.resolve(c.triples_file), c.resolve(c.lexicon_file),
                          c.resolve(c.smm_dir)}) {
        if (!fs::exists(p)) throw Error("ConfigError", "missing " + p.string());
    }
    return c;
}

llf::Style style_arg(const std::string& s) {
    auto st = llf::style_from_string(s);
    if (!st) throw Error("UsageError", "unknown style '" + s + "'");
    return *st;
}

void print_diagnostics(const std::vector<llf::Diagnostic>& diags) {
    for (const auto& d : diags) {
        std::cerr << "error: " << d.code << ": " << d.function << " at '" << d.path << "': " << d.message << "\n";
    }
}

// ---------------------------------------------------------------------------

int cmd_parse(const std::string& file, const std::string& style, const std::string& spans_file, bool compact) {
    const auto catalog = llf::FunctionCatalog::builtin();
    std::string text = read_text(file);
    const auto st = style_arg(style);
    if (st != llf::Style::Standard) {
        std::vector<std::string> spans;
        if (!spans_file.empty()) spans = read_lines(spans_file);
        text = llf::convert_style(text, st, llf::Style::Standard, catalog,
                                  spans_file.empty() ? std::nullopt : std::optional<std::span<const std::string>>(spans));
    }
    auto node = llf::parse(text, catalog);
    auto diags = llf::validate(node, catalog);
    if (!diags.empty()) {
        print_diagnostics(diags);
        return 1;
    }
    std::cout << llf::serialize(node, !compact) << "\n";
    return 0;
}

int cmd_convert(const std::string& file, const std::string& from, const std::string& to, const std::string& spans_file,
                const std::string& spans_out) {
    const auto catalog = llf::FunctionCatalog::builtin();
    std::string text = read_text(file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    std::vector<std::string> spans;
    if (!spans_file.empty()) spans = read_lines(spans_file);
    std::optional<std::span<const std::string>> table;
    if (!spans_file.empty()) table = spans;
    const auto to_style = style_arg(to);
    std::string out = llf::convert_style(text, style_arg(from), to_style, catalog, table);
    if (to_style == llf::Style::SpanIndex && !spans_out.empty()) {
        std::vector<std::string> found;
        llf::to_span_index(llf::convert_style(text, style_arg(from), llf::Style::Standard, catalog, table), &found);
        std::string s;
        for (const auto& f : found) s += f + "\n";
        write_text(spans_out, s);
    }
    std::cout << out << "\n";
    return 0;
}

int cmd_score(const std::string& file) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(file)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw LineError("ParseError", lineno, "expected candidate<TAB>reference");
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    if (pairs.empty()) throw metrics::EmptyCorpus();
    std::cout << "pair\tbleu\trouge_l_f1\n";
    char buf[64];
    double rouge_sum = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto s = metrics::score_pair(pairs[i].first, pairs[i].second);
        rouge_sum += s.rouge_l_f1;
        std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\n", i + 1, s.bleu, s.rouge_l_f1);
        std::cout << buf;
    }
    std::snprintf(buf, sizeof buf, "mean\t%.6f\t%.6f\n", metrics::corpus_agreement(pairs),
                  rouge_sum / static_cast<double>(pairs.size()));
    std::cout << buf;
    return 0;
}

struct CompileArgs {
    std::string criteria;
    std::string smm;
    std::string pin_date;
    std::string today;
    std::string input_mode = "raw";
    std::string dialect = "sqlite";
    std::string out_dir;
};

int cmd_compile(const Globals& g, const CompileArgs& a) {
    auto config = make_config(g);
    auto eng = engine::Engine::from_config(config);
    const std::string text = read_text(a.criteria);
    engine::QueryRequest req;
    if (fs::path(a.criteria).extension() == ".json") {
        req = engine::request_from_json(json::parse(text));
    } else {
        req = engine::request_from_criteria_tsv(text);
        auto mode = engine::input_mode_from_string(a.input_mode);
        if (!mode) throw Error("UsageError", "unknown input mode '" + a.input_mode + "'");
        req.input_mode = *mode;
    }
    if (!a.smm.empty()) req.smm_name = a.smm;
    if (!a.pin_date.empty()) req.pin_date = a.pin_date;
    if (!a.today.empty()) req.today = a.today;
    auto dialect = codegen::dialect_from_string(a.dialect);
    if (!dialect) throw Error("UsageError", "unknown dialect '" + a.dialect + "'");
    req.dialect = *dialect;
    auto response = eng.generate(req);
    for (const auto& l : response.lines) {
        if (l.status == codegen::LineStatus::Skipped) spdlog::info("line {} skipped: {} {}", l.line_number, l.reason, l.detail);
    }
    const std::string plan = codegen::to_json(response.plan).dump(2) + "\n";
    if (a.out_dir.empty()) {
        std::cout << plan;
        return 0;
    }
    const fs::path out(a.out_dir);
    write_text(out / "plan.json", plan);
    write_text(out / "response.json", engine::to_json(response).dump(2) + "\n");
    for (const auto& l : response.plan.lines) {
        if (l.sql) write_text(out / ("line_" + std::to_string(l.line_number) + ".sql"), *l.sql + "\n");
    }
    std::cout << (out / "plan.json").string() << "\n";
    return 0;
}

struct RunArgs {
    std::string plan;
    std::string db;
    std::string gold;
    std::string curve;
    bool skip_zero = false;
};

int cmd_run(const Globals& g, const RunArgs& a) {
    auto config = make_config(g);
    auto eng = engine::Engine::from_config(config);
    auto plan = codegen::plan_from_json(json::parse(read_text(a.plan)));
    auto db = engine::open_database(a.db);
    auto result = eng.execute(plan, db, {a.skip_zero});
    json out = engine::to_json(result);
    if (!a.gold.empty()) {
        auto gold = harness::read_cohort_file(a.gold);
        std::vector<harness::LineCohort> lines;
        for (const auto& l : result.lines) {
            lines.push_back({l.line_number, l.polarity, l.status == codegen::LineStatus::Executed, l.cohort});
        }
        auto curve = harness::recall_curve(lines, gold, result.universe);
        const std::string tsv = harness::to_tsv(curve);
        if (!a.curve.empty()) write_text(a.curve, tsv);
        json points = json::array();
        for (const auto& p : curve.points) {
            points.push_back({{"line", p.line_number}, {"executed", p.executed}, {"cohort_size", p.cohort_size},
                              {"recall", p.recall}});
        }
        out["recall"] = points;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct GenArgs {
    std::uint64_t seed = 1;
    std::size_t patients = 1000;
    std::string plant;
    std::string out_dir = "synthetic";
    std::string reference = "2020-12-31";
};

int cmd_gen_db(const Globals& g, const GenArgs& a) {
    auto config = make_config(g);
    auto eng = engine::Engine::from_config(config);
    const auto& kb = eng.knowledge_base();
    auto schema = harness::Schema::build(kb);
    std::vector<harness::Plant> plants;
    if (!a.plant.empty()) plants = harness::parse_plants(read_text(a.plant), eng.catalog(), kb, eng.normalizer());
    harness::GenerateOptions opts;
    opts.seed = a.seed;
    opts.n_patients = a.patients;
    auto ref = date::parse_date(a.reference);
    if (!ref) throw Error("UsageError", "--reference must be YYYY-MM-DD");
    opts.reference = *ref;
    auto generated = harness::generate_db(opts, plants, kb, schema);
    const fs::path out(a.out_dir);
    for (auto variant : {harness::Variant::Tall, harness::Variant::Pivoted}) {
        const fs::path dir = out / harness::to_string(variant);
        auto tables = harness::materialize(generated.db, schema, variant);
        write_text(dir / "database.sql", harness::to_sql_script(tables));
        harness::write_tsv(tables, dir / "tables");
        write_text(out / "smm" / (std::string("omop_") + harness::to_string(variant) + ".json"),
                   smm::to_json(harness::make_smm(schema, variant)).dump(2) + "\n");
    }
    for (std::size_t i = 0; i < generated.planted.size(); ++i) {
        std::string ids;
        for (auto id : generated.planted[i]) ids += std::to_string(id) + "\n";
        write_text(out / ("planted_" + std::to_string(i + 1) + ".txt"), ids);
    }
    std::cout << out.string() << "\n";
    return 0;
}

service::Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_serve(const Globals& g, const std::string& host, int port) {
    auto config = make_config(g);
    if (!host.empty()) config.host = host;
    if (port >= 0) config.port = port;
    spdlog::set_level(spdlog::level::from_str(config.log_level));
    auto eng = engine::Engine::from_config(config);
    std::map<std::string, fs::path> dbs;
    for (const auto& [name, p] : config.databases) dbs[name] = config.resolve(p);
    service::Service svc(eng, dbs);
    const int bound = svc.bind(config.host, config.port);
    spdlog::info("listening on {}:{}", config.host, bound);
    std::cout << "listening on " << config.host << ":" << bound << std::endl;
    g_service = &svc;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    svc.serve();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohortc: eligibility criteria to cohort SQL"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_file, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--data-dir", g.data_dir, "Directory holding kb/, lexicon.tsv and smm/");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

    std::string file, style = "standard", spans, spans_out, from = "standard", to = "standard";
    bool compact = false;
    auto* parse = app.add_subcommand("parse", "Parse and validate a logical form");
    parse->add_option("file", file)->required()->check(CLI::ExistingFile);
    parse->add_option("--style", style, "standard, shift-reduce or span-index");
    parse->add_option("--spans", spans, "Span table (one span per line) for span-index input");
    parse->add_flag("--compact", compact, "Print the compact form");

    auto* convert = app.add_subcommand("convert", "Convert a logical form between syntax styles");
    convert->add_option("file", file)->required()->check(CLI::ExistingFile);
    convert->add_option("--from", from)->required();
    convert->add_option("--to", to)->required();
    convert->add_option("--spans", spans, "Span table for span-index input");
    convert->add_option("--spans-out", spans_out, "Write the span table when converting to span-index");

    std::string pairs;
    auto* score = app.add_subcommand("score", "BLEU and ROUGE-L over candidate/reference pairs");
    score->add_option("--pairs", pairs, "candidate<TAB>reference per line")->required()->check(CLI::ExistingFile);

    CompileArgs ca;
    auto* compile = app.add_subcommand("compile", "Compile criteria into a query plan");
    compile->add_option("--criteria", ca.criteria, "INC/EXC TSV or request JSON")->required()->check(CLI::ExistingFile);
    compile->add_option("--smm", ca.smm, "Semantic metadata mapping name");
    compile->add_option("--pin-date", ca.pin_date, "Ignore records after this date (YYYY-MM-DD)");
    compile->add_option("--today", ca.today, "Age reference when unpinned (YYYY-MM-DD)");
    compile->add_option("--input-mode", ca.input_mode, "raw, augmented or logical_form");
    compile->add_option("--dialect", ca.dialect, "sqlite or ansi");
    compile->add_option("--out", ca.out_dir, "Write plan.json, response.json and line_N.sql here");

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Execute a query plan");
    run->add_option("--plan", ra.plan)->required()->check(CLI::ExistingFile);
    run->add_option("--db", ra.db, "Database directory, .sql script or SQLite file")->required()->check(CLI::ExistingPath);
    run->add_option("--gold", ra.gold, "Gold person ids, one per line")->check(CLI::ExistingFile);
    run->add_option("--curve", ra.curve, "Write the recall curve TSV here");
    run->add_flag("--skip-zero", ra.skip_zero, "Skip lines that would empty the cohort");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen-db", "Generate a synthetic database with planted cohorts");
    gen->add_option("--seed", ga.seed);
    gen->add_option("--patients", ga.patients);
    gen->add_option("--plant", ga.plant, "count<TAB>logical form per line")->check(CLI::ExistingFile);
    gen->add_option("--out", ga.out_dir);
    gen->add_option("--reference", ga.reference, "Age reference date for planted age criteria");

    std::string host;
    int port = -1;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--host", host);
    serve->add_option("--port", port);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    spdlog::set_default_logger(spdlog::default_logger());

    try {
        if (*parse) return cmd_parse(file, style, spans, compact);
        if (*convert) return cmd_convert(file, from, to, spans, spans_out);
        if (*score) return cmd_score(pairs);
        if (*compile) return cmd_compile(g, ca);
        if (*run) return cmd_run(g, ra);
        if (*gen) return cmd_gen_db(g, ga);
        if (*serve) return cmd_serve(g, host, port);
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: InvalidJson: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: InternalError: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
