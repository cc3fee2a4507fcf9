#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "cohortc/engine.hpp"
#include "cohortc/metrics.hpp"

namespace {

using namespace cohortc;
namespace fs = std::filesystem;

const fs::path kData = COHORTC_BENCH_DATA_DIR;

const engine::Engine& eng() {
    static const engine::Engine e = [] {
        engine::Config c;
        c.data_dir = kData;
        return engine::Engine::from_config(c);
    }();
    return e;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kExample =
    R"(intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65")))))";

void BM_ParseSerialize(benchmark::State& state) {
    const auto& catalog = eng().catalog();
    for (auto _ : state) {
        auto node = llf::parse(kExample, catalog);
        benchmark::DoNotOptimize(llf::serialize(node));
    }
}
BENCHMARK(BM_ParseSerialize);

void BM_ShiftReduceRoundTrip(benchmark::State& state) {
    const auto& catalog = eng().catalog();
    const auto node = llf::parse(kExample, catalog);
    for (auto _ : state) {
        benchmark::DoNotOptimize(llf::parse_shift_reduce(llf::serialize_shift_reduce(node), catalog));
    }
}
BENCHMARK(BM_ShiftReduceRoundTrip);

void BM_ScorePair(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::score_pair(kExample, R"(intersect(cond("Diabetic"), female()))"));
    }
}
BENCHMARK(BM_ScorePair);

void BM_Descendants(benchmark::State& state) {
    const auto& kb = eng().knowledge_base();
    for (auto _ : state) benchmark::DoNotOptimize(kb.descendants("C0011849"));
}
BENCHMARK(BM_Descendants);

void BM_Normalize(benchmark::State& state) {
    const auto& n = eng().normalizer();
    for (auto _ : state) benchmark::DoNotOptimize(n.normalize("type 2 diabetes mellitus", {}));
}
BENCHMARK(BM_Normalize);

void BM_GenerateDemoTrial(benchmark::State& state) {
    auto r = engine::request_from_criteria_tsv(slurp(kData / "trials/recall_demo/criteria.tsv"));
    r.smm_name = state.range(0) == 0 ? "omop_tall" : "omop_pivoted";
    r.pin_date = "2020-12-31";
    for (auto _ : state) benchmark::DoNotOptimize(eng().generate(r));
}
BENCHMARK(BM_GenerateDemoTrial)->Arg(0)->Arg(1);

void BM_ExecuteDemoTrial(benchmark::State& state) {
    auto r = engine::request_from_criteria_tsv(slurp(kData / "trials/recall_demo/criteria.tsv"));
    r.smm_name = "omop_tall";
    r.pin_date = "2020-12-31";
    const auto plan = eng().generate(r).plan;
    auto db = engine::open_database(kData / "trials/recall_demo/tall");
    for (auto _ : state) benchmark::DoNotOptimize(eng().execute(plan, db));
}
BENCHMARK(BM_ExecuteDemoTrial);

}  // namespace

BENCHMARK_MAIN();
