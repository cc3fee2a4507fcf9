// Regenerates data/trials/recall_demo from the fixture builder.

#include <iostream>

#include "support.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_recall_fixture <out-dir>\n";
        return 2;
    }
    using namespace cohortc;
    const auto& engine = testing::fixture_engine();
    const auto schema = harness::Schema::build(engine.knowledge_base());
    const auto f = testing::build_recall_fixture(engine.knowledge_base(), schema);
    testing::write_recall_fixture(f, schema, argv[1]);
    return 0;
}
