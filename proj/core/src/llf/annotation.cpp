#include <fstream>
#include <sstream>

#include "cohortc/llf.hpp"

namespace cohortc::llf {

const char* to_string(Polarity p) { return p == Polarity::Inclusion ? "INC" : "EXC"; }

std::optional<Polarity> polarity_from_string(std::string_view s) {
    if (s == "INC") return Polarity::Inclusion;
    if (s == "EXC") return Polarity::Exclusion;
    return std::nullopt;
}

namespace {

std::string trim(std::string s) {
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

Criterion read_annotation(std::string_view content, const FunctionCatalog& catalog) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) lines.push_back(trim(line));
    auto at = [&](std::size_t lineno) -> std::string {
        return lineno <= lines.size() ? lines[lineno - 1] : std::string{};
    };

    Criterion c;
    auto pol = polarity_from_string(at(1));
    if (!pol) throw LineError("AnnotationError", 1, "expected INC or EXC");
    c.polarity = *pol;
    c.raw_text = at(3);
    if (c.raw_text.empty()) throw LineError("AnnotationError", 3, "missing raw criterion");
    if (auto aug = at(5); !aug.empty()) c.augmented_text = aug;
    std::string lf;
    for (std::size_t i = 7; i <= lines.size(); ++i) {
        if (!lf.empty()) lf += '\n';
        lf += at(i);
    }
    if (!trim(lf).empty()) c.logical_form = parse(lf, catalog);
    return c;
}

Criterion read_annotation_file(const std::filesystem::path& path, const FunctionCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open annotation file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return read_annotation(ss.str(), catalog);
}

}  // namespace cohortc::llf
