#include "mpsolve/field_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "mpsolve/errors.hpp"

namespace mps {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw Error("io", "failed to format double");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ConfigError("malformed number '" + text + "'");
    return value;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    const Grid& g = field.grid();
    out << g.dimension();
    for (int d = 0; d < g.dimension(); ++d) out << ' ' << g.node_count(d);
    out << '\n';
    for (int d = 0; d < g.dimension(); ++d) out << (d ? " " : "") << format_double(g.extent(d));
    out << '\n';
    for (double v : field.values()) out << format_double(v) << '\n';
    if (!out) throw Error("io", "write failed for '" + path.string() + "'");
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

}  // namespace

ScalarField read_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file '" + path.string() + "'");
    std::string line;

    if (!std::getline(in, line)) throw ConfigError(path.string() + ":1: missing header line");
    auto header = tokenize(line);
    if (header.empty()) throw ConfigError(path.string() + ":1: empty header line");
    int dim = static_cast<int>(parse_double(header[0]));
    if ((dim != 2 && dim != 3) || header.size() != static_cast<std::size_t>(dim) + 1)
        throw ConfigError(path.string() + ":1: header must be 'N n1 n2 [n3]' with N in {2,3}");
    std::vector<int> nodes;
    for (int d = 0; d < dim; ++d)
        nodes.push_back(static_cast<int>(parse_double(header[static_cast<std::size_t>(d) + 1])));

    if (!std::getline(in, line)) throw ConfigError(path.string() + ":2: missing extents line");
    auto ext_tokens = tokenize(line);
    if (ext_tokens.size() != static_cast<std::size_t>(dim))
        throw ConfigError(path.string() + ":2: expected " + std::to_string(dim) + " extents");
    std::vector<double> extents;
    for (auto& t : ext_tokens) extents.push_back(parse_double(t));

    Grid grid(dim, extents, nodes);
    std::vector<double> values;
    values.reserve(grid.interior_size());
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 1)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected one value per line");
        values.push_back(parse_double(tokens[0]));
    }
    if (values.size() != grid.interior_size())
        throw ConfigError(path.string() + ": expected " + std::to_string(grid.interior_size()) +
                          " values, got " + std::to_string(values.size()));
    return ScalarField(grid, std::move(values));
}

}  // namespace mps
