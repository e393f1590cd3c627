#include "sqz/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace sqz {

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> content_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream is(text);
    std::string raw;
    int number = 0;
    while (std::getline(is, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        for (std::string tok; ls >> tok;) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

double to_double(const std::string& tok, int line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, "not a number: '" + tok + "'");
    return v;
}

long to_count(const std::string& tok, int line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "not an integer: '" + tok + "'");
    return v;
}

Vector row_values(const Line& line, Index expected, const char* what) {
    if (static_cast<Index>(line.tokens.size()) != expected)
        throw ParseError(line.number, std::string(what) + ": expected " + std::to_string(expected) + " values, found " +
                                          std::to_string(line.tokens.size()));
    Vector v(expected);
    for (Index k = 0; k < expected; ++k) v[k] = to_double(line.tokens[k], line.number);
    return v;
}

}  // namespace

LpInstance parse_instance(const std::string& text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError(1, "empty instance: expected header 'n m'");
    const Line& head = lines[0];
    if (head.tokens.size() != 2) throw ParseError(head.number, "header must be 'n m'");
    const long n = to_count(head.tokens[0], head.number);
    const long m = to_count(head.tokens[1], head.number);
    if (m < 1 || n < m) throw ParseError(head.number, "need n >= m >= 1");
    const std::size_t want = 3 + static_cast<std::size_t>(m);
    if (lines.size() < want) {
        const int where = lines.back().number + 1;
        throw ParseError(where, "truncated instance: expected " + std::to_string(want) + " content lines, found " +
                                    std::to_string(lines.size()));
    }
    if (lines.size() > want) throw ParseError(lines[want].number, "unexpected trailing content");

    LpInstance inst;
    inst.c = row_values(lines[1], n, "c");
    inst.b = row_values(lines[2], m, "b");
    inst.A.resize(m, n);
    for (long i = 0; i < m; ++i) inst.A.row(i) = row_values(lines[3 + i], n, "row of A").transpose();
    return inst;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

LpInstance read_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string fmt_full(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

void append_row(std::ostringstream& os, const Vector& v) {
    for (Index k = 0; k < v.size(); ++k) {
        if (k) os << ' ';
        os << fmt_full(v[k]);
    }
    os << '\n';
}

}  // namespace

std::string format_instance(const LpInstance& inst) {
    std::ostringstream os;
    os << inst.n() << ' ' << inst.m() << '\n';
    append_row(os, inst.c);
    append_row(os, inst.b);
    for (Index i = 0; i < inst.m(); ++i) append_row(os, inst.A.row(i).transpose());
    return os.str();
}

void write_instance(const std::string& path, const LpInstance& inst) { write_file(path, format_instance(inst)); }

Truth parse_truth(const std::string& text, Index r) {
    std::vector<Index> alpha;
    Vector z;
    bool have_alpha = false, have_z = false;
    for (const auto& line : content_lines(text)) {
        const std::string& key = line.tokens[0];
        if (key == "alpha") {
            for (std::size_t k = 1; k < line.tokens.size(); ++k) alpha.push_back(to_count(line.tokens[k], line.number));
            have_alpha = true;
        } else if (key == "z") {
            z.resize(static_cast<Index>(line.tokens.size()) - 1);
            for (std::size_t k = 1; k < line.tokens.size(); ++k)
                z[static_cast<Index>(k) - 1] = to_double(line.tokens[k], line.number);
            have_z = true;
        } else {
            throw ParseError(line.number, "unknown truth key '" + key + "'");
        }
    }
    if (!have_alpha || !have_z) throw ParseError(1, "truth file needs 'alpha' and 'z' lines");
    if (z.size() != 2 * r) throw ParseError(1, "truth z must have 2r entries");
    try {
        return Truth{ComplementarySet::from_one_based(r, alpha), z};
    } catch (const ContractError& e) {
        throw ParseError(1, e.what());
    }
}

std::string format_truth(const ComplementarySet& alpha, const Vector& z) {
    std::ostringstream os;
    os << "alpha " << format_indices(alpha.one_based(), " ") << '\n' << "z ";
    append_row(os, z);
    return os.str();
}

}  // namespace sqz
