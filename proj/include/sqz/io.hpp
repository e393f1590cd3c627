#pragma once

#include "sqz/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sqz {

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

// Text format: "n m", then c (n values), b (m values), and m rows of A.
// Lines starting with '#' and blank lines are skipped.
LpInstance parse_instance(const std::string& text);
LpInstance read_instance(const std::string& path);
std::string format_instance(const LpInstance& inst);
void write_instance(const std::string& path, const LpInstance& inst);

// Ground truth sidecar: "alpha i1 i2 ..." (1-based) and "z v1 v2 ...".
struct Truth {
    ComplementarySet alpha;
    Vector z;
};
Truth parse_truth(const std::string& text, Index r);
std::string format_truth(const ComplementarySet& alpha, const Vector& z);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Shortest round-trip representation.
std::string fmt_full(double v);

}  // namespace sqz
