#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqz {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Precondition violated by the caller (bad index, wrong size, ...).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Instance violates the nondegeneracy assumptions (null row/column, b = c = 0).
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A factorization or update hit a singular or ill-conditioned denominator.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max c'x  s.t.  Ax <= b, x >= 0.  A is m x n with n >= m >= 1.
struct LpInstance {
    Matrix A;
    Vector b;
    Vector c;

    Index n() const { return A.cols(); }
    Index m() const { return A.rows(); }
    Index r() const { return A.cols() + A.rows(); }
};

// Throws ContractError on shape problems, DegenerateInput on null rows,
// null columns, or b = c = 0.
void validate(const LpInstance& inst);
LpInstance make_instance(Matrix A, Vector b, Vector c);

// Internal indices are 0-based: [0,n) u, [n,r) v, [r,r+n) x, [r+n,2r) y.
// The homogenizing column t sits at position 2r.
struct IndexLayout {
    enum class Component { U, V, X, Y };

    Index n = 0;
    Index m = 0;

    explicit IndexLayout(const LpInstance& inst) : n(inst.n()), m(inst.m()) {}
    IndexLayout(Index n_, Index m_) : n(n_), m(m_) {}

    Index r() const { return n + m; }
    Index s() const { return 2 * (n + m) + 1; }
    Index pair(Index i) const;
    Component component(Index i) const;
};

// Partner of i in {0..2r-1}.
Index pair_index(Index r, Index i);

class ComplementarySet {
public:
    ComplementarySet() = default;
    ComplementarySet(Index r, std::vector<Index> members);

    static ComplementarySet from_indicator(const Vector& nu);
    static ComplementarySet from_one_based(Index r, const std::vector<Index>& members);

    Index r() const { return r_; }
    const std::vector<Index>& members() const { return members_; }
    bool contains(Index i) const;

    Vector indicator() const;
    ComplementarySet complement() const;
    // Set with pair (k, k+r) swapped.
    ComplementarySet flipped(Index k) const;
    std::vector<ComplementarySet> neighbors() const;
    std::vector<Index> one_based() const;

    bool operator==(const ComplementarySet& o) const { return r_ == o.r_ && members_ == o.members_; }
    bool operator!=(const ComplementarySet& o) const { return !(*this == o); }

private:
    Index r_ = 0;
    std::vector<Index> members_;
};

std::string format_indices(const std::vector<Index>& one_based, const std::string& sep = ",");

Matrix build_G(const LpInstance& inst);

// Solves G[0:r, set] z_set = -G[0:r, s] with z = 0 off the set.
// Returns nothing when the restricted system is singular.
std::optional<Vector> assemble_candidate_solution(const LpInstance& inst, const ComplementarySet& candidate);
// Same, reusing a G built once by the caller.
std::optional<Vector> assemble_candidate_solution(const Matrix& G, const ComplementarySet& candidate);

// Pieces of a full vector z = (u, v, x, y).
Vector x_part(const LpInstance& inst, const Vector& z);
Vector y_part(const LpInstance& inst, const Vector& z);

}  // namespace sqz
