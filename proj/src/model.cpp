#include "sqz/model.hpp"

#include <algorithm>
#include <sstream>

namespace sqz {

void validate(const LpInstance& inst) {
    const Index m = inst.m(), n = inst.n();
    if (m < 1 || n < m)
        throw ContractError("instance needs n >= m >= 1, got n=" + std::to_string(n) + " m=" + std::to_string(m));
    if (inst.b.size() != m || inst.c.size() != n)
        throw ContractError("b must have m entries and c must have n entries");
    if (!inst.A.allFinite() || !inst.b.allFinite() || !inst.c.allFinite())
        throw ContractError("instance contains non-finite values");
    for (Index i = 0; i < m; ++i)
        if ((inst.A.row(i).array() == 0.0).all())
            throw DegenerateInput("row " + std::to_string(i + 1) + " of A is null");
    for (Index j = 0; j < n; ++j)
        if ((inst.A.col(j).array() == 0.0).all())
            throw DegenerateInput("column " + std::to_string(j + 1) + " of A is null");
    if ((inst.b.array() == 0.0).all() && (inst.c.array() == 0.0).all())
        throw DegenerateInput("b and c are both null");
}

LpInstance make_instance(Matrix A, Vector b, Vector c) {
    LpInstance inst{std::move(A), std::move(b), std::move(c)};
    validate(inst);
    return inst;
}

Index pair_index(Index r, Index i) {
    if (i < 0 || i >= 2 * r)
        throw ContractError("index " + std::to_string(i) + " outside [0, 2r)");
    return i < r ? i + r : i - r;
}

Index IndexLayout::pair(Index i) const { return pair_index(r(), i); }

IndexLayout::Component IndexLayout::component(Index i) const {
    const Index rr = r();
    if (i < 0 || i >= 2 * rr)
        throw ContractError("index outside [0, 2r)");
    if (i < n) return Component::U;
    if (i < rr) return Component::V;
    if (i < rr + n) return Component::X;
    return Component::Y;
}

ComplementarySet::ComplementarySet(Index r, std::vector<Index> members) : r_(r), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (static_cast<Index>(members_.size()) != r_)
        throw ContractError("complementary set must have exactly r members");
    std::vector<char> seen(r_, 0);
    for (Index i : members_) {
        if (i < 0 || i >= 2 * r_)
            throw ContractError("complementary set member out of range");
        char& s = seen[i % r_];
        if (s) throw ContractError("complementary set holds both members of a pair");
        s = 1;
    }
}

ComplementarySet ComplementarySet::from_indicator(const Vector& nu) {
    if (nu.size() % 2 != 0) throw ContractError("indicator must have even length");
    std::vector<Index> members;
    for (Index i = 0; i < nu.size(); ++i)
        if (nu[i] > 0.5) members.push_back(i);
    return ComplementarySet(nu.size() / 2, std::move(members));
}

ComplementarySet ComplementarySet::from_one_based(Index r, const std::vector<Index>& members) {
    std::vector<Index> zero;
    zero.reserve(members.size());
    for (Index i : members) zero.push_back(i - 1);
    return ComplementarySet(r, std::move(zero));
}

bool ComplementarySet::contains(Index i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
}

Vector ComplementarySet::indicator() const {
    Vector nu = Vector::Zero(2 * r_);
    for (Index i : members_) nu[i] = 1.0;
    return nu;
}

ComplementarySet ComplementarySet::complement() const {
    std::vector<Index> out;
    out.reserve(members_.size());
    for (Index i : members_) out.push_back(pair_index(r_, i));
    return ComplementarySet(r_, std::move(out));
}

ComplementarySet ComplementarySet::flipped(Index k) const {
    if (k < 0 || k >= r_) throw ContractError("pair index out of range");
    std::vector<Index> out = members_;
    for (Index& i : out)
        if (i % r_ == k) i = pair_index(r_, i);
    return ComplementarySet(r_, std::move(out));
}

std::vector<ComplementarySet> ComplementarySet::neighbors() const {
    std::vector<ComplementarySet> out;
    out.reserve(r_);
    for (Index k = 0; k < r_; ++k) out.push_back(flipped(k));
    return out;
}

std::vector<Index> ComplementarySet::one_based() const {
    std::vector<Index> out = members_;
    for (Index& i : out) ++i;
    return out;
}

std::string format_indices(const std::vector<Index>& one_based, const std::string& sep) {
    std::ostringstream os;
    for (std::size_t k = 0; k < one_based.size(); ++k) {
        if (k) os << sep;
        os << one_based[k];
    }
    return os.str();
}

Matrix build_G(const LpInstance& inst) {
    validate(inst);
    const Index n = inst.n(), m = inst.m(), r = n + m, s = 2 * r + 1;
    Matrix G = Matrix::Zero(r + 1, s);
    G.block(0, 0, n, n).setIdentity();
    G.block(0, r + n, n, m) = -inst.A.transpose();
    G.block(0, s - 1, n, 1) = inst.c;
    G.block(n, n, m, m).setIdentity();
    G.block(n, r, m, n) = inst.A;
    G.block(n, s - 1, m, 1) = -inst.b;
    G.block(r, r, 1, n) = inst.c.transpose();
    G.block(r, r + n, 1, m) = -inst.b.transpose();
    return G;
}

std::optional<Vector> assemble_candidate_solution(const LpInstance& inst, const ComplementarySet& candidate) {
    return assemble_candidate_solution(build_G(inst), candidate);
}

std::optional<Vector> assemble_candidate_solution(const Matrix& G, const ComplementarySet& candidate) {
    const Index r = G.rows() - 1;
    if (candidate.r() != r) throw ContractError("candidate size does not match instance");
    const auto& cols = candidate.members();
    Matrix M(r, r);
    for (Index k = 0; k < r; ++k) M.col(k) = G.block(0, cols[k], r, 1);
    const Vector rhs = -G.block(0, 2 * r, r, 1);

    Eigen::FullPivLU<Matrix> lu(M);
    const double scale = M.cwiseAbs().maxCoeff();
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (scale == 0.0 || pivot < 1e-10 * scale) return std::nullopt;

    const Vector sol = lu.solve(rhs);
    Vector z = Vector::Zero(2 * r);
    for (Index k = 0; k < r; ++k) z[cols[k]] = sol[k];
    return z;
}

Vector x_part(const LpInstance& inst, const Vector& z) { return z.segment(inst.r(), inst.n()); }

Vector y_part(const LpInstance& inst, const Vector& z) { return z.segment(inst.r() + inst.n(), inst.m()); }

}  // namespace sqz
