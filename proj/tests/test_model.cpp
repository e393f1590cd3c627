#include <doctest.h>

#include "helpers.hpp"

using namespace sqz;
using sqz::test::example_lp;

TEST_CASE("pair_index maps each index to its partner") {
    // 1-based (r=3): 1 -> 4, 6 -> 3
    CHECK(pair_index(3, 0) == 3);
    CHECK(pair_index(3, 5) == 2);
    for (Index i = 0; i < 6; ++i) CHECK(pair_index(3, pair_index(3, i)) == i);
    CHECK_THROWS_AS(pair_index(3, 6), ContractError);
    CHECK_THROWS_AS(pair_index(3, -1), ContractError);
}

TEST_CASE("IndexLayout component order is u, v, x, y") {
    IndexLayout L(2, 1);
    CHECK(L.r() == 3);
    CHECK(L.s() == 7);
    CHECK(L.component(0) == IndexLayout::Component::U);
    CHECK(L.component(2) == IndexLayout::Component::V);
    CHECK(L.component(3) == IndexLayout::Component::X);
    CHECK(L.component(5) == IndexLayout::Component::Y);
    CHECK(L.pair(1) == 4);
}

TEST_CASE("validate rejects degenerate instances") {
    CHECK_THROWS_AS(make_instance(Matrix::Zero(1, 2), Vector::Ones(1), Vector::Ones(2)), DegenerateInput);
    Matrix A(2, 2);
    A << 1, 0, 1, 0;
    CHECK_THROWS_AS(make_instance(A, Vector::Ones(2), Vector::Ones(2)), DegenerateInput);
    CHECK_THROWS_AS(make_instance(Matrix::Ones(1, 1), Vector::Zero(1), Vector::Zero(1)), DegenerateInput);
    CHECK_THROWS_AS(make_instance(Matrix::Ones(2, 1), Vector::Ones(2), Vector::Ones(1)), ContractError);
    CHECK_THROWS_AS(make_instance(Matrix::Ones(1, 2), Vector::Ones(2), Vector::Ones(2)), ContractError);
}

TEST_CASE("build_G on the 1x1 instance") {
    const Matrix G = build_G(test::unit_instance(1, 1, 1));
    Matrix want(3, 5);
    want << 1, 0, 0, -1, 1,
            0, 1, 1, 0, -1,
            0, 0, 1, -1, 0;
    CHECK(G == want);
}

TEST_CASE("build_G on the example instance") {
    const Matrix G = build_G(example_lp());
    REQUIRE(G.rows() == 4);
    REQUIRE(G.cols() == 7);
    Vector last(7);
    last << 0, 0, 0, 50, 2, -2, 0;
    CHECK(G.row(3).transpose() == last);
    Vector u1(7);
    u1 << 1, 0, 0, 0, 0, -200, 50;
    CHECK(G.row(0).transpose() == u1);
}

TEST_CASE("G has full row rank and annihilates (z*, 1)") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = test::random_planted(seed);
        const Matrix G = build_G(p.inst);
        Eigen::FullPivLU<Matrix> lu(G);
        CHECK(lu.rank() == p.inst.r() + 1);
        Vector zt(G.cols());
        zt << p.truth.z_star, 1.0;
        CHECK((G * zt).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("indicator vectors") {
    const auto alpha = ComplementarySet::from_one_based(3, {1, 5, 6});
    Vector want(6);
    want << 1, 0, 0, 0, 1, 1;
    CHECK(alpha.indicator() == want);

    Vector want2(4);
    want2 << 0, 0, 1, 1;
    CHECK(ComplementarySet::from_one_based(2, {3, 4}).indicator() == want2);

    CHECK(alpha.indicator() + alpha.complement().indicator() == Vector::Ones(6));
    CHECK(ComplementarySet::from_indicator(want) == alpha);
}

TEST_CASE("complementary set validation") {
    CHECK_THROWS_AS(ComplementarySet::from_one_based(3, {1, 4, 6}), ContractError);
    CHECK_THROWS_AS(ComplementarySet::from_one_based(3, {1, 5}), ContractError);
    CHECK_THROWS_AS(ComplementarySet::from_one_based(3, {1, 5, 7}), ContractError);
}

TEST_CASE("neighbors flip one pair each") {
    const auto set = ComplementarySet::from_one_based(3, {1, 5, 6});
    const auto nb = set.neighbors();
    REQUIRE(nb.size() == 3);
    CHECK(nb[0] == ComplementarySet::from_one_based(3, {4, 5, 6}));
    CHECK(nb[1] == ComplementarySet::from_one_based(3, {1, 2, 6}));
    CHECK(nb[2] == ComplementarySet::from_one_based(3, {1, 5, 3}));
    for (const auto& s : nb) CHECK((s.indicator() - set.indicator()).cwiseAbs().sum() == 2.0);

    const auto nb2 = ComplementarySet::from_one_based(2, {1, 2}).neighbors();
    CHECK(nb2[0] == ComplementarySet::from_one_based(2, {3, 2}));
    CHECK(nb2[1] == ComplementarySet::from_one_based(2, {1, 4}));
}

TEST_CASE("assemble_candidate_solution on the example support") {
    const auto z = assemble_candidate_solution(example_lp(), ComplementarySet::from_one_based(3, {1, 5, 6}));
    REQUIRE(z);
    Vector want(6);
    want << 50, 0, 0, 0, 0.5, 0.5;
    CHECK(test::max_abs(*z - want) < 1e-12);
}

TEST_CASE("assemble_candidate_solution on the saturated 1x1 instance") {
    const auto z = assemble_candidate_solution(test::unit_instance(1, 1, 1), ComplementarySet::from_one_based(2, {3, 4}));
    REQUIRE(z);
    Vector want(4);
    want << 0, 0, 1, 1;
    CHECK(test::max_abs(*z - want) < 1e-14);
}

TEST_CASE("assemble_candidate_solution rejects the example complement") {
    // Columns v1, x1, x2 leave the u1 equation (1, 0, 0 | -200 y1 | 50) with
    // no free variable, so the restricted matrix has a zero row.
    const Matrix G = build_G(example_lp());
    Matrix M(3, 3);
    M << G.col(1).head(3), G.col(2).head(3), G.col(3).head(3);
    CHECK(M.row(0).isZero());
    CHECK_FALSE(assemble_candidate_solution(example_lp(), ComplementarySet::from_one_based(3, {2, 3, 4})));
}

TEST_CASE("assembled support is strictly positive on generated instances") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto p = test::random_planted(seed);
        const auto z = assemble_candidate_solution(p.inst, p.truth.alpha);
        REQUIRE(z);
        for (Index i : p.truth.alpha.members()) CHECK((*z)[i] > 0.05);
        const auto comp = p.truth.alpha.complement();
        for (Index i : comp.members()) CHECK(std::abs((*z)[i]) == 0.0);
    }
}
