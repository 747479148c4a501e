#include <random>

#include "common.hpp"
#include "roundtrip.hpp"

using namespace cartan;

namespace {

// dense rank by plain Gaussian elimination
std::size_t dense_rank(std::vector<std::vector<Scalar>> M, const Field& F) {
    std::size_t r = 0, cols = M.empty() ? 0 : M[0].size();
    for (std::size_t c = 0; c < cols && r < M.size(); ++c) {
        std::size_t piv = r;
        while (piv < M.size() && M[piv][c] == 0) ++piv;
        if (piv == M.size()) continue;
        std::swap(M[piv], M[r]);
        Scalar inv = F.inv(M[r][c]);
        for (std::size_t i = 0; i < M.size(); ++i)
            if (i != r && M[i][c]) {
                Scalar f = F.mul(M[i][c], inv);
                for (std::size_t j = 0; j < cols; ++j) M[i][j] = F.sub(M[i][j], F.mul(f, M[r][j]));
            }
        ++r;
    }
    return r;
}

Vec random_vec(std::mt19937_64& rng, Col ncols, int terms, std::uint32_t p) {
    Vec v;
    for (int k = 0; k < terms; ++k) v.push_back({rng() % ncols, static_cast<Scalar>(rng() % p)});
    Field F(p);
    vec_normalize(v, F);
    return v;
}

}  // namespace

TEST_CASE("subspace basics") {
    Subspace S(5, "test");
    CHECK_FALSE(S.insert(Vec{}));
    CHECK(S.rank() == 0);
    CHECK(S.insert(Vec{{0, 1}}));
    CHECK(S.rank() == 1);
    Vec v{{1, 2}, {3, 4}};
    CHECK(S.insert(v));
    CHECK_FALSE(S.insert(Vec{{1, 4}, {3, 3}}));
    CHECK(S.contains(Vec{{0, 3}, {1, 1}, {3, 2}}));
    CHECK_FALSE(S.contains(Vec{{2, 1}}));
}

TEST_CASE("subspace rank matches dense elimination") {
    Field F(7);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Col ncols = 3 + rng() % 12;
        std::size_t rows = 1 + rng() % 15;
        std::optional<Col> dense;
        if (trial % 2) dense = ncols;
        Subspace S(7, "t", dense);
        std::vector<std::vector<Scalar>> M;
        for (std::size_t r = 0; r < rows; ++r) {
            Vec v = random_vec(rng, ncols, 1 + rng() % 4, 7);
            S.insert(v);
            std::vector<Scalar> row(ncols, 0);
            for (auto [c, x] : v) row[c] = x;
            M.push_back(row);
        }
        REQUIRE(S.rank() == dense_rank(M, F));
        // reduced rows span the same space and the kernel is orthogonal of the right size
        Subspace T(7, "t");
        for (const auto& r : S.rows()) T.insert(r);
        REQUIRE(S.same_span(T));
        auto K = S.kernel(ncols);
        REQUIRE(K.size() + S.rank() == ncols);
        for (const auto& k : K)
            for (const auto& r : S.rows()) {
                Scalar dot = 0;
                for (auto [c, x] : r)
                    for (auto [c2, y] : k)
                        if (c == c2) dot = F.add(dot, F.mul(x, y));
                REQUIRE(dot == 0);
            }
    }
}

TEST_CASE("tracked echelon expresses members") {
    Field F(5);
    std::mt19937_64 rng(9);
    TrackedEchelon te(F);
    std::vector<Vec> ins;
    for (int k = 0; k < 12; ++k) {
        Vec v = random_vec(rng, 10, 3, 5);
        te.insert(v, Vec{{static_cast<Col>(k), 1}});
        ins.push_back(v);
    }
    for (int k = 0; k < 50; ++k) {
        Vec target;
        for (int j = 0; j < 12; ++j) target = vec_axpy(target, static_cast<Scalar>(rng() % 5), ins[j], F);
        auto h = te.express(target);
        REQUIRE(h);
        Vec back;
        for (auto [j, c] : *h) back = vec_axpy(back, c, ins[j], F);
        REQUIRE(back == target);
    }
}

TEST_CASE("solve") {
    Field F(5);
    CHECK(solve(LinOp::identity(4), Vec{{2, 3}}, F) == Vec{{2, 3}});
    LinOp zero;
    zero.dom_dim = 3;
    zero.cols.assign(3, {});
    CHECK_THROWS_AS(solve(zero, Vec{{0, 1}}, F), NoSolution);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        LinOp A;
        A.dom_dim = 8;
        for (int j = 0; j < 8; ++j) A.cols.push_back(random_vec(rng, 6, 2, 5));
        Vec x0 = random_vec(rng, 8, 4, 5);
        Vec b = A.apply(x0, F);
        REQUIRE(A.apply(solve(A, b, F), F) == b);
    }
}

TEST_CASE("kernel of columns") {
    Field F(7);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec> cols;
        for (int j = 0; j < 9; ++j) cols.push_back(random_vec(rng, 5, 2, 7));
        auto K = kernel_of_columns(cols, F);
        std::vector<std::vector<Scalar>> M(9, std::vector<Scalar>(5, 0));
        for (int j = 0; j < 9; ++j)
            for (auto [c, x] : cols[j]) M[j][c] = x;
        REQUIRE(K.size() == 9 - dense_rank(M, F));
        for (const auto& k : K) {
            Vec img;
            for (auto [j, c] : k) img = vec_axpy(img, c, cols[j], F);
            REQUIRE(img.empty());
        }
    }
}

TEST_CASE("generalized inverse solver") {
    Field F(5);
    Vec v1{{0, 1}, {4, 2}};
    CHECK(lemma_solve({LinOp::identity(6)}, {LinOp::identity(6)}, {v1}, F) == v1);
    auto sp = Superspace::make(Params::make(5, 3, 3, {2, 1, 1}));
    CHECK(roundtrip::lemma_solve_trials(sp, 100, 1) == 100);
    // incompatible right-hand sides
    auto Dop = [&](int i) {
        return LinOp::from_function(sp->num_monos(), [sp, i](const Vec& x) { return to_vec(apply_D(i, AlgElem(sp, to_svec(x))).terms()); });
    };
    std::vector<Vec> bad{to_vec(AlgElem::parse(sp, "x^(0,1,0)").terms()), Vec{}};
    try {
        lemma_solve({Dop(1), Dop(2)}, {LinOp::identity(sp->num_monos()), LinOp::identity(sp->num_monos())}, bad, F);
        FAIL("expected a hypothesis violation");
    } catch (const HypothesisViolated& e) {
        CHECK(e.which != "");
    }
}

TEST_CASE("integration of divided powers") {
    auto sp = Superspace::make(Params::make(5, 3, 3, {2, 1, 1}));
    CHECK(roundtrip::integrate_divided_trials(sp, 100, 3) == 100);
    std::vector<AlgElem> zero{AlgElem(sp), AlgElem(sp)};
    CHECK(integrate_divided(zero).is_zero());
    std::vector<AlgElem> top{AlgElem::parse(sp, "x^(24,0,0)")};
    try {
        integrate_divided(top);
        FAIL("expected a hypothesis violation");
    } catch (const HypothesisViolated& e) {
        CHECK(e.which == "b");
    }
}

TEST_CASE("integration on the exterior algebra") {
    auto sp = Superspace::make(Params::make(5, 3, 4, {1, 1, 1}));
    CHECK(roundtrip::integrate_exterior_trials(sp, 100, 4) == 100);
    CHECK(integrate_exterior({AlgElem(sp)}, {4}).is_zero());
    try {
        integrate_exterior({AlgElem::parse(sp, "x_{5}")}, {4});
        FAIL("expected a hypothesis violation");
    } catch (const HypothesisViolated& e) {
        CHECK(e.which == "b");
    }
}
