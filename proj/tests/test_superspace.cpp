#include <random>

#include "doctest.h"

#include "cartan/superspace.hpp"

using namespace cartan;

namespace {

SpacePtr space(int n = 3, std::vector<int> t = {1, 1, 1}) { return Superspace::make(Params::make(5, 3, n, t)); }
AlgElem P(const SpacePtr& sp, const std::string& s) { return AlgElem::parse(sp, s); }

long long exact_binom(long long a, long long b) {
    long long r = 1;
    for (long long k = 1; k <= b; ++k) r = r * (a - b + k) / k;
    return r;
}

// product of two monomials from the definitions: binomials for the divided powers,
// inversion count for the exterior part
AlgElem oracle_mul(const SpacePtr& sp, std::uint32_t a, std::uint32_t b) {
    Monomial x = sp->decode(a), y = sp->decode(b), z;
    const Params& prm = sp->params();
    long long c = 1;
    z.alpha.resize(prm.m);
    for (int i = 0; i < prm.m; ++i) {
        z.alpha[i] = x.alpha[i] + y.alpha[i];
        if (z.alpha[i] > prm.pi[i]) return AlgElem(sp);
        c = c * exact_binom(z.alpha[i], x.alpha[i]) % prm.p;
    }
    if (x.u & y.u) return AlgElem(sp);
    std::vector<int> seq;
    for (int k = 0; k < prm.n; ++k)
        if (x.u >> k & 1) seq.push_back(k);
    for (int k = 0; k < prm.n; ++k)
        if (y.u >> k & 1) seq.push_back(k);
    int inv = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j) inv += seq[i] > seq[j];
    z.u = x.u | y.u;
    Scalar cc = static_cast<Scalar>(c % prm.p);
    if (inv & 1) cc = sp->field().neg(cc);
    return AlgElem::monomial(sp, z, cc);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_WITH_AS(Params::make(4, 3, 3, {1, 1, 1}), "p must be prime > 3", std::invalid_argument);
    CHECK_THROWS_WITH_AS(Params::make(3, 3, 3, {1, 1, 1}), "p must be prime > 3", std::invalid_argument);
    CHECK_THROWS(Params::make(5, 2, 3, {1, 1}));
    CHECK_THROWS(Params::make(5, 3, 3, {1, 1}));
    auto prm = Params::make(5, 3, 3, {2, 1, 1});
    CHECK(prm.pi == std::vector<std::uint32_t>{24, 4, 4});
    CHECK(prm.xi == 35);
    CHECK(prm.sum_t == 4);
}

TEST_CASE("multiplication examples") {
    auto sp = space(3, {2, 1, 1});
    auto sp1 = space();
    CHECK(mul(P(sp, "x^(1,0,0)"), P(sp, "x^(1,0,0)")) == P(sp, "2*x^(2,0,0)"));
    CHECK(mul(P(sp, "x_{4}"), P(sp, "x_{4}")).is_zero());
    CHECK(mul(P(sp, "x_{5}"), P(sp, "x_{4}")) == P(sp, "-x_{4,5}"));
    CHECK(mul(P(sp1, "x^(2,0,0)"), P(sp1, "x^(3,0,0)")).is_zero());
}

TEST_CASE("derivative and torus examples") {
    auto sp = space();
    CHECK(apply_D(1, P(sp, "x^(3,0,0)")) == P(sp, "x^(2,0,0)"));
    CHECK(apply_D(4, P(sp, "x_{4,5}")) == P(sp, "x_{5}"));
    CHECK(apply_D(5, P(sp, "x_{4,5}")) == P(sp, "-x_{4}"));
    CHECK(apply_gamma(1, P(sp, "x^(3,0,0)x_{4}")) == P(sp, "3*x^(3,0,0)x_{4}"));
    CHECK(apply_gamma(4, P(sp, "x^(3,0,0)x_{4}")) == P(sp, "x^(3,0,0)x_{4}"));
    CHECK(apply_gamma(4, P(sp, "x^(3,0,0)x_{5}")).is_zero());
}

TEST_CASE("enumeration") {
    auto sp = space();
    CHECK(sp->enumerate().size() == 1000);
    CHECK(enumerate_basis(sp->params()).size() == 1000);
    auto d0 = sp->enumerate(0);
    REQUIRE(d0.size() == 1);
    CHECK(d0[0] == 0);
    auto top = sp->enumerate(sp->params().xi);
    REQUIRE(top.size() == 1);
    CHECK(top[0] == sp->top_mono());
    std::size_t total = 0;
    for (int d = 0; d <= sp->params().xi; ++d) total += sp->enumerate(d).size();
    CHECK(total == 1000);
    CHECK(sp->enumerate({}, 1).size() == 500);
    for (std::uint32_t a = 0; a < sp->num_monos(); ++a) REQUIRE(sp->encode(sp->decode(a)) == a);
}

TEST_CASE("products agree with the definition") {
    for (auto t : {std::vector<int>{1, 1, 1}, std::vector<int>{2, 1, 1}}) {
        auto sp = space(3, t);
        std::mt19937_64 rng(7);
        for (int k = 0; k < 20000; ++k) {
            std::uint32_t a = rng() % sp->num_monos(), b = rng() % sp->num_monos();
            AlgElem f(sp, {{a, 1}}), g(sp, {{b, 1}});
            REQUIRE(mul(f, g) == oracle_mul(sp, a, b));
        }
    }
}

TEST_CASE("parse and print round trip") {
    auto sp = space(4);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 500; ++k) {
        SVec v;
        for (int q = 0; q < 3; ++q) v.push_back({static_cast<std::uint32_t>(rng() % sp->num_monos()), static_cast<Scalar>(1 + rng() % 4)});
        svec_normalize(v, sp->field());
        AlgElem f(sp, v);
        REQUIRE(AlgElem::parse(sp, f.to_string()) == f);
    }
    CHECK_THROWS(AlgElem::parse(sp, "x^(1,0)"));
    CHECK_THROWS(AlgElem::parse(sp, "x_{2}"));
}

TEST_CASE("random identities: supercommutativity, associativity, Leibniz") {
    auto sp = space(4, {2, 1, 1});
    const Field& F = sp->field();
    std::mt19937_64 rng(11);
    auto rnd = [&] {
        SVec v;
        for (int q = 0; q < 3; ++q) v.push_back({static_cast<std::uint32_t>(rng() % sp->num_monos()), static_cast<Scalar>(1 + rng() % 4)});
        svec_normalize(v, F);
        return AlgElem(sp, v);
    };
    for (int k = 0; k < 3000; ++k) {
        std::uint32_t a = rng() % sp->num_monos(), b = rng() % sp->num_monos();
        AlgElem f(sp, {{a, 1}}), g(sp, {{b, 1}});
        Scalar s = (sp->parity(a) & sp->parity(b)) ? F.neg(1) : 1;
        REQUIRE(mul(f, g) == mul(g, f).scaled(s));
        AlgElem x = rnd(), y = rnd(), z = rnd();
        REQUIRE(mul(mul(x, y), z) == mul(x, mul(y, z)));
        int r = 1 + static_cast<int>(rng() % 7);
        Scalar sg = (sp->params().tau(r) & sp->parity(a)) ? F.neg(1) : 1;
        REQUIRE(apply_D(r, mul(f, g)) == mul(apply_D(r, f), g) + mul(f, apply_D(r, g)).scaled(sg));
    }
}
