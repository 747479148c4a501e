#include "doctest.h"

#include "cartan/modp.hpp"

using namespace cartan;

namespace {

// exact binomials from Pascal's triangle
std::vector<std::vector<unsigned __int128>> pascal(int n) {
    std::vector<std::vector<unsigned __int128>> c(n + 1);
    for (int a = 0; a <= n; ++a) {
        c[a].assign(a + 1, 1);
        for (int b = 1; b < a; ++b) c[a][b] = c[a - 1][b - 1] + c[a - 1][b];
    }
    return c;
}

bool trial_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("binomials mod p") {
    CHECK(binom_mod_p(2, 1, 5) == 2);
    CHECK(binom_mod_p(7, 0, 5) == 1);
    CHECK(binom_mod_p(5, 2, 5) == 0);
    CHECK(binom_mod_p(2, 3, 5) == 0);
}

TEST_CASE("binomials agree with exact integers") {
    auto c = pascal(120);
    for (std::uint32_t p : {5u, 7u, 11u, 13u})
        for (int a = 0; a <= 120; ++a)
            for (int b = 0; b <= a; ++b) REQUIRE(binom_mod_p(a, b, p) == static_cast<Scalar>(c[a][b] % p));
}

TEST_CASE("Kummer: C(a,b) is a unit iff adding b and a-b has no carries") {
    for (std::uint32_t p : {5u, 7u})
        for (std::uint64_t a = 0; a < 400; ++a)
            for (std::uint64_t b = 0; b <= a; ++b) {
                bool carry = false;
                for (std::uint64_t x = b, y = a - b; x || y; x /= p, y /= p)
                    if (x % p + y % p >= p) carry = true;
                REQUIRE((binom_mod_p(a, b, p) != 0) == !carry);
            }
}

TEST_CASE("multi binomials") {
    CHECK(multi_binom({1}, {1}, 5) == 2);
    CHECK(multi_binom({0, 0, 0}, {3, 1, 4}, 5) == 1);
    CHECK(multi_binom({2}, {3}, 5) == 0);
    CHECK(multi_binom({1, 2}, {1, 1}, 7) == 2 * 3);
    CHECK(multi_binom({1, 2}, {1, 1}, 5) == 1);
    CHECK_THROWS_AS(multi_binom({1, 2}, {1}, 5), DimensionError);
}

TEST_CASE("field arithmetic") {
    for (std::uint32_t p : {5u, 7u, 101u, 65521u}) {
        Field F(p);
        for (Scalar a = 1; a < std::min<std::uint32_t>(p, 500); ++a) {
            REQUIRE(F.mul(a, F.inv(a)) == 1);
            REQUIRE(F.add(a, F.neg(a)) == 0);
            REQUIRE(F.pow(a, p - 1) == 1);
        }
        CHECK(F.reduce(-1) == p - 1);
        CHECK(F.sub(0, 1) == p - 1);
    }
}

TEST_CASE("primality") {
    for (std::uint64_t n = 0; n < 5000; ++n) REQUIRE(is_prime(n) == trial_prime(n));
    CHECK(is_prime(1000003));
    CHECK_FALSE(is_prime(1000001));
}
