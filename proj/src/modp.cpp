#include "cartan/modp.hpp"

namespace cartan {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Field::Field(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (p <= 1u << 16) {
        inv_.assign(p, 0);
        for (Scalar a = 1; a < p; ++a) inv_[a] = pow(a, p - 2);
    }
}

Scalar Field::pow(Scalar a, std::uint64_t e) const {
    Scalar r = 1 % p_, b = a % p_;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

Scalar Field::inv(Scalar a) const {
    if (a % p_ == 0) throw std::domain_error("inverse of zero");
    if (!inv_.empty()) return inv_[a % p_];
    return pow(a, p_ - 2);
}

namespace {

// C(a, b) mod p for a, b < p, by direct product.
Scalar small_binom(std::uint64_t a, std::uint64_t b, std::uint32_t p) {
    if (b > a) return 0;
    std::uint64_t num = 1, den = 1;
    for (std::uint64_t i = 0; i < b; ++i) {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    std::uint64_t inv = 1, base = den, e = p - 2;
    while (e) {
        if (e & 1) inv = inv * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return static_cast<Scalar>(num * inv % p);
}

}  // namespace

Scalar binom_mod_p(std::uint64_t a, std::uint64_t b, std::uint32_t p) {
    if (b > a) return 0;
    std::uint64_t r = 1;
    while (a || b) {
        std::uint64_t ad = a % p, bd = b % p;
        if (bd > ad) return 0;
        r = r * small_binom(ad, bd, p) % p;
        a /= p;
        b /= p;
    }
    return static_cast<Scalar>(r);
}

Scalar multi_binom(const std::vector<std::uint64_t>& alpha,
                   const std::vector<std::uint64_t>& beta, std::uint32_t p) {
    if (alpha.size() != beta.size())
        throw DimensionError("multi_binom: length mismatch");
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < alpha.size() && r; ++i)
        r = r * binom_mod_p(alpha[i] + beta[i], alpha[i], p) % p;
    return static_cast<Scalar>(r);
}

}  // namespace cartan
