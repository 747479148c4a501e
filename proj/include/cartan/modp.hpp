#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cartan {

using Scalar = std::uint32_t;

bool is_prime(std::uint64_t n);

// Arithmetic in F_p with canonical residues in [0, p).
class Field {
public:
    explicit Field(std::uint32_t p);

    std::uint32_t p() const { return p_; }

    Scalar reduce(std::int64_t a) const {
        std::int64_t r = a % static_cast<std::int64_t>(p_);
        return static_cast<Scalar>(r < 0 ? r + p_ : r);
    }
    Scalar add(Scalar a, Scalar b) const {
        Scalar s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Scalar sub(Scalar a, Scalar b) const { return a >= b ? a - b : a + p_ - b; }
    Scalar neg(Scalar a) const { return a == 0 ? 0 : p_ - a; }
    Scalar mul(Scalar a, Scalar b) const {
        return static_cast<Scalar>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    Scalar pow(Scalar a, std::uint64_t e) const;
    // Fermat: a^(p-2).
    Scalar inv(Scalar a) const;

private:
    std::uint32_t p_;
    std::vector<Scalar> inv_;  // small-p cache
};

// C(a, b) mod p by base-p digits; 0 when b > a.
Scalar binom_mod_p(std::uint64_t a, std::uint64_t b, std::uint32_t p);

// prod_i C(alpha_i + beta_i, alpha_i) mod p.
Scalar multi_binom(const std::vector<std::uint64_t>& alpha,
                   const std::vector<std::uint64_t>& beta, std::uint32_t p);

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cartan
