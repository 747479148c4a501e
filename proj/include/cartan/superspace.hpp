#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cartan/modp.hpp"

namespace cartan {

struct Params {
    std::uint32_t p = 5;
    int m = 3;
    int n = 3;
    std::vector<int> t;

    std::vector<std::uint32_t> pi;  // p^{t_i} - 1
    int xi = 0;                     // |pi| + n
    int sum_t = 0;

    static Params make(std::uint32_t p, int m, int n, std::vector<int> t);
    std::string label() const;
    bool operator==(const Params& o) const {
        return p == o.p && m == o.m && n == o.n && t == o.t;
    }
    // directions are 1-based: 1..m even, m+1..m+n odd
    int tau(int r) const { return r > m ? 1 : 0; }
};

struct Monomial {
    std::vector<std::uint32_t> alpha;
    std::uint32_t u = 0;  // bit k-1-m set when x_k present
    bool operator==(const Monomial& o) const = default;
};

using Term = std::pair<std::uint32_t, Scalar>;
using SVec = std::vector<Term>;  // sorted by index, no zero coefficients

class Superspace;
using SpacePtr = std::shared_ptr<const Superspace>;

// Index tables for the monomial basis of the divided power / exterior algebra.
// Monomial id = alpha_index * 2^n + u, alpha_index lexicographic with alpha_1
// most significant, so id order is the canonical basis order.
class Superspace {
public:
    static SpacePtr make(const Params& prm);
    explicit Superspace(const Params& prm);

    const Params& params() const { return prm_; }
    const Field& field() const { return F_; }
    int m() const { return prm_.m; }
    int n() const { return prm_.n; }

    std::uint32_t num_alpha() const { return num_alpha_; }
    std::uint32_t num_monos() const { return num_alpha_ << prm_.n; }

    std::uint32_t alpha_index(std::uint32_t mono) const { return mono >> prm_.n; }
    std::uint32_t ext(std::uint32_t mono) const { return mono & ((1u << prm_.n) - 1); }
    std::uint32_t alpha(std::uint32_t mono, int i) const {
        return digits_[(mono >> prm_.n) * prm_.m + i];
    }
    const std::uint16_t* alpha_digits(std::uint32_t ai) const { return &digits_[ai * prm_.m]; }
    std::uint32_t stride(int i) const { return stride_[i]; }
    int degree(std::uint32_t mono) const {
        return alpha_deg_[mono >> prm_.n] + __builtin_popcount(ext(mono));
    }
    int parity(std::uint32_t mono) const { return __builtin_popcount(ext(mono)) & 1; }

    std::uint32_t encode(const Monomial& mo) const;
    Monomial decode(std::uint32_t mono) const;

    // x^(a) x^u * x^(b) x^v; returns false when the product vanishes.
    bool mul_mono(std::uint32_t a, std::uint32_t b, std::uint32_t& out, Scalar& c) const;
    // D_r on a monomial (r is 1-based direction).
    bool d_mono(int r, std::uint32_t a, std::uint32_t& out, Scalar& c) const;
    // merge sign of exterior sets u then v (assumes disjoint)
    int ext_sign(std::uint32_t u, std::uint32_t v) const;
    Scalar binom_pair(int i, std::uint32_t a, std::uint32_t b) const;  // C(a+b, a), 0 on overflow

    std::vector<std::uint32_t> enumerate(std::optional<int> degree = {},
                                         std::optional<int> parity = {}) const;
    std::uint32_t top_mono() const { return num_monos() - 1; }

private:
    Params prm_;
    Field F_;
    std::uint32_t num_alpha_ = 1;
    std::vector<std::uint32_t> stride_;
    std::vector<std::uint16_t> digits_;
    std::vector<int> alpha_deg_;
    std::vector<std::vector<Scalar>> binom_;  // per coordinate, (pi+1)^2 table
    std::vector<std::int8_t> sign_;           // 2^n x 2^n when small
};

// Element of the superalgebra A(m,n;t) (or Lambda(n) when only odd parts occur).
class AlgElem {
public:
    AlgElem() = default;
    explicit AlgElem(SpacePtr sp) : sp_(std::move(sp)) {}
    AlgElem(SpacePtr sp, SVec terms);
    static AlgElem monomial(SpacePtr sp, const Monomial& mo, Scalar c = 1);
    static AlgElem parse(SpacePtr sp, const std::string& text);

    const SVec& terms() const { return terms_; }
    const SpacePtr& space() const { return sp_; }
    bool is_zero() const { return terms_.empty(); }
    // -1 when mixed or zero
    int parity() const;
    int degree() const;

    AlgElem operator+(const AlgElem& o) const;
    AlgElem operator-(const AlgElem& o) const;
    AlgElem scaled(Scalar c) const;
    bool operator==(const AlgElem& o) const { return terms_ == o.terms_; }

    std::string to_string() const;

private:
    SpacePtr sp_;
    SVec terms_;
};

AlgElem mul(const AlgElem& f, const AlgElem& g);
AlgElem apply_D(int r, const AlgElem& f);
AlgElem apply_gamma(int r, const AlgElem& f);
std::vector<Monomial> enumerate_basis(const Params& prm, std::optional<int> degree = {},
                                      std::optional<int> parity = {});

// Sparse vector helpers over F_p.
void svec_normalize(SVec& v, const Field& F);  // sort, merge, drop zeros
SVec svec_axpy(const SVec& a, Scalar c, const SVec& b, const Field& F);  // a + c*b
SVec svec_scale(const SVec& a, Scalar c, const Field& F);

std::string monomial_to_string(const Superspace& sp, std::uint32_t mono);

}  // namespace cartan
