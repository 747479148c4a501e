#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cartan/linalg.hpp"
#include "cartan/superspace.hpp"

namespace cartan {

class Witt;
using WittPtr = std::shared_ptr<const Witt>;

// Basis tables and bracket of W(m,n;t). Full index = mono * (m+n) + (r-1);
// the even part is indexed densely in canonical order (alpha lex, u, r).
class Witt {
public:
    static WittPtr make(const Params& prm);
    explicit Witt(const Params& prm);

    const SpacePtr& space() const { return sp_; }
    const Superspace& sp() const { return *sp_; }
    const Params& params() const { return sp_->params(); }
    const Field& field() const { return sp_->field(); }
    int m() const { return sp_->m(); }
    int n() const { return sp_->n(); }
    int N() const { return N_; }
    int xi() const { return params().xi; }

    std::uint32_t num_full() const { return sp_->num_monos() * N_; }
    std::uint32_t full(std::uint32_t mono, int r) const { return mono * N_ + (r - 1); }
    std::uint32_t mono_of_full(std::uint32_t w) const { return w / N_; }
    int dir_of_full(std::uint32_t w) const { return static_cast<int>(w % N_) + 1; }
    int full_parity(std::uint32_t w) const {
        return (sp_->parity(mono_of_full(w)) + params().tau(dir_of_full(w))) & 1;
    }
    int full_degree(std::uint32_t w) const { return sp_->degree(mono_of_full(w)) - 1; }

    // even part
    std::uint32_t dim() const { return static_cast<std::uint32_t>(even_full_.size()); }
    std::int32_t even_of_full(std::uint32_t w) const { return full_even_[w]; }
    std::uint32_t full_of_even(std::uint32_t i) const { return even_full_[i]; }
    std::uint32_t mono(std::uint32_t i) const { return even_full_[i] / N_; }
    int dir(std::uint32_t i) const { return static_cast<int>(even_full_[i] % N_) + 1; }
    int degree(std::uint32_t i) const { return deg_[i]; }
    std::uint64_t weight(std::uint32_t i) const { return wt_[i]; }
    std::int32_t even_index(std::uint32_t mono, int r) const { return full_even_[full(mono, r)]; }

    const std::vector<std::uint32_t>& degree_slice(int d) const;
    std::uint64_t slice_key(int d, std::uint64_t w) const {
        return w * static_cast<std::uint64_t>(xi() + 2) + static_cast<std::uint64_t>(d + 1);
    }
    // even basis elements of given degree and weight (empty if none)
    const std::vector<std::uint32_t>& slice(int d, std::uint64_t w) const;
    const std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>& slices() const {
        return slices_;
    }

    // torus weights: digit j (0-based direction) in base p
    std::uint64_t weight_of_full(std::uint32_t w) const;
    std::uint64_t wadd(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t wsub(std::uint64_t a, std::uint64_t b) const;
    Scalar wdigit(std::uint64_t w, int r) const;  // eigenvalue of Gamma_r
    std::uint64_t weight_of(const SVec& v) const;  // throws unless homogeneous
    bool weight_homogeneous(const SVec& v) const;

    // bracket of two full basis elements; returns number of terms written
    int bracket_full(std::uint32_t a, std::uint32_t b, Term out[2]) const;
    // bracket of two even basis elements (even indices)
    int bracket_basis(std::uint32_t i, std::uint32_t j, Term out[2]) const;
    SVec bracket(const SVec& a, const SVec& b) const;  // even coordinates
    SVec bracket_full_vec(const SVec& a, const SVec& b) const;  // full coordinates

    // x^(a) x^u D_r -> x^(a - beta) x^u D_r (coefficient 1), -1 if it vanishes
    std::int32_t lower(std::uint32_t i, const std::uint16_t* beta) const;
    std::int32_t lower1(std::uint32_t i, int dir) const;  // beta = e_dir, dir in Y_0

    SVec even_to_full(const SVec& v) const;
    SVec full_to_even(const SVec& v) const;  // throws on odd components
    std::string basis_to_string(std::uint32_t i) const;
    std::string to_string(const SVec& even) const;

private:
    SpacePtr sp_;
    int N_;
    std::vector<std::uint32_t> even_full_;
    std::vector<std::int32_t> full_even_;
    std::vector<int> deg_;
    std::vector<std::uint64_t> wt_;
    std::vector<std::uint64_t> ppow_;
    std::vector<std::vector<std::uint32_t>> by_degree_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> slices_;
    std::vector<std::uint32_t> empty_;
};

// Element of W(m,n;t): sum of f_r D_r, stored over the full index.
class VField {
public:
    VField() = default;
    explicit VField(WittPtr w) : w_(std::move(w)) {}
    VField(WittPtr w, SVec full_terms);
    static VField from_even(WittPtr w, const SVec& even);
    static VField basis(WittPtr w, const Monomial& mo, int r, Scalar c = 1);
    static VField from_coeff(WittPtr w, int r, const AlgElem& f);
    static VField parse(WittPtr w, const std::string& text);

    const SVec& terms() const { return terms_; }
    const WittPtr& witt() const { return w_; }
    bool is_zero() const { return terms_.empty(); }
    AlgElem coeff(int r) const;
    int degree() const;  // -2 when mixed or zero
    int parity() const;  // -1 when mixed or zero
    SVec to_even() const;

    VField operator+(const VField& o) const;
    VField operator-(const VField& o) const;
    VField scaled(Scalar c) const;
    bool operator==(const VField& o) const { return terms_ == o.terms_; }
    std::string to_string() const;

    // the field acting on a function: sum f_r D_r(g)
    AlgElem apply(const AlgElem& g) const;

private:
    WittPtr w_;
    SVec terms_;
};

VField bracket(const VField& a, const VField& b);

enum class WKind { Gamma_r, Gamma, GammaPrime, GammaDoublePrime, M, N, P, G, T };

std::vector<VField> even_basis(const WittPtr& w, std::optional<int> degree = {});
std::vector<VField> distinguished(const WittPtr& w, WKind kind, int r = 1);
std::vector<SVec> distinguished_even(const Witt& w, WKind kind, int r = 1);
SVec gamma_even(const Witt& w, int r);

// {x in even part of given degrees : [x, s] = 0 for s in S}
Subspace centralizer_in_even(const Witt& w, const std::vector<SVec>& S, int dlo, int dhi);

std::string even_ambient(const Witt& w);

// Span of gens closed under bracketing with gens (worklist to a fixed point). When
// audit_ok is given, also checks that brackets of all result pairs stay inside.
Subspace bracket_closure(const Witt& w, const std::vector<SVec>& gens, bool* audit_ok = nullptr);

}  // namespace cartan
