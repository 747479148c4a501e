#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cartan/linalg.hpp"
#include "cartan/witt.hpp"

namespace cartan {

VField d_rs(const WittPtr& w, int r, int s, const AlgElem& f);
AlgElem divergence(const VField& D);
// {D_rs(x^(a)x^u) : r <= s}, optionally even only and of one degree
std::vector<VField> s_spanning(const WittPtr& w, std::optional<int> degree = {}, bool even_only = true);
// kernel of the divergence; even coordinates when even_only, full coordinates otherwise
Subspace sbar_basis(const WittPtr& w, bool even_only = true, std::optional<int> degree = {});

struct ExceptionalDer {
    int i = 1;  // direction in Y_0
    int r = 1;  // exponent, map is (ad D_i)^{p^r}
};
VField exceptional_apply(const ExceptionalDer& e, const VField& D);
SVec exceptional_apply_even(const Witt& w, const ExceptionalDer& e, const SVec& v);
std::vector<ExceptionalDer> exceptional_list(const Params& prm);

enum class SKind { Q, R, S0, TS, TSListed, FrakP };

class Special;
using SpecialPtr = std::shared_ptr<const Special>;

// The even parts of S(m,n;t) and of the divergence-free fields, in even W coordinates.
class Special {
public:
    static SpecialPtr make(const WittPtr& w);
    explicit Special(WittPtr w);

    const WittPtr& witt_ptr() const { return w_; }
    const Witt& witt() const { return *w_; }
    const Subspace& S() const { return S_; }
    const Subspace& Sbar() const { return Sbar_; }
    std::size_t dim() const { return S_.rank(); }
    std::size_t dim_bar() const { return Sbar_.rank(); }

    std::vector<SVec> family(SKind kind) const;
    // RREF basis rows of S grouped by (degree, weight) slice key
    const std::unordered_map<std::uint64_t, std::vector<SVec>>& slices() const { return slices_; }
    std::vector<SVec> degree_basis(int d) const;

private:
    WittPtr w_;
    Subspace S_, Sbar_;
    std::unordered_map<std::uint64_t, std::vector<SVec>> slices_;
};

}  // namespace cartan
