#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cartan/modp.hpp"
#include "cartan/superspace.hpp"

namespace cartan {

using Col = std::uint64_t;
using Vec = std::vector<std::pair<Col, Scalar>>;  // sorted by column, nonzero entries

Vec vec_axpy(const Vec& a, Scalar c, const Vec& b, const Field& F);  // a + c*b
Vec vec_scale(const Vec& a, Scalar c, const Field& F);
void vec_normalize(Vec& v, const Field& F);
Vec to_vec(const SVec& v);
SVec to_svec(const Vec& v);

// Row-echelon basis of a subspace of a coordinate space over F_p. Rows are kept
// pivot-normalized with pivot = lowest column; the fully reduced form is built on demand.
class Subspace {
public:
    Subspace() = default;
    Subspace(std::uint32_t p, std::string ambient, std::optional<Col> ncols = {});

    const std::string& ambient() const { return ambient_; }
    std::uint32_t prime() const { return F_ ? F_->p() : 0; }
    const Field& field() const { return *F_; }
    std::size_t rank() const { return rows_.size(); }

    // returns true when v was not already in the span
    bool insert(const Vec& v);
    // insert and also return the reduced remainder before normalization
    bool insert(const Vec& v, Vec* remainder);
    Vec reduce(const Vec& v) const;
    bool contains(const Vec& v) const { return reduce(v).empty(); }
    bool contains_all(const Subspace& o) const;
    bool same_span(const Subspace& o) const {
        return rank() == o.rank() && contains_all(o);
    }

    // fully reduced row echelon form sorted by pivot
    const std::vector<Vec>& rows() const;
    std::vector<Col> pivots() const;
    // basis of {x : row . x = 0 for all rows}, for columns in [0, ncols)
    std::vector<Vec> kernel(Col ncols) const;

    void dump(std::ostream& os) const;

private:
    const Vec* pivot_row(Col c) const;
    void set_pivot(Col c, std::uint32_t idx);

    std::shared_ptr<const Field> F_;
    std::string ambient_;
    std::vector<Vec> rows_;
    std::vector<std::int32_t> dense_pivot_;
    std::unordered_map<Col, std::uint32_t> sparse_pivot_;
    bool dense_ = false;
    mutable bool rref_valid_ = false;
    mutable std::vector<Vec> rref_;
};

struct NoSolution : std::runtime_error {
    NoSolution() : std::runtime_error("no solution") {}
};

struct HypothesisViolated : std::runtime_error {
    std::string which;
    explicit HypothesisViolated(std::string w)
        : std::runtime_error("hypothesis violated: " + w), which(std::move(w)) {}
};

// Linear map given by the images of the domain basis vectors.
struct LinOp {
    std::string domain, codomain;
    Col dom_dim = 0;
    std::vector<Vec> cols;
    // optional fast path used instead of cols when set
    std::function<Vec(const Vec&)> fn;

    Vec apply(const Vec& x, const Field& F) const;
    static LinOp identity(Col n, std::string tag = "");
    static LinOp from_function(Col n, std::function<Vec(const Vec&)> f, std::string tag = "");
};

// Echelon of vectors together with the combination (history) that produced each row.
struct TrackedEchelon {
    const Field& F;
    std::unordered_map<Col, std::size_t> piv;
    std::vector<Vec> rows, hist;

    explicit TrackedEchelon(const Field& f) : F(f) {}
    // remainder of v; h accumulates the subtracted history
    Vec reduce(Vec v, Vec& h) const;
    // false when v was dependent; then *kernel_out gets the dependency
    bool insert(Vec v, Vec h, Vec* kernel_out = nullptr);
    // combination of inserted histories equal to v, if v is in the span
    std::optional<Vec> express(const Vec& v) const;
    std::size_t rank() const { return rows.size(); }
};

// basis of ker A where A e_j = cols[j]
std::vector<Vec> kernel_of_columns(const std::vector<Vec>& cols, const Field& F);
// some x with A x = b
Vec solve(const LinOp& A, const Vec& b, const Field& F);

struct LemmaOptions {
    bool check_hypotheses = true;
};
// v with A_i(v) = v_i for all i, via v <- w + B_k(v_k - A_k(w)).
Vec lemma_solve(const std::vector<LinOp>& As, const std::vector<LinOp>& Bs,
                const std::vector<Vec>& vs, const Field& F, LemmaOptions opt = {});

// f with D_i(f) = f_i (i = 1..r in Y_0)
AlgElem integrate_divided(const std::vector<AlgElem>& fs, LemmaOptions opt = {});
// f in Lambda(n) with Gamma_{q_i}(f) = f_i
AlgElem integrate_exterior(const std::vector<AlgElem>& fs, const std::vector<int>& qs,
                           LemmaOptions opt = {});

}  // namespace cartan
