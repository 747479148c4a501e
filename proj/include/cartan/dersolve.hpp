#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cartan/linalg.hpp"
#include "cartan/special.hpp"
#include "cartan/witt.hpp"

namespace cartan {

enum class AlgTag { W, S };
const char* tag_name(AlgTag t);

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Element of a staircase basis of L: vec = d^beta applied to the top vector of `top`.
struct BElem {
    SVec vec;
    std::uint32_t top = 0;
    std::vector<std::uint16_t> beta;
    int degree = 0;
    std::uint64_t weight = 0;
};

// A term c * d^beta(psi(s_top)) of a relation between top values.
struct RelTerm {
    std::uint32_t top;
    std::vector<std::uint16_t> beta;
    Scalar c;
};

// The source algebra L (W or S) prepared for derivation solving: generators,
// their d-closure, and a basis of L of the form d^beta(s_k) built top-down by degree.
class Source {
public:
    static std::shared_ptr<const Source> make_W(const WittPtr& w);
    static std::shared_ptr<const Source> make_S(const SpecialPtr& s);

    AlgTag tag() const { return tag_; }
    const Witt& witt() const { return *w_; }
    const WittPtr& witt_ptr() const { return w_; }
    const SpecialPtr& special() const { return s_; }
    std::size_t dim() const { return B_.size(); }

    const std::vector<SVec>& gens() const { return gens_; }
    const std::vector<SVec>& gens_closed() const { return gstar_; }
    const std::vector<BElem>& staircase() const { return B_; }
    std::size_t num_tops() const { return tops_.size(); }
    const BElem& top(std::uint32_t k) const { return B_[tops_[k]]; }
    const std::vector<std::vector<RelTerm>>& relations() const { return rels_; }

    // staircase coordinates of x (x must lie in L)
    SVec coords(const SVec& x) const;
    bool contains(const SVec& x) const;
    // a basis of L of one degree (unit vectors for W, reduced rows for S)
    std::vector<SVec> basis(int degree) const;
    std::vector<SVec> basis() const;

private:
    Source() = default;
    void build_staircase(const std::vector<std::pair<int, std::vector<SVec>>>& by_degree);
    void close_generators();

    struct SliceEch;
    AlgTag tag_ = AlgTag::W;
    WittPtr w_;
    SpecialPtr s_;
    std::vector<SVec> gens_, gstar_;
    std::vector<BElem> B_;
    std::vector<std::uint32_t> tops_;
    std::vector<std::vector<RelTerm>> rels_;
    std::vector<std::int32_t> unit_;  // W only: even index -> staircase index
    std::unordered_map<std::uint64_t, std::uint32_t> tb_;  // (top, beta) -> staircase index
    std::shared_ptr<std::unordered_map<std::uint64_t, SliceEch>> ech_;
};
using SourcePtr = std::shared_ptr<const Source>;

// Homogeneous linear map L -> W of degree d, stored as ad(inner) + psi, where psi is
// determined by its values on the staircase tops (psi(d^beta s) = d^beta psi(s)).
struct GradedMap {
    int degree = 0;
    SVec inner;
    std::vector<SVec> tops;  // empty means psi = 0

    SVec apply(const Source& L, const SVec& x) const;
    // images of the basis of L_i (the degree-i block)
    std::vector<SVec> block(const Source& L, int i) const;
    static GradedMap ad(int d, SVec E);
};

GradedMap combine(const std::vector<GradedMap>& maps, const Vec& coeffs, const Field& F);
// (phi(g))_g over the generators, column g * dim W + w
Vec signature(const Source& L, const GradedMap& phi);
// every (x, phi(x)) for x in the basis of L, column x * dim W + w
Vec full_block(const Source& L, const GradedMap& phi);
// phi([x,y]) - [phi x, y] - [x, phi y]
SVec leibniz_defect(const Source& L, const GradedMap& phi, const SVec& x, const SVec& y);
GradedMap exceptional_map(const Source& L, const ExceptionalDer& e);

struct DerSpace {
    AlgTag L = AlgTag::W, M = AlgTag::W;
    int degree = 0;
    std::vector<GradedMap> basis;
    Subspace span;   // signatures of basis
    Subspace inner;  // signatures of the inner maps
    std::size_t outer_dim = 0;
    // basis indices whose signatures extend inner to span
    std::vector<std::size_t> outer_reps;
};

// counts and outer representatives only, for long scans
struct DerSummary {
    int degree = 0;
    std::size_t dim = 0, inner_dim = 0, outer_dim = 0;
    std::vector<GradedMap> outer_reps;
};

enum class InnerKind { Ad, NormalizerPart };

// Lazily builds and caches the algebras and derivation spaces for one parameter set.
class Engine {
public:
    explicit Engine(const Params& prm, int threads = 1);

    const Params& params() const { return prm_; }
    const WittPtr& witt() const { return w_; }
    const SpecialPtr& special() const;
    const SourcePtr& source(AlgTag L) const;
    std::pair<int, int> band() const;

    // full space, cached
    std::shared_ptr<const DerSpace> der_space(AlgTag L, AlgTag M, int d) const;
    // uncached full space
    DerSpace compute(AlgTag L, AlgTag M, int d) const;
    // cached summaries for every degree in [lo, hi], spread over the worker threads
    std::vector<DerSummary> der_band(AlgTag L, AlgTag M, int lo, int hi) const;
    // inner maps of degree d: ad of W_d (M = W) or of S_d (M = S); NormalizerPart
    // uses Sbar_d + T_d for (S,S)
    std::vector<GradedMap> inner_maps(AlgTag L, AlgTag M, int d, InnerKind k = InnerKind::Ad) const;
    Subspace inner_image(AlgTag L, AlgTag M, int d, InnerKind k = InnerKind::Ad) const;
    // derivations of L into W of degree d vanishing on L_{-1}
    std::vector<GradedMap> solve_vanishing(AlgTag L, int d) const;

private:
    const DerSummary& summary(AlgTag L, AlgTag M, int d) const;

    Params prm_;
    int threads_;
    WittPtr w_;
    mutable SpecialPtr s_;
    mutable SourcePtr srcW_, srcS_;
    mutable std::recursive_mutex init_mu_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, int>, std::shared_ptr<const DerSpace>> cache_;
    mutable std::map<std::tuple<int, int, int>, std::shared_ptr<const DerSummary>> sums_;
};

// E in W_d with (phi - ad E)(D_i) = 0 for i in Y_0
struct Reduction {
    SVec E;
    GradedMap psi;
};
Reduction reduce_minus_one(const Source& L, const GradedMap& phi);

// all-pairs Leibniz solver for (W,W) at one degree, as full blocks
struct BruteResult {
    std::vector<Vec> maps;
    std::size_t pairs = 0;
};
BruteResult brute_force_der(const Witt& w, int d);

struct OuterAlgebra {
    AlgTag L = AlgTag::W;
    std::vector<int> rep_degree;
    std::vector<GradedMap> reps;
    // structure[a][b] = coordinates of [rep_a, rep_b] modulo inner
    std::vector<std::vector<Vec>> structure;
    std::vector<std::size_t> derived_dims;  // dim, dim D^1, dim D^2, ...
    std::string classification;
    bool antisymmetric = true, jacobi = true, closed = true, rep_independent = true;
    std::size_t der_dim = 0, inner_dim = 0;
    // ad of the Gamma_{1'} coset on the nonzero-degree part: eigenvalue -> multiplicity
    std::optional<std::map<Scalar, std::size_t>> gamma_eigen;
    bool gamma_semisimple = false;
};
OuterAlgebra outer_algebra(const Engine& eng, AlgTag L, int lo, int hi, std::uint64_t seed = 1);

struct Claim {
    std::string id, statement, expected, computed;
    bool pass = false;
    long long millis = 0;
};
struct Report {
    Params params;
    std::vector<Claim> claims;
    bool all_pass() const;
};
struct VerifyOptions {
    bool do_W = true, do_S = true, outer = true;
    std::optional<std::pair<int, int>> degrees;
    std::uint64_t seed = 1;
    std::size_t samples = 2000;
};
Report verify_theorems(const Engine& eng, const VerifyOptions& opt);

// {x in W_0 : [x, S] in S}
Subspace normalizer_zero(const Special& s);

}  // namespace cartan
