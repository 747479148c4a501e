#include "cartan/dersolve.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace cartan {

const char* tag_name(AlgTag t) { return t == AlgTag::W ? "W" : "S"; }

struct Source::SliceEch {
    std::vector<std::uint32_t> members;
    TrackedEchelon te;
    explicit SliceEch(const Field& F) : te(F) {}
};

namespace {

// [D_dir, v] for dir in Y_0; lowering keeps the index order
SVec lower_vec(const Witt& w, const SVec& v, int dir) {
    SVec out;
    for (auto [i, c] : v) {
        std::int32_t j = w.lower1(i, dir);
        if (j >= 0) out.push_back({static_cast<std::uint32_t>(j), c});
    }
    return out;
}

std::uint64_t beta_key(const Superspace& sp, std::uint32_t top, const std::vector<std::uint16_t>& beta) {
    std::uint64_t a = 0;
    for (std::size_t q = 0; q < beta.size(); ++q) a += std::uint64_t(beta[q]) * sp.stride(static_cast<int>(q));
    return std::uint64_t(top) * sp.num_alpha() + a;
}

SVec d_vector(const Witt& w, int i) {
    return {{static_cast<std::uint32_t>(w.even_index(0, i)), 1}};
}

}  // namespace

// ---- Source ----

SourcePtr Source::make_W(const WittPtr& w) {
    std::shared_ptr<Source> s(new Source());
    s->tag_ = AlgTag::W;
    s->w_ = w;
    for (auto kind : {WKind::M, WKind::N, WKind::P})
        for (auto& v : distinguished_even(*w, kind)) s->gens_.push_back(std::move(v));
    std::vector<std::pair<int, std::vector<SVec>>> by_degree;
    for (int d = w->xi() - 1; d >= -1; --d) {
        std::vector<SVec> vs;
        for (auto i : w->degree_slice(d)) vs.push_back({{i, 1}});
        by_degree.push_back({d, std::move(vs)});
    }
    s->build_staircase(by_degree);
    s->close_generators();
    return s;
}

SourcePtr Source::make_S(const SpecialPtr& sp) {
    std::shared_ptr<Source> s(new Source());
    s->tag_ = AlgTag::S;
    s->w_ = sp->witt_ptr();
    s->s_ = sp;
    for (auto kind : {SKind::Q, SKind::R, SKind::S0})
        for (auto& v : sp->family(kind)) s->gens_.push_back(std::move(v));
    std::vector<std::pair<int, std::vector<SVec>>> by_degree;
    for (int d = s->w_->xi() - 1; d >= -1; --d) by_degree.push_back({d, sp->degree_basis(d)});
    s->build_staircase(by_degree);
    s->close_generators();
    return s;
}

void Source::build_staircase(const std::vector<std::pair<int, std::vector<SVec>>>& by_degree) {
    const Witt& W = *w_;
    const Params& P = W.params();
    const Field& F = W.field();
    const Superspace& sp = W.sp();
    int m = P.m;
    if (tag_ == AlgTag::W) unit_.assign(W.dim(), -1);
    ech_ = std::make_shared<std::unordered_map<std::uint64_t, SliceEch>>();

    auto slice_of = [&](const SVec& v) {
        std::uint32_t i = v[0].first;
        return W.slice_key(W.degree(i), W.weight(i));
    };
    auto express = [&](const SVec& v) -> std::optional<SVec> {
        if (tag_ == AlgTag::W) {
            std::int32_t j = unit_[v[0].first];
            if (j < 0) return std::nullopt;
            return SVec{{static_cast<std::uint32_t>(j), v[0].second}};
        }
        auto it = ech_->find(slice_of(v));
        if (it == ech_->end()) return std::nullopt;
        auto h = it->second.te.express(to_vec(v));
        if (!h) return std::nullopt;
        SVec out;
        for (auto [l, c] : *h) out.push_back({it->second.members[l], c});
        svec_normalize(out, F);
        return out;
    };
    auto add = [&](SVec v, std::uint32_t top, std::vector<std::uint16_t> beta, int deg) {
        auto idx = static_cast<std::uint32_t>(B_.size());
        tb_[beta_key(sp, top, beta)] = idx;
        if (tag_ == AlgTag::W) {
            unit_[v[0].first] = static_cast<std::int32_t>(idx);
        } else {
            auto& e = ech_->try_emplace(slice_of(v), F).first->second;
            e.te.insert(to_vec(v), Vec{{e.members.size(), 1}});
            e.members.push_back(idx);
        }
        std::uint64_t wt = W.weight(v[0].first);
        B_.push_back({std::move(v), top, std::move(beta), deg, wt});
        return idx;
    };

    std::vector<std::uint32_t> prev;
    for (const auto& [k, vecs] : by_degree) {
        std::vector<std::uint32_t> cur;
        for (auto j : prev)
            for (int i = 0; i < m; ++i) {
                std::uint32_t top = B_[j].top;
                auto beta = B_[j].beta;
                if (++beta[i] > P.pi[i]) continue;  // d^beta kills all of W
                if (tb_.count(beta_key(sp, top, beta))) continue;
                SVec v = lower_vec(W, B_[j].vec, i + 1);
                if (v.empty()) {
                    rels_.push_back({{top, beta, F.neg(1)}});
                    continue;
                }
                if (auto h = express(v)) {
                    std::vector<RelTerm> rel;
                    for (auto [b, c] : *h) rel.push_back({B_[b].top, B_[b].beta, c});
                    rel.push_back({top, beta, F.neg(1)});
                    rels_.push_back(std::move(rel));
                    continue;
                }
                cur.push_back(add(std::move(v), top, std::move(beta), k));
            }
        for (const auto& v : vecs) {
            if (v.empty() || express(v)) continue;
            auto t = static_cast<std::uint32_t>(tops_.size());
            auto idx = add(v, t, std::vector<std::uint16_t>(m, 0), k);
            tops_.push_back(idx);
            cur.push_back(idx);
        }
        prev = std::move(cur);
    }
}

void Source::close_generators() {
    const Witt& W = *w_;
    Subspace span(W.params().p, even_ambient(W), W.dim());
    for (const auto& g : gens_)
        if (span.insert(to_vec(g))) gstar_.push_back(g);
    for (std::size_t q = 0; q < gstar_.size(); ++q)
        for (int i = 1; i <= W.m(); ++i) {
            SVec v = lower_vec(W, gstar_[q], i);
            if (!v.empty() && span.insert(to_vec(v))) gstar_.push_back(std::move(v));
        }
}

SVec Source::coords(const SVec& x) const {
    const Witt& W = *w_;
    SVec out;
    if (tag_ == AlgTag::W) {
        for (auto [i, c] : x) out.push_back({static_cast<std::uint32_t>(unit_[i]), c});
        svec_normalize(out, W.field());
        return out;
    }
    std::unordered_map<std::uint64_t, SVec> parts;
    for (auto t : x) parts[W.slice_key(W.degree(t.first), W.weight(t.first))].push_back(t);
    for (auto& [key, part] : parts) {
        auto it = ech_->find(key);
        std::optional<Vec> h;
        if (it != ech_->end()) h = it->second.te.express(to_vec(part));
        if (!h) throw std::domain_error("coords: vector not in the source algebra");
        for (auto [l, c] : *h) out.push_back({it->second.members[l], c});
    }
    svec_normalize(out, W.field());
    return out;
}

bool Source::contains(const SVec& x) const {
    if (tag_ == AlgTag::W) return true;
    return s_->S().contains(to_vec(x));
}

std::vector<SVec> Source::basis(int degree) const {
    if (tag_ == AlgTag::S) return s_->degree_basis(degree);
    std::vector<SVec> out;
    for (auto i : w_->degree_slice(degree)) out.push_back({{i, 1}});
    return out;
}

std::vector<SVec> Source::basis() const {
    std::vector<SVec> out;
    if (tag_ == AlgTag::S) {
        for (const auto& r : s_->S().rows()) out.push_back(to_svec(r));
        return out;
    }
    for (std::uint32_t i = 0; i < w_->dim(); ++i) out.push_back({{i, 1}});
    return out;
}

// ---- GradedMap ----

SVec GradedMap::apply(const Source& L, const SVec& x) const {
    const Witt& W = L.witt();
    SVec out;
    if (!inner.empty()) out = W.bracket(inner, x);
    if (tops.empty()) return out;
    const Field& F = W.field();
    const auto& B = L.staircase();
    for (auto [j, a] : L.coords(x)) {
        const BElem& b = B[j];
        if (b.top >= tops.size()) continue;
        for (auto [c, v] : tops[b.top]) {
            std::int32_t e = W.lower(c, b.beta.data());
            if (e >= 0) out.push_back({static_cast<std::uint32_t>(e), F.mul(a, v)});
        }
    }
    svec_normalize(out, F);
    return out;
}

std::vector<SVec> GradedMap::block(const Source& L, int i) const {
    std::vector<SVec> out;
    for (const auto& x : L.basis(i)) out.push_back(apply(L, x));
    return out;
}

GradedMap GradedMap::ad(int d, SVec E) {
    GradedMap g;
    g.degree = d;
    g.inner = std::move(E);
    return g;
}

GradedMap combine(const std::vector<GradedMap>& maps, const Vec& coeffs, const Field& F) {
    GradedMap out;
    if (!maps.empty()) out.degree = maps[0].degree;
    std::size_t K = 0;
    for (auto [j, c] : coeffs) K = std::max(K, maps.at(j).tops.size());
    out.tops.assign(K, {});
    for (auto [j, c] : coeffs) {
        const GradedMap& g = maps.at(j);
        out.inner = svec_axpy(out.inner, c, g.inner, F);
        for (std::size_t k = 0; k < g.tops.size(); ++k) out.tops[k] = svec_axpy(out.tops[k], c, g.tops[k], F);
    }
    bool any = false;
    for (const auto& t : out.tops) any = any || !t.empty();
    if (!any) out.tops.clear();
    return out;
}

Vec signature(const Source& L, const GradedMap& phi) {
    Vec out;
    Col dim = L.witt().dim();
    const auto& G = L.gens();
    for (std::size_t q = 0; q < G.size(); ++q)
        for (auto [i, c] : phi.apply(L, G[q])) out.push_back({q * dim + i, c});
    return out;
}

Vec full_block(const Source& L, const GradedMap& phi) {
    Vec out;
    Col dim = L.witt().dim();
    auto basis = L.basis();
    for (std::size_t q = 0; q < basis.size(); ++q)
        for (auto [i, c] : phi.apply(L, basis[q])) out.push_back({q * dim + i, c});
    return out;
}

SVec leibniz_defect(const Source& L, const GradedMap& phi, const SVec& x, const SVec& y) {
    const Witt& W = L.witt();
    const Field& F = W.field();
    SVec r = phi.apply(L, W.bracket(x, y));
    r = svec_axpy(r, F.neg(1), W.bracket(phi.apply(L, x), y), F);
    r = svec_axpy(r, F.neg(1), W.bracket(x, phi.apply(L, y)), F);
    return r;
}

GradedMap exceptional_map(const Source& L, const ExceptionalDer& e) {
    GradedMap g;
    std::uint32_t q = 1;
    for (int k = 0; k < e.r; ++k) q *= L.witt().params().p;
    g.degree = -static_cast<int>(q);
    for (std::size_t k = 0; k < L.num_tops(); ++k)
        g.tops.push_back(exceptional_apply_even(L.witt(), e, L.top(static_cast<std::uint32_t>(k)).vec));
    return g;
}

// ---- solver for derivations vanishing on L_{-1} ----

namespace {

struct Contrib {
    std::uint32_t e;
    std::uint32_t u;
    Scalar c;
};

// Feeds rows sum_u c * U_u = 0 (one per output coordinate e) into a bucket.
void flush_rows(std::vector<Contrib>& cs, Subspace& sub, const Field& F) {
    std::sort(cs.begin(), cs.end(), [](const Contrib& a, const Contrib& b) {
        return a.e != b.e ? a.e < b.e : a.u < b.u;
    });
    std::size_t i = 0;
    Vec row;
    while (i < cs.size()) {
        std::uint32_t e = cs[i].e;
        row.clear();
        for (; i < cs.size() && cs[i].e == e; ++i) {
            if (!row.empty() && row.back().first == cs[i].u)
                row.back().second = F.add(row.back().second, cs[i].c);
            else
                row.push_back({cs[i].u, cs[i].c});
        }
        std::size_t w = 0;
        for (auto& t : row)
            if (t.second) row[w++] = t;
        row.resize(w);
        if (!row.empty()) sub.insert(row);
    }
    cs.clear();
}

}  // namespace

std::vector<GradedMap> Engine::solve_vanishing(AlgTag tag, int d) const {
    const Source& L = *source(tag);
    const Witt& W = L.witt();
    const Field& F = W.field();
    const auto& B = L.staircase();
    const std::size_t K = L.num_tops();
    const std::uint32_t p = prm_.p;

    std::map<std::uint64_t, std::uint32_t> mus;
    for (std::uint32_t k = 0; k < K; ++k)
        for (auto c : W.degree_slice(L.top(k).degree + d)) mus.emplace(W.wsub(W.weight(c), L.top(k).weight), 0);
    if (mus.empty()) return {};

    // constraints shared by all buckets
    std::vector<SVec> gcoords;
    std::vector<const SVec*> gorder;
    const auto& G = L.gens_closed();
    {
        std::vector<std::size_t> idx(G.size());
        for (std::size_t q = 0; q < G.size(); ++q) idx[q] = q;
        // toral elements first: they pin most weight buckets at once
        auto rank = [&](std::size_t q) {
            std::uint32_t i = G[q][0].first;
            bool toral = W.degree(i) == 0 && W.weight_of(G[q]) == 0;
            return std::make_pair(toral ? 0 : 1, W.degree(i));
        };
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });
        for (auto q : idx) {
            gorder.push_back(&G[q]);
            gcoords.push_back(L.coords(G[q]));
        }
    }
    std::vector<SVec> dcoords;
    for (int i = 1; i <= prm_.m; ++i) dcoords.push_back(L.coords(d_vector(W, i)));
    // coords([g, s_k]), filled on demand
    std::vector<std::vector<std::optional<SVec>>> pc(G.size(), std::vector<std::optional<SVec>>(K));

    std::vector<GradedMap> out;
    std::vector<Contrib> cs;
    std::vector<const std::vector<std::uint32_t>*> sl(K);
    std::vector<std::int32_t> off(K);
    Term bt[2];
    for (const auto& [mu, unused] : mus) {
        (void)unused;
        std::uint32_t n = 0;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> unk;
        for (std::uint32_t k = 0; k < K; ++k) {
            sl[k] = &W.slice(L.top(k).degree + d, W.wadd(L.top(k).weight, mu));
            off[k] = sl[k]->empty() ? -1 : static_cast<std::int32_t>(n);
            for (auto c : *sl[k]) unk.push_back({k, c});
            n += static_cast<std::uint32_t>(sl[k]->size());
        }
        if (n == 0) continue;
        auto local = [&](std::uint32_t k, std::uint32_t c) {
            const auto& s = *sl[k];
            auto it = std::lower_bound(s.begin(), s.end(), c);
            return static_cast<std::uint32_t>(off[k] + (it - s.begin()));
        };
        auto expand = [&](std::uint32_t t, const std::uint16_t* beta, Scalar a, auto&& cb) {
            if (off[t] < 0) return;
            const auto& s = *sl[t];
            for (std::size_t q = 0; q < s.size(); ++q) {
                std::int32_t e = W.lower(s[q], beta);
                if (e >= 0) cb(static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(off[t] + q), a);
            }
        };

        // known derivations in this bucket: ad E with E of weight mu killing L_{-1}
        Subspace known(p, "", n);
        for (auto E : W.slice(d, mu)) {
            if (d >= 0) {
                bool kills = true;
                for (int i = 1; i <= prm_.m && kills; ++i) kills = W.lower1(E, i) < 0;
                if (!kills) continue;
            }
            Vec v;
            for (std::uint32_t k = 0; k < K; ++k) {
                if (off[k] < 0) continue;
                for (auto [c, x] : W.bracket({{E, 1}}, L.top(k).vec)) v.push_back({local(k, c), x});
            }
            vec_normalize(v, F);
            known.insert(v);
        }
        const std::size_t target = n - known.rank();

        Subspace sub(p, "", n);
        auto done = [&] { return sub.rank() >= target; };
        auto psi_rows = [&](const SVec& co, Scalar sign) {
            for (auto [j, a] : co)
                expand(B[j].top, B[j].beta.data(), F.mul(sign, a),
                       [&](std::uint32_t e, std::uint32_t u, Scalar x) { cs.push_back({e, u, x}); });
        };
        for (const auto& dc : dcoords) {
            if (done()) break;
            psi_rows(dc, 1);
            flush_rows(cs, sub, F);
        }
        for (const auto& rel : L.relations()) {
            if (done()) break;
            for (const auto& t : rel)
                expand(t.top, t.beta.data(), t.c,
                       [&](std::uint32_t e, std::uint32_t u, Scalar x) { cs.push_back({e, u, x}); });
            flush_rows(cs, sub, F);
        }
        for (std::size_t q = 0; q < gorder.size() && !done(); ++q) {
            const SVec& g = *gorder[q];
            for (std::uint32_t k = 0; k < K && !done(); ++k) {
                const SVec& s = L.top(k).vec;
                auto& y = pc[q][k];
                if (!y) y = L.coords(W.bracket(g, s));
                // psi([g, s])
                psi_rows(*y, 1);
                // -[psi(g), s]
                for (auto [j, a] : gcoords[q])
                    expand(B[j].top, B[j].beta.data(), a, [&](std::uint32_t e, std::uint32_t u, Scalar x) {
                        for (auto [si, sc] : s) {
                            int nb = W.bracket_basis(e, si, bt);
                            for (int r = 0; r < nb; ++r)
                                cs.push_back({bt[r].first, u, F.neg(F.mul(x, F.mul(sc, bt[r].second)))});
                        }
                    });
                // -[g, psi(s)]
                if (off[k] >= 0) {
                    const auto& sk = *sl[k];
                    for (std::size_t c = 0; c < sk.size(); ++c)
                        for (auto [gi, gv] : g) {
                            int nb = W.bracket_basis(gi, sk[c], bt);
                            for (int r = 0; r < nb; ++r)
                                cs.push_back({bt[r].first, static_cast<std::uint32_t>(off[k] + c),
                                              F.neg(F.mul(gv, bt[r].second))});
                        }
                }
                flush_rows(cs, sub, F);
            }
        }
        for (const auto& kv : sub.kernel(n)) {
            GradedMap g;
            g.degree = d;
            g.tops.assign(K, {});
            for (auto [l, x] : kv) g.tops[unk[l].first].push_back({unk[l].second, x});
            for (auto& t : g.tops) svec_normalize(t, F);
            out.push_back(std::move(g));
        }
    }
    return out;
}

// ---- Engine ----

Engine::Engine(const Params& prm, int threads) : prm_(prm), threads_(std::max(1, threads)) {
    w_ = Witt::make(prm);
}

const SpecialPtr& Engine::special() const {
    std::lock_guard<std::recursive_mutex> lk(init_mu_);
    if (!s_) s_ = Special::make(w_);
    return s_;
}

const SourcePtr& Engine::source(AlgTag L) const {
    std::lock_guard<std::recursive_mutex> lk(init_mu_);
    if (L == AlgTag::W) {
        if (!srcW_) srcW_ = Source::make_W(w_);
        return srcW_;
    }
    if (!srcS_) srcS_ = Source::make_S(special());
    return srcS_;
}

std::pair<int, int> Engine::band() const {
    int tmax = *std::max_element(prm_.t.begin(), prm_.t.end());
    int q = 1;
    for (int k = 0; k < tmax; ++k) q *= static_cast<int>(prm_.p);
    return {-q, prm_.xi + 1};
}

std::vector<GradedMap> Engine::inner_maps(AlgTag L, AlgTag M, int d, InnerKind kind) const {
    if (L == AlgTag::W && M == AlgTag::S) throw UsageError("derivations of W into S are not supported");
    std::vector<GradedMap> out;
    if (M == AlgTag::W) {
        for (auto i : w_->degree_slice(d)) out.push_back(GradedMap::ad(d, {{i, 1}}));
        return out;
    }
    if (kind == InnerKind::Ad) {
        for (auto& v : special()->degree_basis(d)) out.push_back(GradedMap::ad(d, std::move(v)));
        return out;
    }
    Subspace span(prm_.p, even_ambient(*w_), w_->dim());
    std::vector<SVec> cands;
    for (const auto& r : special()->Sbar().rows())
        if (w_->degree(static_cast<std::uint32_t>(r[0].first)) == d) cands.push_back(to_svec(r));
    if (d == 0)
        for (int r = 1; r <= w_->N(); ++r) cands.push_back(gamma_even(*w_, r));
    for (auto& v : cands)
        if (span.insert(to_vec(v))) out.push_back(GradedMap::ad(d, std::move(v)));
    return out;
}

Subspace Engine::inner_image(AlgTag L, AlgTag M, int d, InnerKind kind) const {
    const Source& src = *source(L);
    Subspace out(prm_.p, std::string("sig[") + tag_name(L) + "," + tag_name(M) + "]");
    for (const auto& g : inner_maps(L, M, d, kind)) out.insert(signature(src, g));
    return out;
}

DerSpace Engine::compute(AlgTag L, AlgTag M, int d) const {
    if (L == AlgTag::W && M == AlgTag::S) throw UsageError("derivations of W into S are not supported");
    const Source& src = *source(L);
    DerSpace D;
    D.L = L;
    D.M = M;
    D.degree = d;
    std::string amb = std::string("sig[") + tag_name(L) + "," + tag_name(M) + "]";
    D.span = Subspace(prm_.p, amb);
    D.inner = Subspace(prm_.p, amb);
    auto [lo, hi] = band();
    if (d < lo || d > hi) return D;

    auto inner = inner_maps(L, M, d);
    std::vector<GradedMap> extra;
    if (M == AlgTag::W) {
        extra = solve_vanishing(L, d);
    } else {
        // derivations into W that send the generators into S
        auto base = der_space(L, AlgTag::W, d);
        const Subspace& S = special()->S();
        Col dim = w_->dim();
        std::vector<Vec> resid;
        for (const auto& phi : base->basis) {
            Vec col;
            const auto& G = src.gens();
            for (std::size_t q = 0; q < G.size(); ++q)
                for (auto [i, c] : S.reduce(to_vec(phi.apply(src, G[q])))) col.push_back({q * dim + i, c});
            resid.push_back(std::move(col));
        }
        for (const auto& kv : kernel_of_columns(resid, w_->field()))
            extra.push_back(combine(base->basis, kv, w_->field()));
    }
    std::vector<Vec> isig;
    for (const auto& g : inner) {
        isig.push_back(signature(src, g));
        D.inner.insert(isig.back());
    }
    std::vector<Vec> sigs;
    for (std::size_t j = 0; j < inner.size() + extra.size(); ++j) {
        const GradedMap& g = j < inner.size() ? inner[j] : extra[j - inner.size()];
        Vec s = j < inner.size() ? isig[j] : signature(src, g);
        if (D.span.insert(s)) {
            D.basis.push_back(g);
            sigs.push_back(std::move(s));
        }
    }
    D.outer_dim = D.span.rank() - D.inner.rank();
    if (D.outer_dim) {
        Subspace Q = D.inner;
        for (std::size_t j = 0; j < D.basis.size(); ++j)
            if (Q.insert(sigs[j])) D.outer_reps.push_back(j);
    }
    return D;
}

std::shared_ptr<const DerSpace> Engine::der_space(AlgTag L, AlgTag M, int d) const {
    auto key = std::make_tuple(static_cast<int>(L), static_cast<int>(M), d);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto D = std::make_shared<const DerSpace>(compute(L, M, d));
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.emplace(key, D).first->second;
}

const DerSummary& Engine::summary(AlgTag L, AlgTag M, int d) const {
    auto key = std::make_tuple(static_cast<int>(L), static_cast<int>(M), d);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = sums_.find(key);
        if (it != sums_.end()) return *it->second;
    }
    std::shared_ptr<const DerSpace> full;
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) full = it->second;
    }
    // (S,W) spaces feed (S,S), so keep them whole
    if (!full && L == AlgTag::S && M == AlgTag::W) full = der_space(L, M, d);
    DerSpace tmp;
    const DerSpace& D = full ? *full : (tmp = compute(L, M, d));
    auto s = std::make_shared<DerSummary>();
    s->degree = d;
    s->dim = D.span.rank();
    s->inner_dim = D.inner.rank();
    s->outer_dim = D.outer_dim;
    for (auto j : D.outer_reps) s->outer_reps.push_back(D.basis[j]);
    std::lock_guard<std::mutex> lk(mu_);
    return *sums_.emplace(key, s).first->second;
}

std::vector<DerSummary> Engine::der_band(AlgTag L, AlgTag M, int lo, int hi) const {
    source(L);
    if (M == AlgTag::S) special();
    std::vector<int> degs;
    for (int d = lo; d <= hi; ++d) degs.push_back(d);
    if (threads_ > 1 && degs.size() > 1) {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex emu;
        for (int t = 0; t < threads_; ++t)
            pool.emplace_back([&] {
                for (std::size_t q; (q = next++) < degs.size();) {
                    try {
                        summary(L, M, degs[q]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(emu);
                        if (!err) err = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    std::vector<DerSummary> out;
    for (int d : degs) out.push_back(summary(L, M, d));
    return out;
}

// ---- reduction to maps vanishing on L_{-1} ----

Reduction reduce_minus_one(const Source& L, const GradedMap& phi) {
    if (phi.degree < 0) throw std::invalid_argument("reduce_minus_one: degree must be >= 0");
    const WittPtr& wp = L.witt_ptr();
    const Witt& W = *wp;
    const Field& F = W.field();
    int m = W.m(), N = W.N();
    std::vector<VField> images;
    for (int i = 1; i <= m; ++i) images.push_back(VField::from_even(wp, phi.apply(L, d_vector(W, i))));
    VField E(wp);
    for (int r = 1; r <= N; ++r) {
        std::vector<AlgElem> fs;
        for (int i = 0; i < m; ++i) fs.push_back(images[i].coeff(r));
        AlgElem g = integrate_divided(fs);
        E = E - VField::from_coeff(wp, r, g);
    }
    Reduction out;
    for (auto [idx, c] : E.terms())
        if (W.full_parity(idx) == 0 && W.full_degree(idx) == phi.degree)
            out.E.push_back({static_cast<std::uint32_t>(W.even_of_full(idx)), c});
    svec_normalize(out.E, F);
    out.psi = phi;
    out.psi.inner = svec_axpy(phi.inner, F.neg(1), out.E, F);
    for (int i = 1; i <= m; ++i)
        if (!out.psi.apply(L, d_vector(W, i)).empty())
            throw std::logic_error("reduce_minus_one: remainder does not vanish on L_{-1}");
    return out;
}

// ---- all-pairs oracle ----

BruteResult brute_force_der(const Witt& W, int d) {
    const Field& F = W.field();
    const std::uint32_t dim = W.dim();
    const std::uint32_t p = W.params().p;
    BruteResult res;

    std::map<std::uint64_t, int> mus;
    for (std::uint32_t x = 0; x < dim; ++x)
        for (auto c : W.degree_slice(W.degree(x) + d)) mus.emplace(W.wsub(W.weight(c), W.weight(x)), 0);

    // toral basis elements x_r D_r first
    std::vector<std::uint32_t> order;
    std::vector<char> seen(dim, 0);
    for (int r = 1; r <= W.N(); ++r) {
        auto g = gamma_even(W, r);
        order.push_back(g[0].first);
        seen[g[0].first] = 1;
    }
    for (std::uint32_t x = 0; x < dim; ++x)
        if (!seen[x]) order.push_back(x);

    std::vector<std::uint32_t> off(dim + 1);
    std::vector<const std::vector<std::uint32_t>*> sl(dim);
    std::vector<Contrib> cs;
    Term bt[2];
    for (const auto& [mu, unused] : mus) {
        (void)unused;
        std::uint32_t n = 0;
        for (std::uint32_t x = 0; x < dim; ++x) {
            sl[x] = &W.slice(W.degree(x) + d, W.wadd(W.weight(x), mu));
            off[x] = n;
            n += static_cast<std::uint32_t>(sl[x]->size());
        }
        off[dim] = n;
        if (n == 0) continue;
        auto local = [&](std::uint32_t x, std::uint32_t c) {
            const auto& s = *sl[x];
            return off[x] + static_cast<std::uint32_t>(std::lower_bound(s.begin(), s.end(), c) - s.begin());
        };
        Subspace known(p, "", n);
        for (auto E : W.slice(d, mu)) {
            Vec v;
            for (std::uint32_t x = 0; x < dim; ++x) {
                if (sl[x]->empty()) continue;
                int nb = W.bracket_basis(E, x, bt);
                for (int r = 0; r < nb; ++r) v.push_back({local(x, bt[r].first), bt[r].second});
            }
            vec_normalize(v, F);
            known.insert(v);
        }
        const std::size_t target = n - known.rank();
        Subspace sub(p, "", n);
        for (std::size_t a = 0; a < order.size() && sub.rank() < target; ++a)
            for (std::size_t b = a + 1; b < order.size() && sub.rank() < target; ++b) {
                std::uint32_t x = order[a], y = order[b];
                ++res.pairs;
                int nb = W.bracket_basis(x, y, bt);
                for (int r = 0; r < nb; ++r) {
                    std::uint32_t z = bt[r].first;
                    const auto& s = *sl[z];
                    for (std::size_t q = 0; q < s.size(); ++q) cs.push_back({s[q], off[z] + std::uint32_t(q), bt[r].second});
                }
                Term t2[2];
                const auto& sx = *sl[x];
                for (std::size_t q = 0; q < sx.size(); ++q) {
                    int k = W.bracket_basis(sx[q], y, t2);
                    for (int r = 0; r < k; ++r) cs.push_back({t2[r].first, off[x] + std::uint32_t(q), F.neg(t2[r].second)});
                }
                const auto& sy = *sl[y];
                for (std::size_t q = 0; q < sy.size(); ++q) {
                    int k = W.bracket_basis(x, sy[q], t2);
                    for (int r = 0; r < k; ++r) cs.push_back({t2[r].first, off[y] + std::uint32_t(q), F.neg(t2[r].second)});
                }
                flush_rows(cs, sub, F);
            }
        for (const auto& kv : sub.kernel(n)) {
            Vec v;
            for (auto [l, c] : kv) {
                auto x = static_cast<std::uint32_t>(std::upper_bound(off.begin(), off.end(), l) - off.begin() - 1);
                while (off[x + 1] <= l) ++x;
                v.push_back({Col(x) * dim + (*sl[x])[l - off[x]], c});
            }
            vec_normalize(v, F);
            res.maps.push_back(std::move(v));
        }
    }
    return res;
}

}  // namespace cartan
