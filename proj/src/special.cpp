#include "cartan/special.hpp"

#include <algorithm>
#include <stdexcept>

namespace cartan {

namespace {

// D_rs on a single monomial, full coordinates
void d_rs_mono(const Witt& w, int r, int s, std::uint32_t f, Scalar c, SVec& out) {
    const Superspace& S = w.sp();
    const Field& F = w.field();
    const Params& P = w.params();
    int pf = S.parity(f);
    std::uint32_t g;
    Scalar k;
    if (S.d_mono(r, f, g, k)) {
        Scalar x = F.mul(c, k);
        if (P.tau(r) & P.tau(s)) x = F.neg(x);
        out.push_back({w.full(g, s), x});
    }
    if (S.d_mono(s, f, g, k)) {
        Scalar x = F.mul(c, k);
        if (!(((P.tau(r) + P.tau(s)) * pf) & 1)) x = F.neg(x);
        out.push_back({w.full(g, r), x});
    }
}

}  // namespace

VField d_rs(const WittPtr& w, int r, int s, const AlgElem& f) {
    if (r < 1 || r > w->N() || s < 1 || s > w->N()) throw std::out_of_range("direction not in Y");
    SVec out;
    for (auto [mo, c] : f.terms()) d_rs_mono(*w, r, s, mo, c, out);
    return VField(w, std::move(out));
}

AlgElem divergence(const VField& D) {
    const Witt& w = *D.witt();
    const Superspace& S = w.sp();
    const Field& F = w.field();
    SVec out;
    for (auto [idx, c] : D.terms()) {
        std::uint32_t f = w.mono_of_full(idx);
        int r = w.dir_of_full(idx);
        std::uint32_t g;
        Scalar k;
        if (!S.d_mono(r, f, g, k)) continue;
        Scalar x = F.mul(c, k);
        if (w.params().tau(r) & S.parity(f)) x = F.neg(x);
        out.push_back({g, x});
    }
    return AlgElem(w.space(), std::move(out));
}

std::vector<VField> s_spanning(const WittPtr& w, std::optional<int> degree, bool even_only) {
    std::vector<VField> out;
    int N = w->N();
    const Superspace& S = w->sp();
    for (std::uint32_t f = 0; f < S.num_monos(); ++f) {
        if (degree && S.degree(f) - 2 != *degree) continue;
        for (int r = 1; r <= N; ++r)
            for (int s = r; s <= N; ++s) {
                if (even_only && ((S.parity(f) + w->params().tau(r) + w->params().tau(s)) & 1)) continue;
                SVec t;
                d_rs_mono(*w, r, s, f, 1, t);
                VField v(w, std::move(t));
                if (!v.is_zero()) out.push_back(std::move(v));
            }
    }
    return out;
}

Subspace sbar_basis(const WittPtr& wp, bool even_only, std::optional<int> degree) {
    const Witt& w = *wp;
    const Superspace& S = w.sp();
    const Field& F = w.field();
    std::string amb = even_only ? even_ambient(w) : "W_full[" + w.params().label() + "]";
    Subspace out(w.params().p, amb, even_only ? Col(w.dim()) : Col(w.num_full()));
    // group full basis elements by (degree, weight, parity)
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t x = 0; x < w.num_full(); ++x) {
        int par = w.full_parity(x);
        if (even_only && par) continue;
        int d = w.full_degree(x);
        if (degree && d != *degree) continue;
        std::uint64_t key = (w.slice_key(d, w.weight_of_full(x)) << 1) | static_cast<std::uint64_t>(par);
        groups[key].push_back(x);
    }
    std::vector<std::uint64_t> keys;
    for (auto& [k, v] : groups) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (auto key : keys) {
        const auto& g = groups[key];
        std::vector<Vec> cols;
        for (auto x : g) {
            std::uint32_t f = w.mono_of_full(x), h;
            int r = w.dir_of_full(x);
            Scalar k;
            Vec col;
            if (S.d_mono(r, f, h, k)) {
                Scalar c = k;
                if (w.params().tau(r) & S.parity(f)) c = F.neg(c);
                col.push_back({h, c});
            }
            cols.push_back(col);
        }
        for (const auto& kv : kernel_of_columns(cols, F)) {
            Vec v;
            for (auto [q, c] : kv)
                v.push_back({even_only ? Col(w.even_of_full(g[q])) : Col(g[q]), c});
            vec_normalize(v, F);
            out.insert(v);
        }
    }
    return out;
}

SVec exceptional_apply_even(const Witt& w, const ExceptionalDer& e, const SVec& v) {
    const Params& P = w.params();
    if (e.i < 1 || e.i > P.m) throw std::out_of_range("exceptional: direction not in Y_0");
    if (e.r < 1) throw std::out_of_range("exceptional: exponent out of range");
    // for r >= t_i the power lowers past the truncation and the map is zero
    if (e.r >= P.t[e.i - 1]) return {};
    std::uint32_t q = 1;
    for (int k = 0; k < e.r; ++k) q *= P.p;
    std::vector<std::uint16_t> beta(P.m, 0);
    beta[e.i - 1] = static_cast<std::uint16_t>(q);
    SVec out;
    for (auto [idx, c] : v) {
        std::int32_t j = w.lower(idx, beta.data());
        if (j >= 0) out.push_back({static_cast<std::uint32_t>(j), c});
    }
    svec_normalize(out, w.field());
    return out;
}

VField exceptional_apply(const ExceptionalDer& e, const VField& D) {
    const Witt& w = *D.witt();
    const Params& P = w.params();
    if (e.i < 1 || e.i > P.m) throw std::out_of_range("exceptional: direction not in Y_0");
    if (e.r < 1) throw std::out_of_range("exceptional: exponent out of range");
    // for r >= t_i the power lowers past the truncation and the map is zero
    if (e.r >= P.t[e.i - 1]) return VField(D.witt());
    std::uint32_t q = 1;
    for (int k = 0; k < e.r; ++k) q *= P.p;
    SVec out;
    const Superspace& S = w.sp();
    for (auto [idx, c] : D.terms()) {
        std::uint32_t f = w.mono_of_full(idx);
        if (S.alpha(f, e.i - 1) < q) continue;
        out.push_back({w.full(f - ((q * S.stride(e.i - 1)) << S.n()), w.dir_of_full(idx)), c});
    }
    return VField(D.witt(), std::move(out));
}

std::vector<ExceptionalDer> exceptional_list(const Params& prm) {
    std::vector<ExceptionalDer> out;
    for (int i = 1; i <= prm.m; ++i)
        for (int r = 1; r < prm.t[i - 1]; ++r) out.push_back({i, r});
    return out;
}

// ---- Special ----

SpecialPtr Special::make(const WittPtr& w) { return std::make_shared<Special>(w); }

Special::Special(WittPtr w) : w_(std::move(w)) {
    const Witt& W = *w_;
    S_ = Subspace(W.params().p, "S_even[" + W.params().label() + "]", W.dim());
    for (const auto& v : s_spanning(w_)) {
        SVec e = v.to_even();
        S_.insert(to_vec(e));
    }
    Sbar_ = sbar_basis(w_, true);
    for (const auto& row : S_.rows()) {
        SVec e = to_svec(row);
        std::uint32_t i0 = e[0].first;
        slices_[W.slice_key(W.degree(i0), W.weight(i0))].push_back(std::move(e));
    }
}

std::vector<SVec> Special::degree_basis(int d) const {
    std::vector<SVec> out;
    for (const auto& row : S_.rows())
        if (w_->degree(static_cast<std::uint32_t>(row[0].first)) == d) out.push_back(to_svec(row));
    return out;
}

std::vector<SVec> Special::family(SKind kind) const {
    const Witt& W = *w_;
    const Field& F = W.field();
    int m = W.m(), N = W.N();
    std::vector<SVec> out;
    auto mono = [&](std::vector<std::uint32_t> a, std::uint32_t u) {
        Monomial mo;
        mo.alpha = std::move(a);
        mo.u = u;
        return AlgElem::monomial(W.space(), mo);
    };
    auto push = [&](const VField& v) {
        if (!v.is_zero()) out.push_back(v.to_even());
    };
    std::vector<std::uint32_t> zero(m, 0);
    auto bit = [&](int k) { return 1u << (k - m - 1); };
    switch (kind) {
        case SKind::Q:
            for (int i = 1; i <= m; ++i)
                for (int j = 1; j <= m; ++j) {
                    if (i == j) continue;
                    for (std::uint32_t a = 1; a <= W.params().pi[j - 1]; ++a) {
                        auto al = zero;
                        al[j - 1] = a;
                        push(d_rs(w_, i, j, mono(al, 0)));
                    }
                }
            break;
        case SKind::R:
            for (int i = 1; i <= m; ++i)
                for (int l = m + 1; l <= N; ++l)
                    for (int k = m + 1; k <= N; ++k) {
                        auto al = zero;
                        al[i - 1] = 2;
                        push(d_rs(w_, i, l, mono(al, bit(k))));
                    }
            for (int i = 1; i <= m; ++i)
                for (int j = 1; j <= m; ++j) {
                    if (i == j) continue;
                    for (int k = m + 1; k <= N; ++k)
                        for (int l = k + 1; l <= N; ++l) {
                            auto al = zero;
                            al[i - 1] = 1;
                            push(d_rs(w_, i, j, mono(al, bit(k) | bit(l))));
                        }
                }
            break;
        case SKind::TS: {
            auto g = [&](int r) { return gamma_even(W, r); };
            for (int j = 2; j <= m; ++j) out.push_back(svec_axpy(g(1), F.neg(1), g(j), F));
            out.push_back(svec_axpy(g(1), 1, g(m + 1), F));
            for (int k = m + 2; k <= N; ++k) out.push_back(svec_axpy(g(m + 1), F.neg(1), g(k), F));
            break;
        }
        case SKind::TSListed: {
            const Params& P = W.params();
            for (int r = 1; r <= N; ++r)
                for (int s = r + 1; s <= N; ++s) {
                    Scalar c = P.tau(r) == P.tau(s) ? F.neg(1) : 1;
                    out.push_back(svec_axpy(gamma_even(W, r), c, gamma_even(W, s), F));
                }
            break;
        }
        case SKind::S0: {
            out = family(SKind::TS);
            const Params& P = W.params();
            for (int r = 1; r <= N; ++r)
                for (int s = 1; s <= N; ++s) {
                    if (r == s || P.tau(r) != P.tau(s)) continue;
                    Monomial mo;
                    mo.alpha = zero;
                    if (r <= m)
                        mo.alpha[r - 1] = 1;
                    else
                        mo.u = bit(r);
                    out.push_back({{static_cast<std::uint32_t>(W.even_index(W.sp().encode(mo), s)), 1}});
                }
            break;
        }
        case SKind::FrakP:
            for (int i = 1; i <= m; ++i) {
                Monomial mo;
                mo.alpha.resize(m);
                for (int q = 0; q < m; ++q) mo.alpha[q] = q == i - 1 ? 0 : W.params().pi[q];
                mo.u = (1u << W.n()) - 1;
                std::int32_t e = W.even_index(W.sp().encode(mo), i);
                if (e >= 0) out.push_back({{static_cast<std::uint32_t>(e), 1}});
            }
            break;
    }
    return out;
}

}  // namespace cartan
