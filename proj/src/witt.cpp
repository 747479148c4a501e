#include "cartan/witt.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace cartan {

WittPtr Witt::make(const Params& prm) { return std::make_shared<Witt>(prm); }

Witt::Witt(const Params& prm) : sp_(Superspace::make(prm)), N_(prm.m + prm.n) {
    ppow_.assign(N_ + 1, 1);
    for (int j = 1; j <= N_; ++j) ppow_[j] = ppow_[j - 1] * prm.p;
    full_even_.assign(num_full(), -1);
    by_degree_.resize(prm.xi + 1);
    for (std::uint32_t w = 0; w < num_full(); ++w) {
        if (full_parity(w)) continue;
        std::uint32_t idx = static_cast<std::uint32_t>(even_full_.size());
        full_even_[w] = static_cast<std::int32_t>(idx);
        even_full_.push_back(w);
        int d = full_degree(w);
        deg_.push_back(d);
        std::uint64_t wt = weight_of_full(w);
        wt_.push_back(wt);
        by_degree_[d + 1].push_back(idx);
        slices_[slice_key(d, wt)].push_back(idx);
    }
}

const std::vector<std::uint32_t>& Witt::degree_slice(int d) const {
    if (d < -1 || d > xi() - 1) return empty_;
    return by_degree_[d + 1];
}

const std::vector<std::uint32_t>& Witt::slice(int d, std::uint64_t w) const {
    if (d < -1 || d > xi() - 1) return empty_;
    auto it = slices_.find(slice_key(d, w));
    return it == slices_.end() ? empty_ : it->second;
}

std::uint64_t Witt::weight_of_full(std::uint32_t w) const {
    std::uint32_t mo = mono_of_full(w);
    int r = dir_of_full(w);
    std::uint32_t p = params().p;
    std::uint64_t key = 0;
    for (int j = 1; j <= N_; ++j) {
        std::int64_t c;
        if (j <= m())
            c = static_cast<std::int64_t>(sp_->alpha(mo, j - 1) % p);
        else
            c = (sp_->ext(mo) >> (j - m() - 1)) & 1;
        if (j == r) c -= 1;
        c %= static_cast<std::int64_t>(p);
        if (c < 0) c += p;
        key += static_cast<std::uint64_t>(c) * ppow_[j - 1];
    }
    return key;
}

std::uint64_t Witt::wadd(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t p = params().p, r = 0;
    for (int j = 0; j < N_; ++j) {
        r += ((a % p + b % p) % p) * ppow_[j];
        a /= p;
        b /= p;
    }
    return r;
}

std::uint64_t Witt::wsub(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t p = params().p, r = 0;
    for (int j = 0; j < N_; ++j) {
        r += ((a % p + p - b % p) % p) * ppow_[j];
        a /= p;
        b /= p;
    }
    return r;
}

Scalar Witt::wdigit(std::uint64_t w, int r) const {
    return static_cast<Scalar>((w / ppow_[r - 1]) % params().p);
}

bool Witt::weight_homogeneous(const SVec& v) const {
    for (auto& t : v)
        if (wt_[t.first] != wt_[v[0].first]) return false;
    return true;
}

std::uint64_t Witt::weight_of(const SVec& v) const {
    if (v.empty()) throw std::invalid_argument("weight of zero vector");
    if (!weight_homogeneous(v)) throw std::invalid_argument("vector is not a weight vector");
    return wt_[v[0].first];
}

int Witt::bracket_full(std::uint32_t a, std::uint32_t b, Term out[2]) const {
    const Superspace& S = *sp_;
    const Field& F = S.field();
    std::uint32_t fa = a / N_, fb = b / N_;
    int r = static_cast<int>(a % N_) + 1, s = static_cast<int>(b % N_) + 1;
    int k = 0;
    std::uint32_t g1, h;
    Scalar c1, c2;
    if (S.d_mono(r, fb, g1, c1) && S.mul_mono(fa, g1, h, c2)) {
        out[k++] = {h * N_ + (s - 1), F.mul(c1, c2)};
    }
    if (S.d_mono(s, fa, g1, c1) && S.mul_mono(fb, g1, h, c2)) {
        int pa = (S.parity(fa) + params().tau(r)) & 1;
        int pb = (S.parity(fb) + params().tau(s)) & 1;
        Scalar c = F.mul(c1, c2);
        if (!(pa & pb)) c = F.neg(c);
        std::uint32_t idx = h * N_ + (r - 1);
        if (k == 1 && out[0].first == idx) {
            out[0].second = F.add(out[0].second, c);
            if (out[0].second == 0) k = 0;
        } else {
            out[k++] = {idx, c};
            if (k == 2 && out[1].first < out[0].first) std::swap(out[0], out[1]);
        }
    }
    return k;
}

int Witt::bracket_basis(std::uint32_t i, std::uint32_t j, Term out[2]) const {
    int k = bracket_full(even_full_[i], even_full_[j], out);
    for (int q = 0; q < k; ++q) out[q].first = static_cast<std::uint32_t>(full_even_[out[q].first]);
    if (k == 2 && out[1].first < out[0].first) std::swap(out[0], out[1]);
    return k;
}

SVec Witt::bracket(const SVec& a, const SVec& b) const {
    const Field& F = field();
    SVec out;
    out.reserve(a.size() * b.size() * 2);
    Term t[2];
    for (auto [i, ci] : a)
        for (auto [j, cj] : b) {
            int k = bracket_basis(i, j, t);
            Scalar c = F.mul(ci, cj);
            for (int q = 0; q < k; ++q) out.push_back({t[q].first, F.mul(c, t[q].second)});
        }
    svec_normalize(out, F);
    return out;
}

SVec Witt::bracket_full_vec(const SVec& a, const SVec& b) const {
    const Field& F = field();
    SVec out;
    Term t[2];
    for (auto [i, ci] : a)
        for (auto [j, cj] : b) {
            int k = bracket_full(i, j, t);
            Scalar c = F.mul(ci, cj);
            for (int q = 0; q < k; ++q) out.push_back({t[q].first, F.mul(c, t[q].second)});
        }
    svec_normalize(out, F);
    return out;
}

std::int32_t Witt::lower(std::uint32_t i, const std::uint16_t* beta) const {
    std::uint32_t mo = mono(i);
    std::uint32_t off = 0;
    for (int q = 0; q < m(); ++q) {
        if (sp_->alpha(mo, q) < beta[q]) return -1;
        off += beta[q] * sp_->stride(q);
    }
    return full_even_[full(mo - (off << n()), dir(i))];
}

std::int32_t Witt::lower1(std::uint32_t i, int d) const {
    std::uint32_t mo = mono(i);
    if (sp_->alpha(mo, d - 1) == 0) return -1;
    return full_even_[full(mo - (sp_->stride(d - 1) << n()), dir(i))];
}

SVec Witt::even_to_full(const SVec& v) const {
    SVec r;
    r.reserve(v.size());
    for (auto [i, c] : v) r.push_back({even_full_[i], c});
    return r;
}

SVec Witt::full_to_even(const SVec& v) const {
    SVec r;
    r.reserve(v.size());
    for (auto [w, c] : v) {
        if (full_even_[w] < 0) throw std::invalid_argument("vector has odd components");
        r.push_back({static_cast<std::uint32_t>(full_even_[w]), c});
    }
    return r;
}

std::string Witt::basis_to_string(std::uint32_t i) const {
    return monomial_to_string(*sp_, mono(i)) + " D_" + std::to_string(dir(i));
}

namespace {

std::string field_string(const Witt& w, const SVec& full) {
    if (full.empty()) return "0";
    std::string s;
    bool first = true;
    for (int r = 1; r <= w.N(); ++r) {
        SVec t;
        for (auto [idx, c] : full)
            if (w.dir_of_full(idx) == r) t.push_back({w.mono_of_full(idx), c});
        if (t.empty()) continue;
        AlgElem f(w.space(), std::move(t));
        if (!first) s += " + ";
        first = false;
        if (f.terms().size() > 1)
            s += "(" + f.to_string() + ") D_" + std::to_string(r);
        else
            s += f.to_string() + " D_" + std::to_string(r);
    }
    return s;
}

}  // namespace

std::string Witt::to_string(const SVec& even) const { return field_string(*this, even_to_full(even)); }

// ---- VField ----

VField::VField(WittPtr w, SVec full_terms) : w_(std::move(w)), terms_(std::move(full_terms)) {
    svec_normalize(terms_, w_->field());
}

VField VField::from_even(WittPtr w, const SVec& even) {
    SVec f = w->even_to_full(even);
    return VField(std::move(w), std::move(f));
}

VField VField::basis(WittPtr w, const Monomial& mo, int r, Scalar c) {
    if (r < 1 || r > w->N()) throw std::out_of_range("direction not in Y");
    std::uint32_t id = w->sp().encode(mo);
    SVec t;
    if (c % w->params().p) t.push_back({w->full(id, r), static_cast<Scalar>(c % w->params().p)});
    return VField(std::move(w), std::move(t));
}

VField VField::from_coeff(WittPtr w, int r, const AlgElem& f) {
    if (r < 1 || r > w->N()) throw std::out_of_range("direction not in Y");
    SVec t;
    for (auto [mo, c] : f.terms()) t.push_back({w->full(mo, r), c});
    return VField(std::move(w), std::move(t));
}

AlgElem VField::coeff(int r) const {
    SVec t;
    for (auto [idx, c] : terms_)
        if (w_->dir_of_full(idx) == r) t.push_back({w_->mono_of_full(idx), c});
    return AlgElem(w_->space(), std::move(t));
}

int VField::degree() const {
    if (terms_.empty()) return -2;
    int d = w_->full_degree(terms_[0].first);
    for (auto& t : terms_)
        if (w_->full_degree(t.first) != d) return -2;
    return d;
}

int VField::parity() const {
    if (terms_.empty()) return -1;
    int p = w_->full_parity(terms_[0].first);
    for (auto& t : terms_)
        if (w_->full_parity(t.first) != p) return -1;
    return p;
}

SVec VField::to_even() const { return w_->full_to_even(terms_); }

VField VField::operator+(const VField& o) const {
    const WittPtr& w = w_ ? w_ : o.w_;
    return VField(w, svec_axpy(terms_, 1, o.terms_, w->field()));
}

VField VField::operator-(const VField& o) const {
    const WittPtr& w = w_ ? w_ : o.w_;
    return VField(w, svec_axpy(terms_, w->params().p - 1, o.terms_, w->field()));
}

VField VField::scaled(Scalar c) const {
    return VField(w_, svec_scale(terms_, c % w_->params().p, w_->field()));
}

std::string VField::to_string() const { return field_string(*w_, terms_); }

VField VField::parse(WittPtr w, const std::string& text) {
    // clauses: <coefficient> D_<r>, coefficient possibly parenthesized or empty
    SVec terms;
    std::size_t pos = 0;
    const Field& F = w->field();
    while (true) {
        std::size_t d = text.find("D_", pos);
        if (d == std::string::npos) {
            for (std::size_t k = pos; k < text.size(); ++k)
                if (!std::isspace(static_cast<unsigned char>(text[k])))
                    throw std::invalid_argument("trailing text without D_r");
            break;
        }
        std::string coef = text.substr(pos, d - pos);
        std::size_t e = d + 2;
        if (e >= text.size() || !std::isdigit(static_cast<unsigned char>(text[e])))
            throw std::invalid_argument("expected direction after D_");
        int r = 0;
        while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) r = r * 10 + (text[e++] - '0');
        // strip whitespace and a leading separator
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\n");
            std::size_t b = s.find_last_not_of(" \t\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        coef = trim(coef);
        Scalar sign = 1;
        if (!coef.empty() && (coef[0] == '+' || coef[0] == '-')) {
            if (coef[0] == '-') sign = F.neg(1);
            coef = trim(coef.substr(1));
        } else if (!terms.empty() && pos != 0) {
            throw std::invalid_argument("expected '+' between clauses");
        }
        if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
        if (coef.size() >= 2 && coef.front() == '(' && coef.back() == ')') coef = coef.substr(1, coef.size() - 2);
        AlgElem f = coef.empty() ? AlgElem::parse(w->space(), "1") : AlgElem::parse(w->space(), coef);
        VField clause = VField::from_coeff(w, r, f.scaled(sign));
        for (auto& t : clause.terms()) terms.push_back(t);
        pos = e;
    }
    return VField(w, std::move(terms));
}

AlgElem VField::apply(const AlgElem& g) const {
    const Superspace& S = w_->sp();
    const Field& F = S.field();
    SVec out;
    for (auto [idx, c] : terms_) {
        std::uint32_t f = w_->mono_of_full(idx);
        int r = w_->dir_of_full(idx);
        for (auto [gm, gc] : g.terms()) {
            std::uint32_t dg, h;
            Scalar c1, c2;
            if (S.d_mono(r, gm, dg, c1) && S.mul_mono(f, dg, h, c2))
                out.push_back({h, F.mul(F.mul(c, gc), F.mul(c1, c2))});
        }
    }
    return AlgElem(w_->space(), std::move(out));
}

VField bracket(const VField& a, const VField& b) {
    if (!(a.witt()->params() == b.witt()->params())) throw std::invalid_argument("params mismatch");
    return VField(a.witt(), a.witt()->bracket_full_vec(a.terms(), b.terms()));
}

// ---- distinguished families ----

SVec gamma_even(const Witt& w, int r) {
    Monomial mo;
    mo.alpha.assign(w.m(), 0);
    if (r <= w.m())
        mo.alpha[r - 1] = 1;
    else
        mo.u = 1u << (r - w.m() - 1);
    return {{static_cast<std::uint32_t>(w.even_index(w.sp().encode(mo), r)), 1}};
}

std::vector<SVec> distinguished_even(const Witt& w, WKind kind, int r) {
    std::vector<SVec> out;
    const Field& F = w.field();
    int m = w.m(), n = w.n(), N = w.N();
    auto mono = [&](std::vector<std::uint32_t> alpha, std::uint32_t u) {
        Monomial mo;
        mo.alpha = std::move(alpha);
        mo.u = u;
        return w.sp().encode(mo);
    };
    auto elem = [&](std::uint32_t mo, int dir) -> SVec {
        return {{static_cast<std::uint32_t>(w.even_index(mo, dir)), 1}};
    };
    std::vector<std::uint32_t> zero(m, 0);
    switch (kind) {
        case WKind::Gamma_r:
            if (r < 1 || r > N) throw std::out_of_range("direction not in Y");
            out.push_back(gamma_even(w, r));
            break;
        case WKind::Gamma:
        case WKind::GammaPrime:
        case WKind::GammaDoublePrime: {
            SVec s;
            int lo = kind == WKind::GammaPrime ? m + 1 : 1;
            int hi = kind == WKind::GammaDoublePrime ? m : N;
            for (int q = lo; q <= hi; ++q) s = svec_axpy(s, 1, gamma_even(w, q), F);
            out.push_back(s);
            break;
        }
        case WKind::M:
            for (int i = 1; i <= m; ++i)
                for (int j = 1; j <= m; ++j)
                    for (std::uint32_t q = 0; q <= w.params().pi[i - 1]; ++q) {
                        auto a = zero;
                        a[i - 1] = q;
                        out.push_back(elem(mono(a, 0), j));
                    }
            break;
        case WKind::N:
            for (int i = 1; i <= m; ++i)
                for (int k = m + 1; k <= N; ++k)
                    for (int l = m + 1; l <= N; ++l) {
                        auto a = zero;
                        a[i - 1] = 1;
                        out.push_back(elem(mono(a, 1u << (k - m - 1)), l));
                    }
            break;
        case WKind::P:
            for (int k = m + 1; k <= N; ++k)
                for (int l = k + 1; l <= N; ++l)
                    for (int i = 1; i <= m; ++i)
                        out.push_back(elem(mono(zero, (1u << (k - m - 1)) | (1u << (l - m - 1))), i));
            break;
        case WKind::G:
            for (std::uint32_t u = 0; u < (1u << n); ++u)
                for (int d = 1; d <= N; ++d) {
                    std::int32_t e = w.even_index(mono(zero, u), d);
                    if (e >= 0) out.push_back({{static_cast<std::uint32_t>(e), 1}});
                }
            break;
        case WKind::T:
            for (int q = 1; q <= N; ++q) out.push_back(gamma_even(w, q));
            break;
    }
    return out;
}

std::vector<VField> distinguished(const WittPtr& w, WKind kind, int r) {
    std::vector<VField> out;
    for (auto& v : distinguished_even(*w, kind, r)) out.push_back(VField::from_even(w, v));
    return out;
}

std::vector<VField> even_basis(const WittPtr& w, std::optional<int> degree) {
    if (degree && (*degree < -1 || *degree > w->xi() - 1)) throw std::out_of_range("degree out of range");
    std::vector<VField> out;
    if (degree) {
        for (auto i : w->degree_slice(*degree)) out.push_back(VField::from_even(w, {{i, 1}}));
    } else {
        for (std::uint32_t i = 0; i < w->dim(); ++i) out.push_back(VField::from_even(w, {{i, 1}}));
    }
    return out;
}

std::string even_ambient(const Witt& w) { return "W_even[" + w.params().label() + "]"; }

Subspace centralizer_in_even(const Witt& w, const std::vector<SVec>& S, int dlo, int dhi) {
    if (dlo > dhi) throw std::invalid_argument("empty degree range");
    const Field& F = w.field();
    Subspace out(w.params().p, even_ambient(w), w.dim());
    bool split = true;
    for (const auto& s : S)
        if (!s.empty() && !w.weight_homogeneous(s)) split = false;
    for (int d = std::max(dlo, -1); d <= std::min(dhi, w.xi() - 1); ++d) {
        std::vector<std::vector<std::uint32_t>> groups;
        if (split) {
            std::unordered_map<std::uint64_t, std::size_t> gi;
            for (auto i : w.degree_slice(d)) {
                auto [it, fresh] = gi.emplace(w.weight(i), groups.size());
                if (fresh) groups.emplace_back();
                groups[it->second].push_back(i);
            }
        } else {
            groups.push_back(w.degree_slice(d));
        }
        for (const auto& g : groups) {
            // K: current kernel, vectors over local indices of g
            std::vector<Vec> K;
            for (std::size_t q = 0; q < g.size(); ++q) K.push_back(Vec{{q, 1}});
            for (const auto& s : S) {
                if (K.empty()) break;
                if (s.empty()) continue;
                std::vector<SVec> img(g.size());
                bool any = false;
                for (std::size_t q = 0; q < g.size(); ++q) {
                    img[q] = w.bracket({{g[q], 1}}, s);
                    any = any || !img[q].empty();
                }
                if (!any) continue;
                std::vector<Vec> cols;
                for (const auto& k : K) {
                    SVec acc;
                    for (auto [q, c] : k) acc = svec_axpy(acc, c, img[q], F);
                    cols.push_back(to_vec(acc));
                }
                auto ker = kernel_of_columns(cols, F);
                std::vector<Vec> nk;
                for (const auto& comb : ker) {
                    Vec v;
                    for (auto [a, c] : comb) v = vec_axpy(v, c, K[a], F);
                    nk.push_back(v);
                }
                K = std::move(nk);
            }
            for (const auto& k : K) {
                Vec v;
                for (auto [q, c] : k) v.push_back({g[q], c});
                vec_normalize(v, F);
                out.insert(v);
            }
        }
    }
    return out;
}

Subspace bracket_closure(const Witt& w, const std::vector<SVec>& gens, bool* audit_ok) {
    Subspace S(w.params().p, even_ambient(w), w.dim());
    std::vector<SVec> work;
    for (const auto& g : gens)
        if (S.insert(to_vec(g))) work.push_back(g);
    std::vector<SVec> base = work;
    for (std::size_t q = 0; q < work.size() && S.rank() < w.dim(); ++q)
        for (const auto& g : base) {
            SVec b = w.bracket(work[q], g);
            if (!b.empty() && S.insert(to_vec(b))) work.push_back(std::move(b));
        }
    if (audit_ok) {
        *audit_ok = true;
        // the whole ambient space is trivially closed
        if (S.rank() < w.dim()) {
            const auto& rows = S.rows();
            for (std::size_t a = 0; a < rows.size() && *audit_ok; ++a)
                for (std::size_t b = a + 1; b < rows.size(); ++b)
                    if (!S.contains(to_vec(w.bracket(to_svec(rows[a]), to_svec(rows[b]))))) {
                        *audit_ok = false;
                        break;
                    }
        }
    }
    return S;
}

}  // namespace cartan
