#include "cartan/linalg.hpp"

#include <algorithm>
#include <memory>

namespace cartan {

Vec vec_axpy(const Vec& a, Scalar c, const Vec& b, const Field& F) {
    Vec r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            Scalar s = F.mul(c, b[j].second);
            if (s) r.push_back({b[j].first, s});
            ++j;
        } else {
            Scalar s = F.add(a[i].second, F.mul(c, b[j].second));
            if (s) r.push_back({a[i].first, s});
            ++i;
            ++j;
        }
    }
    return r;
}

Vec vec_scale(const Vec& a, Scalar c, const Field& F) {
    Vec r;
    if (c == 0) return r;
    r.reserve(a.size());
    for (auto [i, x] : a) r.push_back({i, F.mul(x, c)});
    return r;
}

void vec_normalize(Vec& v, const Field& F) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < v.size();) {
        Col idx = v[i].first;
        Scalar s = 0;
        for (; i < v.size() && v[i].first == idx; ++i) s = F.add(s, v[i].second);
        if (s) v[w++] = {idx, s};
    }
    v.resize(w);
}

Vec to_vec(const SVec& v) {
    Vec r;
    r.reserve(v.size());
    for (auto [i, c] : v) r.push_back({i, c});
    return r;
}

SVec to_svec(const Vec& v) {
    SVec r;
    r.reserve(v.size());
    for (auto [i, c] : v) r.push_back({static_cast<std::uint32_t>(i), c});
    return r;
}

// ---- Subspace ----

Subspace::Subspace(std::uint32_t p, std::string ambient, std::optional<Col> ncols)
    : F_(std::make_shared<Field>(p)), ambient_(std::move(ambient)) {
    if (ncols && *ncols <= (Col(1) << 24)) {
        dense_ = true;
        dense_pivot_.assign(*ncols, -1);
    }
}

const Vec* Subspace::pivot_row(Col c) const {
    if (dense_) {
        if (c >= dense_pivot_.size()) return nullptr;
        std::int32_t k = dense_pivot_[c];
        return k < 0 ? nullptr : &rows_[k];
    }
    auto it = sparse_pivot_.find(c);
    return it == sparse_pivot_.end() ? nullptr : &rows_[it->second];
}

void Subspace::set_pivot(Col c, std::uint32_t idx) {
    if (dense_) {
        if (c >= dense_pivot_.size()) dense_pivot_.resize(c + 1, -1);
        dense_pivot_[c] = static_cast<std::int32_t>(idx);
    } else {
        sparse_pivot_[c] = idx;
    }
}

Vec Subspace::reduce(const Vec& v) const {
    if (rows_.empty()) return v;
    const Field& F = *F_;
    Vec r = v;
    std::size_t pos = 0;
    while (pos < r.size()) {
        const Vec* row = pivot_row(r[pos].first);
        if (!row) {
            ++pos;
            continue;
        }
        Scalar c = F.neg(r[pos].second);
        // entries before pos are untouched: row's columns are all >= its pivot
        Vec head(r.begin(), r.begin() + pos);
        Vec tail(r.begin() + pos, r.end());
        tail = vec_axpy(tail, c, *row, F);
        head.insert(head.end(), tail.begin(), tail.end());
        r.swap(head);
    }
    return r;
}

bool Subspace::insert(const Vec& v) { return insert(v, nullptr); }

bool Subspace::insert(const Vec& v, Vec* remainder) {
    if (!F_) throw std::logic_error("Subspace not initialized");
    Vec r = reduce(v);
    if (remainder) *remainder = r;
    if (r.empty()) return false;
    Scalar inv = F_->inv(r[0].second);
    r = vec_scale(r, inv, *F_);
    set_pivot(r[0].first, static_cast<std::uint32_t>(rows_.size()));
    rows_.push_back(std::move(r));
    rref_valid_ = false;
    return true;
}

bool Subspace::contains_all(const Subspace& o) const {
    for (const auto& r : o.rows_)
        if (!contains(r)) return false;
    return true;
}

std::vector<Col> Subspace::pivots() const {
    std::vector<Col> out;
    for (const auto& r : rows()) out.push_back(r[0].first);
    return out;
}

const std::vector<Vec>& Subspace::rows() const {
    if (rref_valid_) return rref_;
    const Field& F = *F_;
    std::vector<Vec> rs = rows_;
    std::sort(rs.begin(), rs.end(), [](const Vec& a, const Vec& b) { return a[0].first < b[0].first; });
    std::unordered_map<Col, std::size_t> piv;
    for (std::size_t k = 0; k < rs.size(); ++k) piv[rs[k][0].first] = k;
    for (std::size_t k = rs.size(); k-- > 0;) {
        Vec& row = rs[k];
        // rows with larger pivots are already fully reduced
        std::size_t pos = 1;
        while (pos < row.size()) {
            auto it = piv.find(row[pos].first);
            if (it == piv.end()) {
                ++pos;
                continue;
            }
            Scalar c = F.neg(row[pos].second);
            Vec head(row.begin(), row.begin() + pos);
            Vec tail(row.begin() + pos, row.end());
            tail = vec_axpy(tail, c, rs[it->second], F);
            head.insert(head.end(), tail.begin(), tail.end());
            row.swap(head);
        }
    }
    rref_ = std::move(rs);
    rref_valid_ = true;
    return rref_;
}

std::vector<Vec> Subspace::kernel(Col ncols) const {
    const auto& rs = rows();
    const Field& F = *F_;
    std::vector<char> is_piv(ncols, 0);
    for (const auto& r : rs) {
        if (r[0].first >= ncols) throw std::out_of_range("kernel: column out of range");
        is_piv[r[0].first] = 1;
    }
    // for each free column f: e_f - sum_{rows with entry at f} entry * e_pivot
    std::vector<Vec> by_free(ncols);
    for (const auto& r : rs)
        for (std::size_t k = 1; k < r.size(); ++k)
            by_free[r[k].first].push_back({r[0].first, F.neg(r[k].second)});
    std::vector<Vec> out;
    for (Col f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        Vec v = by_free[f];
        v.push_back({f, 1});
        vec_normalize(v, F);
        out.push_back(std::move(v));
    }
    return out;
}

void Subspace::dump(std::ostream& os) const {
    const auto& rs = rows();
    std::size_t nnz = 0;
    for (const auto& r : rs) nnz += r.size();
    os << "# ambient " << ambient_ << "\n";
    os << "# p " << F_->p() << " rank " << rs.size() << " nnz " << nnz << "\n";
    for (std::size_t k = 0; k < rs.size(); ++k)
        for (auto [c, x] : rs[k]) os << k << ' ' << c << ' ' << x << '\n';
}

// ---- LinOp ----

Vec LinOp::apply(const Vec& x, const Field& F) const {
    if (fn) return fn(x);
    Vec out;
    for (auto [j, c] : x) {
        if (j >= cols.size()) throw DimensionError("LinOp: index outside domain");
        for (auto [i, a] : cols[j]) out.push_back({i, F.mul(a, c)});
    }
    vec_normalize(out, F);
    return out;
}

LinOp LinOp::identity(Col n, std::string tag) {
    LinOp op;
    op.domain = op.codomain = std::move(tag);
    op.dom_dim = n;
    op.fn = [](const Vec& x) { return x; };
    return op;
}

LinOp LinOp::from_function(Col n, std::function<Vec(const Vec&)> f, std::string tag) {
    LinOp op;
    op.domain = op.codomain = std::move(tag);
    op.dom_dim = n;
    op.fn = std::move(f);
    return op;
}

Vec TrackedEchelon::reduce(Vec v, Vec& h) const {
    std::size_t pos = 0;
    while (pos < v.size()) {
        auto it = piv.find(v[pos].first);
        if (it == piv.end()) {
            ++pos;
            continue;
        }
        Scalar c = F.neg(v[pos].second);
        Vec head(v.begin(), v.begin() + pos);
        Vec tail(v.begin() + pos, v.end());
        tail = vec_axpy(tail, c, rows[it->second], F);
        head.insert(head.end(), tail.begin(), tail.end());
        v.swap(head);
        h = vec_axpy(h, c, hist[it->second], F);
    }
    return v;
}

bool TrackedEchelon::insert(Vec v, Vec h, Vec* kernel_out) {
    v = reduce(std::move(v), h);
    if (v.empty()) {
        if (kernel_out) *kernel_out = std::move(h);
        return false;
    }
    Scalar inv = F.inv(v[0].second);
    piv[v[0].first] = rows.size();
    rows.push_back(vec_scale(v, inv, F));
    hist.push_back(vec_scale(h, inv, F));
    return true;
}

std::optional<Vec> TrackedEchelon::express(const Vec& v) const {
    Vec h;
    Vec rem = reduce(v, h);
    if (!rem.empty()) return std::nullopt;
    return vec_scale(h, F.neg(1), F);
}

std::vector<Vec> kernel_of_columns(const std::vector<Vec>& cols, const Field& F) {
    TrackedEchelon te{F};
    std::vector<Vec> ker;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        Vec k;
        if (!te.insert(cols[j], Vec{{j, 1}}, &k)) ker.push_back(std::move(k));
    }
    return ker;
}

Vec solve(const LinOp& A, const Vec& b, const Field& F) {
    TrackedEchelon te{F};
    for (Col j = 0; j < A.dom_dim; ++j) te.insert(A.apply(Vec{{j, 1}}, F), Vec{{j, 1}}, nullptr);
    Vec h;
    Vec rem = te.reduce(b, h);
    if (!rem.empty()) throw NoSolution();
    // b + sum c_k r_k = 0 with r_k = A hist_k, so x = -h
    return vec_scale(h, F.neg(1), F);
}

// ---- generalized inverse solver ----

Vec lemma_solve(const std::vector<LinOp>& As, const std::vector<LinOp>& Bs,
                const std::vector<Vec>& vs, const Field& F, LemmaOptions opt) {
    std::size_t k = As.size();
    if (Bs.size() != k || vs.size() != k) throw DimensionError("lemma_solve: list sizes differ");
    if (k == 0) return {};
    if (opt.check_hypotheses) {
        Col N = As[0].dom_dim;
        for (std::size_t i = 0; i < k; ++i)
            for (Col e = 0; e < N; ++e) {
                Vec x{{e, 1}};
                Vec ax = As[i].apply(x, F);
                if (As[i].apply(Bs[i].apply(ax, F), F) != ax) throw HypothesisViolated("AiBiAi=Ai");
                for (std::size_t j = 0; j < k; ++j) {
                    if (j == i) continue;
                    if (j > i && As[i].apply(As[j].apply(x, F), F) != As[j].apply(ax, F))
                        throw HypothesisViolated("i");
                    if (As[i].apply(Bs[j].apply(x, F), F) != Bs[j].apply(ax, F))
                        throw HypothesisViolated("iii");
                }
            }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j)
                if (As[i].apply(vs[j], F) != As[j].apply(vs[i], F)) throw HypothesisViolated("ii");
            if (As[i].apply(Bs[i].apply(vs[i], F), F) != vs[i]) throw HypothesisViolated("iii");
        }
    }
    Vec w = Bs[0].apply(vs[0], F);
    for (std::size_t i = 1; i < k; ++i) {
        Vec diff = vec_axpy(vs[i], F.neg(1), As[i].apply(w, F), F);
        w = vec_axpy(w, 1, Bs[i].apply(diff, F), F);
    }
    for (std::size_t i = 0; i < k; ++i)
        if (As[i].apply(w, F) != vs[i]) throw std::logic_error("lemma_solve postcondition failed");
    return w;
}

namespace {

Vec d_op(const Superspace& sp, int r, const Vec& x) {
    Vec out;
    for (auto [mo, c] : x) {
        std::uint32_t o;
        Scalar s;
        if (sp.d_mono(r, static_cast<std::uint32_t>(mo), o, s)) out.push_back({o, sp.field().mul(s, c)});
    }
    vec_normalize(out, sp.field());
    return out;
}

Vec raise_op(const Superspace& sp, int i, const Vec& x) {
    Vec out;
    std::uint32_t st = sp.stride(i - 1) << sp.n();
    for (auto [mo, c] : x)
        if (sp.alpha(static_cast<std::uint32_t>(mo), i - 1) < sp.params().pi[i - 1])
            out.push_back({mo + st, c});
    vec_normalize(out, sp.field());
    return out;
}

Vec gamma_op(const Superspace& sp, int q, const Vec& x) {
    Vec out;
    for (auto [mo, c] : x)
        if (sp.ext(static_cast<std::uint32_t>(mo)) >> (q - sp.m() - 1) & 1) out.push_back({mo, c});
    return out;
}

}  // namespace

AlgElem integrate_divided(const std::vector<AlgElem>& fs, LemmaOptions opt) {
    if (fs.empty()) throw std::invalid_argument("integrate_divided: empty input");
    SpacePtr sp = fs[0].space();
    const Superspace& S = *sp;
    const Field& F = S.field();
    int r = static_cast<int>(fs.size());
    if (r > S.m()) throw DimensionError("integrate_divided: more functions than even directions");
    if (opt.check_hypotheses) {
        for (int i = 1; i <= r; ++i)
            for (int j = i + 1; j <= r; ++j)
                if (!(apply_D(i, fs[j - 1]) == apply_D(j, fs[i - 1]))) throw HypothesisViolated("a");
        for (int i = 1; i <= r; ++i) {
            AlgElem g = fs[i - 1];
            for (std::uint32_t k = 0; k < S.params().pi[i - 1] && !g.is_zero(); ++k) g = apply_D(i, g);
            if (!g.is_zero()) throw HypothesisViolated("b");
        }
    }
    std::vector<LinOp> As, Bs;
    std::vector<Vec> vs;
    Col N = S.num_monos();
    for (int i = 1; i <= r; ++i) {
        As.push_back(LinOp::from_function(N, [&S, i](const Vec& x) { return d_op(S, i, x); }));
        Bs.push_back(LinOp::from_function(N, [&S, i](const Vec& x) { return raise_op(S, i, x); }));
        vs.push_back(to_vec(fs[i - 1].terms()));
    }
    // the operator identities are checked on the support only when requested;
    // they are structural for D_i and the raising operator
    LemmaOptions inner = opt;
    inner.check_hypotheses = false;
    Vec f = lemma_solve(As, Bs, vs, F, inner);
    return AlgElem(sp, to_svec(f));
}

AlgElem integrate_exterior(const std::vector<AlgElem>& fs, const std::vector<int>& qs,
                           LemmaOptions opt) {
    if (fs.empty() || fs.size() != qs.size())
        throw std::invalid_argument("integrate_exterior: bad input sizes");
    SpacePtr sp = fs[0].space();
    const Superspace& S = *sp;
    const Field& F = S.field();
    for (int q : qs)
        if (q <= S.m() || q > S.m() + S.n()) throw std::out_of_range("direction not in Y_1");
    for (const auto& f : fs)
        for (auto [mo, c] : f.terms())
            if (S.alpha_index(mo) != 0) throw std::invalid_argument("integrate_exterior: element not in Lambda(n)");
    std::size_t k = fs.size();
    if (opt.check_hypotheses) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j)
                if (!(apply_gamma(qs[i], fs[j]) == apply_gamma(qs[j], fs[i]))) throw HypothesisViolated("a");
            if (!(apply_gamma(qs[i], fs[i]) == fs[i])) throw HypothesisViolated("b");
        }
    }
    std::vector<LinOp> As, Bs;
    std::vector<Vec> vs;
    Col N = S.num_monos();
    for (std::size_t i = 0; i < k; ++i) {
        int q = qs[i];
        As.push_back(LinOp::from_function(N, [&S, q](const Vec& x) { return gamma_op(S, q, x); }));
        Bs.push_back(LinOp::identity(N));
        vs.push_back(to_vec(fs[i].terms()));
    }
    LemmaOptions inner = opt;
    inner.check_hypotheses = false;
    Vec f = lemma_solve(As, Bs, vs, F, inner);
    return AlgElem(sp, to_svec(f));
}

}  // namespace cartan
