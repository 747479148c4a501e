#include "cartan/superspace.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

namespace cartan {

Params Params::make(std::uint32_t p, int m, int n, std::vector<int> t) {
    if (p <= 3 || !is_prime(p)) throw std::invalid_argument("p must be prime > 3");
    if (m < 3 || n < 3) throw std::invalid_argument("m and n must be >= 3");
    if (static_cast<int>(t.size()) != m)
        throw std::invalid_argument("t must have exactly m entries");
    Params r;
    r.p = p;
    r.m = m;
    r.n = n;
    r.t = std::move(t);
    double total = 1;
    r.xi = n;
    for (int ti : r.t) {
        if (ti < 1) throw std::invalid_argument("t entries must be positive");
        std::uint64_t q = 1;
        for (int k = 0; k < ti; ++k) q *= p;
        total *= static_cast<double>(q);
        r.pi.push_back(static_cast<std::uint32_t>(q - 1));
        r.xi += static_cast<int>(q - 1);
        r.sum_t += ti;
    }
    if (n > 16 || total * static_cast<double>(1u << n) * (m + n) > 4.0e8)
        throw std::invalid_argument("parameters too large");
    return r;
}

std::string Params::label() const {
    std::ostringstream os;
    os << "p=" << p << " m=" << m << " n=" << n << " t=(";
    for (int i = 0; i < m; ++i) os << (i ? "," : "") << t[i];
    os << ")";
    return os.str();
}

SpacePtr Superspace::make(const Params& prm) { return std::make_shared<Superspace>(prm); }

Superspace::Superspace(const Params& prm) : prm_(prm), F_(prm.p) {
    int m = prm.m;
    stride_.assign(m, 1);
    for (int i = m - 1; i >= 0; --i) {
        stride_[i] = num_alpha_;
        num_alpha_ *= prm.pi[i] + 1;
    }
    digits_.assign(static_cast<std::size_t>(num_alpha_) * m, 0);
    alpha_deg_.assign(num_alpha_, 0);
    for (std::uint32_t a = 0; a < num_alpha_; ++a) {
        std::uint32_t rest = a;
        int deg = 0;
        for (int i = 0; i < m; ++i) {
            digits_[a * m + i] = static_cast<std::uint16_t>(rest / stride_[i]);
            rest %= stride_[i];
            deg += digits_[a * m + i];
        }
        alpha_deg_[a] = deg;
    }
    binom_.resize(m);
    for (int i = 0; i < m; ++i) {
        std::uint32_t w = prm.pi[i] + 1;
        if (static_cast<std::uint64_t>(w) * w > (1u << 22)) continue;
        binom_[i].assign(static_cast<std::size_t>(w) * w, 0);
        for (std::uint32_t a = 0; a < w; ++a)
            for (std::uint32_t b = 0; a + b < w; ++b)
                binom_[i][a * w + b] = binom_mod_p(a + b, a, prm.p);
    }
    int n = prm.n;
    if (n <= 8) {
        sign_.assign(static_cast<std::size_t>(1) << (2 * n), 1);
        for (std::uint32_t u = 0; u < (1u << n); ++u)
            for (std::uint32_t v = 0; v < (1u << n); ++v) {
                int inv = 0;
                for (int b = 0; b < n; ++b)
                    if (v >> b & 1) inv += __builtin_popcount(u >> (b + 1));
                sign_[(u << n) | v] = (inv & 1) ? -1 : 1;
            }
    }
}

int Superspace::ext_sign(std::uint32_t u, std::uint32_t v) const {
    if (!sign_.empty()) return sign_[(u << prm_.n) | v];
    int inv = 0;
    for (int b = 0; b < prm_.n; ++b)
        if (v >> b & 1) inv += __builtin_popcount(u >> (b + 1));
    return (inv & 1) ? -1 : 1;
}

Scalar Superspace::binom_pair(int i, std::uint32_t a, std::uint32_t b) const {
    if (a + b > prm_.pi[i]) return 0;
    if (!binom_[i].empty()) return binom_[i][a * (prm_.pi[i] + 1) + b];
    return binom_mod_p(a + b, a, prm_.p);
}

bool Superspace::mul_mono(std::uint32_t a, std::uint32_t b, std::uint32_t& out,
                          Scalar& c) const {
    std::uint32_t u = ext(a), v = ext(b);
    if (u & v) return false;
    const std::uint16_t* da = alpha_digits(alpha_index(a));
    const std::uint16_t* db = alpha_digits(alpha_index(b));
    Scalar coef = 1;
    for (int i = 0; i < prm_.m; ++i) {
        if (db[i] == 0) continue;
        Scalar x = binom_pair(i, da[i], db[i]);
        if (x == 0) return false;
        coef = F_.mul(coef, x);
    }
    if (ext_sign(u, v) < 0) coef = F_.neg(coef);
    out = ((alpha_index(a) + alpha_index(b)) << prm_.n) | u | v;
    c = coef;
    return true;
}

bool Superspace::d_mono(int r, std::uint32_t a, std::uint32_t& out, Scalar& c) const {
    if (r <= prm_.m) {
        int i = r - 1;
        if (alpha(a, i) == 0) return false;
        out = a - (stride_[i] << prm_.n);
        c = 1;
        return true;
    }
    int b = r - prm_.m - 1;
    std::uint32_t u = ext(a);
    if (!(u >> b & 1)) return false;
    out = a & ~(1u << b);
    c = (__builtin_popcount(u & ((1u << b) - 1)) & 1) ? prm_.p - 1 : 1;
    return true;
}

std::uint32_t Superspace::encode(const Monomial& mo) const {
    if (static_cast<int>(mo.alpha.size()) != prm_.m)
        throw DimensionError("monomial has wrong number of exponents");
    std::uint32_t ai = 0;
    for (int i = 0; i < prm_.m; ++i) {
        if (mo.alpha[i] > prm_.pi[i]) throw std::out_of_range("exponent exceeds pi");
        ai += mo.alpha[i] * stride_[i];
    }
    if (mo.u >> prm_.n) throw std::out_of_range("exterior index out of range");
    return (ai << prm_.n) | mo.u;
}

Monomial Superspace::decode(std::uint32_t mono) const {
    Monomial mo;
    mo.alpha.resize(prm_.m);
    for (int i = 0; i < prm_.m; ++i) mo.alpha[i] = alpha(mono, i);
    mo.u = ext(mono);
    return mo;
}

std::vector<std::uint32_t> Superspace::enumerate(std::optional<int> degree,
                                                 std::optional<int> par) const {
    if (degree && (*degree < 0 || *degree > prm_.xi))
        throw std::out_of_range("degree out of range");
    std::vector<std::uint32_t> out;
    for (std::uint32_t mo = 0; mo < num_monos(); ++mo) {
        if (degree && this->degree(mo) != *degree) continue;
        if (par && parity(mo) != *par) continue;
        out.push_back(mo);
    }
    return out;
}

std::vector<Monomial> enumerate_basis(const Params& prm, std::optional<int> degree,
                                      std::optional<int> parity) {
    Superspace sp(prm);
    std::vector<Monomial> out;
    for (auto mo : sp.enumerate(degree, parity)) out.push_back(sp.decode(mo));
    return out;
}

// ---- sparse vectors ----

void svec_normalize(SVec& v, const Field& F) {
    std::sort(v.begin(), v.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::uint32_t idx = v[i].first;
        Scalar s = 0;
        for (; i < v.size() && v[i].first == idx; ++i) s = F.add(s, v[i].second);
        if (s) v[w++] = {idx, s};
    }
    v.resize(w);
}

SVec svec_axpy(const SVec& a, Scalar c, const SVec& b, const Field& F) {
    SVec r;
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

SVec svec_scale(const SVec& a, Scalar c, const Field& F) {
    SVec r;
    if (c == 0) return r;
    r.reserve(a.size());
    for (auto [i, x] : a) r.push_back({i, F.mul(x, c)});
    return r;
}

// ---- AlgElem ----

AlgElem::AlgElem(SpacePtr sp, SVec terms) : sp_(std::move(sp)), terms_(std::move(terms)) {
    svec_normalize(terms_, sp_->field());
}

AlgElem AlgElem::monomial(SpacePtr sp, const Monomial& mo, Scalar c) {
    std::uint32_t id = sp->encode(mo);
    Scalar cc = c % sp->params().p;
    SVec v;
    if (cc) v.push_back({id, cc});
    return AlgElem(std::move(sp), std::move(v));
}

int AlgElem::parity() const {
    if (terms_.empty()) return -1;
    int p0 = sp_->parity(terms_[0].first);
    for (auto& [mo, c] : terms_)
        if (sp_->parity(mo) != p0) return -1;
    return p0;
}

int AlgElem::degree() const {
    if (terms_.empty()) return -1;
    int d0 = sp_->degree(terms_[0].first);
    for (auto& [mo, c] : terms_)
        if (sp_->degree(mo) != d0) return -1;
    return d0;
}

AlgElem AlgElem::operator+(const AlgElem& o) const {
    const SpacePtr& sp = sp_ ? sp_ : o.sp_;
    if (sp_ && o.sp_ && !(sp_->params() == o.sp_->params()))
        throw std::invalid_argument("params mismatch");
    return AlgElem(sp, svec_axpy(terms_, 1, o.terms_, sp->field()));
}

AlgElem AlgElem::operator-(const AlgElem& o) const {
    const SpacePtr& sp = sp_ ? sp_ : o.sp_;
    if (sp_ && o.sp_ && !(sp_->params() == o.sp_->params()))
        throw std::invalid_argument("params mismatch");
    return AlgElem(sp, svec_axpy(terms_, sp->params().p - 1, o.terms_, sp->field()));
}

AlgElem AlgElem::scaled(Scalar c) const {
    return AlgElem(sp_, svec_scale(terms_, c % sp_->params().p, sp_->field()));
}

std::string monomial_to_string(const Superspace& sp, std::uint32_t mono) {
    std::ostringstream os;
    os << "x^(";
    for (int i = 0; i < sp.m(); ++i) os << (i ? "," : "") << sp.alpha(mono, i);
    os << ")";
    std::uint32_t u = sp.ext(mono);
    if (u) {
        os << "x_{";
        bool first = true;
        for (int b = 0; b < sp.n(); ++b)
            if (u >> b & 1) {
                os << (first ? "" : ",") << sp.m() + b + 1;
                first = false;
            }
        os << "}";
    }
    return os.str();
}

std::string AlgElem::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (k) s += " + ";
        if (terms_[k].second != 1) s += std::to_string(terms_[k].second) + "*";
        s += monomial_to_string(*sp_, terms_[k].first);
    }
    return s;
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;
    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(const char* tok) {
        ws();
        std::size_t k = 0;
        while (tok[k] && i + k < s.size() && s[i + k] == tok[k]) ++k;
        if (tok[k]) return false;
        i += k;
        return true;
    }
    bool peek_digit() {
        ws();
        return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
    }
    long long number() {
        ws();
        if (!peek_digit()) throw std::invalid_argument("expected number at " + std::to_string(i));
        long long v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            v = v * 10 + (s[i++] - '0');
        return v;
    }
    std::vector<long long> list(char close) {
        std::vector<long long> out;
        ws();
        if (i < s.size() && s[i] == close) {
            ++i;
            return out;
        }
        for (;;) {
            out.push_back(number());
            if (eat(",")) continue;
            std::string c(1, close);
            if (!eat(c.c_str())) throw std::invalid_argument("expected list close");
            return out;
        }
    }
};

AlgElem parse_terms_impl(const SpacePtr& sp, Lexer& lx, const char* stop) {
    const Field& F = sp->field();
    SVec terms;
    bool first = true;
    for (;;) {
        lx.ws();
        if (lx.i >= lx.s.size() || (stop && lx.s.compare(lx.i, std::strlen(stop), stop) == 0))
            break;
        Scalar sign = 1;
        if (lx.eat("+")) {
        } else if (lx.eat("-")) {
            sign = F.neg(1);
        } else if (!first) {
            throw std::invalid_argument("expected '+' between terms");
        }
        first = false;
        Scalar coef = 1;
        bool any = false;
        if (lx.peek_digit()) {
            coef = F.reduce(lx.number());
            any = true;
            lx.eat("*");
        }
        Monomial mo;
        mo.alpha.assign(sp->m(), 0);
        if (lx.eat("x^(")) {
            auto a = lx.list(')');
            if (static_cast<int>(a.size()) != sp->m())
                throw DimensionError("monomial has wrong number of exponents");
            for (int k = 0; k < sp->m(); ++k) mo.alpha[k] = static_cast<std::uint32_t>(a[k]);
            any = true;
        }
        if (lx.eat("x_{")) {
            auto ks = lx.list('}');
            std::vector<long long> sorted = ks;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t q = 0; q < sorted.size(); ++q) {
                long long k = sorted[q];
                if (k <= sp->m() || k > sp->m() + sp->n())
                    throw std::out_of_range("exterior index out of range");
                if (q && sorted[q - 1] == k) {
                    coef = 0;
                    continue;
                }
                mo.u |= 1u << (k - sp->m() - 1);
            }
            // sign of sorting the written order
            int inv = 0;
            for (std::size_t a = 0; a < ks.size(); ++a)
                for (std::size_t b = a + 1; b < ks.size(); ++b)
                    if (ks[a] > ks[b]) ++inv;
            if (inv & 1) coef = F.neg(coef);
            any = true;
        }
        if (!any) throw std::invalid_argument("empty term");
        Scalar c = F.mul(coef, sign);
        if (c) terms.push_back({sp->encode(mo), c});
    }
    return AlgElem(sp, std::move(terms));
}

}  // namespace

AlgElem AlgElem::parse(SpacePtr sp, const std::string& text) {
    Lexer lx{text};
    AlgElem r = parse_terms_impl(sp, lx, nullptr);
    lx.ws();
    if (lx.i != text.size()) throw std::invalid_argument("trailing characters");
    return r;
}

AlgElem mul(const AlgElem& f, const AlgElem& g) {
    if (!f.space() || !g.space()) return f.space() ? AlgElem(f.space()) : AlgElem(g.space());
    if (!(f.space()->params() == g.space()->params()))
        throw std::invalid_argument("params mismatch");
    const Superspace& sp = *f.space();
    SVec out;
    for (auto [a, ca] : f.terms())
        for (auto [b, cb] : g.terms()) {
            std::uint32_t r;
            Scalar c;
            if (sp.mul_mono(a, b, r, c))
                out.push_back({r, sp.field().mul(c, sp.field().mul(ca, cb))});
        }
    return AlgElem(f.space(), std::move(out));
}

AlgElem apply_D(int r, const AlgElem& f) {
    const Superspace& sp = *f.space();
    if (r < 1 || r > sp.m() + sp.n()) throw std::out_of_range("direction not in Y");
    SVec out;
    for (auto [a, ca] : f.terms()) {
        std::uint32_t o;
        Scalar c;
        if (sp.d_mono(r, a, o, c)) out.push_back({o, sp.field().mul(c, ca)});
    }
    return AlgElem(f.space(), std::move(out));
}

AlgElem apply_gamma(int r, const AlgElem& f) {
    const Superspace& sp = *f.space();
    if (r < 1 || r > sp.m() + sp.n()) throw std::out_of_range("direction not in Y");
    SVec out;
    for (auto [a, ca] : f.terms()) {
        if (r <= sp.m()) {
            Scalar c = sp.field().mul(sp.alpha(a, r - 1) % sp.params().p, ca);
            if (c) out.push_back({a, c});
        } else if (sp.ext(a) >> (r - sp.m() - 1) & 1) {
            out.push_back({a, ca});
        }
    }
    return AlgElem(f.space(), std::move(out));
}

}  // namespace cartan
