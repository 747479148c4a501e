#include "cartan/axioms.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace cartan {

namespace {

class Suite {
public:
    explicit Suite(std::string name) : t0_(std::chrono::steady_clock::now()) { r_.name = std::move(name); }
    // records the first failure; describe is only called then
    void check(bool ok, const std::function<std::string()>& describe) {
        ++r_.checked;
        if (!ok && r_.pass) {
            r_.pass = false;
            r_.failure = describe();
        }
    }
    SuiteResult done() {
        r_.millis = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0_).count();
        return r_;
    }

private:
    SuiteResult r_;
    std::chrono::steady_clock::time_point t0_;
};

// Bracket on full coordinates; with flip the second term gets the wrong sign.
struct Bracket {
    const Witt& W;
    bool flip;

    SVec full(const SVec& a, const SVec& b) const {
        if (!flip) return W.bracket_full_vec(a, b);
        const Superspace& S = W.sp();
        const Field& F = W.field();
        int N = W.N();
        SVec out;
        for (auto [i, ci] : a)
            for (auto [j, cj] : b) {
                std::uint32_t fa = i / N, fb = j / N, g, h;
                int r = W.dir_of_full(i), s = W.dir_of_full(j);
                Scalar c1, c2, c = F.mul(ci, cj);
                if (S.d_mono(r, fb, g, c1) && S.mul_mono(fa, g, h, c2))
                    out.push_back({W.full(h, s), F.mul(c, F.mul(c1, c2))});
                if (S.d_mono(s, fa, g, c1) && S.mul_mono(fb, g, h, c2)) {
                    Scalar x = F.mul(c, F.mul(c1, c2));
                    if (W.full_parity(i) & W.full_parity(j)) x = F.neg(x);
                    out.push_back({W.full(h, r), x});
                }
            }
        svec_normalize(out, F);
        return out;
    }
    SVec even(const SVec& a, const SVec& b) const {
        if (!flip) return W.bracket(a, b);
        return W.full_to_even(full(W.even_to_full(a), W.even_to_full(b)));
    }
};

std::string fstr(const WittPtr& w, std::uint32_t full) { return VField(w, {{full, 1}}).to_string(); }
std::string mstr(const Superspace& sp, std::uint32_t mo) { return monomial_to_string(sp, mo); }

int sgn_pow(int e) { return (e & 1) ? -1 : 1; }

}  // namespace

std::vector<SuiteResult> run_axioms(const Engine& eng, const AxiomOptions& opt) {
    const WittPtr& wp = eng.witt();
    const Witt& W = *wp;
    const Superspace& sp = W.sp();
    const SpacePtr& spp = W.space();
    const Field& F = W.field();
    const Params& P = W.params();
    const int m = P.m, N = W.N();
    std::mt19937_64 rng(opt.seed);
    Bracket br{W, opt.sign_flip};
    std::vector<SuiteResult> out;
    auto signed_c = [&](int s, Scalar c) { return s < 0 ? F.neg(c) : c; };
    auto low = [&](int maxdeg) {
        std::vector<std::uint32_t> v;
        for (std::uint32_t a = 0; a < sp.num_monos(); ++a)
            if (sp.degree(a) <= maxdeg) v.push_back(a);
        return v;
    };

    {
        Suite s("algebra.supercommutative");
        auto test = [&](std::uint32_t a, std::uint32_t b) {
            std::uint32_t r1, r2;
            Scalar c1 = 0, c2 = 0;
            bool z1 = sp.mul_mono(a, b, r1, c1), z2 = sp.mul_mono(b, a, r2, c2);
            bool ok = z1 == z2 && (!z1 || (r1 == r2 && c1 == signed_c(sgn_pow(sp.parity(a) * sp.parity(b)), c2)));
            s.check(ok, [&] { return mstr(sp, a) + " , " + mstr(sp, b); });
        };
        auto L = low(3);
        for (auto a : L)
            for (auto b : L) test(a, b);
        for (std::size_t k = 0; k < opt.samples; ++k) test(rng() % sp.num_monos(), rng() % sp.num_monos());
        out.push_back(s.done());
    }
    {
        Suite s("algebra.associative");
        auto L = low(4);
        auto prod = [&](const AlgElem& f, const AlgElem& g) { return mul(f, g); };
        std::vector<AlgElem> E;
        for (auto a : L) E.push_back(AlgElem(spp, {{a, 1}}));
        for (std::size_t i = 0; i < E.size(); ++i)
            for (std::size_t j = 0; j < E.size(); ++j) {
                AlgElem ij = prod(E[i], E[j]);
                for (std::size_t k = 0; k < E.size(); ++k)
                    s.check(prod(ij, E[k]) == prod(E[i], prod(E[j], E[k])), [&] {
                        return E[i].to_string() + " , " + E[j].to_string() + " , " + E[k].to_string();
                    });
            }
        out.push_back(s.done());
    }
    {
        Suite s("algebra.D_superderivation");
        auto L = low(3);
        for (int r = 1; r <= N; ++r)
            for (auto a : L)
                for (auto b : L) {
                    AlgElem f(spp, {{a, 1}}), g(spp, {{b, 1}});
                    AlgElem lhs = apply_D(r, mul(f, g));
                    AlgElem rhs = mul(apply_D(r, f), g) +
                                  mul(f, apply_D(r, g)).scaled(signed_c(sgn_pow(P.tau(r) * sp.parity(a)), 1));
                    s.check(lhs == rhs, [&] { return "D_" + std::to_string(r) + " on " + f.to_string() + " * " + g.to_string(); });
                }
        out.push_back(s.done());
    }
    {
        Suite s("algebra.gamma");
        for (std::uint32_t a = 0; a < sp.num_monos(); ++a) {
            AlgElem f(spp, {{a, 1}});
            auto why = [&] { return mstr(sp, a); };
            AlgElem sum(spp);
            for (int r = 1; r <= N; ++r) {
                AlgElem g = apply_gamma(r, f);
                sum = sum + g;
                Scalar ev = r <= m ? sp.alpha(a, r - 1) % P.p : ((sp.ext(a) >> (r - m - 1)) & 1);
                s.check(g == f.scaled(ev), why);
                if (r > m) s.check(apply_gamma(r, g) == g, why);
                if (r <= m) {
                    AlgElem h = f;
                    for (std::uint32_t q = 0; q < P.p; ++q) h = apply_gamma(r, h);
                    s.check(h == g, why);
                }
            }
            s.check(sum == f.scaled(static_cast<Scalar>(sp.degree(a) % P.p)), why);
        }
        out.push_back(s.done());
    }
    {
        Suite s("W.jacobi");
        std::vector<std::uint32_t> L;
        for (int d = -1; d <= 2; ++d)
            for (auto i : W.degree_slice(d)) L.push_back(i);
        auto jac = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
            SVec A{{a, 1}}, B{{b, 1}}, C{{c, 1}};
            SVec j = br.even(A, br.even(B, C));
            j = svec_axpy(j, 1, br.even(B, br.even(C, A)), F);
            j = svec_axpy(j, 1, br.even(C, br.even(A, B)), F);
            s.check(j.empty(), [&] {
                return W.basis_to_string(a) + " , " + W.basis_to_string(b) + " , " + W.basis_to_string(c);
            });
        };
        auto anti = [&](std::uint32_t a, std::uint32_t b) {
            SVec ab = br.even({{a, 1}}, {{b, 1}});
            SVec ba = br.even({{b, 1}}, {{a, 1}});
            bool graded = true;
            for (auto [e, c] : ab) graded = graded && W.degree(e) == W.degree(a) + W.degree(b);
            s.check(graded && svec_axpy(ab, 1, ba, F).empty(),
                    [&] { return W.basis_to_string(a) + " , " + W.basis_to_string(b); });
        };
        for (std::size_t x = 0; x < L.size(); ++x)
            for (std::size_t y = x; y < L.size(); ++y) {
                anti(L[x], L[y]);
                for (std::size_t z = y + 1; z < L.size(); ++z) jac(L[x], L[y], L[z]);
            }
        for (std::size_t k = 0; k < opt.samples; ++k) {
            std::uint32_t a = rng() % W.dim(), b = rng() % W.dim(), c = rng() % W.dim();
            anti(a, b);
            jac(a, b, c);
        }
        out.push_back(s.done());
    }
    {
        Suite s("W.super_jacobi");
        for (std::size_t k = 0; k < opt.samples; ++k) {
            std::uint32_t a = rng() % W.num_full(), b = rng() % W.num_full(), c = rng() % W.num_full();
            int pa = W.full_parity(a), pb = W.full_parity(b), pc = W.full_parity(c);
            SVec A{{a, 1}}, B{{b, 1}}, C{{c, 1}};
            SVec j = svec_scale(br.full(A, br.full(B, C)), signed_c(sgn_pow(pa * pc), 1), F);
            j = svec_axpy(j, signed_c(sgn_pow(pb * pa), 1), br.full(B, br.full(C, A)), F);
            j = svec_axpy(j, signed_c(sgn_pow(pc * pb), 1), br.full(C, br.full(A, B)), F);
            SVec anti = svec_axpy(br.full(A, B), signed_c(sgn_pow(pa * pb), 1), br.full(B, A), F);
            s.check(j.empty() && anti.empty(),
                    [&] { return fstr(wp, a) + " , " + fstr(wp, b) + " , " + fstr(wp, c); });
        }
        out.push_back(s.done());
    }
    {
        Suite s("W.torus_eigen");
        SVec Gam = distinguished_even(W, WKind::Gamma)[0];
        SVec Gp = distinguished_even(W, WKind::GammaPrime)[0];
        SVec Gpp = distinguished_even(W, WKind::GammaDoublePrime)[0];
        for (std::uint32_t i = 0; i < W.dim(); ++i) {
            SVec e{{i, 1}};
            auto why = [&] { return W.basis_to_string(i); };
            Scalar d = F.reduce(W.degree(i));
            s.check(W.bracket(Gam, e) == svec_scale(e, d, F), why);
            if (W.dir(i) <= m) {
                Scalar a = 0;
                for (int q = 0; q < m; ++q) a += sp.alpha(W.mono(i), q);
                s.check(W.bracket(Gpp, e) == svec_scale(e, F.reduce(static_cast<std::int64_t>(a) - 1), F), why);
            }
            bool in_G = true;
            for (int q = 0; q < m; ++q) in_G = in_G && sp.alpha(W.mono(i), q) == 0;
            if (in_G) {
                int r = W.degree(i);
                s.check(W.bracket(Gp, e) == svec_scale(e, F.reduce(r % 2 ? r + 1 : r), F), why);
            }
        }
        for (std::uint32_t f = 0; f < W.num_full(); ++f)
            for (int r = 1; r <= N; ++r) {
                SVec g = W.even_to_full(gamma_even(W, r));
                SVec b = W.bracket_full_vec(g, {{f, 1}});
                s.check(b.empty() || (b.size() == 1 && b[0].first == f), [&] { return fstr(wp, f); });
            }
        // odd-degree part of G is abelian
        std::vector<std::uint32_t> O;
        for (std::uint32_t i = 0; i < W.dim(); ++i) {
            bool in_G = true;
            for (int q = 0; q < m; ++q) in_G = in_G && sp.alpha(W.mono(i), q) == 0;
            if (in_G && (W.degree(i) & 1)) O.push_back(i);
        }
        for (auto a : O)
            for (auto b : O)
                s.check(W.bracket({{a, 1}}, {{b, 1}}).empty(),
                        [&] { return W.basis_to_string(a) + " , " + W.basis_to_string(b); });
        out.push_back(s.done());
    }
    {
        Suite s("S.D_k_commutes_with_D_rs");
        auto L = low(3);
        for (int k = 1; k <= N; ++k)
            for (int r = 1; r <= N; ++r)
                for (int q = 1; q <= N; ++q)
                    for (auto a : L) {
                        AlgElem f(spp, {{a, 1}});
                        VField Dk = VField::basis(wp, sp.decode(0), k);
                        VField lhs = bracket(Dk, d_rs(wp, r, q, f));
                        VField rhs = d_rs(wp, r, q, apply_D(k, f)).scaled(signed_c(sgn_pow(P.tau(k) * P.tau(r)), 1));
                        s.check(lhs == rhs, [&] {
                            return "k=" + std::to_string(k) + " r=" + std::to_string(r) + " s=" + std::to_string(q) +
                                   " f=" + f.to_string();
                        });
                    }
        out.push_back(s.done());
    }
    {
        Suite s("S.divergence_superderivation");
        auto test = [&](std::uint32_t a, std::uint32_t b) {
            VField D(wp, {{a, 1}}), E(wp, {{b, 1}});
            int pd = W.full_parity(a), pe = W.full_parity(b);
            AlgElem lhs = divergence(bracket(D, E));
            AlgElem rhs = D.apply(divergence(E)) - E.apply(divergence(D)).scaled(signed_c(sgn_pow(pd * pe), 1));
            s.check(lhs == rhs, [&] { return fstr(wp, a) + " , " + fstr(wp, b); });
        };
        std::vector<std::uint32_t> L;
        for (std::uint32_t f = 0; f < W.num_full(); ++f)
            if (W.full_degree(f) <= 0) L.push_back(f);
        for (auto a : L)
            for (auto b : L) test(a, b);
        for (std::size_t k = 0; k < opt.samples; ++k) test(rng() % W.num_full(), rng() % W.num_full());
        out.push_back(s.done());
    }

    const Special& S = *eng.special();
    std::vector<SVec> gS;
    for (auto k : {SKind::Q, SKind::R, SKind::S0})
        for (auto& v : S.family(k)) gS.push_back(std::move(v));
    auto Sbar_rows = [&] {
        std::vector<SVec> v;
        for (const auto& r : S.Sbar().rows()) v.push_back(to_svec(r));
        return v;
    }();
    std::vector<SVec> S_rows;
    for (const auto& r : S.S().rows()) S_rows.push_back(to_svec(r));

    {
        Suite s("S.ideal_of_Sbar");
        for (const auto& x : Sbar_rows)
            for (const auto& g : gS)
                s.check(S.S().contains(to_vec(W.bracket(x, g))), [&] { return W.to_string(x) + " , " + W.to_string(g); });
        for (std::size_t k = 0; k < opt.samples / 10; ++k) {
            const SVec& x = Sbar_rows[rng() % Sbar_rows.size()];
            const SVec& y = S_rows[rng() % S_rows.size()];
            s.check(S.S().contains(to_vec(W.bracket(x, y))), [&] { return W.to_string(x) + " , " + W.to_string(y); });
        }
        for (const auto& x : S_rows) s.check(S.Sbar().contains(to_vec(x)), [&] { return W.to_string(x); });
        out.push_back(s.done());
    }
    {
        Suite s("S.normalizers");
        for (int r = 1; r <= N; ++r) {
            SVec g = gamma_even(W, r);
            for (const auto& x : gS)
                s.check(S.S().contains(to_vec(W.bracket(g, x))), [&] { return "Gamma_" + std::to_string(r) + " , " + W.to_string(x); });
            for (const auto& x : Sbar_rows)
                s.check(S.Sbar().contains(to_vec(W.bracket(g, x))), [&] { return "Gamma_" + std::to_string(r) + " , " + W.to_string(x); });
        }
        for (const auto& e : exceptional_list(P)) {
            for (const auto& x : S_rows)
                s.check(S.S().contains(to_vec(exceptional_apply_even(W, e, x))), [&] { return W.to_string(x); });
            for (const auto& x : Sbar_rows)
                s.check(S.Sbar().contains(to_vec(exceptional_apply_even(W, e, x))), [&] { return W.to_string(x); });
        }
        out.push_back(s.done());
    }
    {
        Suite s("J.abelian");
        auto exc = exceptional_list(P);
        s.check(static_cast<long long>(exc.size()) == P.sum_t - P.m, [&] { return "count " + std::to_string(exc.size()); });
        Subspace maps(P.p, "maps");
        for (const auto& e : exc) {
            Vec img;
            for (std::uint32_t i = 0; i < W.dim(); ++i)
                for (auto [c, x] : exceptional_apply_even(W, e, {{i, 1}})) img.push_back({Col(i) * W.dim() + c, x});
            maps.insert(img);
            for (const auto& e2 : exc)
                for (std::uint32_t i = 0; i < W.dim(); i += 7) {
                    SVec x{{i, 1}};
                    s.check(exceptional_apply_even(W, e, exceptional_apply_even(W, e2, x)) ==
                                exceptional_apply_even(W, e2, exceptional_apply_even(W, e, x)),
                            [&] { return W.basis_to_string(i); });
                }
            for (int r = 1; r <= N; ++r) {
                SVec g = gamma_even(W, r);
                for (std::uint32_t i = 0; i < W.dim(); ++i) {
                    SVec x{{i, 1}};
                    s.check(exceptional_apply_even(W, e, W.bracket(g, x)) == W.bracket(g, exceptional_apply_even(W, e, x)),
                            [&] { return W.basis_to_string(i); });
                }
            }
            // coefficientwise action equals iterating ad D_i
            std::uint32_t q = 1;
            for (int k = 0; k < e.r; ++k) q *= P.p;
            SVec Di{{static_cast<std::uint32_t>(W.even_index(0, e.i)), 1}};
            for (std::size_t k = 0; k < 50; ++k) {
                SVec x{{static_cast<std::uint32_t>(rng() % W.dim()), 1}};
                SVec y = x;
                for (std::uint32_t t = 0; t < q && !y.empty(); ++t) y = W.bracket(Di, y);
                s.check(y == exceptional_apply_even(W, e, x), [&] { return W.to_string(x); });
            }
        }
        s.check(maps.rank() == exc.size(), [&] { return "rank " + std::to_string(maps.rank()); });
        out.push_back(s.done());
    }
    {
        Suite s("S.torus_and_P");
        auto TS = S.family(SKind::TS);
        Subspace T1(P.p, "T"), T2(P.p, "T");
        for (const auto& t : TS) {
            T1.insert(to_vec(t));
            s.check(divergence(VField::from_even(wp, t)).is_zero(), [&] { return W.to_string(t); });
            s.check(S.S().contains(to_vec(t)), [&] { return W.to_string(t); });
            for (std::uint32_t i = 0; i < W.dim(); ++i) {
                SVec b = W.bracket(t, {{i, 1}});
                s.check(b.empty() || (b.size() == 1 && b[0].first == i), [&] { return W.to_string(t); });
            }
        }
        for (const auto& t : S.family(SKind::TSListed)) T2.insert(to_vec(t));
        s.check(T1.rank() == static_cast<std::size_t>(N - 1) && T1.same_span(T2),
                [&] { return "rank " + std::to_string(T1.rank()) + " vs listed " + std::to_string(T2.rank()); });
        auto Pf = S.family(SKind::FrakP);
        for (const auto& a : Pf)
            for (const auto& b : Pf) s.check(W.bracket(a, b).empty(), [&] { return W.to_string(a) + " , " + W.to_string(b); });
        if (P.n % 2 == 0) {
            Subspace sum = S.S();
            std::size_t added = 0;
            for (const auto& a : Pf) {
                s.check(S.Sbar().contains(to_vec(a)), [&] { return W.to_string(a); });
                if (sum.insert(to_vec(a))) ++added;
            }
            s.check(added == Pf.size() && sum.same_span(S.Sbar()),
                    [&] { return "S + P has rank " + std::to_string(sum.rank()); });
        }
        // S_0 as spanned by its listed family equals the degree-0 part of S
        Subspace s0(P.p, "S0"), deg0(P.p, "S0");
        for (const auto& v : S.family(SKind::S0)) s0.insert(to_vec(v));
        for (const auto& v : S.degree_basis(0)) deg0.insert(to_vec(v));
        s.check(s0.same_span(deg0), [&] { return "S_0 family rank " + std::to_string(s0.rank()) + " vs " + std::to_string(deg0.rank()); });
        out.push_back(s.done());
    }
    {
        Suite s("centralizers");
        auto C = centralizer_in_even(W, gS, -1, W.xi() - 1);
        s.check(C.rank() == 0, [&] { return "C_W(S) has dimension " + std::to_string(C.rank()); });
        std::vector<SVec> Ds;
        for (int i = 1; i <= m; ++i) Ds.push_back({{static_cast<std::uint32_t>(W.even_index(0, i)), 1}});
        auto CG = centralizer_in_even(W, Ds, -1, W.xi() - 1);
        Subspace G(P.p, "G");
        for (const auto& g : distinguished_even(W, WKind::G)) G.insert(to_vec(g));
        s.check(CG.same_span(G), [&] { return "C_W(W_-1) has dimension " + std::to_string(CG.rank()); });
        out.push_back(s.done());
    }
    return out;
}

}  // namespace cartan
