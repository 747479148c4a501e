#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cartan/axioms.hpp"
#include "cartan/dersolve.hpp"

using namespace cartan;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::uint32_t p = 5;
    int m = 3, n = 3;
    std::string t = "1,1,1";
    std::string algebra = "W";
    std::string degrees;
    std::string format = "json";
    std::string out;
    std::string dump;
    int threads = 1;
    std::size_t sample = 0;
    bool outer = false;
    bool sign_flip = false;
};

std::vector<int> parse_t(const std::string& s) {
    std::vector<int> t;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 1) throw std::invalid_argument("bad t entry '" + tok + "'");
        t.push_back(v);
    }
    return t;
}

std::pair<int, int> parse_degrees(const std::string& s) {
    auto k = s.find("..");
    std::size_t a = 0, b = 0;
    try {
        if (k == std::string::npos) {
            int d = std::stoi(s, &a);
            if (a == s.size()) return {d, d};
        } else {
            int lo = std::stoi(s.substr(0, k), &a), hi = std::stoi(s.substr(k + 2), &b);
            if (a == k && b == s.size() - k - 2 && lo <= hi) return {lo, hi};
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("degrees must look like a..b");
}

std::uint64_t env_seed() {
    const char* s = std::getenv("CARTANLIB_SEED");
    return s && *s ? std::strtoull(s, nullptr, 10) : 1;
}

json params_json(const Params& P) {
    return {{"p", P.p}, {"m", P.m}, {"n", P.n}, {"t", P.t}};
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw std::runtime_error("cannot write " + cfg.out);
    f << text;
}

AlgTag algebra_tag(const std::string& a) {
    if (a == "W") return AlgTag::W;
    if (a == "S") return AlgTag::S;
    throw UsageError("algebra must be W or S");
}

int cmd_build(const RunConfig& cfg, const Engine& eng) {
    const Witt& W = *eng.witt();
    AlgTag L = algebra_tag(cfg.algebra);
    json j{{"schema", 1}, {"command", "build"}, {"params", params_json(eng.params())}, {"algebra", cfg.algebra}};
    std::ostringstream txt;
    txt << eng.params().label() << " algebra " << cfg.algebra << "\n";
    json rows = json::array();
    if (L == AlgTag::W) {
        std::map<int, std::pair<std::size_t, std::size_t>> by;  // degree -> (even, odd) of full W
        for (std::uint32_t f = 0; f < W.num_full(); ++f) {
            auto& e = by[W.full_degree(f)];
            (W.full_parity(f) ? e.second : e.first)++;
        }
        j["dim"] = W.dim();
        j["dim_full"] = W.num_full();
        txt << "dim W_even " << W.dim() << " (full " << W.num_full() << ")\n";
        for (auto [d, e] : by) {
            rows.push_back({{"degree", d}, {"even", e.first}, {"odd", e.second}});
            txt << "  degree " << d << ": even " << e.first << " odd " << e.second << "\n";
        }
    } else {
        const Special& S = *eng.special();
        j["dim"] = S.dim();
        j["dim_bar"] = S.dim_bar();
        txt << "dim S " << S.dim() << " dim Sbar " << S.dim_bar() << "\n";
        std::map<int, std::pair<std::size_t, std::size_t>> by;
        for (const auto& r : S.S().rows()) by[W.degree(static_cast<std::uint32_t>(r.front().first))].first++;
        for (const auto& r : S.Sbar().rows()) by[W.degree(static_cast<std::uint32_t>(r.front().first))].second++;
        for (auto [d, e] : by) {
            rows.push_back({{"degree", d}, {"S", e.first}, {"Sbar", e.second}});
            txt << "  degree " << d << ": S " << e.first << " Sbar " << e.second << "\n";
        }
    }
    j["by_degree"] = rows;
    if (!cfg.dump.empty()) {
        std::ofstream f(cfg.dump);
        if (!f) throw std::runtime_error("cannot write " + cfg.dump);
        if (L == AlgTag::W) {
            Subspace U(W.params().p, even_ambient(W), W.dim());
            for (std::uint32_t i = 0; i < W.dim(); ++i) U.insert(Vec{{i, 1}});
            U.dump(f);
        } else {
            eng.special()->S().dump(f);
        }
    }
    emit(cfg, cfg.format == "json" ? j.dump(2) + "\n" : txt.str());
    return 0;
}

int cmd_axioms(const RunConfig& cfg, const Engine& eng) {
    AxiomOptions opt;
    if (cfg.sample) opt.samples = cfg.sample;
    opt.seed = env_seed();
    opt.sign_flip = cfg.sign_flip;
    auto res = run_axioms(eng, opt);
    bool ok = true;
    json suites = json::array();
    std::ostringstream txt;
    for (const auto& r : res) {
        ok = ok && r.pass;
        suites.push_back({{"name", r.name}, {"pass", r.pass}, {"checked", r.checked}, {"failure", r.failure}, {"millis", r.millis}});
        txt << (r.pass ? "PASS " : "FAIL ") << r.name << " checked " << r.checked << " (" << r.millis << " ms)";
        if (!r.pass) txt << "  first failure: " << r.failure;
        txt << "\n";
        if (!r.pass) std::cerr << "suite " << r.name << " failed on: " << r.failure << "\n";
    }
    json j{{"schema", 1}, {"command", "axioms"}, {"params", params_json(eng.params())}, {"seed", opt.seed},
           {"samples", opt.samples}, {"pass", ok}, {"suites", suites}};
    emit(cfg, cfg.format == "json" ? j.dump(2) + "\n" : txt.str());
    return ok ? 0 : 1;
}

int cmd_derive(const RunConfig& cfg, const Engine& eng) {
    VerifyOptions opt;
    AlgTag L = algebra_tag(cfg.algebra);
    opt.do_W = L == AlgTag::W;
    opt.do_S = L == AlgTag::S;
    opt.outer = cfg.outer;
    if (!cfg.degrees.empty()) opt.degrees = parse_degrees(cfg.degrees);
    opt.seed = env_seed();
    if (cfg.sample) opt.samples = cfg.sample;
    Report rep = verify_theorems(eng, opt);
    json claims = json::array();
    std::ostringstream txt;
    txt << rep.params.label() << "\n";
    for (const auto& c : rep.claims) {
        claims.push_back({{"id", c.id}, {"statement", c.statement}, {"expected", c.expected},
                          {"computed", c.computed}, {"pass", c.pass}, {"millis", c.millis}});
        txt << (c.pass ? "PASS " : "FAIL ") << c.id << ": expected " << c.expected << ", computed " << c.computed
            << " (" << c.millis << " ms)\n";
    }
    json j{{"schema", 1}, {"command", "derive"}, {"params", params_json(rep.params)}, {"algebra", cfg.algebra},
           {"pass", rep.all_pass()}, {"claims", claims}};
    emit(cfg, cfg.format == "json" ? j.dump(2) + "\n" : txt.str());
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact derivation computations for the even parts of W(m,n;t) and S(m,n;t)"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* s) {
        s->add_option("--p", cfg.p, "characteristic")->capture_default_str();
        s->add_option("--m", cfg.m, "even variables")->capture_default_str();
        s->add_option("--n", cfg.n, "odd variables")->capture_default_str();
        s->add_option("--t", cfg.t, "truncation, comma separated")->capture_default_str();
        s->add_option("--algebra", cfg.algebra, "W or S")->check(CLI::IsMember({"W", "S"}))->capture_default_str();
        s->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
        s->add_option("--out", cfg.out, "output file (default stdout)");
        s->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--sample", cfg.sample, "sample count for randomized checks");
    };
    auto* build = app.add_subcommand("build", "construct bases and print dimensions");
    common(build);
    build->add_option("--dump-basis", cfg.dump, "write the basis as sparse triplets");
    auto* axioms = app.add_subcommand("axioms", "run the identity suites");
    common(axioms);
    axioms->add_flag("--sign-flip", cfg.sign_flip, "test mode: corrupt the bracket")->group("");
    auto* derive = app.add_subcommand("derive", "solve for derivations and check the theorems");
    common(derive);
    derive->add_option("--degrees", cfg.degrees, "degree range a..b (default: full band)");
    derive->add_flag("--outer", cfg.outer, "also compute the outer derivation algebra");

    CLI11_PARSE(app, argc, argv);

    try {
        Params prm = Params::make(cfg.p, cfg.m, cfg.n, parse_t(cfg.t));
        Engine eng(prm, cfg.threads);
        if (*build) return cmd_build(cfg, eng);
        if (*axioms) return cmd_axioms(cfg, eng);
        return cmd_derive(cfg, eng);
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
