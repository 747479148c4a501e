#pragma once

#include <map>
#include <memory>
#include <random>

#include "doctest.h"

#include "cartan/dersolve.hpp"

namespace fixture {

using namespace cartan;

inline const Engine& engine(int n = 3, std::vector<int> t = {1, 1, 1}) {
    static std::map<std::pair<int, std::vector<int>>, std::unique_ptr<Engine>> cache;
    auto& e = cache[{n, t}];
    if (!e) e = std::make_unique<Engine>(Params::make(5, 3, n, t));
    return *e;
}

inline AlgElem A(const WittPtr& w, const std::string& s) { return AlgElem::parse(w->space(), s); }

inline SVec random_even(const Witt& W, int d, std::mt19937_64& rng, std::size_t terms = 4) {
    const auto& sl = W.degree_slice(d);
    SVec v;
    if (sl.empty()) return v;
    for (std::size_t k = 0; k < terms; ++k) v.push_back({sl[rng() % sl.size()], static_cast<Scalar>(1 + rng() % (W.params().p - 1))});
    svec_normalize(v, W.field());
    return v;
}

}  // namespace fixture
