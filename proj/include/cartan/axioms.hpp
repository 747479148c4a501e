#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartan/dersolve.hpp"

namespace cartan {

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::size_t checked = 0;
    std::string failure;  // first failing case
    long long millis = 0;
};

struct AxiomOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    // test mode: run the bracket suites against a bracket with a flipped sign
    bool sign_flip = false;
};

// Identity suites for the superalgebra, W, S and the exceptional maps.
std::vector<SuiteResult> run_axioms(const Engine& eng, const AxiomOptions& opt);

}  // namespace cartan
