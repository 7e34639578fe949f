#pragma once

#include <cstdint>
#include <random>

#include "lplq/blpq.hpp"
#include "lplq/step_function.hpp"
#include "lplq/transport.hpp"

namespace lplq {

// Seeded generators shared by the CLI demos and the test suites.  Everything
// is a pure function of the engine state, so a fixed seed reproduces runs
// byte for byte.
struct RandomGen {
    std::mt19937_64 rng;

    explicit RandomGen(std::uint64_t seed) : rng(seed) {}

    Partition1D partition(std::size_t min_cells, std::size_t max_cells);

    // Values uniform in [lo, hi]; optionally signed and with zero cells mixed in.
    StepFunction2D step_function(std::size_t max_base, std::size_t max_fiber, double lo, double hi,
                                 bool allow_negative, double zero_prob = 0.0);

    // Positive unit-norm full-support function (cell values log-uniform in
    // [0.2, 5], then normalized).
    StepFunction2D unit_positive(const NormParams& pq, std::size_t max_base,
                                 std::size_t max_fiber);

    // Random interval exchange of 2..max_cells cells.
    LatticeAutomorphism interval_exchange(std::size_t max_cells);

    // Measure-preserving fiber shuffle over a random base partition.
    LatticeAutomorphism random_fiber_shuffle(std::size_t max_cells);

    // Canonical atoms transported by unit_to_e of a random positive unit
    // function composed with a random interval exchange.
    Embedding transported_embedding(const BKpqSpec& spec);
};

}  // namespace lplq
