#pragma once

#include <json.hpp>
#include <utility>
#include <vector>

#include "lplq/blpq.hpp"
#include "lplq/rational.hpp"
#include "lplq/step_function.hpp"

namespace lplq {

// Exact description of the densities h_1 = 1/2 + g_+/S and h_2 = 1/2 + g_-/S
// where S = int |g|.  The sign split has irrational breakpoints (the roots of
// g), so pointwise data comes out as rational intervals; every certified
// identity is stated scale-invariantly through exact moments of g.
struct SignSplit {
    RationalPoly g;                       // content-normalized, positive leading coeff
    std::vector<RatInterval> root_boxes;  // isolating intervals of the r+1 roots in (0,1)
    std::vector<int> gap_signs;           // sign of g strictly between consecutive boxes
    RatInterval abs_integral;             // S = int_0^1 |g|

    // Enclosure of int_0^u phi(t) g_+(t) dt for polynomial phi >= 0 on [0,1].
    RatInterval integral_plus(const RationalPoly& phi, const Rat& u) const;
    // H_i(u) = u/2 + int_0^u g_{+/-} / S.
    RatInterval cdf(const Rat& u, bool plus) const;
    // int_0^u t h_i(t) dt.
    RatInterval mean_integral(const Rat& u, bool plus) const;
    // u with H_i(u) = x, bisected to 2^-bits.
    Rat quantile(const Rat& x, bool plus, int bits) const;
};

SignSplit analyze_sign_split(const RationalPoly& g);

struct CounterexampleBundle {
    int r = 0;
    NormParams params;
    int resolution = 0;
    SignSplit split;
    std::vector<Rat> moments;  // int x^j g for j = 0..r+1, exact
    // Step layer: per-cell exact means of F^i_1 = H_i^{-1}, rounded to double.
    std::vector<double> heights1, heights2;
    Embedding atoms1, atoms2;  // {f^i_1, f^i_2} with N^q[f^i_1] = F^i_1
};

// Requires p/q an integer r >= 2 (within 1e-12) and resolution n >= 2.
CounterexampleBundle build_counterexample(const NormParams& pq, int resolution);

// Per-cell quantile tabulation: the data-parallel kernel of the step layer.
// `parallel` picks the OpenMP path; the serial path is the reference.
std::vector<Rat> quantile_table(const SignSplit& split, bool plus,
                                const std::vector<Rat>& positions, int bits, bool parallel);

struct IsometryCertificate {
    struct Row {
        Rat v1, v2;
        Rat difference;        // exact; zero certifies equality
        RatInterval value1, value2;  // enclosures of the (shared) side values
    };
    std::vector<Row> rows;
    bool all_equal = false;
};

IsometryCertificate certify_isometry(const CounterexampleBundle& bundle,
                                     const std::vector<std::pair<Rat, Rat>>& vs);

struct NonEquimeasurabilityCertificate {
    int gap_degree = 0;
    Rat gap;                     // int u^{r+1} g, exact and nonzero
    RatInterval gap_normalized;  // gap / S
    double step_unmatched_mass = 0.0;
};

NonEquimeasurabilityCertificate certify_non_equimeasurable(const CounterexampleBundle& bundle);

struct ObstructionReport {
    bool found = false;
    double eps = 0.0;
    double rect[4] = {0, 0, 1, 1};  // [z1_lo, z2_lo, z1_hi, z2_hi]
    double margin = 0.0;            // F^2_# mu(C) - F^1_# mu(C+eps) - eps
    std::string conclusion;
};

// Searches axis-aligned rectangles (64-point threshold grid per axis) for a
// witness of the pushforward inequality; eps_min is the smallest eps tried.
ObstructionReport obstruction_report(const CounterexampleBundle& bundle, double eps_min = 0.005);

nlohmann::json certificate_json(const CounterexampleBundle& bundle,
                                const IsometryCertificate& iso,
                                const NonEquimeasurabilityCertificate& neq);

}  // namespace lplq
