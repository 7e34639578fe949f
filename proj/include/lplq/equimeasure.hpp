#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lplq/step_function.hpp"

namespace lplq {

// Finite weighted point cloud in R^n_+: the pushforward law of an N-profile
// vector under Lebesgue measure on the base.
struct VectorMeasure {
    struct Atom {
        double mass;
        std::vector<double> point;
    };
    std::vector<Atom> atoms;

    std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().point.size(); }
    double total_mass() const;
    // Lexicographically sorted with points within tau (l_inf) merged.
    VectorMeasure canonical(double tau = 0.0) const;
};

// Law of (N[f_1](x),...,N[f_n](x)) over the common base refinement.
VectorMeasure pushforward(std::span<const StepFunction2D> fs, const NormParams& pq);
// Law of the N^q-profiles (the z-coordinates of the moment lemma).
VectorMeasure pushforward_q(std::span<const StepFunction2D> fs, const NormParams& pq);

bool equimeasurable(const VectorMeasure& m1, const VectorMeasure& m2, double tau_val = 1e-9,
                    double tau_mass = 1e-9);
// Total mass that fails to match across the two canonical clouds.
double unmatched_mass(const VectorMeasure& m1, const VectorMeasure& m2, double tau_val = 1e-9);

// sum mass * (v0 + v . z)^r
double moment_functional(const VectorMeasure& m, double v0, std::span<const double> v, double r);

// ||sum_j c_j f_j|| computed through the pushforward of the N^q profiles;
// requires pairwise disjoint positive fs, and must agree with mixed_norm.
double norm_via_moments(std::span<const StepFunction2D> fs, std::span<const double> coeffs,
                        const NormParams& pq);

struct MomentMatchReport {
    struct FunctionalRow {
        double v0;
        std::vector<double> v;
        double lhs, rhs;
    };
    struct MomentRow {
        std::vector<int> degrees;  // multi-index
        double lhs, rhs;
    };
    std::vector<FunctionalRow> functional;
    std::vector<MomentRow> moments;
    int first_mismatch_degree = -1;  // -1: all degrees <= cap agree
    double max_functional_gap = 0.0;
};

// Compares the moment functional over sampled (v0, v) plus raw joint moments
// up to degree_max; equality of the measures cannot be certified from finitely
// many v, so this is an evidence report, never a boolean.
MomentMatchReport moment_match_report(const VectorMeasure& m1, const VectorMeasure& m2, double r,
                                      int degree_max,
                                      std::span<const std::pair<double, std::vector<double>>> vs,
                                      double mismatch_tol = 1e-9);

void write_csv(const VectorMeasure& m, std::ostream& os);
void write_csv(const MomentMatchReport& rep, std::ostream& os);

}  // namespace lplq
