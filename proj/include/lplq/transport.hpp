#pragma once

#include <json.hpp>
#include <span>
#include <utility>
#include <vector>

#include "lplq/blpq.hpp"
#include "lplq/plmap.hpp"
#include "lplq/step_function.hpp"

namespace lplq {

// Lattice automorphism of step-function L_p(L_q):
//
//   apply(a, f)(x,y) = f( base(x), fiber_at(x)(y) ) * multiplier(x,y)
//
// where `base` is a piecewise-linear rearrangement of the base interval,
// `fiber` holds one fiber map per cell of `cells` (which refines the linear
// pieces of `base`), and `multiplier` is a positive step function.  Since all
// CDFs of step functions are piecewise linear, composition, inversion and
// application are exact at partition level; apply(a, 1) = multiplier.
struct LatticeAutomorphism {
    PLMap1D base;
    Partition1D cells;
    std::vector<PLMap1D> fiber;
    StepFunction2D multiplier;
};

LatticeAutomorphism identity_automorphism();

StepFunction2D apply(const LatticeAutomorphism& a, const StepFunction2D& f);

// apply(compose(outer, inner), f) == apply(outer, apply(inner, f)).
LatticeAutomorphism compose(const LatticeAutomorphism& outer, const LatticeAutomorphism& inner);

// Requires a strictly positive multiplier.
LatticeAutomorphism inverse(const LatticeAutomorphism& a);

// The transport phi with phi(1) = e for positive unit-norm e of full support:
// base map is the p-CDF of N[e], fiber maps the q-CDFs of e(x,.), multiplier e.
LatticeAutomorphism unit_to_e(const StepFunction2D& e, const NormParams& pq);

// Interval family per index: disjoint (lo,hi) subintervals of [0,1].
using IntervalFamily = std::vector<std::pair<double, double>>;

// Measure-preserving interval exchange R with R(1_{src_k x B}) = 1_{dst_k x B};
// families must have matching total lengths per index.  Intervals not covered
// by either list are paired up in order.
LatticeAutomorphism base_rearrangement(const std::vector<IntervalFamily>& src,
                                       const std::vector<IntervalFamily>& dst);

// 1-fixing automorphism shuffling fibers per base cell (each map must be
// measure preserving for the result to be an isometry).
LatticeAutomorphism fiber_shuffle(Partition1D cells, std::vector<PLMap1D> maps);

// Perturbs an embedding into one whose images jointly have full support on
// [0,1]^2, within the stated per-atom distance; exact isometry of the family
// is preserved.  Returns the input unchanged when support is already full.
Embedding full_support_perturbation(const Embedding& emb, double eps, const NormParams& pq);

// For two embeddings of `spec`, both fully supporting and with image sums
// eta * 1: the automorphism carrying emb1 onto emb2 atom by atom, built from
// per-atom fiber CDF maps and a base rearrangement through the canonical
// representation.
LatticeAutomorphism match_bands(const Embedding& emb1, const Embedding& emb2,
                                const BKpqSpec& spec);

struct PipelineReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool ok = false;
};

// full_support_perturbation -> unit_to_e normalization to sum = eta * 1 ->
// match_bands; residual max_t ||apply(phi, emb1[t]) - emb2[t]|| < eps.
std::pair<LatticeAutomorphism, PipelineReport> auh_pipeline(const Embedding& emb1,
                                                            const Embedding& emb2,
                                                            const BKpqSpec& spec, double eps);

// max_k ||apply(unit_to_e(e), f_k) - f_k|| for a fiber-band partition of 1.
double stability_probe(std::span<const StepFunction2D> fs, const StepFunction2D& e,
                       const NormParams& pq);

nlohmann::json to_json(const LatticeAutomorphism& a);
LatticeAutomorphism automorphism_from_json(const nlohmann::json& j);

}  // namespace lplq
