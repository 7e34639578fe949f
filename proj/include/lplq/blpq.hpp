#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lplq/step_function.hpp"

namespace lplq {

// Finite-dimensional BL_pL_q lattice: an l_p-sum of l_q^{m_k} blocks.
struct BKpqSpec {
    std::vector<int> blocks;  // m_1..m_N
    NormParams params;

    BKpqSpec(std::vector<int> blocks_, NormParams params_);

    std::size_t block_count() const { return blocks.size(); }
    std::size_t total_atoms() const;
    // eta = (sum_k m_k^{p/q})^{1/p}; the norm of the sum of the atoms.
    double eta() const;
    // flattened atom index -> (block k, position j), both 0-based
    std::pair<std::size_t, std::size_t> unflatten(std::size_t t) const;
};

// A family of disjoint positive step functions: the images of the atoms of
// some finite-dimensional lattice under an embedding.
struct Embedding {
    std::vector<StepFunction2D> images;
    std::size_t size() const { return images.size(); }
};

// Validates positivity / pairwise disjointness / near-unit norms.
void validate_embedding(const Embedding& emb, const NormParams& pq, double norm_tol);

// Canonical realization: atoms e(k,j) = eta * 1_{W_k x V_{k,j}} with
// mu(W_k) = m_k^{p/q}/eta^p and V_{k,j} the uniform m_k-grid.  All atoms share
// one product partition, so sums over the family are exact.
struct CanonicalAtoms {
    BKpqSpec spec;
    double eta;
    std::vector<StepFunction2D> atoms;        // flattened (k,j)
    std::vector<double> base_cell_lengths;    // mu(W_k) per block
    std::vector<double> fiber_cell_lengths;   // 1/m_k per block
};

CanonicalAtoms canonical_representation(const BKpqSpec& spec);

// (sum_k [sum_j |a(k,j)|^q]^{p/q})^{1/p}, coefficients flattened like atoms.
double closed_form_norm(const BKpqSpec& spec, std::span<const double> coeffs);

// (mixed_norm of the atom combination, closed-form value).
std::pair<double, double> grid_vs_closed_form(const BKpqSpec& spec, std::span<const double> coeffs);

struct StructureReport {
    bool is_blpq = false;
    std::vector<std::vector<std::size_t>> blocks;  // atom indices per block
    std::vector<std::string> violations;
};

// Groups atoms into blocks with identical N-profiles (within tol) that are
// base-disjoint across blocks; reports instead of throwing on bad input.
StructureReport verify_blpq_structure(const Embedding& emb, const NormParams& pq,
                                      double value_tol = 1e-9);

// Level-set decomposition of a base-simple family with constant sum: the
// normalized level-set indicators phi(k,j), the N-level vectors s^k, and the
// coefficients making images[j] = sum_k coeff[k][j] * phi(k,j) exact on the
// refinement.
struct ExtractResult {
    BKpqSpec spec;  // recovered block sizes, sorted by (m_k, first breakpoint)
    std::vector<StepFunction2D> atoms;           // phi(k,j), flattened
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (level k, atom j) per phi
    std::vector<std::vector<double>> levels;     // s^k: N-level per level
    std::vector<std::vector<double>> coeffs;     // [level][atom] reconstruction coefficient
    double constant = 0.0;                       // c with sum images = c*1
};

ExtractResult extract_blpq_atoms(const Embedding& emb, const NormParams& pq,
                                 double tau = 1e-10);

// Snaps the per-cell N^q-vectors (scaled to the l1 simplex) onto a finite
// lattice and reshapes fiber supports accordingly; output keeps
// sum images = c*1 exactly, per-atom perturbation < eps, and finitely many
// N-vector values.
Embedding quantize_to_kpq(const Embedding& emb, double eps, const NormParams& pq);

}  // namespace lplq
