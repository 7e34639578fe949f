#include "lplq/blpq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lplq/errors.hpp"
#include "lplq/tolerances.hpp"

namespace lplq {

BKpqSpec::BKpqSpec(std::vector<int> blocks_, NormParams params_)
    : blocks(std::move(blocks_)), params(params_) {
    if (blocks.empty()) throw invariant_error("BKpqSpec: need at least one block");
    for (int m : blocks)
        if (m < 1) throw invariant_error("BKpqSpec: block sizes must be >= 1");
}

std::size_t BKpqSpec::total_atoms() const {
    return static_cast<std::size_t>(std::accumulate(blocks.begin(), blocks.end(), 0));
}

double BKpqSpec::eta() const {
    double s = 0.0;
    for (int m : blocks) s += std::pow(static_cast<double>(m), params.p / params.q);
    return std::pow(s, 1.0 / params.p);
}

std::pair<std::size_t, std::size_t> BKpqSpec::unflatten(std::size_t t) const {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (t < static_cast<std::size_t>(blocks[k])) return {k, t};
        t -= static_cast<std::size_t>(blocks[k]);
    }
    throw invariant_error("BKpqSpec: atom index out of range");
}

void validate_embedding(const Embedding& emb, const NormParams& pq, double norm_tol) {
    for (std::size_t t = 0; t < emb.size(); ++t) {
        if (sup_abs(sub(emb.images[t], abs(emb.images[t]))) > 0.0)
            throw invariant_error("embedding: images must be positive");
        double n = mixed_norm(emb.images[t], pq);
        if (std::abs(n - 1.0) > norm_tol)
            throw invariant_error("embedding: images must have unit norm");
        for (std::size_t u = t + 1; u < emb.size(); ++u)
            if (!is_disjoint(emb.images[t], emb.images[u]))
                throw invariant_error("embedding: images must be pairwise disjoint");
    }
}

CanonicalAtoms canonical_representation(const BKpqSpec& spec) {
    const double r = spec.params.p / spec.params.q;
    const std::size_t nblocks = spec.block_count();
    double denom = 0.0;
    std::vector<double> mw(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) {
        mw[k] = std::pow(static_cast<double>(spec.blocks[k]), r);
        denom += mw[k];
    }
    const double eta = std::pow(denom, 1.0 / spec.params.p);
    std::vector<double> wk(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) wk[k] = mw[k] / denom;

    Partition1D base{std::vector<double>(wk)};
    // All atoms share the base partition and, per base cell, the owning
    // block's uniform fiber grid, so the family sums exactly to eta * 1.
    std::vector<Partition1D> fparts;
    for (std::size_t k = 0; k < nblocks; ++k)
        fparts.push_back(Partition1D::uniform(static_cast<std::size_t>(spec.blocks[k])));

    std::vector<StepFunction2D> atoms;
    std::vector<double> fiber_lens(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k)
        fiber_lens[k] = 1.0 / static_cast<double>(spec.blocks[k]);
    for (std::size_t k = 0; k < nblocks; ++k) {
        for (int j = 0; j < spec.blocks[k]; ++j) {
            std::vector<StepFunction1D> fibers;
            for (std::size_t kk = 0; kk < nblocks; ++kk) {
                std::vector<double> vals(static_cast<std::size_t>(spec.blocks[kk]), 0.0);
                if (kk == k) vals[static_cast<std::size_t>(j)] = eta;
                fibers.emplace_back(fparts[kk], std::move(vals));
            }
            atoms.emplace_back(base, std::move(fibers));
        }
    }
    return CanonicalAtoms{spec, eta, std::move(atoms), std::move(wk), std::move(fiber_lens)};
}

double closed_form_norm(const BKpqSpec& spec, std::span<const double> coeffs) {
    if (coeffs.size() != spec.total_atoms())
        throw precondition_error("closed_form_norm: coefficient count mismatch");
    double outer = 0.0;
    std::size_t t = 0;
    for (int m : spec.blocks) {
        double inner = 0.0;
        for (int j = 0; j < m; ++j) inner += std::pow(std::abs(coeffs[t++]), spec.params.q);
        outer += std::pow(inner, spec.params.p / spec.params.q);
    }
    return std::pow(outer, 1.0 / spec.params.p);
}

std::pair<double, double> grid_vs_closed_form(const BKpqSpec& spec,
                                              std::span<const double> coeffs) {
    CanonicalAtoms can = canonical_representation(spec);
    StepFunction2D sum = scale(coeffs[0], can.atoms[0]);
    for (std::size_t t = 1; t < can.atoms.size(); ++t)
        sum = add(sum, scale(coeffs[t], can.atoms[t]));
    return {mixed_norm(sum, spec.params), closed_form_norm(spec, coeffs)};
}

namespace {

struct NProfiles {
    RefinedFamily fam;
    std::vector<std::vector<double>> n;  // [atom][cell]: N values
    double scale = 0.0;                  // max N value
};

NProfiles n_profiles(const Embedding& emb, const NormParams& pq) {
    NProfiles out;
    out.fam = refine_family(emb.images);
    out.n.assign(emb.size(), {});
    for (std::size_t t = 0; t < emb.size(); ++t) {
        out.n[t].resize(out.fam.base.size());
        for (std::size_t i = 0; i < out.fam.base.size(); ++i) {
            out.n[t][i] = std::pow(out.fam.nq(t, i, pq.q), 1.0 / pq.q);
            out.scale = std::max(out.scale, out.n[t][i]);
        }
    }
    return out;
}

}  // namespace

StructureReport verify_blpq_structure(const Embedding& emb, const NormParams& pq,
                                      double value_tol) {
    StructureReport rep;
    if (emb.size() == 0) {
        rep.violations.push_back("empty embedding");
        return rep;
    }
    for (std::size_t t = 0; t < emb.size(); ++t)
        for (std::size_t u = t + 1; u < emb.size(); ++u)
            if (!is_disjoint(emb.images[t], emb.images[u]))
                rep.violations.push_back("images " + std::to_string(t) + "," + std::to_string(u) +
                                         " are not disjoint");

    NProfiles np = n_profiles(emb, pq);
    const double eps = value_tol * std::max(1.0, np.scale);
    auto equal_n = [&](std::size_t t, std::size_t u) {
        for (std::size_t i = 0; i < np.fam.base.size(); ++i)
            if (std::abs(np.n[t][i] - np.n[u][i]) > eps) return false;
        return true;
    };
    auto base_disjoint = [&](std::size_t t, std::size_t u) {
        for (std::size_t i = 0; i < np.fam.base.size(); ++i)
            if (std::min(np.n[t][i], np.n[u][i]) > eps) return false;
        return true;
    };

    std::vector<std::size_t> group(emb.size(), SIZE_MAX);
    std::size_t ngroups = 0;
    for (std::size_t t = 0; t < emb.size(); ++t) {
        if (group[t] != SIZE_MAX) continue;
        group[t] = ngroups;
        for (std::size_t u = t + 1; u < emb.size(); ++u)
            if (group[u] == SIZE_MAX && equal_n(t, u)) group[u] = ngroups;
        ++ngroups;
    }
    for (std::size_t t = 0; t < emb.size(); ++t)
        for (std::size_t u = t + 1; u < emb.size(); ++u) {
            if (group[t] == group[u]) continue;
            if (!base_disjoint(t, u))
                rep.violations.push_back("atoms " + std::to_string(t) + "," + std::to_string(u) +
                                         " have N-profiles neither equal nor base-disjoint");
        }

    std::vector<std::vector<std::size_t>> blocks(ngroups);
    for (std::size_t t = 0; t < emb.size(); ++t) blocks[group[t]].push_back(t);
    // Deterministic block order: (size, first supported breakpoint).
    auto first_support = [&](const std::vector<std::size_t>& blk) {
        for (std::size_t i = 0; i < np.fam.base.size(); ++i)
            if (np.n[blk[0]][i] > eps) return np.fam.base.breakpoints()[i];
        return 1.0;
    };
    std::sort(blocks.begin(), blocks.end(),
              [&](const auto& a, const auto& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return first_support(a) < first_support(b);
              });
    rep.blocks = std::move(blocks);
    rep.is_blpq = rep.violations.empty();
    return rep;
}

namespace {

// True when every value is 0 or c (within reltol); implied by disjointness
// plus a constant sum, asserted here to fail loudly on bad inputs.
void check_indicator_family(const RefinedFamily& fam, double c, double reltol) {
    for (const auto& atom : fam.values)
        for (const auto& row : atom)
            for (double v : row)
                if (std::min(std::abs(v), std::abs(v - c)) > reltol * c)
                    throw precondition_error(
                        "extract_blpq_atoms: images are not scaled indicators");
}

double constant_sum(const RefinedFamily& fam, double reltol) {
    double c = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < fam.base.size(); ++i)
        for (std::size_t s = 0; s < fam.fibers[i].size(); ++s) {
            double sum = 0.0;
            for (std::size_t t = 0; t < fam.atom_count(); ++t) sum += fam.values[t][i][s];
            if (first) {
                c = sum;
                first = false;
            } else if (std::abs(sum - c) > reltol * std::max(1.0, std::abs(c))) {
                throw precondition_error("extract_blpq_atoms: sum of images is not constant");
            }
        }
    if (!(c > 0.0)) throw precondition_error("extract_blpq_atoms: sum of images must be positive");
    return c;
}

}  // namespace

ExtractResult extract_blpq_atoms(const Embedding& emb, const NormParams& pq, double tau) {
    if (emb.size() == 0) throw precondition_error("extract_blpq_atoms: empty embedding");
    RefinedFamily fam = refine_family(emb.images);
    const double c = constant_sum(fam, 1e-9);
    check_indicator_family(fam, c, 1e-6);

    const std::size_t natoms = emb.size();
    const std::size_t ncells = fam.base.size();
    std::vector<std::vector<double>> nvec(ncells, std::vector<double>(natoms));
    double nscale = 0.0;
    for (std::size_t i = 0; i < ncells; ++i)
        for (std::size_t t = 0; t < natoms; ++t) {
            nvec[i][t] = std::pow(fam.nq(t, i, pq.q), 1.0 / pq.q);
            nscale = std::max(nscale, nvec[i][t]);
        }
    const double eps = tau * std::max(1.0, nscale);

    // Exact merge of equal N-vectors, ties broken by lexicographic order.
    std::vector<std::size_t> order(ncells);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(nvec[a].begin(), nvec[a].end(), nvec[b].begin(),
                                            nvec[b].end());
    });
    auto close = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t t = 0; t < natoms; ++t)
            if (std::abs(a[t] - b[t]) > eps) return false;
        return true;
    };
    std::vector<std::vector<std::size_t>> level_cells;  // cells per level
    for (std::size_t idx : order) {
        if (!level_cells.empty() && close(nvec[level_cells.back().front()], nvec[idx]))
            level_cells.back().push_back(idx);
        else
            level_cells.push_back({idx});
    }
    // Order levels by (block size, first base breakpoint).
    auto eligible_count = [&](const std::vector<std::size_t>& cells) {
        std::size_t m = 0;
        for (std::size_t t = 0; t < natoms; ++t)
            if (nvec[cells.front()][t] > eps) ++m;
        return m;
    };
    auto first_break = [&](const std::vector<std::size_t>& cells) {
        std::size_t lo = *std::min_element(cells.begin(), cells.end());
        return fam.base.breakpoints()[lo];
    };
    std::sort(level_cells.begin(), level_cells.end(), [&](const auto& a, const auto& b) {
        auto ma = eligible_count(a), mb = eligible_count(b);
        if (ma != mb) return ma < mb;
        return first_break(a) < first_break(b);
    });

    ExtractResult out{BKpqSpec({1}, pq), {}, {}, {}, {}, c};
    std::vector<int> block_sizes;
    for (const auto& cells : level_cells) {
        const std::vector<double>& level = nvec[cells.front()];
        out.levels.push_back(level);
        std::vector<double> coeff_row(natoms, 0.0);
        std::size_t m = 0;
        for (std::size_t t = 0; t < natoms; ++t) {
            if (level[t] <= eps) continue;
            // phi(k,j): normalized indicator of the level set intersected with
            // supp(images[t]); its coefficient is the norm of the restriction.
            std::vector<StepFunction1D> fibers;
            std::vector<char> in_level(ncells, 0);
            for (std::size_t ci : cells) in_level[ci] = 1;
            for (std::size_t i = 0; i < ncells; ++i) {
                std::vector<double> vals(fam.fibers[i].size(), 0.0);
                if (in_level[i])
                    for (std::size_t s = 0; s < vals.size(); ++s)
                        if (fam.values[t][i][s] > c / 2) vals[s] = 1.0;
                fibers.emplace_back(fam.fibers[i], std::move(vals));
            }
            StepFunction2D ind(fam.base, std::move(fibers));
            double restriction_norm = c * mixed_norm(ind, pq);
            StepFunction2D phi = scale(1.0 / mixed_norm(ind, pq), ind).simplified();
            out.atoms.push_back(std::move(phi));
            out.pairs.emplace_back(block_sizes.size(), m);
            coeff_row[t] = restriction_norm;
            ++m;
        }
        out.coeffs.push_back(std::move(coeff_row));
        block_sizes.push_back(static_cast<int>(m));
    }
    out.spec = BKpqSpec(std::move(block_sizes), pq);
    return out;
}

namespace {

// Deterministic, zero-preserving snap of a simplex point onto the M-lattice.
std::vector<double> snap_to_lattice(const std::vector<double>& z, long M) {
    const std::size_t n = z.size();
    std::vector<long> k(n);
    std::vector<double> rem(n);
    long total = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double mz = static_cast<double>(M) * z[t];
        k[t] = static_cast<long>(std::floor(mz));
        rem[t] = mz - static_cast<double>(k[t]);
        total += k[t];
    }
    long deficit = M - total;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (rem[a] != rem[b]) return rem[a] > rem[b];
        return a < b;
    });
    std::size_t guard = 0;
    for (std::size_t pos = 0; deficit > 0 && guard < 16 * n + 64; ++guard, pos = (pos + 1) % n) {
        std::size_t t = idx[pos];
        if (z[t] > 0.0) {
            ++k[t];
            --deficit;
        }
    }
    for (std::size_t pos = 0; deficit < 0 && pos < n; ++pos) {
        std::size_t t = idx[n - 1 - pos];
        if (k[t] > 0) {
            --k[t];
            ++deficit;
        }
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = static_cast<double>(k[t]) / static_cast<double>(M);
    return out;
}

}  // namespace

Embedding quantize_to_kpq(const Embedding& emb, double eps, const NormParams& pq) {
    if (!(eps > 0.0)) throw precondition_error("quantize_to_kpq: eps must be positive");
    RefinedFamily fam = refine_family(emb.images);
    const double c = constant_sum(fam, 1e-9);
    check_indicator_family(fam, c, 1e-6);
    const std::size_t natoms = emb.size();
    const std::size_t ncells = fam.base.size();

    long M = static_cast<long>(std::ceil(2.0 * static_cast<double>(natoms) / eps));
    for (int attempt = 0; attempt < 48; ++attempt) {
        // Snap each base cell's N^q-vector (on the l1 simplex) to the lattice,
        // then reshape fiber supports proportionally so the family still sums
        // to c * 1 pointwise.
        std::vector<std::vector<StepFunction1D>> fibers(natoms);
        bool feasible = true;
        for (std::size_t i = 0; i < ncells && feasible; ++i) {
            std::vector<double> z(natoms);
            double zsum = 0.0;
            for (std::size_t t = 0; t < natoms; ++t) {
                z[t] = fam.nq(t, i, pq.q) / std::pow(c, pq.q);
                zsum += z[t];
            }
            for (double& v : z) v /= zsum;  // wash float drift
            std::vector<double> zhat = snap_to_lattice(z, M);
            // owner of each fiber cell and per-owner mass
            const Partition1D& fp = fam.fibers[i];
            std::vector<double> mass(natoms, 0.0);
            std::vector<std::size_t> owner(fp.size(), SIZE_MAX);
            for (std::size_t s = 0; s < fp.size(); ++s) {
                for (std::size_t t = 0; t < natoms; ++t)
                    if (fam.values[t][i][s] > c / 2) {
                        owner[s] = t;
                        mass[t] += fp.length(s);
                        break;
                    }
                if (owner[s] == SIZE_MAX) {
                    feasible = false;  // uncovered fiber cell; cannot happen for valid input
                    break;
                }
            }
            if (!feasible) break;
            std::vector<double> lens;
            std::vector<std::size_t> owners;
            for (std::size_t s = 0; s < fp.size(); ++s) {
                std::size_t t = owner[s];
                // mass[t] is the fiber measure owned by t; scale to target zhat.
                double nl = fp.length(s) * (mass[t] > 0.0 ? zhat[t] / mass[t] : 0.0);
                if (nl > 0.0) {
                    lens.push_back(nl);
                    owners.push_back(t);
                }
            }
            double lsum = std::accumulate(lens.begin(), lens.end(), 0.0);
            if (!(lsum > 0.0)) {
                feasible = false;
                break;
            }
            for (double& l : lens) l /= lsum;
            Partition1D npart{std::vector<double>(lens)};
            for (std::size_t t = 0; t < natoms; ++t) {
                std::vector<double> vals(npart.size(), 0.0);
                for (std::size_t s = 0; s < npart.size(); ++s)
                    if (owners[s] == t) vals[s] = c;
                fibers[t].emplace_back(npart, std::move(vals));
            }
        }
        if (feasible) {
            Embedding out;
            for (std::size_t t = 0; t < natoms; ++t)
                out.images.emplace_back(StepFunction2D(fam.base, fibers[t]).simplified());
            double worst = 0.0;
            for (std::size_t t = 0; t < natoms; ++t)
                worst = std::max(worst, mixed_norm(sub(out.images[t], emb.images[t]), pq));
            if (worst < eps) return out;
        }
        M *= 2;
    }
    throw precondition_error("quantize_to_kpq: failed to reach requested accuracy");
}

}  // namespace lplq
