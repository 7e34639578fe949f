#include "lplq/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lplq/errors.hpp"
#include "lplq/json_io.hpp"
#include "lplq/tolerances.hpp"

namespace lplq {

namespace {

std::vector<double> interior(const std::vector<double>& breaks) {
    return std::vector<double>(breaks.begin() + 1, breaks.end() - 1);
}

StepFunction2D reciprocal(const StepFunction2D& f) {
    std::vector<StepFunction1D> fibers;
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        std::vector<double> vals(f.fiber(i).values());
        for (double& v : vals) {
            if (!(v > 0.0)) throw precondition_error("reciprocal: multiplier must be positive");
            v = 1.0 / v;
        }
        fibers.emplace_back(f.fiber(i).partition(), std::move(vals));
    }
    return StepFunction2D(f.base(), std::move(fibers));
}

}  // namespace

LatticeAutomorphism identity_automorphism() {
    return LatticeAutomorphism{PLMap1D::identity(), Partition1D::whole(),
                               {PLMap1D::identity()}, StepFunction2D::constant(1.0)};
}

StepFunction2D apply(const LatticeAutomorphism& a, const StepFunction2D& f) {
    std::vector<double> pre = a.base.preimage_cuts(interior(f.base().breakpoints()));
    {
        std::vector<double> own = a.base.source_cuts();
        pre.insert(pre.end(), own.begin(), own.end());
    }
    Partition1D cells = refine_with_cuts(a.cells, pre);
    std::vector<StepFunction1D> fibers;
    fibers.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        double xm = 0.5 * (cells.breakpoints()[i] + cells.breakpoints()[i + 1]);
        const PLMap1D& Y = a.fiber[a.cells.locate(xm)];
        const StepFunction1D& mrow = a.multiplier.fiber(a.multiplier.base().locate(xm));
        const StepFunction1D& frow = f.fiber(f.base().locate(a.base(xm)));
        std::vector<double> fpre = Y.preimage_cuts(interior(frow.partition().breakpoints()));
        {
            std::vector<double> own = Y.source_cuts();
            fpre.insert(fpre.end(), own.begin(), own.end());
        }
        Partition1D fcells = refine_with_cuts(mrow.partition(), fpre);
        std::vector<double> vals(fcells.size());
        for (std::size_t s = 0; s < fcells.size(); ++s) {
            double ym = 0.5 * (fcells.breakpoints()[s] + fcells.breakpoints()[s + 1]);
            vals[s] = frow.value_at(Y(ym)) * mrow.value_at(ym);
        }
        fibers.emplace_back(std::move(fcells), std::move(vals));
    }
    return StepFunction2D(std::move(cells), std::move(fibers)).simplified();
}

LatticeAutomorphism compose(const LatticeAutomorphism& outer, const LatticeAutomorphism& inner) {
    PLMap1D base = compose_pointmaps(outer.base, inner.base);
    std::vector<double> pre = outer.base.preimage_cuts(interior(inner.cells.breakpoints()));
    Partition1D cells = refine_with_cuts(outer.cells, pre);
    std::vector<PLMap1D> fiber;
    fiber.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        double xm = 0.5 * (cells.breakpoints()[i] + cells.breakpoints()[i + 1]);
        const PLMap1D& yo = outer.fiber[outer.cells.locate(xm)];
        const PLMap1D& yi = inner.fiber[inner.cells.locate(outer.base(xm))];
        fiber.push_back(compose_pointmaps(yo, yi));
    }
    StepFunction2D mult = apply(outer, inner.multiplier);
    return LatticeAutomorphism{std::move(base), std::move(cells), std::move(fiber),
                               std::move(mult)};
}

LatticeAutomorphism inverse(const LatticeAutomorphism& a) {
    PLMap1D ibase = a.base.inverse();
    // Image cuts of a's cells: map each cell endpoint through the linear piece
    // containing the cell.
    std::vector<double> cuts;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        double lo = a.cells.breakpoints()[i], hi = a.cells.breakpoints()[i + 1];
        double xm = 0.5 * (lo + hi);
        const auto& ps = a.base.pieces();
        auto it = std::upper_bound(ps.begin(), ps.end(), xm,
                                   [](double v, const PLMap1D::Piece& p) { return v < p.s1; });
        const PLMap1D::Piece& p = it == ps.end() ? ps.back() : *it;
        auto through = [&p](double x) {
            double t = (x - p.s0) / (p.s1 - p.s0);
            return p.d0 + t * (p.d1 - p.d0);
        };
        cuts.push_back(through(lo));
        cuts.push_back(through(hi));
    }
    std::sort(cuts.begin(), cuts.end());
    Partition1D icells = refine_with_cuts(Partition1D::whole(), cuts);
    std::vector<PLMap1D> ifiber;
    ifiber.reserve(icells.size());
    for (std::size_t i = 0; i < icells.size(); ++i) {
        double um = 0.5 * (icells.breakpoints()[i] + icells.breakpoints()[i + 1]);
        ifiber.push_back(a.fiber[a.cells.locate(ibase(um))].inverse());
    }
    LatticeAutomorphism inv{std::move(ibase), std::move(icells), std::move(ifiber),
                            StepFunction2D::constant(1.0)};
    inv.multiplier = reciprocal(apply(inv, a.multiplier));
    return inv;
}

LatticeAutomorphism unit_to_e(const StepFunction2D& e, const NormParams& pq) {
    for (std::size_t i = 0; i < e.base_size(); ++i)
        for (double v : e.fiber(i).values())
            if (!(v > 0.0))
                throw precondition_error("unit_to_e: e must have full support (no zero cell)");
    double nrm = mixed_norm(e, pq);
    if (std::abs(nrm - 1.0) > tol().norm)
        throw precondition_error("unit_to_e: e must have unit norm");

    StepFunction1D N = n_map(e, pq);
    std::vector<double> cdf{0.0};
    for (std::size_t i = 0; i < N.size(); ++i)
        cdf.push_back(cdf.back() + N.partition().length(i) * std::pow(N.value(i), pq.p));
    double total = cdf.back();
    for (double& v : cdf) v /= total;
    PLMap1D base = PLMap1D::from_cdf(e.base().breakpoints(), cdf);

    std::vector<PLMap1D> fiber;
    fiber.reserve(e.base_size());
    for (std::size_t i = 0; i < e.base_size(); ++i) {
        const StepFunction1D& row = e.fiber(i);
        std::vector<double> fcdf{0.0};
        for (std::size_t s = 0; s < row.size(); ++s)
            fcdf.push_back(fcdf.back() +
                           row.partition().length(s) * std::pow(row.value(s), pq.q));
        double ftot = fcdf.back();
        for (double& v : fcdf) v /= ftot;
        fiber.push_back(PLMap1D::from_cdf(row.partition().breakpoints(), fcdf));
    }
    return LatticeAutomorphism{std::move(base), e.base(), std::move(fiber), e};
}

namespace {

double family_total(const IntervalFamily& f) {
    double s = 0.0;
    for (auto [lo, hi] : f) {
        if (!(hi > lo)) throw precondition_error("base_rearrangement: empty interval");
        s += hi - lo;
    }
    return s;
}

// Complement of a union of intervals in [0,1].
IntervalFamily complement(IntervalFamily v) {
    std::sort(v.begin(), v.end());
    IntervalFamily out;
    double cursor = 0.0;
    for (auto [lo, hi] : v) {
        if (lo > cursor + 1e-15) out.emplace_back(cursor, lo);
        cursor = std::max(cursor, hi);
    }
    if (cursor < 1.0 - 1e-15) out.emplace_back(cursor, 1.0);
    return out;
}

}  // namespace

LatticeAutomorphism base_rearrangement(const std::vector<IntervalFamily>& src,
                                       const std::vector<IntervalFamily>& dst) {
    if (src.size() != dst.size())
        throw precondition_error("base_rearrangement: family count mismatch");
    std::vector<IntervalFamily> s = src, d = dst;
    IntervalFamily sall, dall;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (std::abs(family_total(s[k]) - family_total(d[k])) > 1e-9)
            throw precondition_error("base_rearrangement: total length mismatch");
        sall.insert(sall.end(), s[k].begin(), s[k].end());
        dall.insert(dall.end(), d[k].begin(), d[k].end());
    }
    // Pair the uncovered remainder with itself in order.
    s.push_back(complement(sall));
    d.push_back(complement(dall));
    if (std::abs(family_total(s.back()) - family_total(d.back())) > 1e-9)
        throw precondition_error("base_rearrangement: families must cover equal measure");
    if (s.back().empty()) {
        s.pop_back();
        d.pop_back();
    }

    // Point map feeds f, so pieces carry dst chunks onto src chunks, slope 1.
    std::vector<PLMap1D::Piece> pieces;
    for (std::size_t k = 0; k < s.size(); ++k) {
        std::size_t is = 0, id = 0;
        double off_s = 0.0, off_d = 0.0;
        while (id < d[k].size() && is < s[k].size()) {
            double rem_s = (s[k][is].second - s[k][is].first) - off_s;
            double rem_d = (d[k][id].second - d[k][id].first) - off_d;
            double step = std::min(rem_s, rem_d);
            if (step > 1e-15)
                pieces.push_back(PLMap1D::Piece{d[k][id].first + off_d,
                                                d[k][id].first + off_d + step,
                                                s[k][is].first + off_s,
                                                s[k][is].first + off_s + step});
            off_s += step;
            off_d += step;
            if (rem_s - step <= 1e-15) {
                ++is;
                off_s = 0.0;
            }
            if (rem_d - step <= 1e-15) {
                ++id;
                off_d = 0.0;
            }
        }
    }
    PLMap1D base(std::move(pieces));
    std::vector<double> cuts = base.source_cuts();
    Partition1D cells = refine_with_cuts(Partition1D::whole(), cuts);
    std::vector<PLMap1D> fiber(cells.size(), PLMap1D::identity());
    return LatticeAutomorphism{std::move(base), std::move(cells), std::move(fiber),
                               StepFunction2D::constant(1.0)};
}

LatticeAutomorphism fiber_shuffle(Partition1D cells, std::vector<PLMap1D> maps) {
    if (maps.size() != cells.size())
        throw precondition_error("fiber_shuffle: one map per cell required");
    return LatticeAutomorphism{PLMap1D::identity(), std::move(cells), std::move(maps),
                               StepFunction2D::constant(1.0)};
}

// ---- full-support perturbation ---------------------------------------------

Embedding full_support_perturbation(const Embedding& emb, double eps, const NormParams& pq) {
    if (!(eps > 0.0 && eps < 1.0))
        throw precondition_error("full_support_perturbation: need 0 < eps < 1");
    if (emb.size() == 0) throw precondition_error("full_support_perturbation: empty embedding");
    RefinedFamily fam = refine_family(emb.images);
    const std::size_t natoms = emb.size();
    const std::size_t ncells = fam.base.size();

    // Detect support gaps.
    bool full = true;
    for (std::size_t i = 0; i < ncells && full; ++i)
        for (std::size_t s = 0; s < fam.fibers[i].size() && full; ++s) {
            bool covered = false;
            for (std::size_t t = 0; t < natoms; ++t)
                if (fam.values[t][i][s] > 0.0) covered = true;
            if (!covered) full = false;
        }
    if (full) return emb;

    // Stage 1: fill fiber gaps over the supported base region.  The gap over a
    // base cell is claimed by the first atom with N-mass there; that atom's
    // values shrink by (1-eps)^{1/q} and the gap gets the mass-matching mixing
    // value, so N^q is preserved exactly.  Cells without a gap are untouched.
    std::vector<std::vector<std::vector<double>>> vals = fam.values;
    std::vector<char> base_supported(ncells, 0);
    for (std::size_t i = 0; i < ncells; ++i) {
        std::vector<double> nq(natoms);
        std::size_t claimant = SIZE_MAX;
        for (std::size_t t = 0; t < natoms; ++t) {
            nq[t] = fam.nq(t, i, pq.q);
            if (claimant == SIZE_MAX && nq[t] > 0.0) claimant = t;
        }
        if (claimant == SIZE_MAX) continue;  // complement base cell
        base_supported[i] = 1;
        double gap = 0.0;
        for (std::size_t s = 0; s < fam.fibers[i].size(); ++s) {
            bool covered = false;
            for (std::size_t t = 0; t < natoms; ++t)
                if (fam.values[t][i][s] > 0.0) covered = true;
            if (!covered) gap += fam.fibers[i].length(s);
        }
        if (gap <= 0.0) continue;  // no fiber slack: skip mixing, N stays exact
        double mix = std::pow(eps * nq[claimant] / gap, 1.0 / pq.q);
        double shrink = std::pow(1.0 - eps, 1.0 / pq.q);
        for (std::size_t s = 0; s < fam.fibers[i].size(); ++s) {
            bool covered = false;
            for (std::size_t t = 0; t < natoms; ++t)
                if (fam.values[t][i][s] > 0.0) covered = true;
            if (covered)
                vals[claimant][i][s] *= shrink;
            else
                vals[claimant][i][s] = mix;
        }
    }

    std::vector<StepFunction2D> stage1;
    for (std::size_t t = 0; t < natoms; ++t) {
        std::vector<StepFunction1D> fibers;
        for (std::size_t i = 0; i < ncells; ++i) fibers.emplace_back(fam.fibers[i], vals[t][i]);
        stage1.emplace_back(StepFunction2D(fam.base, std::move(fibers)).simplified());
    }

    bool base_full = std::all_of(base_supported.begin(), base_supported.end(),
                                 [](char c) { return c != 0; });
    if (base_full) return Embedding{std::move(stage1)};

    // Stage 2: plant an isometric copy on the unsupported base region, built as
    // stacked indicators realizing the N^q-profile pushforward of the family.
    double mu_supp = 0.0, mu_comp = 0.0;
    for (std::size_t i = 0; i < ncells; ++i)
        (base_supported[i] ? mu_supp : mu_comp) += fam.base.length(i);

    struct Push {
        double len;
        std::vector<double> z;
    };
    std::vector<Push> push;
    for (std::size_t i = 0; i < ncells; ++i) {
        if (!base_supported[i]) continue;
        Push p{fam.base.length(i), std::vector<double>(natoms)};
        for (std::size_t t = 0; t < natoms; ++t) p.z[t] = fam.nq(t, i, pq.q);
        push.push_back(std::move(p));
    }

    // Carve complement base cells into pieces, one run per pushforward atom;
    // cumulative boundaries guarantee the whole complement gets covered.
    struct PlantPiece {
        double lo, hi;
        std::size_t push_idx;
    };
    std::vector<double> bnd{0.0};
    for (const auto& p : push) bnd.push_back(bnd.back() + p.len * mu_comp / mu_supp);
    bnd.back() = mu_comp;
    std::vector<PlantPiece> plan;
    double arc = 0.0;  // complement arc-length consumed so far
    for (std::size_t i = 0; i < ncells; ++i) {
        if (base_supported[i]) continue;
        double lo = fam.base.breakpoints()[i], hi = fam.base.breakpoints()[i + 1];
        double cell_arc0 = arc, cell_arc1 = arc + (hi - lo);
        for (std::size_t a = 0; a < push.size(); ++a) {
            double a0 = std::max(bnd[a], cell_arc0), a1 = std::min(bnd[a + 1], cell_arc1);
            if (a1 - a0 > 1e-15)
                plan.push_back(PlantPiece{lo + (a0 - cell_arc0), lo + (a1 - cell_arc0), a});
        }
        arc = cell_arc1;
    }

    const double value_scale = std::pow(mu_supp / mu_comp, 1.0 / pq.p);
    std::vector<double> cuts;
    for (const auto& pl : plan) {
        cuts.push_back(pl.lo);
        cuts.push_back(pl.hi);
    }
    for (double b : fam.base.breakpoints()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    Partition1D plant_base = refine_with_cuts(Partition1D::whole(), cuts);

    std::vector<StepFunction2D> copies;
    for (std::size_t t = 0; t < natoms; ++t) {
        std::vector<StepFunction1D> fibers;
        for (std::size_t i = 0; i < plant_base.size(); ++i) {
            double mid = 0.5 * (plant_base.breakpoints()[i] + plant_base.breakpoints()[i + 1]);
            const PlantPiece* owner = nullptr;
            for (const auto& pl : plan)
                if (mid > pl.lo && mid < pl.hi) {
                    owner = &pl;
                    break;
                }
            if (owner == nullptr) {
                fibers.push_back(StepFunction1D::constant(0.0));
                continue;
            }
            const std::vector<double>& z = push[owner->push_idx].z;
            double Z = std::accumulate(z.begin(), z.end(), 0.0);
            std::vector<double> lens, vv;
            for (std::size_t u = 0; u < natoms; ++u) {
                if (z[u] <= 0.0) continue;
                lens.push_back(z[u] / Z);
                vv.push_back(u == t ? std::pow(Z, 1.0 / pq.q) * value_scale : 0.0);
            }
            fibers.emplace_back(Partition1D(std::move(lens)), std::move(vv));
        }
        copies.emplace_back(StepFunction2D(plant_base, std::move(fibers)).simplified());
    }

    const double keep = std::pow(1.0 - std::pow(eps, pq.p), 1.0 / pq.p);
    Embedding out;
    for (std::size_t t = 0; t < natoms; ++t)
        out.images.push_back(
            add(scale(keep, stage1[t]), scale(eps, copies[t])).simplified());
    return out;
}

// ---- band matching ----------------------------------------------------------

namespace {

struct BandStructure {
    RefinedFamily fam;
    std::vector<std::size_t> block_of_cell;     // per base cell
    std::vector<IntervalFamily> block_support;  // A(k) per block
};

BandStructure analyze_bands(const Embedding& emb, const BKpqSpec& spec) {
    const NormParams& pq = spec.params;
    const double eta = spec.eta();
    BandStructure bs;
    bs.fam = refine_family(emb.images);
    if (emb.size() != spec.total_atoms())
        throw precondition_error("match_bands: embedding size does not match spec");

    // Expected atom sets per block under the spec's flattening.
    std::vector<std::vector<std::size_t>> block_atoms(spec.block_count());
    for (std::size_t t = 0; t < spec.total_atoms(); ++t)
        block_atoms[spec.unflatten(t).first].push_back(t);

    const double thresh = 1e-9 * std::pow(eta, pq.q);
    bs.block_of_cell.resize(bs.fam.base.size());
    for (std::size_t i = 0; i < bs.fam.base.size(); ++i) {
        std::vector<std::size_t> pattern;
        for (std::size_t t = 0; t < emb.size(); ++t)
            if (bs.fam.nq(t, i, pq.q) > thresh) pattern.push_back(t);
        std::size_t found = SIZE_MAX;
        for (std::size_t k = 0; k < block_atoms.size(); ++k)
            if (pattern == block_atoms[k]) found = k;
        if (found == SIZE_MAX)
            throw precondition_error("match_bands: base cell not matching any block (structural mismatch)");
        bs.block_of_cell[i] = found;
    }
    bs.block_support.resize(spec.block_count());
    for (std::size_t i = 0; i < bs.fam.base.size(); ++i) {
        double lo = bs.fam.base.breakpoints()[i], hi = bs.fam.base.breakpoints()[i + 1];
        auto& fam_k = bs.block_support[bs.block_of_cell[i]];
        if (!fam_k.empty() && std::abs(fam_k.back().second - lo) < 1e-14)
            fam_k.back().second = hi;
        else
            fam_k.emplace_back(lo, hi);
    }
    for (std::size_t k = 0; k < spec.block_count(); ++k) {
        double expect = std::pow(static_cast<double>(spec.blocks[k]), pq.p / pq.q) /
                        std::pow(eta, pq.p);
        if (std::abs(family_total(bs.block_support[k]) - expect) > 1e-6)
            throw precondition_error("match_bands: block measure mismatch (structural mismatch)");
    }
    return bs;
}

// psi_i: identity on the base; per base cell the fiber interleave mapping each
// atom's support onto its canonical V_{k,j}, normalized so the map lands
// exactly on the uniform grid.
LatticeAutomorphism band_fiber_map(const BandStructure& bs, const BKpqSpec& spec) {
    std::vector<PLMap1D> fiber;
    fiber.reserve(bs.fam.base.size());
    for (std::size_t i = 0; i < bs.fam.base.size(); ++i) {
        std::size_t k = bs.block_of_cell[i];
        const int mk = spec.blocks[k];
        std::vector<PLMap1D::Piece> pieces;
        for (int j = 0; j < mk; ++j) {
            std::size_t t = 0;
            for (; t < spec.total_atoms(); ++t) {
                auto [bk, bj] = spec.unflatten(t);
                if (bk == k && static_cast<int>(bj) == j) break;
            }
            // Support intervals of atom t on this cell.
            std::vector<std::pair<double, double>> supp;
            const Partition1D& fp = bs.fam.fibers[i];
            for (std::size_t s = 0; s < fp.size(); ++s) {
                if (bs.fam.values[t][i][s] <= 0.0) continue;
                double lo = fp.breakpoints()[s], hi = fp.breakpoints()[s + 1];
                if (!supp.empty() && std::abs(supp.back().second - lo) < 1e-14)
                    supp.back().second = hi;
                else
                    supp.emplace_back(lo, hi);
            }
            double total = 0.0;
            for (auto [lo, hi] : supp) total += hi - lo;
            if (!(total > 0.0))
                throw precondition_error("match_bands: atom missing fiber support on its block");
            double v0 = static_cast<double>(j) / mk, v1 = static_cast<double>(j + 1) / mk;
            double cursor = v0;
            for (std::size_t sidx = 0; sidx < supp.size(); ++sidx) {
                auto [lo, hi] = supp[sidx];
                double next = sidx + 1 == supp.size() ? v1
                                                      : cursor + (hi - lo) / total * (v1 - v0);
                pieces.push_back(PLMap1D::Piece{lo, hi, cursor, next});
                cursor = next;
            }
        }
        fiber.push_back(PLMap1D(std::move(pieces)));
    }
    return LatticeAutomorphism{PLMap1D::identity(), bs.fam.base, std::move(fiber),
                               StepFunction2D::constant(1.0)};
}

}  // namespace

LatticeAutomorphism match_bands(const Embedding& emb1, const Embedding& emb2,
                                const BKpqSpec& spec) {
    const double eta = spec.eta();
    for (const Embedding* e : {&emb1, &emb2}) {
        StepFunction2D sum = e->images[0];
        for (std::size_t t = 1; t < e->size(); ++t) sum = add(sum, e->images[t]);
        if (sup_abs_diff(sum, StepFunction2D::constant(eta)) > tol().norm * std::max(1.0, eta))
            throw precondition_error("match_bands: image sum must equal eta * 1");
    }
    // Canonical W_k intervals.
    CanonicalAtoms can = canonical_representation(spec);
    std::vector<IntervalFamily> wk;
    double cursor = 0.0;
    for (std::size_t k = 0; k < spec.block_count(); ++k) {
        wk.push_back({{cursor, cursor + can.base_cell_lengths[k]}});
        cursor += can.base_cell_lengths[k];
    }
    wk.back().back().second = 1.0;

    auto build_phi = [&](const Embedding& emb) {
        BandStructure bs = analyze_bands(emb, spec);
        LatticeAutomorphism rho = base_rearrangement(wk, bs.block_support);
        LatticeAutomorphism psi = band_fiber_map(bs, spec);
        return compose(psi, rho);
    };
    LatticeAutomorphism phi1 = build_phi(emb1);
    LatticeAutomorphism phi2 = build_phi(emb2);
    return compose(phi2, inverse(phi1));
}

std::pair<LatticeAutomorphism, PipelineReport> auh_pipeline(const Embedding& emb1,
                                                            const Embedding& emb2,
                                                            const BKpqSpec& spec, double eps) {
    if (!(eps > 0.0)) throw precondition_error("auh_pipeline: eps must be positive");
    const NormParams& pq = spec.params;
    const double eta = spec.eta();
    const double stage_eps = eps / 10.0;

    auto normalize = [&](const Embedding& emb)
        -> std::pair<Embedding, LatticeAutomorphism> {
        Embedding fs = full_support_perturbation(emb, stage_eps, pq);
        StepFunction2D s = fs.images[0];
        for (std::size_t t = 1; t < fs.size(); ++t) s = add(s, fs.images[t]);
        double ns = mixed_norm(s, pq);
        StepFunction2D u = scale(1.0 / ns, s);
        LatticeAutomorphism U = unit_to_e(u.simplified(), pq);
        LatticeAutomorphism Uinv = inverse(U);
        Embedding normalized;
        for (const auto& img : fs.images)
            normalized.images.push_back(scale(eta / ns, apply(Uinv, img)).simplified());
        return {std::move(normalized), std::move(U)};
    };

    auto [n1, U1] = normalize(emb1);
    auto [n2, U2] = normalize(emb2);
    LatticeAutomorphism M = match_bands(n1, n2, spec);
    LatticeAutomorphism phi = compose(U2, compose(M, inverse(U1)));

    PipelineReport rep;
    for (std::size_t t = 0; t < emb1.size(); ++t) {
        double r = mixed_norm(sub(apply(phi, emb1.images[t]), emb2.images[t]), pq);
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    rep.ok = rep.max_residual < eps;
    return {std::move(phi), std::move(rep)};
}

double stability_probe(std::span<const StepFunction2D> fs, const StepFunction2D& e,
                       const NormParams& pq) {
    if (fs.empty()) throw precondition_error("stability_probe: empty family");
    StepFunction2D sum = fs[0];
    for (std::size_t k = 1; k < fs.size(); ++k) sum = add(sum, fs[k]);
    if (sup_abs_diff(sum, StepFunction2D::constant(1.0)) > 1e-12)
        throw precondition_error("stability_probe: family must partition 1");
    for (const auto& f : fs) {
        for (std::size_t i = 0; i < f.base_size(); ++i) {
            const auto& row = f.fiber(i);
            int transitions = 0;
            double prev = 0.0;
            for (std::size_t s = 0; s < row.size(); ++s) {
                double v = row.value(s);
                if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12)
                    throw precondition_error("stability_probe: bands must be indicators");
                if ((v > 0.5) != (prev > 0.5)) ++transitions;
                prev = v;
            }
            if (prev > 0.5) ++transitions;
            if (transitions > 2)
                throw precondition_error("stability_probe: band must be a fiber interval");
        }
    }
    LatticeAutomorphism phi = unit_to_e(e, pq);
    double worst = 0.0;
    for (const auto& f : fs)
        worst = std::max(worst, mixed_norm(sub(apply(phi, f), f), pq));
    return worst;
}

// ---- JSON -------------------------------------------------------------------

nlohmann::json to_json(const LatticeAutomorphism& a) {
    auto pieces_json = [](const PLMap1D& m) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : m.pieces()) arr.push_back({p.s0, p.s1, p.d0, p.d1});
        return arr;
    };
    nlohmann::json j;
    j["base"] = pieces_json(a.base);
    j["cells"] = a.cells.lengths();
    nlohmann::json fibs = nlohmann::json::array();
    for (const auto& f : a.fiber) fibs.push_back(pieces_json(f));
    j["fibers"] = std::move(fibs);
    j["multiplier"] = to_json(a.multiplier);
    return j;
}

LatticeAutomorphism automorphism_from_json(const nlohmann::json& j) {
    auto map_from = [](const nlohmann::json& arr) {
        std::vector<PLMap1D::Piece> ps;
        for (const auto& p : arr)
            ps.push_back(PLMap1D::Piece{p.at(0).get<double>(), p.at(1).get<double>(),
                                        p.at(2).get<double>(), p.at(3).get<double>()});
        return PLMap1D(std::move(ps));
    };
    PLMap1D base = map_from(j.at("base"));
    Partition1D cells(j.at("cells").get<std::vector<double>>());
    std::vector<PLMap1D> fiber;
    for (const auto& f : j.at("fibers")) fiber.push_back(map_from(f));
    StepFunction2D mult = step2d_from_json(j.at("multiplier"));
    return LatticeAutomorphism{std::move(base), std::move(cells), std::move(fiber),
                               std::move(mult)};
}

}  // namespace lplq
