#include "lplq/random_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lplq {

Partition1D RandomGen::partition(std::size_t min_cells, std::size_t max_cells) {
    std::uniform_int_distribution<std::size_t> nd(min_cells, max_cells);
    std::size_t n = nd(rng);
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    std::vector<double> lens(n);
    double sum = 0.0;
    for (double& l : lens) {
        l = ud(rng);
        sum += l;
    }
    for (double& l : lens) l /= sum;
    return Partition1D(std::move(lens));
}

StepFunction2D RandomGen::step_function(std::size_t max_base, std::size_t max_fiber, double lo,
                                        double hi, bool allow_negative, double zero_prob) {
    Partition1D base = partition(1, max_base);
    std::uniform_real_distribution<double> vd(lo, hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<StepFunction1D> fibers;
    for (std::size_t i = 0; i < base.size(); ++i) {
        Partition1D fp = partition(1, max_fiber);
        std::vector<double> vals(fp.size());
        for (double& v : vals) {
            if (zero_prob > 0.0 && coin(rng) < zero_prob) {
                v = 0.0;
                continue;
            }
            v = vd(rng);
            if (allow_negative && coin(rng) < 0.5) v = -v;
        }
        fibers.emplace_back(std::move(fp), std::move(vals));
    }
    return StepFunction2D(std::move(base), std::move(fibers));
}

StepFunction2D RandomGen::unit_positive(const NormParams& pq, std::size_t max_base,
                                        std::size_t max_fiber) {
    Partition1D base = partition(2, std::max<std::size_t>(2, max_base));
    std::uniform_real_distribution<double> logu(std::log(0.2), std::log(5.0));
    std::vector<StepFunction1D> fibers;
    for (std::size_t i = 0; i < base.size(); ++i) {
        Partition1D fp = partition(1, max_fiber);
        std::vector<double> vals(fp.size());
        for (double& v : vals) v = std::exp(logu(rng));
        fibers.emplace_back(std::move(fp), std::move(vals));
    }
    StepFunction2D e(std::move(base), std::move(fibers));
    return scale(1.0 / mixed_norm(e, pq), e);
}

LatticeAutomorphism RandomGen::interval_exchange(std::size_t max_cells) {
    Partition1D cells = partition(2, std::max<std::size_t>(2, max_cells));
    std::vector<std::size_t> perm(cells.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<IntervalFamily> src, dst;
    std::vector<std::pair<double, double>> src_iv;
    for (std::size_t i = 0; i < cells.size(); ++i)
        src_iv.emplace_back(cells.breakpoints()[i], cells.breakpoints()[i + 1]);
    // Destination: the permuted cells laid out in order of perm.
    std::vector<std::pair<double, double>> dst_iv(cells.size());
    double pos = 0.0;
    for (std::size_t slot = 0; slot < perm.size(); ++slot) {
        std::size_t cell = perm[slot];
        double len = cells.length(cell);
        dst_iv[cell] = {pos, pos + len};
        pos += len;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        src.push_back({src_iv[i]});
        dst.push_back({dst_iv[i]});
    }
    return base_rearrangement(src, dst);
}

LatticeAutomorphism RandomGen::random_fiber_shuffle(std::size_t max_cells) {
    Partition1D cells = partition(1, std::max<std::size_t>(1, max_cells));
    std::vector<PLMap1D> maps;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Partition1D fp = partition(2, 4);
        std::vector<std::size_t> perm(fp.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<PLMap1D::Piece> pieces;
        // dst position of each fiber cell after permutation, slope 1.
        std::vector<double> pos(fp.size());
        double cursor = 0.0;
        for (std::size_t slot = 0; slot < perm.size(); ++slot) {
            pos[perm[slot]] = cursor;
            cursor += fp.length(perm[slot]);
        }
        for (std::size_t s = 0; s < fp.size(); ++s)
            pieces.push_back(PLMap1D::Piece{fp.breakpoints()[s], fp.breakpoints()[s + 1], pos[s],
                                            pos[s] + fp.length(s)});
        maps.push_back(PLMap1D(std::move(pieces)));
    }
    return fiber_shuffle(std::move(cells), std::move(maps));
}

Embedding RandomGen::transported_embedding(const BKpqSpec& spec) {
    CanonicalAtoms can = canonical_representation(spec);
    StepFunction2D e = unit_positive(spec.params, 4, 3);
    LatticeAutomorphism t = compose(interval_exchange(5), unit_to_e(e, spec.params));
    Embedding out;
    for (const auto& atom : can.atoms) out.images.push_back(apply(t, atom));
    return out;
}

}  // namespace lplq
