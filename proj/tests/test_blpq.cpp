#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lplq/blpq.hpp"
#include "lplq/errors.hpp"
#include "lplq/random_gen.hpp"
#include "lplq/transport.hpp"

using namespace lplq;

TEST_CASE("canonical representation worked examples") {
    // single block of one atom: e = 1, eta = 1
    CanonicalAtoms single = canonical_representation(BKpqSpec({1}, NormParams(2.0, 1.0)));
    CHECK(single.eta == doctest::Approx(1.0));
    CHECK(sup_abs_diff(single.atoms[0], StepFunction2D::constant(1.0)) == 0.0);

    // blocks (1,2), p=2, q=1
    BKpqSpec spec({1, 2}, NormParams(2.0, 1.0));
    CanonicalAtoms can = canonical_representation(spec);
    const double eta = std::sqrt(5.0);
    CHECK(can.eta == doctest::Approx(eta).epsilon(1e-14));
    CHECK(can.base_cell_lengths[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(can.base_cell_lengths[1] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(sup_abs_diff(can.atoms[0], StepFunction2D::indicator(0.0, 0.2, 0.0, 1.0, eta)) < 1e-14);
    CHECK(sup_abs_diff(can.atoms[1], StepFunction2D::indicator(0.2, 1.0, 0.0, 0.5, eta)) < 1e-14);
    CHECK(sup_abs_diff(can.atoms[2], StepFunction2D::indicator(0.2, 1.0, 0.5, 1.0, eta)) < 1e-14);

    // blocks (2,2), p=4, q=2
    CanonicalAtoms ev = canonical_representation(BKpqSpec({2, 2}, NormParams(4.0, 2.0)));
    CHECK(ev.eta == doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-14));
    CHECK(ev.base_cell_lengths[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ev.base_cell_lengths[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("canonical atoms: unit norms and exact partition of eta") {
    RandomGen gen(61);
    std::uniform_int_distribution<int> bd(1, 4);
    for (int trial = 0; trial < 12; ++trial) {
        int nblocks = 1 + trial % 4;
        std::vector<int> blocks;
        for (int k = 0; k < nblocks; ++k) blocks.push_back(bd(gen.rng));
        NormParams pq = trial % 2 ? NormParams(3.0, 2.0) : NormParams(2.0, 1.0);
        BKpqSpec spec(blocks, pq);
        CanonicalAtoms can = canonical_representation(spec);
        StepFunction2D sum = can.atoms[0];
        for (std::size_t t = 1; t < can.atoms.size(); ++t) sum = add(sum, can.atoms[t]);
        CHECK(sup_abs_diff(sum, StepFunction2D::constant(can.eta)) == 0.0);
        for (const auto& atom : can.atoms)
            CHECK(mixed_norm(atom, pq) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("n_map of canonical atom matches the remark formulas") {
    BKpqSpec spec({1, 2}, NormParams(2.0, 1.0));
    CanonicalAtoms can = canonical_representation(spec);
    StepFunction1D n = n_map(can.atoms[1], spec.params);  // e(2,1)
    double w2 = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n.value(i) > 0.0) {
            CHECK(n.value(i) == doctest::Approx(std::sqrt(5.0) / 2).epsilon(1e-14));
            w2 += n.partition().length(i);
        }
    }
    CHECK(w2 == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(std::sqrt(5.0) / 2 * std::sqrt(0.8) == doctest::Approx(1.0).epsilon(1e-14));

    // base-disjointness of atoms from different blocks
    CHECK(is_base_disjoint(can.atoms[0], can.atoms[1], spec.params));
    CHECK_FALSE(is_base_disjoint(can.atoms[1], can.atoms[2], spec.params));
}

TEST_CASE("closed form norm") {
    BKpqSpec spec({1, 2}, NormParams(2.0, 1.0));
    std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(closed_form_norm(spec, ones) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    std::vector<double> unit{0.0, 1.0, 0.0};
    CHECK(closed_form_norm(spec, unit) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(closed_form_norm(spec, zero) == 0.0);
    CHECK_THROWS_AS(closed_form_norm(spec, std::vector<double>{1.0}), precondition_error);
}

TEST_CASE("grid norm equals closed form on random draws") {
    RandomGen gen(67);
    std::uniform_real_distribution<double> cd(-2.0, 2.0);
    for (const auto& blocks : {std::vector<int>{1, 2}, {2, 2}, {3, 1, 2}}) {
        BKpqSpec spec(blocks, NormParams(2.0, 1.0));
        for (int draw = 0; draw < 3; ++draw) {
            std::vector<double> a(spec.total_atoms());
            for (double& x : a) x = cd(gen.rng);
            auto [grid, closed] = grid_vs_closed_form(spec, a);
            CHECK(grid == doctest::Approx(closed).epsilon(1e-10));
        }
    }
}

TEST_CASE("verify_blpq_structure") {
    NormParams pq(2.0, 1.0);
    BKpqSpec spec({1, 2}, pq);
    CanonicalAtoms can = canonical_representation(spec);
    StructureReport rep = verify_blpq_structure(Embedding{can.atoms}, pq);
    CHECK(rep.is_blpq);
    REQUIRE(rep.blocks.size() == 2);
    CHECK(rep.blocks[0].size() == 1);
    CHECK(rep.blocks[1].size() == 2);

    // two fiber-halves with equal N profiles: a single l_q^2 block
    double v = std::pow(2.0, 1.0 / pq.q);
    Embedding halves{{StepFunction2D::indicator(0.0, 1.0, 0.0, 0.5, v),
                      StepFunction2D::indicator(0.0, 1.0, 0.5, 1.0, v)}};
    StructureReport rep2 = verify_blpq_structure(halves, pq);
    CHECK(rep2.is_blpq);
    REQUIRE(rep2.blocks.size() == 1);
    CHECK(rep2.blocks[0].size() == 2);

    // stacked indicators with varying split: profiles neither equal nor
    // base-disjoint
    StepFunction2D f1(Partition1D({0.5, 0.5}),
                      {StepFunction1D(Partition1D({0.3, 0.7}), {1.0, 0.0}),
                       StepFunction1D(Partition1D({0.7, 0.3}), {1.0, 0.0})});
    StepFunction2D f2 = sub(StepFunction2D::constant(1.0), f1);
    StructureReport rep3 = verify_blpq_structure(Embedding{{f1, f2}}, pq);
    CHECK_FALSE(rep3.is_blpq);
    CHECK_FALSE(rep3.violations.empty());
}

TEST_CASE("extract_blpq_atoms basics") {
    NormParams pq(2.0, 1.0);
    Embedding one{{StepFunction2D::constant(1.0)}};
    ExtractResult r1 = extract_blpq_atoms(one, pq);
    CHECK(r1.spec.blocks == std::vector<int>{1});
    CHECK(r1.constant == doctest::Approx(1.0));
    REQUIRE(r1.atoms.size() == 1);
    CHECK(sup_abs_diff(r1.atoms[0], StepFunction2D::constant(1.0)) < 1e-12);
    CHECK(r1.coeffs[0][0] == doctest::Approx(1.0).epsilon(1e-12));

    // canonical blocks (1,1): recovers the same two atoms
    BKpqSpec spec11({1, 1}, pq);
    CanonicalAtoms can = canonical_representation(spec11);
    ExtractResult r2 = extract_blpq_atoms(Embedding{can.atoms}, pq);
    CHECK(r2.spec.blocks == std::vector<int>{1, 1});
    REQUIRE(r2.atoms.size() == 2);
    for (const auto& phi : r2.atoms) {
        double best = 1e9;
        for (const auto& atom : can.atoms) best = std::min(best, sup_abs_diff(phi, atom));
        CHECK(best < 1e-12);
    }

    // base-simple stacked pair: reconstruction is exact on the refinement
    StepFunction2D f1(Partition1D({0.5, 0.5}),
                      {StepFunction1D(Partition1D({0.25, 0.75}), {2.0, 0.0}),
                       StepFunction1D(Partition1D({0.6, 0.4}), {2.0, 0.0})});
    StepFunction2D f2 = sub(StepFunction2D::constant(2.0), f1);
    Embedding emb{{f1, f2}};
    ExtractResult r3 = extract_blpq_atoms(emb, pq);
    CHECK(r3.constant == doctest::Approx(2.0));
    for (std::size_t j = 0; j < emb.size(); ++j) {
        StepFunction2D recon = StepFunction2D::constant(0.0);
        for (std::size_t idx = 0; idx < r3.atoms.size(); ++idx) {
            std::size_t k = r3.pairs[idx].first;
            if (r3.coeffs[k][j] == 0.0) continue;
            StepFunction2D cand = scale(r3.coeffs[k][j], r3.atoms[idx]);
            if (is_disjoint(cand, emb.images[j])) continue;
            recon = add(recon, cand);
        }
        CHECK(mixed_norm(sub(recon, emb.images[j]), pq) < 1e-12);
    }
    CHECK(verify_blpq_structure(Embedding{r3.atoms}, pq).is_blpq);

    // non-constant sum is rejected
    Embedding bad{{StepFunction2D::indicator(0.0, 0.5, 0.0, 1.0)}};
    CHECK_THROWS_AS(extract_blpq_atoms(bad, pq), precondition_error);
}

TEST_CASE("extract recovers block multiset after sum-preserving transport") {
    NormParams pq(3.0, 2.0);
    RandomGen gen(71);
    for (const auto& blocks : {std::vector<int>{1, 2}, {2, 2}, {3, 1}}) {
        BKpqSpec spec(blocks, pq);
        CanonicalAtoms can = canonical_representation(spec);
        LatticeAutomorphism t = compose(gen.interval_exchange(4), gen.random_fiber_shuffle(3));
        Embedding moved;
        for (const auto& atom : can.atoms) moved.images.push_back(apply(t, atom));
        ExtractResult r = extract_blpq_atoms(moved, pq);
        std::vector<int> got = r.spec.blocks;
        std::vector<int> want = blocks;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("quantize_to_kpq") {
    NormParams pq(2.0, 1.0);
    BKpqSpec spec({1, 2}, pq);
    CanonicalAtoms can = canonical_representation(spec);
    Embedding emb{can.atoms};

    // already on the lattice: identity for a coarse eps
    Embedding same = quantize_to_kpq(emb, 0.5, pq);
    for (std::size_t t = 0; t < emb.size(); ++t)
        CHECK(sup_abs_diff(same.images[t], emb.images[t]) < 1e-12);

    // a stacked pair with smoothly varying heights
    const std::size_t n = 8;
    std::vector<StepFunction1D> rows1, rows2;
    for (std::size_t c = 0; c < n; ++c) {
        double h = 0.2 + 0.6 * static_cast<double>(c) / (n - 1);
        Partition1D fp({h, 1.0 - h});
        rows1.emplace_back(fp, std::vector<double>{1.0, 0.0});
        rows2.emplace_back(fp, std::vector<double>{0.0, 1.0});
    }
    Embedding stacked{{StepFunction2D(Partition1D::uniform(n), rows1),
                       StepFunction2D(Partition1D::uniform(n), rows2)}};

    std::size_t prev_levels = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
        Embedding qz = quantize_to_kpq(stacked, eps, pq);
        for (std::size_t t = 0; t < stacked.size(); ++t)
            CHECK(mixed_norm(sub(qz.images[t], stacked.images[t]), pq) < eps);
        StepFunction2D sum = add(qz.images[0], qz.images[1]);
        CHECK(sup_abs_diff(sum, StepFunction2D::constant(1.0)) < 1e-12);
        ExtractResult r = extract_blpq_atoms(qz, pq);
        CHECK(r.levels.size() >= prev_levels);
        prev_levels = r.levels.size();
        CHECK(verify_blpq_structure(Embedding{r.atoms}, pq).is_blpq);
    }

    CHECK_THROWS_AS(quantize_to_kpq(emb, -1.0, pq), precondition_error);
}
