#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lplq/blpq.hpp"
#include "lplq/equimeasure.hpp"
#include "lplq/errors.hpp"
#include "lplq/random_gen.hpp"
#include "lplq/transport.hpp"

using namespace lplq;

TEST_CASE("pushforward worked examples") {
    NormParams pq(2.0, 1.0);
    std::vector<StepFunction2D> one{StepFunction2D::constant(1.0)};
    VectorMeasure m = pushforward(one, pq);
    REQUIRE(m.atoms.size() == 1);
    CHECK(m.atoms[0].mass == doctest::Approx(1.0));
    CHECK(m.atoms[0].point[0] == doctest::Approx(1.0));

    BKpqSpec spec({1, 2}, pq);
    CanonicalAtoms can = canonical_representation(spec);
    VectorMeasure mc = pushforward(can.atoms, pq);
    REQUIRE(mc.atoms.size() == 2);
    // sorted lexicographically: (0, s5/2, s5/2) mass 4/5, then (s5,0,0) mass 1/5
    CHECK(mc.atoms[0].mass == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(mc.atoms[0].point[0] == doctest::Approx(0.0));
    CHECK(mc.atoms[0].point[1] == doctest::Approx(std::sqrt(5.0) / 2).epsilon(1e-12));
    CHECK(mc.atoms[0].point[2] == doctest::Approx(std::sqrt(5.0) / 2).epsilon(1e-12));
    CHECK(mc.atoms[1].mass == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(mc.atoms[1].point[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(mc.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pushforward is invariant under base rearrangement") {
    NormParams pq(3.0, 2.0);
    RandomGen gen(131);
    BKpqSpec spec({2, 1}, pq);
    CanonicalAtoms can = canonical_representation(spec);
    for (int trial = 0; trial < 10; ++trial) {
        LatticeAutomorphism rho = gen.interval_exchange(5);
        std::vector<StepFunction2D> moved;
        for (const auto& atom : can.atoms) moved.push_back(apply(rho, atom));
        VectorMeasure a = pushforward(can.atoms, pq);
        VectorMeasure b = pushforward(moved, pq);
        CHECK(equimeasurable(a, b, 1e-9, 1e-9));
        CHECK(unmatched_mass(a, b, 1e-9) == doctest::Approx(0.0));
    }
}

TEST_CASE("one-fixing composites preserve pushforwards of indicator tuples") {
    NormParams pq(2.0, 1.0);
    RandomGen gen(137);
    for (int trial = 0; trial < 20; ++trial) {
        LatticeAutomorphism t = compose(gen.interval_exchange(4), gen.random_fiber_shuffle(3));
        CHECK(sup_abs_diff(apply(t, StepFunction2D::constant(1.0)),
                           StepFunction2D::constant(1.0)) < 1e-12);
        std::vector<StepFunction2D> tuple{StepFunction2D::indicator(0.0, 0.4, 0.0, 0.55),
                                          StepFunction2D::indicator(0.4, 0.8, 0.3, 1.0),
                                          StepFunction2D::indicator(0.8, 1.0, 0.1, 0.6)};
        std::vector<StepFunction2D> moved;
        for (const auto& f : tuple) moved.push_back(apply(t, f));
        CHECK(equimeasurable(pushforward(tuple, pq), pushforward(moved, pq), 1e-9, 1e-9));
    }
}

TEST_CASE("equimeasurable is an equivalence relation at tau 0") {
    VectorMeasure a{{{0.25, {1.0, 0.0}}, {0.75, {0.0, 2.0}}}};
    VectorMeasure b{{{0.75, {0.0, 2.0}}, {0.25, {1.0, 0.0}}}};  // permuted atoms
    VectorMeasure c{{{0.25, {1.0, 0.0}}, {0.5, {0.0, 2.0}}, {0.25, {0.0, 2.0}}}};  // split atom
    CHECK(equimeasurable(a, a, 0.0, 0.0));
    CHECK(equimeasurable(a, b, 0.0, 0.0));
    CHECK(equimeasurable(b, a, 0.0, 0.0));
    CHECK(equimeasurable(a, c, 0.0, 0.0));
    CHECK(equimeasurable(b, c, 0.0, 0.0));
    VectorMeasure d{{{1.0, {1.0, 1.0}}}};
    CHECK_FALSE(equimeasurable(a, d, 0.0, 0.0));
    VectorMeasure wrong_dim{{{1.0, {1.0}}}};
    CHECK_THROWS_AS(equimeasurable(a, wrong_dim, 0.0, 0.0), precondition_error);
}

TEST_CASE("moment functional") {
    VectorMeasure origin{{{1.0, {0.0}}}};
    CHECK(moment_functional(origin, 2.0, std::vector<double>{1.0}, 3.0) == doctest::Approx(8.0));

    VectorMeasure half{{{0.5, {0.0}}, {0.5, {1.0}}}};
    CHECK(moment_functional(half, 1.0, std::vector<double>{1.0}, 2.0) == doctest::Approx(2.5));

    // strictly increasing in v0 on nonzero measures
    double prev = 0.0;
    for (double v0 : {0.5, 1.0, 1.5, 2.0}) {
        double v = moment_functional(half, v0, std::vector<double>{0.7}, 1.7);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(moment_functional(half, 1.0, std::vector<double>{1.0}, 0.0),
                    precondition_error);
}

TEST_CASE("norm via moments equals mixed norm") {
    NormParams pq(2.0, 1.0);
    RandomGen gen(139);
    StepFunction2D f = abs(gen.step_function(4, 4, 0.1, 2.0, false));
    CHECK(norm_via_moments(std::vector<StepFunction2D>{f}, std::vector<double>{1.0}, pq) ==
          doctest::Approx(mixed_norm(f, pq)).epsilon(1e-12));

    BKpqSpec spec({1, 2}, pq);
    CanonicalAtoms can = canonical_representation(spec);
    std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(norm_via_moments(can.atoms, ones, pq) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    for (const NormParams& params : {NormParams(2.0, 1.0), NormParams(3.0, 2.0)}) {
        for (int trial = 0; trial < 15; ++trial) {
            std::vector<StepFunction2D> fs;
            std::vector<double> cuts{0.0, 0.3, 0.7, 1.0};
            for (int k = 0; k < 3; ++k) {
                StepFunction2D g = abs(gen.step_function(3, 3, 0.2, 2.0, false));
                fs.push_back(mul(g, StepFunction2D::indicator(cuts[k], cuts[k + 1], 0.0, 1.0)));
            }
            std::uniform_real_distribution<double> cd(0.0, 2.0);
            std::vector<double> c{cd(gen.rng), cd(gen.rng), cd(gen.rng)};
            StepFunction2D sum =
                add(add(scale(c[0], fs[0]), scale(c[1], fs[1])), scale(c[2], fs[2]));
            CHECK(norm_via_moments(fs, c, params) ==
                  doctest::Approx(mixed_norm(sum, params)).epsilon(1e-10));
        }
    }

    std::vector<StepFunction2D> overlapping{StepFunction2D::constant(1.0),
                                            StepFunction2D::constant(2.0)};
    CHECK_THROWS_AS(norm_via_moments(overlapping, std::vector<double>{1.0, 1.0}, pq),
                    precondition_error);
}

TEST_CASE("moment match report on identical measures") {
    VectorMeasure m{{{0.3, {0.5, 1.0}}, {0.7, {2.0, 0.25}}}};
    std::vector<std::pair<double, std::vector<double>>> vs{
        {1.0, {1.0, 1.0}}, {0.5, {2.0, 0.3}}, {2.0, {0.1, 0.9}}};
    MomentMatchReport rep = moment_match_report(m, m, 1.5, 6, vs, 1e-12);
    CHECK(rep.first_mismatch_degree == -1);
    CHECK(rep.max_functional_gap == 0.0);
    for (const auto& row : rep.moments) CHECK(row.lhs == row.rhs);

    std::ostringstream csv;
    write_csv(rep, csv);
    CHECK(csv.str().find("kind,detail,lhs,rhs,abs_diff") == 0);

    std::ostringstream mcsv;
    write_csv(m, mcsv);
    CHECK(mcsv.str().find("mass,z1,z2") == 0);
}
