#include <doctest.h>

#include <cmath>

#include "lplq/errors.hpp"
#include "lplq/json_io.hpp"
#include "lplq/random_gen.hpp"
#include "lplq/step_function.hpp"

using namespace lplq;

namespace {
const NormParams P21(2.0, 1.0);
const NormParams P32(3.0, 2.0);
}  // namespace

TEST_CASE("partition invariants") {
    CHECK_THROWS_AS(Partition1D({0.5, 0.6}), invariant_error);
    CHECK_THROWS_AS(Partition1D({0.5, -0.5, 1.0}), invariant_error);
    CHECK_THROWS_AS(Partition1D({}), invariant_error);
    Partition1D p({0.25, 0.75});
    CHECK(p.locate(0.1) == 0);
    CHECK(p.locate(0.9) == 1);
    CHECK(p.locate(1.0) == 1);
    CHECK(p.breakpoints().back() == 1.0);
}

TEST_CASE("mixed norm worked values") {
    StepFunction2D one = StepFunction2D::constant(1.0);
    CHECK(mixed_norm(one, P21) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mixed_norm(one, P32) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mixed_norm(one, NormParams(2.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));

    StepFunction2D f = StepFunction2D::indicator(0.0, 0.5, 0.0, 1.0, 2.0);
    CHECK(mixed_norm(f, P21) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    StepFunction2D g = add(StepFunction2D::indicator(0.0, 1.0, 0.0, 0.5),
                           scale(3.0, StepFunction2D::indicator(0.0, 1.0, 0.5, 1.0)));
    CHECK(mixed_norm(g, P21) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("n_map worked values") {
    StepFunction2D one = StepFunction2D::constant(1.0);
    StepFunction1D n1 = n_map(one, P21);
    for (std::size_t i = 0; i < n1.size(); ++i) CHECK(n1.value(i) == doctest::Approx(1.0));

    StepFunction2D f = StepFunction2D::indicator(0.0, 1.0, 0.0, 0.25);
    StepFunction1D n2 = n_map(f, NormParams(3.0, 2.0));
    for (std::size_t i = 0; i < n2.size(); ++i)
        CHECK(n2.value(i) == doctest::Approx(0.5).epsilon(1e-14));

    // mixed_norm(f) = ||n_map(f)||_p
    RandomGen gen(7);
    for (int trial = 0; trial < 30; ++trial) {
        StepFunction2D h = gen.step_function(4, 4, 0.0, 3.0, true);
        CHECK(mixed_norm(h, P32) ==
              doctest::Approx(n_map(h, P32).lp_norm(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("lattice op identities") {
    RandomGen gen(11);
    StepFunction2D f = gen.step_function(4, 4, 0.0, 2.0, true);
    CHECK(sup_abs_diff(sup(f, f), f) == 0.0);
    CHECK(sup_abs(add(f, scale(-1.0, f))) == 0.0);
    StepFunction2D a = StepFunction2D::indicator(0.0, 0.5, 0.0, 1.0);
    StepFunction2D b = StepFunction2D::indicator(0.5, 1.0, 0.0, 1.0);
    CHECK(sup_abs(inf(a, b)) == 0.0);
}

TEST_CASE("disjointness flavors") {
    StepFunction2D a = StepFunction2D::indicator(0.0, 0.5, 0.0, 1.0);
    StepFunction2D b = StepFunction2D::indicator(0.5, 1.0, 0.0, 1.0);
    CHECK(is_disjoint(a, b));
    CHECK(is_base_disjoint(a, b, P21));

    StepFunction2D c = StepFunction2D::indicator(0.0, 1.0, 0.0, 0.5);
    StepFunction2D d = StepFunction2D::indicator(0.0, 1.0, 0.5, 1.0);
    CHECK(is_disjoint(c, d));
    CHECK_FALSE(is_base_disjoint(c, d, P21));
    CHECK_FALSE(is_base_disjoint(c, d, P32));
}

TEST_CASE("refine_common preserves values") {
    StepFunction2D f = StepFunction2D::constant(3.0);
    auto [rf, rg] = refine_common(f, f);
    CHECK(sup_abs_diff(rf, f) == 0.0);
    CHECK(sup_abs_diff(rg, f) == 0.0);

    // half/third base split refines to the sixth grid
    StepFunction2D h(Partition1D({0.5, 0.5}),
                     {StepFunction1D::constant(1.0), StepFunction1D::constant(2.0)});
    StepFunction2D t(Partition1D({1.0 / 3, 1.0 / 3, 1.0 / 3}),
                     {StepFunction1D::constant(5.0), StepFunction1D::constant(6.0),
                      StepFunction1D::constant(7.0)});
    auto [rh, rt] = refine_common(h, t);
    CHECK(rh.base_size() == 4);  // cuts at 1/3, 1/2, 2/3
    CHECK(rh.value_at(0.4, 0.5) == 1.0);
    CHECK(rt.value_at(0.4, 0.5) == 6.0);

    RandomGen gen(23);
    for (int trial = 0; trial < 10; ++trial) {
        StepFunction2D x = gen.step_function(5, 5, 0.0, 4.0, true);
        StepFunction2D y = gen.step_function(5, 5, 0.0, 4.0, true);
        auto [rx, ry] = refine_common(x, y);
        std::mt19937_64 pts(99);
        std::uniform_real_distribution<double> ud(0.001, 0.999);
        for (int s = 0; s < 100; ++s) {
            double px = ud(pts), py = ud(pts);
            CHECK(rx.value_at(px, py) == x.value_at(px, py));
            CHECK(ry.value_at(px, py) == y.value_at(px, py));
        }
    }
}

TEST_CASE("norm axioms on random step functions") {
    RandomGen gen(31);
    for (const NormParams& pq : {P21, P32}) {
        for (int trial = 0; trial < 60; ++trial) {
            StepFunction2D f = gen.step_function(4, 4, 0.0, 3.0, true);
            StepFunction2D g = gen.step_function(4, 4, 0.0, 3.0, true);
            double c = trial % 2 ? -1.7 : 2.3;
            CHECK(mixed_norm(scale(c, f), pq) ==
                  doctest::Approx(std::abs(c) * mixed_norm(f, pq)).epsilon(1e-12));
            CHECK(mixed_norm(add(f, g), pq) <=
                  mixed_norm(f, pq) + mixed_norm(g, pq) + 1e-12);

            // domination: |f| <= |g| pointwise implies N and norm ordering
            StepFunction2D ga = abs(g);
            StepFunction2D fa = inf(ga, scale(0.5, ga));
            StepFunction1D nf = n_map(fa, pq), ng = n_map(ga, pq);
            Refinement r = refine(nf.partition(), ng.partition());
            for (std::size_t i = 0; i < r.merged.size(); ++i)
                CHECK(nf.value(r.from_a[i]) <= ng.value(r.from_b[i]) + 1e-12);
            CHECK(mixed_norm(fa, pq) <= mixed_norm(ga, pq) + 1e-12);
        }
    }
}

TEST_CASE("q-additivity and p-additivity") {
    RandomGen gen(37);
    for (const NormParams& pq : {P21, P32, NormParams(4.0, 2.0)}) {
        for (int trial = 0; trial < 40; ++trial) {
            StepFunction2D f = abs(gen.step_function(4, 4, 0.2, 3.0, false));
            StepFunction2D g = abs(gen.step_function(4, 4, 0.2, 3.0, false));
            // fiber-disjoint pieces: f below y0, g above
            double y0 = 0.25 + 0.5 * (trial % 3) / 3.0;
            StepFunction2D fl = mul(f, StepFunction2D::indicator(0.0, 1.0, 0.0, y0));
            StepFunction2D gu = mul(g, StepFunction2D::indicator(0.0, 1.0, y0, 1.0));
            REQUIRE(is_disjoint(fl, gu));
            StepFunction1D ns = n_map(add(fl, gu), pq);
            StepFunction1D na = n_map(fl, pq), nb = n_map(gu, pq);
            Refinement r1 = refine(ns.partition(), na.partition());
            Refinement r2 = refine(ns.partition(), nb.partition());
            for (std::size_t i = 0; i < r1.merged.size(); ++i) {
                double lhs = std::pow(ns.value(r1.from_a[i]), pq.q);
                double rhs = std::pow(na.value(r1.from_b[i]), pq.q) +
                             std::pow(nb.value(r2.from_b[i]), pq.q);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }

            // base-disjoint pieces: p-additivity
            double x0 = 0.3 + 0.4 * (trial % 4) / 4.0;
            StepFunction2D bl = mul(f, StepFunction2D::indicator(0.0, x0, 0.0, 1.0));
            StepFunction2D br = mul(g, StepFunction2D::indicator(x0, 1.0, 0.0, 1.0));
            REQUIRE(is_base_disjoint(bl, br, pq));
            double lhs = std::pow(mixed_norm(add(bl, br), pq), pq.p);
            double rhs = std::pow(mixed_norm(bl, pq), pq.p) + std::pow(mixed_norm(br, pq), pq.p);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("disjointness converse for r-additive positive profiles") {
    // Profiles with additive r-norms must be disjoint; overlapping ones break
    // the premise.
    RandomGen gen(41);
    for (const NormParams& pq : {P21, P32, NormParams(2.5, 1.0)}) {
        double r = pq.ratio();
        for (int trial = 0; trial < 25; ++trial) {
            Partition1D part = Partition1D::uniform(8);
            std::vector<StepFunction1D> us;
            std::uniform_real_distribution<double> vd(0.2, 2.0);
            for (int k = 0; k < 4; ++k) {
                std::vector<double> vals(8, 0.0);
                for (std::size_t i = static_cast<std::size_t>(k) * 2;
                     i < static_cast<std::size_t>(k) * 2 + 2; ++i)
                    vals[i] = vd(gen.rng);
                us.emplace_back(part, std::move(vals));
            }
            std::vector<double> sum(8, 0.0);
            double rhs = 0.0;
            for (const auto& u : us) {
                for (std::size_t i = 0; i < 8; ++i) sum[i] += u.value(i);
                rhs += std::pow(u.lp_norm(r), r);
            }
            double lhs = std::pow(StepFunction1D(part, sum).lp_norm(r), r);
            REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));
            for (std::size_t a = 0; a < us.size(); ++a)
                for (std::size_t b = a + 1; b < us.size(); ++b)
                    for (std::size_t i = 0; i < 8; ++i)
                        CHECK(us[a].value(i) * us[b].value(i) == 0.0);

            // overlap breaks the additivity premise
            std::vector<double> v1(8, 1.0), v2(8, 0.0);
            v2[0] = 1.0;
            StepFunction1D w1(part, v1), w2(part, v2);
            double l = std::pow(StepFunction1D(part, [&] {
                                    std::vector<double> s(8);
                                    for (std::size_t i = 0; i < 8; ++i)
                                        s[i] = w1.value(i) + w2.value(i);
                                    return s;
                                }())
                                    .lp_norm(r),
                                r);
            double rr = std::pow(w1.lp_norm(r), r) + std::pow(w2.lp_norm(r), r);
            CHECK(std::abs(l - rr) > 1e-10);
        }
    }
}

TEST_CASE("json round trip is lossless") {
    RandomGen gen(53);
    for (int trial = 0; trial < 20; ++trial) {
        StepFunction2D f = gen.step_function(5, 5, 0.0, 10.0, true);
        std::string text = to_json(f).dump();
        StepFunction2D g = step2d_from_json(nlohmann::json::parse(text));
        REQUIRE(g.base_size() == f.base_size());
        for (std::size_t i = 0; i < f.base_size(); ++i) {
            CHECK(g.base().length(i) == f.base().length(i));
            REQUIRE(g.fiber(i).size() == f.fiber(i).size());
            for (std::size_t s = 0; s < f.fiber(i).size(); ++s) {
                CHECK(g.fiber(i).value(s) == f.fiber(i).value(s));
                CHECK(g.fiber(i).partition().length(s) == f.fiber(i).partition().length(s));
            }
        }
    }
}

TEST_CASE("simplified merges equal cells without changing the function") {
    StepFunction2D f(Partition1D({0.25, 0.25, 0.5}),
                     {StepFunction1D::constant(2.0), StepFunction1D::constant(2.0),
                      StepFunction1D::constant(3.0)});
    StepFunction2D s = f.simplified();
    CHECK(s.base_size() == 2);
    CHECK(sup_abs_diff(s, f) == 0.0);
}
