#include <doctest.h>

#include "lplq/rational.hpp"

using namespace lplq;

namespace {

// Independent oracle: Gram-Schmidt on monomials over [0,1] with the L2 inner
// product; the last vector spans the same line as the moment-matrix nullspace.
RationalPoly gram_schmidt_orthogonal(int r) {
    std::vector<RationalPoly> basis;
    for (int d = 0; d <= r + 1; ++d) {
        RationalPoly v = RationalPoly::monomial(d);
        for (const RationalPoly& b : basis) {
            Rat num = (v * b).integrate01();
            Rat den = (b * b).integrate01();
            v = v - b.scaled(num / den);
        }
        basis.push_back(v);
    }
    return basis.back().normalized_integer();
}

}  // namespace

TEST_CASE("hilbert nullspace small cases") {
    RationalPoly g0 = hilbert_nullspace(0);
    CHECK(g0.coeffs() == std::vector<Rat>{Rat(-1), Rat(2)});  // lc > 0: 2x - 1
    CHECK(g0.integrate01() == 0);

    RationalPoly g1 = hilbert_nullspace(1);
    CHECK(g1.coeffs() == std::vector<Rat>{Rat(1), Rat(-6), Rat(6)});
    CHECK(g1.integrate01() == 0);
    CHECK((RationalPoly::monomial(1) * g1).integrate01() == 0);

    RationalPoly g2 = hilbert_nullspace(2);
    CHECK(g2.coeffs() == std::vector<Rat>{Rat(-1), Rat(12), Rat(-30), Rat(20)});
}

TEST_CASE("nullspace orthogonality is exact for all degrees up to r") {
    for (int r = 0; r <= 5; ++r) {
        RationalPoly g = hilbert_nullspace(r);
        CHECK(g.degree() == r + 1);
        for (int j = 0; j <= r; ++j)
            CHECK((RationalPoly::monomial(j) * g).integrate01() == 0);
        CHECK((RationalPoly::monomial(r + 1) * g).integrate01() != 0);
    }
}

TEST_CASE("gram-schmidt oracle agrees exactly") {
    for (int r = 0; r <= 4; ++r) {
        RationalPoly a = hilbert_nullspace(r);
        RationalPoly b = gram_schmidt_orthogonal(r);
        CHECK(a.coeffs() == b.coeffs());
    }
}

TEST_CASE("polynomial remainder") {
    RationalPoly p({Rat(-1), Rat(0), Rat(1)});  // x^2 - 1
    RationalPoly d({Rat(-1), Rat(1)});          // x - 1
    CHECK(p.remainder(d).is_zero());
    RationalPoly q({Rat(1), Rat(1)});  // x + 1
    CHECK(p.remainder(q).is_zero());
    RationalPoly e({Rat(1), Rat(0), Rat(1)});  // x^2 + 1
    RationalPoly rem = e.remainder(d);
    CHECK(rem.degree() == 0);
    CHECK(rem.coeff(0) == 2);
}

TEST_CASE("sturm root counting and isolation") {
    for (int r = 2; r <= 4; ++r) {
        RationalPoly g = hilbert_nullspace(r);
        auto seq = sturm_sequence(g);
        CHECK(count_roots(seq, Rat(0), Rat(1)) == r + 1);
        Rat width(1, BigInt(1) << 60);
        auto boxes = isolate_roots(g, Rat(0), Rat(1), width);
        REQUIRE(static_cast<int>(boxes.size()) == r + 1);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            CHECK(boxes[i].width() <= width);
            // sign change across each box
            CHECK(g.eval(boxes[i].lo) * g.eval(boxes[i].hi) < 0);
            if (i > 0) CHECK(boxes[i - 1].hi <= boxes[i].lo);
        }
    }
}

TEST_CASE("interval arithmetic encloses") {
    RatInterval a(Rat(1, 3), Rat(1, 2));
    RatInterval b(Rat(-2), Rat(3));
    RatInterval s = a + b;
    CHECK(s.lo == Rat(1, 3) - 2);
    CHECK(s.hi == Rat(1, 2) + 3);
    RatInterval p = a * b;
    CHECK(p.lo == Rat(-1));  // 1/2 * -2
    CHECK(p.hi == Rat(3, 2));
    RatInterval d = a / RatInterval(Rat(2), Rat(4));
    CHECK(d.lo == Rat(1, 12));
    CHECK(d.hi == Rat(1, 4));
    CHECK_THROWS(a / b);
}

TEST_CASE("rat_string format") {
    CHECK(rat_string(Rat(3)) == "3");
    CHECK(rat_string(Rat(-7, 2)) == "-7/2");
    CHECK(rat_string(Rat(0)) == "0");
}
