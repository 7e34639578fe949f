#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace lplq {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

std::string rat_string(const Rat& r);  // "num/den" (or "num" when den == 1)
double rat_double(const Rat& r);

// Closed rational interval [lo, hi]; arithmetic rounds outward by exactness
// (all endpoint operations are exact, so enclosures stay valid).
struct RatInterval {
    Rat lo, hi;
    RatInterval() = default;
    RatInterval(Rat v) : lo(v), hi(std::move(v)) {}
    RatInterval(Rat l, Rat h);
    double mid_double() const;
    Rat width() const { return hi - lo; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
};

RatInterval operator+(const RatInterval& a, const RatInterval& b);
RatInterval operator-(const RatInterval& a, const RatInterval& b);
RatInterval operator*(const RatInterval& a, const RatInterval& b);
// Requires 0 not in b.
RatInterval operator/(const RatInterval& a, const RatInterval& b);

// Dense univariate polynomial with exact rational coefficients, ascending
// degree order.  Trailing zeros are trimmed; the zero polynomial has no
// coefficients.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rat> coeffs);

    static RationalPoly monomial(int degree, Rat coeff = Rat(1));

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat coeff(int i) const;
    Rat leading() const;

    Rat eval(const Rat& x) const;
    double eval_double(double x) const;

    RationalPoly derivative() const;
    RationalPoly antiderivative() const;  // constant term 0
    Rat integrate(const Rat& a, const Rat& b) const;
    Rat integrate01() const { return integrate(Rat(0), Rat(1)); }

    RationalPoly operator+(const RationalPoly&) const;
    RationalPoly operator-(const RationalPoly&) const;
    RationalPoly operator*(const RationalPoly&) const;
    RationalPoly scaled(const Rat& c) const;

    // Remainder of *this divided by d (exact rational division).
    RationalPoly remainder(const RationalPoly& d) const;

    // Integer coefficients with content 1 and positive leading coefficient.
    RationalPoly normalized_integer() const;

private:
    std::vector<Rat> c_;
    void trim();
};

// Sign changes in the Sturm sequence of p at x; count_roots gives the number
// of distinct real roots in (a, b].
std::vector<RationalPoly> sturm_sequence(const RationalPoly& p);
int sturm_sign_changes(const std::vector<RationalPoly>& seq, const Rat& x);
int count_roots(const std::vector<RationalPoly>& seq, const Rat& a, const Rat& b);

// Disjoint isolating intervals (one simple root each) refined to the given
// width, ascending.  Only roots in (a, b) are reported.
std::vector<RatInterval> isolate_roots(const RationalPoly& p, const Rat& a, const Rat& b,
                                       const Rat& width);

// Exact rational nullspace generator of the (r+1) x (r+2) moment matrix
// A(i,j) = 1/(i+j+1): the degree-(r+1) polynomial orthogonal to x^j for all
// j <= r on [0,1], content-normalized with positive leading coefficient.
RationalPoly hilbert_nullspace(int r);

}  // namespace lplq
