#include "lplq/rational.hpp"

#include <algorithm>
#include <sstream>

#include "lplq/errors.hpp"

namespace lplq {

std::string rat_string(const Rat& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

double rat_double(const Rat& r) { return static_cast<double>(r); }

RatInterval::RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) std::swap(lo, hi);
}

double RatInterval::mid_double() const { return rat_double((lo + hi) / 2); }

RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return RatInterval(a.lo + b.lo, a.hi + b.hi);
}

RatInterval operator-(const RatInterval& a, const RatInterval& b) {
    return RatInterval(a.lo - b.hi, a.hi - b.lo);
}

RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    Rat c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
    return RatInterval(std::min({c1, c2, c3, c4}), std::max({c1, c2, c3, c4}));
}

RatInterval operator/(const RatInterval& a, const RatInterval& b) {
    if (b.lo <= 0 && b.hi >= 0) throw precondition_error("RatInterval: division by interval containing 0");
    RatInterval inv(Rat(1) / b.hi, Rat(1) / b.lo);
    return a * inv;
}

RationalPoly::RationalPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

RationalPoly RationalPoly::monomial(int degree, Rat coeff) {
    std::vector<Rat> c(static_cast<std::size_t>(degree) + 1, Rat(0));
    c.back() = std::move(coeff);
    return RationalPoly(std::move(c));
}

Rat RationalPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rat(0);
    return c_[static_cast<std::size_t>(i)];
}

Rat RationalPoly::leading() const { return c_.empty() ? Rat(0) : c_.back(); }

Rat RationalPoly::eval(const Rat& x) const {
    Rat v(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
}

double RationalPoly::eval_double(double x) const {
    double v = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + rat_double(*it);
    return v;
}

RationalPoly RationalPoly::derivative() const {
    if (c_.size() <= 1) return RationalPoly();
    std::vector<Rat> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<int>(i);
    return RationalPoly(std::move(d));
}

RationalPoly RationalPoly::antiderivative() const {
    std::vector<Rat> d(c_.size() + 1, Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i) d[i + 1] = c_[i] / static_cast<int>(i + 1);
    return RationalPoly(std::move(d));
}

Rat RationalPoly::integrate(const Rat& a, const Rat& b) const {
    RationalPoly F = antiderivative();
    return F.eval(b) - F.eval(a);
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
    std::vector<Rat> c(std::max(c_.size(), o.c_.size()), Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) c[i] += o.c_[i];
    return RationalPoly(std::move(c));
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const {
    std::vector<Rat> c(std::max(c_.size(), o.c_.size()), Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) c[i] -= o.c_[i];
    return RationalPoly(std::move(c));
}

RationalPoly RationalPoly::operator*(const RationalPoly& o) const {
    if (is_zero() || o.is_zero()) return RationalPoly();
    std::vector<Rat> c(c_.size() + o.c_.size() - 1, Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
    return RationalPoly(std::move(c));
}

RationalPoly RationalPoly::scaled(const Rat& s) const {
    std::vector<Rat> c = c_;
    for (Rat& v : c) v *= s;
    return RationalPoly(std::move(c));
}

RationalPoly RationalPoly::remainder(const RationalPoly& d) const {
    if (d.is_zero()) throw precondition_error("RationalPoly: division by zero polynomial");
    std::vector<Rat> r = c_;
    int dr = static_cast<int>(r.size()) - 1;
    const int dd = d.degree();
    while (dr >= dd && !(dr < 0)) {
        Rat f = r[static_cast<std::size_t>(dr)] / d.leading();
        for (int i = 0; i <= dd; ++i)
            r[static_cast<std::size_t>(dr - dd + i)] -= f * d.coeff(i);
        while (!r.empty() && r.back() == 0) r.pop_back();
        dr = static_cast<int>(r.size()) - 1;
    }
    return RationalPoly(std::move(r));
}

RationalPoly RationalPoly::normalized_integer() const {
    if (is_zero()) return *this;
    BigInt den_lcm = 1;
    for (const Rat& c : c_) den_lcm = lcm(den_lcm, denominator(c));
    std::vector<Rat> scaled(c_.size());
    BigInt num_gcd = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        scaled[i] = c_[i] * Rat(den_lcm);
        num_gcd = gcd(num_gcd, numerator(scaled[i]));
    }
    if (num_gcd == 0) num_gcd = 1;
    Rat factor = Rat(den_lcm, num_gcd);
    RationalPoly out = this->scaled(factor);
    if (out.leading() < 0) out = out.scaled(Rat(-1));
    return out;
}

std::vector<RationalPoly> sturm_sequence(const RationalPoly& p) {
    std::vector<RationalPoly> seq;
    seq.push_back(p);
    seq.push_back(p.derivative());
    while (!seq.back().is_zero() && seq.back().degree() > 0) {
        RationalPoly r = seq[seq.size() - 2].remainder(seq.back());
        if (r.is_zero()) break;
        seq.push_back(r.scaled(Rat(-1)));
    }
    return seq;
}

int sturm_sign_changes(const std::vector<RationalPoly>& seq, const Rat& x) {
    int changes = 0, prev = 0;
    for (const auto& p : seq) {
        Rat v = p.eval(x);
        int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

int count_roots(const std::vector<RationalPoly>& seq, const Rat& a, const Rat& b) {
    return sturm_sign_changes(seq, a) - sturm_sign_changes(seq, b);
}

std::vector<RatInterval> isolate_roots(const RationalPoly& p, const Rat& a, const Rat& b,
                                       const Rat& width) {
    std::vector<RationalPoly> seq = sturm_sequence(p);
    std::vector<RatInterval> out;
    struct Box {
        Rat lo, hi;
        int roots;
    };
    std::vector<Box> work{{a, b, count_roots(seq, a, b)}};
    while (!work.empty()) {
        Box box = work.back();
        work.pop_back();
        if (box.roots == 0) continue;
        if (box.roots == 1 && box.hi - box.lo <= width) {
            out.push_back(RatInterval(box.lo, box.hi));
            continue;
        }
        Rat mid = (box.lo + box.hi) / 2;
        // Nudge off an exact root of any sequence member.
        while (p.eval(mid) == 0) mid = (box.lo + 2 * mid) / 3;
        int left = count_roots(seq, box.lo, mid);
        work.push_back({box.lo, mid, left});
        work.push_back({mid, box.hi, box.roots - left});
    }
    std::sort(out.begin(), out.end(),
              [](const RatInterval& x, const RatInterval& y) { return x.lo < y.lo; });
    return out;
}

RationalPoly hilbert_nullspace(int r) {
    if (r < 0) throw precondition_error("hilbert_nullspace: r must be >= 0");
    const int rows = r + 1, cols = r + 2;
    std::vector<std::vector<Rat>> A(static_cast<std::size_t>(rows),
                                    std::vector<Rat>(static_cast<std::size_t>(cols)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A[i][j] = Rat(1, i + j + 1);

    // Exact Gaussian elimination to row echelon form.
    int row = 0;
    std::vector<int> pivot_col(static_cast<std::size_t>(rows), -1);
    for (int col = 0; col < cols && row < rows; ++col) {
        int piv = -1;
        for (int i = row; i < rows; ++i)
            if (A[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[row], A[piv]);
        Rat lead = A[row][col];
        for (int j = col; j < cols; ++j) A[row][j] /= lead;
        for (int i = 0; i < rows; ++i) {
            if (i == row || A[i][col] == 0) continue;
            Rat f = A[i][col];
            for (int j = col; j < cols; ++j) A[i][j] -= f * A[row][j];
        }
        pivot_col[static_cast<std::size_t>(row)] = col;
        ++row;
    }
    // One free column remains; set it to 1 and back-substitute.
    std::vector<char> is_pivot(static_cast<std::size_t>(cols), 0);
    for (int i = 0; i < row; ++i) is_pivot[static_cast<std::size_t>(pivot_col[i])] = 1;
    int free_col = -1;
    for (int j = cols - 1; j >= 0; --j)
        if (!is_pivot[static_cast<std::size_t>(j)]) {
            free_col = j;
            break;
        }
    std::vector<Rat> x(static_cast<std::size_t>(cols), Rat(0));
    x[static_cast<std::size_t>(free_col)] = 1;
    for (int i = 0; i < row; ++i) {
        int pc = pivot_col[static_cast<std::size_t>(i)];
        Rat v(0);
        for (int j = pc + 1; j < cols; ++j) v += A[i][j] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(pc)] = -v;
    }
    return RationalPoly(std::move(x)).normalized_integer();
}

}  // namespace lplq
