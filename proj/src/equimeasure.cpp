#include "lplq/equimeasure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lplq/errors.hpp"

namespace lplq {

double VectorMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

VectorMeasure VectorMeasure::canonical(double tau) const {
    std::vector<Atom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end(), [](const Atom& a, const Atom& b) {
        return std::lexicographical_compare(a.point.begin(), a.point.end(), b.point.begin(),
                                            b.point.end());
    });
    VectorMeasure out;
    auto close = [tau](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > tau) return false;
        return true;
    };
    for (auto& a : sorted) {
        if (!out.atoms.empty() && close(out.atoms.back().point, a.point))
            out.atoms.back().mass += a.mass;
        else
            out.atoms.push_back(std::move(a));
    }
    return out;
}

namespace {

VectorMeasure pushforward_impl(std::span<const StepFunction2D> fs, const NormParams& pq,
                               bool q_power) {
    if (fs.empty()) throw precondition_error("pushforward: empty family");
    RefinedFamily fam = refine_family(fs);
    VectorMeasure m;
    for (std::size_t i = 0; i < fam.base.size(); ++i) {
        VectorMeasure::Atom a;
        a.mass = fam.base.length(i);
        a.point.resize(fs.size());
        for (std::size_t t = 0; t < fs.size(); ++t) {
            double nq = fam.nq(t, i, pq.q);
            a.point[t] = q_power ? nq : std::pow(nq, 1.0 / pq.q);
        }
        m.atoms.push_back(std::move(a));
    }
    return m.canonical(0.0);
}

}  // namespace

VectorMeasure pushforward(std::span<const StepFunction2D> fs, const NormParams& pq) {
    return pushforward_impl(fs, pq, false);
}

VectorMeasure pushforward_q(std::span<const StepFunction2D> fs, const NormParams& pq) {
    return pushforward_impl(fs, pq, true);
}

bool equimeasurable(const VectorMeasure& m1, const VectorMeasure& m2, double tau_val,
                    double tau_mass) {
    if (m1.dim() != m2.dim()) throw precondition_error("equimeasurable: dimension mismatch");
    return unmatched_mass(m1, m2, tau_val) <= tau_mass;
}

double unmatched_mass(const VectorMeasure& m1, const VectorMeasure& m2, double tau_val) {
    VectorMeasure a = m1.canonical(tau_val);
    VectorMeasure b = m2.canonical(tau_val);
    auto close = [tau_val](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > tau_val) return false;
        return true;
    };
    double bad = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.atoms.size() && j < b.atoms.size()) {
        if (close(a.atoms[i].point, b.atoms[j].point)) {
            bad += std::abs(a.atoms[i].mass - b.atoms[j].mass);
            ++i;
            ++j;
        } else if (std::lexicographical_compare(a.atoms[i].point.begin(), a.atoms[i].point.end(),
                                                b.atoms[j].point.begin(),
                                                b.atoms[j].point.end())) {
            bad += a.atoms[i].mass;
            ++i;
        } else {
            bad += b.atoms[j].mass;
            ++j;
        }
    }
    for (; i < a.atoms.size(); ++i) bad += a.atoms[i].mass;
    for (; j < b.atoms.size(); ++j) bad += b.atoms[j].mass;
    return bad;
}

double moment_functional(const VectorMeasure& m, double v0, std::span<const double> v, double r) {
    if (!(r > 0.0)) throw precondition_error("moment_functional: r must be positive");
    double s = 0.0;
    for (const auto& a : m.atoms) {
        double dot = v0;
        for (std::size_t i = 0; i < v.size() && i < a.point.size(); ++i)
            dot += v[i] * a.point[i];
        s += a.mass * std::pow(std::abs(dot), r);
    }
    return s;
}

double norm_via_moments(std::span<const StepFunction2D> fs, std::span<const double> coeffs,
                        const NormParams& pq) {
    if (fs.size() != coeffs.size())
        throw precondition_error("norm_via_moments: coefficient count mismatch");
    for (std::size_t t = 0; t < fs.size(); ++t) {
        if (sup_abs(sub(fs[t], abs(fs[t]))) > 0.0)
            throw precondition_error("norm_via_moments: functions must be positive");
        for (std::size_t u = t + 1; u < fs.size(); ++u)
            if (!is_disjoint(fs[t], fs[u]))
                throw precondition_error("norm_via_moments: functions must be disjoint");
    }
    VectorMeasure m = pushforward_q(fs, pq);
    std::vector<double> cq(coeffs.size());
    for (std::size_t t = 0; t < coeffs.size(); ++t) cq[t] = std::pow(coeffs[t], pq.q);
    double val = moment_functional(m, 0.0, cq, pq.p / pq.q);
    return std::pow(val, 1.0 / pq.p);
}

namespace {

void joint_moments_rec(const VectorMeasure& m1, const VectorMeasure& m2, std::vector<int>& deg,
                       std::size_t pos, int remaining, MomentMatchReport& rep) {
    if (pos == deg.size()) {
        auto raw = [&deg](const VectorMeasure& m) {
            double s = 0.0;
            for (const auto& a : m.atoms) {
                double term = a.mass;
                for (std::size_t i = 0; i < deg.size(); ++i)
                    term *= std::pow(a.point[i], static_cast<double>(deg[i]));
                s += term;
            }
            return s;
        };
        rep.moments.push_back({deg, raw(m1), raw(m2)});
        return;
    }
    for (int d = 0; d <= remaining; ++d) {
        deg[pos] = d;
        joint_moments_rec(m1, m2, deg, pos + 1, remaining - d, rep);
    }
    deg[pos] = 0;
}

}  // namespace

MomentMatchReport moment_match_report(const VectorMeasure& m1, const VectorMeasure& m2, double r,
                                      int degree_max,
                                      std::span<const std::pair<double, std::vector<double>>> vs,
                                      double mismatch_tol) {
    if (m1.dim() != m2.dim()) throw precondition_error("moment_match_report: dimension mismatch");
    MomentMatchReport rep;
    for (const auto& [v0, v] : vs) {
        double lhs = moment_functional(m1, v0, v, r);
        double rhs = moment_functional(m2, v0, v, r);
        rep.functional.push_back({v0, v, lhs, rhs});
        rep.max_functional_gap = std::max(rep.max_functional_gap, std::abs(lhs - rhs));
    }
    std::vector<int> deg(m1.dim(), 0);
    joint_moments_rec(m1, m2, deg, 0, degree_max, rep);
    std::sort(rep.moments.begin(), rep.moments.end(), [](const auto& a, const auto& b) {
        int ta = 0, tb = 0;
        for (int d : a.degrees) ta += d;
        for (int d : b.degrees) tb += d;
        if (ta != tb) return ta < tb;
        return a.degrees < b.degrees;
    });
    for (const auto& row : rep.moments) {
        if (std::abs(row.lhs - row.rhs) > mismatch_tol * std::max(1.0, std::abs(row.lhs))) {
            int total = 0;
            for (int d : row.degrees) total += d;
            rep.first_mismatch_degree = total;
            break;
        }
    }
    return rep;
}

void write_csv(const VectorMeasure& m, std::ostream& os) {
    os << "mass";
    for (std::size_t i = 0; i < m.dim(); ++i) os << ",z" << i + 1;
    os << "\n";
    char buf[64];
    for (const auto& a : m.atoms) {
        std::snprintf(buf, sizeof buf, "%.17g", a.mass);
        os << buf;
        for (double c : a.point) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            os << "," << buf;
        }
        os << "\n";
    }
}

void write_csv(const MomentMatchReport& rep, std::ostream& os) {
    char buf[64];
    auto num = [&buf](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    os << "kind,detail,lhs,rhs,abs_diff\n";
    for (const auto& row : rep.functional) {
        os << "functional,\"v0=" << num(row.v0) << ";v=";
        for (std::size_t i = 0; i < row.v.size(); ++i) os << (i ? " " : "") << num(row.v[i]);
        os << "\"," << num(row.lhs) << "," << num(row.rhs) << ","
           << num(std::abs(row.lhs - row.rhs)) << "\n";
    }
    for (const auto& row : rep.moments) {
        os << "moment,\"deg=";
        for (std::size_t i = 0; i < row.degrees.size(); ++i)
            os << (i ? " " : "") << row.degrees[i];
        os << "\"," << num(row.lhs) << "," << num(row.rhs) << ","
           << num(std::abs(row.lhs - row.rhs)) << "\n";
    }
}

}  // namespace lplq
