#include "lplq/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lplq/errors.hpp"
#include "lplq/tolerances.hpp"

namespace lplq {

NormParams::NormParams(double p_, double q_) : p(p_), q(q_) {
    if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw invariant_error("NormParams: need finite p, q >= 1");
    if (p == q) throw invariant_error("NormParams: p != q required");
}

StepFunction1D::StepFunction1D(Partition1D part, std::vector<double> values)
    : part_(std::move(part)), values_(std::move(values)) {
    if (values_.size() != part_.size())
        throw invariant_error("StepFunction1D: one value per cell required");
}

StepFunction1D StepFunction1D::constant(double c) {
    return StepFunction1D(Partition1D::whole(), {c});
}

double StepFunction1D::lp_norm(double r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        s += part_.length(i) * std::pow(std::abs(values_[i]), r);
    return std::pow(s, 1.0 / r);
}

double StepFunction1D::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += part_.length(i) * values_[i];
    return s;
}

StepFunction2D::StepFunction2D(Partition1D base, std::vector<StepFunction1D> fibers)
    : base_(std::move(base)), fibers_(std::move(fibers)) {
    if (fibers_.size() != base_.size())
        throw invariant_error("StepFunction2D: one fiber per base cell required");
}

StepFunction2D StepFunction2D::constant(double c) {
    return StepFunction2D(Partition1D::whole(), {StepFunction1D::constant(c)});
}

StepFunction2D StepFunction2D::indicator(double x0, double x1, double y0, double y1, double c) {
    std::vector<double> bcuts, fcuts;
    const double eps = tol().part;
    if (x0 > eps) bcuts.push_back(x0);
    if (x1 < 1.0 - eps) bcuts.push_back(x1);
    if (y0 > eps) fcuts.push_back(y0);
    if (y1 < 1.0 - eps) fcuts.push_back(y1);
    Partition1D base = bcuts.empty() ? Partition1D::whole() : Partition1D::from_cuts(bcuts);
    Partition1D fpart = fcuts.empty() ? Partition1D::whole() : Partition1D::from_cuts(fcuts);
    std::vector<StepFunction1D> fibers;
    for (std::size_t i = 0; i < base.size(); ++i) {
        double xm = 0.5 * (base.breakpoints()[i] + base.breakpoints()[i + 1]);
        bool in_x = xm >= x0 && xm <= x1;
        std::vector<double> vals(fpart.size(), 0.0);
        for (std::size_t s = 0; s < fpart.size(); ++s) {
            double ym = 0.5 * (fpart.breakpoints()[s] + fpart.breakpoints()[s + 1]);
            if (in_x && ym >= y0 && ym <= y1) vals[s] = c;
        }
        fibers.emplace_back(fpart, std::move(vals));
    }
    return StepFunction2D(std::move(base), std::move(fibers));
}

double StepFunction2D::value_at(double x, double y) const {
    return fibers_[base_.locate(x)].value_at(y);
}

std::size_t StepFunction2D::piece_count() const {
    std::size_t n = 0;
    for (const auto& f : fibers_) n += f.size();
    return n;
}

StepFunction2D StepFunction2D::simplified() const {
    // Pass 1: merge equal-valued adjacent fiber cells within each base cell.
    std::vector<StepFunction1D> fibs;
    fibs.reserve(fibers_.size());
    for (const auto& f : fibers_) {
        std::vector<double> lens, vals;
        for (std::size_t s = 0; s < f.size(); ++s) {
            if (!vals.empty() && vals.back() == f.value(s))
                lens.back() += f.partition().length(s);
            else {
                lens.push_back(f.partition().length(s));
                vals.push_back(f.value(s));
            }
        }
        double sum = 0.0;
        for (double l : lens) sum += l;
        for (double& l : lens) l /= sum;
        fibs.emplace_back(Partition1D(std::move(lens)), std::move(vals));
    }
    // Pass 2: merge adjacent base cells whose fibers are identical.
    std::vector<double> blens;
    std::vector<StepFunction1D> out;
    auto same = [](const StepFunction1D& a, const StepFunction1D& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t s = 0; s < a.size(); ++s) {
            if (a.value(s) != b.value(s)) return false;
            if (std::abs(a.partition().length(s) - b.partition().length(s)) > tol().part)
                return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < fibs.size(); ++i) {
        if (!out.empty() && same(out.back(), fibs[i]))
            blens.back() += base_.length(i);
        else {
            blens.push_back(base_.length(i));
            out.push_back(fibs[i]);
        }
    }
    double bsum = 0.0;
    for (double l : blens) bsum += l;
    for (double& l : blens) l /= bsum;
    return StepFunction2D(Partition1D(std::move(blens)), std::move(out));
}

double mixed_norm(const StepFunction2D& f, const NormParams& pq) {
    double outer = 0.0;
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        const auto& fib = f.fiber(i);
        double inner = 0.0;
        for (std::size_t s = 0; s < fib.size(); ++s)
            inner += fib.partition().length(s) * std::pow(std::abs(fib.value(s)), pq.q);
        outer += f.base().length(i) * std::pow(inner, pq.p / pq.q);
    }
    return std::pow(outer, 1.0 / pq.p);
}

StepFunction1D n_map(const StepFunction2D& f, const NormParams& pq) {
    std::vector<double> vals(f.base_size());
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        const auto& fib = f.fiber(i);
        double inner = 0.0;
        for (std::size_t s = 0; s < fib.size(); ++s)
            inner += fib.partition().length(s) * std::pow(std::abs(fib.value(s)), pq.q);
        vals[i] = std::pow(inner, 1.0 / pq.q);
    }
    return StepFunction1D(f.base(), std::move(vals));
}

namespace {

StepFunction2D zip(const StepFunction2D& f, const StepFunction2D& g,
                   const std::function<double(double, double)>& op) {
    Refinement rb = refine(f.base(), g.base());
    std::vector<StepFunction1D> fibers;
    fibers.reserve(rb.merged.size());
    for (std::size_t c = 0; c < rb.merged.size(); ++c) {
        const auto& ff = f.fiber(rb.from_a[c]);
        const auto& gf = g.fiber(rb.from_b[c]);
        Refinement rf = refine(ff.partition(), gf.partition());
        std::vector<double> vals(rf.merged.size());
        for (std::size_t s = 0; s < rf.merged.size(); ++s)
            vals[s] = op(ff.value(rf.from_a[s]), gf.value(rf.from_b[s]));
        fibers.emplace_back(rf.merged, std::move(vals));
    }
    return StepFunction2D(rb.merged, std::move(fibers));
}

}  // namespace

StepFunction2D sup(const StepFunction2D& f, const StepFunction2D& g) {
    return zip(f, g, [](double a, double b) { return std::max(a, b); });
}

StepFunction2D inf(const StepFunction2D& f, const StepFunction2D& g) {
    return zip(f, g, [](double a, double b) { return std::min(a, b); });
}

StepFunction2D add(const StepFunction2D& f, const StepFunction2D& g) {
    return zip(f, g, [](double a, double b) { return a + b; });
}

StepFunction2D sub(const StepFunction2D& f, const StepFunction2D& g) {
    return zip(f, g, [](double a, double b) { return a - b; });
}

StepFunction2D mul(const StepFunction2D& f, const StepFunction2D& g) {
    return zip(f, g, [](double a, double b) { return a * b; });
}

StepFunction2D abs(const StepFunction2D& f) {
    std::vector<StepFunction1D> fibers;
    fibers.reserve(f.base_size());
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        std::vector<double> vals(f.fiber(i).values());
        for (double& v : vals) v = std::abs(v);
        fibers.emplace_back(f.fiber(i).partition(), std::move(vals));
    }
    return StepFunction2D(f.base(), std::move(fibers));
}

StepFunction2D scale(double c, const StepFunction2D& f) {
    std::vector<StepFunction1D> fibers;
    fibers.reserve(f.base_size());
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        std::vector<double> vals(f.fiber(i).values());
        for (double& v : vals) v *= c;
        fibers.emplace_back(f.fiber(i).partition(), std::move(vals));
    }
    return StepFunction2D(f.base(), std::move(fibers));
}

bool is_disjoint(const StepFunction2D& f, const StepFunction2D& g) {
    StepFunction2D m = inf(abs(f), abs(g));
    return sup_abs(m) == 0.0;
}

bool is_base_disjoint(const StepFunction2D& f, const StepFunction2D& g, const NormParams& pq) {
    StepFunction1D nf = n_map(f, pq);
    StepFunction1D ng = n_map(g, pq);
    Refinement r = refine(nf.partition(), ng.partition());
    for (std::size_t c = 0; c < r.merged.size(); ++c)
        if (std::min(nf.value(r.from_a[c]), ng.value(r.from_b[c])) != 0.0) return false;
    return true;
}

std::pair<StepFunction2D, StepFunction2D> refine_common(const StepFunction2D& f,
                                                        const StepFunction2D& g) {
    Refinement rb = refine(f.base(), g.base());
    std::vector<StepFunction1D> ff, gg;
    for (std::size_t c = 0; c < rb.merged.size(); ++c) {
        const auto& fa = f.fiber(rb.from_a[c]);
        const auto& fb = g.fiber(rb.from_b[c]);
        Refinement rf = refine(fa.partition(), fb.partition());
        std::vector<double> va(rf.merged.size()), vb(rf.merged.size());
        for (std::size_t s = 0; s < rf.merged.size(); ++s) {
            va[s] = fa.value(rf.from_a[s]);
            vb[s] = fb.value(rf.from_b[s]);
        }
        ff.emplace_back(rf.merged, std::move(va));
        gg.emplace_back(rf.merged, std::move(vb));
    }
    return {StepFunction2D(rb.merged, std::move(ff)), StepFunction2D(rb.merged, std::move(gg))};
}

double sup_abs_diff(const StepFunction2D& f, const StepFunction2D& g) {
    return sup_abs(sub(f, g));
}

double sup_abs(const StepFunction2D& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.base_size(); ++i)
        for (double v : f.fiber(i).values()) m = std::max(m, std::abs(v));
    return m;
}

StepFunction2D RefinedFamily::atom(std::size_t t) const {
    std::vector<StepFunction1D> fs;
    fs.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) fs.emplace_back(fibers[i], values[t][i]);
    return StepFunction2D(base, std::move(fs));
}

double RefinedFamily::nq(std::size_t t, std::size_t i, double q) const {
    double s = 0.0;
    for (std::size_t k = 0; k < fibers[i].size(); ++k)
        s += fibers[i].length(k) * std::pow(std::abs(values[t][i][k]), q);
    return s;
}

RefinedFamily refine_family(std::span<const StepFunction2D> fs) {
    if (fs.empty()) throw precondition_error("refine_family: empty family");
    // Common base partition.
    Partition1D base = fs[0].base();
    for (std::size_t t = 1; t < fs.size(); ++t) base = refine(base, fs[t].base()).merged;
    // Per base cell, the common fiber partition across all atoms.
    RefinedFamily out;
    std::vector<std::vector<std::size_t>> src_cell(fs.size());
    for (std::size_t t = 0; t < fs.size(); ++t) {
        src_cell[t].resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            double mid = 0.5 * (base.breakpoints()[i] + base.breakpoints()[i + 1]);
            src_cell[t][i] = fs[t].base().locate(mid);
        }
    }
    out.fibers.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        Partition1D fp = fs[0].fiber(src_cell[0][i]).partition();
        for (std::size_t t = 1; t < fs.size(); ++t)
            fp = refine(fp, fs[t].fiber(src_cell[t][i]).partition()).merged;
        out.fibers.push_back(fp);
    }
    out.values.assign(fs.size(), {});
    for (std::size_t t = 0; t < fs.size(); ++t) {
        out.values[t].resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            const auto& fib = fs[t].fiber(src_cell[t][i]);
            const auto& fp = out.fibers[i];
            std::vector<double> vals(fp.size());
            for (std::size_t s = 0; s < fp.size(); ++s) {
                double mid = 0.5 * (fp.breakpoints()[s] + fp.breakpoints()[s + 1]);
                vals[s] = fib.value_at(mid);
            }
            out.values[t][i] = std::move(vals);
        }
    }
    out.base = std::move(base);
    return out;
}

}  // namespace lplq
