#pragma once

#include <span>
#include <vector>

#include "lplq/partition.hpp"

namespace lplq {

// Mixed-norm exponents.  All results in this library assume 1 <= p != q < oo;
// r = p/q is the derived exponent used throughout the equimeasure and
// counterexample modules.
struct NormParams {
    double p;
    double q;
    NormParams(double p_, double q_);
    double ratio() const { return p / q; }
};

// Piecewise-constant function on [0,1]: one value per partition cell.
class StepFunction1D {
public:
    StepFunction1D(Partition1D part, std::vector<double> values);
    static StepFunction1D constant(double c);

    const Partition1D& partition() const { return part_; }
    std::size_t size() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    double value_at(double x) const { return values_[part_.locate(x)]; }

    // (sum len*|v|^r)^{1/r}; the L_r norm on [0,1] (quasi-norm for r < 1).
    double lp_norm(double r) const;
    double integral() const;

private:
    Partition1D part_;
    std::vector<double> values_;
};

// Step function on [0,1]^2: a base partition with one fiber step function per
// base cell.  The value on base cell i, fiber cell s is fiber(i).value(s).
// Immutable; all operations below are pure.
class StepFunction2D {
public:
    StepFunction2D(Partition1D base, std::vector<StepFunction1D> fibers);
    static StepFunction2D constant(double c);
    // c on [x0,x1]x[y0,y1], 0 elsewhere.
    static StepFunction2D indicator(double x0, double x1, double y0, double y1,
                                    double c = 1.0);

    const Partition1D& base() const { return base_; }
    const StepFunction1D& fiber(std::size_t i) const { return fibers_[i]; }
    std::size_t base_size() const { return fibers_.size(); }
    double value_at(double x, double y) const;
    std::size_t piece_count() const;

    // Merges adjacent fiber cells with equal values and adjacent base cells
    // with identical fibers; keeps piece counts bounded under op chains.
    StepFunction2D simplified() const;

private:
    Partition1D base_;
    std::vector<StepFunction1D> fibers_;
};

// ---- norms ----------------------------------------------------------------

// (sum_i len_i (sum_s flen_s |v|^q)^{p/q})^{1/p}: exact closed-form summation.
double mixed_norm(const StepFunction2D& f, const NormParams& pq);

// N[f](x) = ||f(x,.)||_q as a step function on the base partition.
StepFunction1D n_map(const StepFunction2D& f, const NormParams& pq);

// ---- lattice operations (computed on the common refinement) ---------------

StepFunction2D sup(const StepFunction2D& f, const StepFunction2D& g);
StepFunction2D inf(const StepFunction2D& f, const StepFunction2D& g);
StepFunction2D abs(const StepFunction2D& f);
StepFunction2D scale(double c, const StepFunction2D& f);
StepFunction2D add(const StepFunction2D& f, const StepFunction2D& g);
StepFunction2D sub(const StepFunction2D& f, const StepFunction2D& g);
StepFunction2D mul(const StepFunction2D& f, const StepFunction2D& g);

// inf(|f|,|g|) = 0 on every refined cell.
bool is_disjoint(const StepFunction2D& f, const StepFunction2D& g);
// min(N[f], N[g]) = 0 on every refined base cell.
bool is_base_disjoint(const StepFunction2D& f, const StepFunction2D& g, const NormParams& pq);

// Both functions re-expressed on one shared product partition.
std::pair<StepFunction2D, StepFunction2D> refine_common(const StepFunction2D& f,
                                                        const StepFunction2D& g);

double sup_abs_diff(const StepFunction2D& f, const StepFunction2D& g);
double sup_abs(const StepFunction2D& f);

// ---- families on one shared product partition ------------------------------

// A family of step functions re-expressed on a single product partition:
// values[t][i][s] is atom t on base cell i, fiber cell s.
struct RefinedFamily {
    Partition1D base = Partition1D::whole();
    std::vector<Partition1D> fibers;  // per base cell
    std::vector<std::vector<std::vector<double>>> values;

    std::size_t atom_count() const { return values.size(); }
    StepFunction2D atom(std::size_t t) const;
    // N^q[atom t] on base cell i.
    double nq(std::size_t t, std::size_t i, double q) const;
};

RefinedFamily refine_family(std::span<const StepFunction2D> fs);

}  // namespace lplq
