#pragma once

#include <cstddef>
#include <vector>

namespace lplq {

// Interval partition of [0,1]: ordered positive cell lengths summing to 1
// (within Tolerances::part).  Immutable after construction.
class Partition1D {
public:
    explicit Partition1D(std::vector<double> lengths);

    static Partition1D whole();                 // single cell [0,1]
    static Partition1D uniform(std::size_t n);
    // Interior cut positions (strictly increasing, in (0,1)).
    static Partition1D from_cuts(const std::vector<double>& cuts);

    std::size_t size() const { return lengths_.size(); }
    double length(std::size_t i) const { return lengths_[i]; }
    const std::vector<double>& lengths() const { return lengths_; }

    // size()+1 entries, breaks[0] = 0, breaks[size()] = 1.
    const std::vector<double>& breakpoints() const { return breaks_; }

    // Index of the cell containing x (cells are [b_i, b_{i+1}), last closed).
    std::size_t locate(double x) const;

    bool operator==(const Partition1D&) const = default;

private:
    std::vector<double> lengths_;
    std::vector<double> breaks_;
};

// Common refinement of two partitions.  `from_a[c]` / `from_b[c]` give, for
// each merged cell c, the source cell it came from.
struct Refinement {
    Partition1D merged;
    std::vector<std::size_t> from_a;
    std::vector<std::size_t> from_b;
};

Refinement refine(const Partition1D& a, const Partition1D& b);

// Partition spanned by an arbitrary set of interior cuts merged into `a`.
Partition1D refine_with_cuts(const Partition1D& a, const std::vector<double>& cuts);

}  // namespace lplq
