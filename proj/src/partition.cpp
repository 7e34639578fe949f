#include "lplq/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lplq/errors.hpp"
#include "lplq/tolerances.hpp"

namespace lplq {

Tolerances& tol() {
    static Tolerances t;
    return t;
}

Partition1D::Partition1D(std::vector<double> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.empty()) throw invariant_error("Partition1D: no cells");
    double sum = 0.0;
    for (double l : lengths_) {
        if (!(l > 0.0) || !std::isfinite(l))
            throw invariant_error("Partition1D: cell length must be positive");
        sum += l;
    }
    if (std::abs(sum - 1.0) > tol().part)
        throw invariant_error("Partition1D: lengths must sum to 1");
    breaks_.resize(lengths_.size() + 1);
    breaks_[0] = 0.0;
    std::partial_sum(lengths_.begin(), lengths_.end(), breaks_.begin() + 1);
    breaks_.back() = 1.0;
}

Partition1D Partition1D::whole() { return Partition1D({1.0}); }

Partition1D Partition1D::uniform(std::size_t n) {
    return Partition1D(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Partition1D Partition1D::from_cuts(const std::vector<double>& cuts) {
    std::vector<double> lens;
    double prev = 0.0;
    for (double c : cuts) {
        if (!(c > prev) || !(c < 1.0))
            throw invariant_error("Partition1D: cuts must be strictly increasing in (0,1)");
        lens.push_back(c - prev);
        prev = c;
    }
    lens.push_back(1.0 - prev);
    return Partition1D(std::move(lens));
}

std::size_t Partition1D::locate(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    if (i == 0) return 0;
    if (i > lengths_.size()) return lengths_.size() - 1;
    return i - 1;
}

namespace {

// Merge two ascending breakpoint lists (each 0..1) deduplicating within eps.
std::vector<double> merge_cuts(const std::vector<double>& a, const std::vector<double>& b) {
    const double eps = tol().part;
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double v;
        if (j == b.size())
            v = a[i++];
        else if (i == a.size())
            v = b[j++];
        else if (std::abs(a[i] - b[j]) <= eps) {
            v = a[i];
            ++i;
            ++j;
        } else if (a[i] < b[j])
            v = a[i++];
        else
            v = b[j++];
        if (out.empty() || v - out.back() > eps) out.push_back(v);
    }
    out.front() = 0.0;
    out.back() = 1.0;
    return out;
}

}  // namespace

Refinement refine(const Partition1D& a, const Partition1D& b) {
    std::vector<double> cuts = merge_cuts(a.breakpoints(), b.breakpoints());
    std::vector<double> lens(cuts.size() - 1);
    std::vector<std::size_t> fa(lens.size()), fb(lens.size());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        lens[c] = cuts[c + 1] - cuts[c];
        double mid = 0.5 * (cuts[c] + cuts[c + 1]);
        fa[c] = a.locate(mid);
        fb[c] = b.locate(mid);
    }
    return Refinement{Partition1D(std::move(lens)), std::move(fa), std::move(fb)};
}

Partition1D refine_with_cuts(const Partition1D& a, const std::vector<double>& cuts) {
    std::vector<double> extra{0.0};
    for (double c : cuts)
        if (c > tol().part && c < 1.0 - tol().part) extra.push_back(c);
    extra.push_back(1.0);
    std::sort(extra.begin(), extra.end());
    std::vector<double> merged = merge_cuts(a.breakpoints(), extra);
    std::vector<double> lens(merged.size() - 1);
    for (std::size_t c = 0; c + 1 < merged.size(); ++c) lens[c] = merged[c + 1] - merged[c];
    return Partition1D(std::move(lens));
}

}  // namespace lplq
