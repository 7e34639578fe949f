#pragma once

#include <utility>
#include <vector>

namespace lplq {

// Piecewise-linear rearrangement of [0,1]: finitely many pieces, each mapping
// a source interval linearly with positive slope onto a destination interval.
// Source intervals partition [0,1]; destination intervals partition [0,1] as
// well, so the map is a bijection up to the (finite) breakpoint set.  Monotone
// maps (CDF transports) and interval exchanges are the two special cases used
// by the transport module; composition and inversion stay inside the class.
class PLMap1D {
public:
    struct Piece {
        double s0, s1;  // source interval
        double d0, d1;  // destination interval
        double slope() const { return (d1 - d0) / (s1 - s0); }
    };

    explicit PLMap1D(std::vector<Piece> pieces);

    static PLMap1D identity();

    // Monotone map through the points (breaks[i], values[i]); both lists
    // strictly increasing with ends pinned to 0 and 1.
    static PLMap1D from_cdf(const std::vector<double>& breaks, const std::vector<double>& values);

    // Pairs src[k] onto dst[k] in order (lengths may differ; slopes adjust).
    // Each family must partition [0,1] when concatenated.
    static PLMap1D pairing(const std::vector<std::pair<double, double>>& src,
                           const std::vector<std::pair<double, double>>& dst);

    double operator()(double x) const;

    PLMap1D inverse() const;

    // x -> then(first(x)).
    friend PLMap1D compose_pointmaps(const PLMap1D& first, const PLMap1D& then);

    // Interior source breakpoints, ascending.
    std::vector<double> source_cuts() const;

    // Source positions mapping onto the given destination cuts (interior only),
    // ascending and deduplicated.
    std::vector<double> preimage_cuts(const std::vector<double>& dst_cuts) const;

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool is_identity(double eps) const;

private:
    std::vector<Piece> pieces_;  // sorted by s0; sources partition [0,1]
};

PLMap1D compose_pointmaps(const PLMap1D& first, const PLMap1D& then);

}  // namespace lplq
