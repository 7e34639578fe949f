#include "lplq/plmap.hpp"

#include <algorithm>
#include <cmath>

#include "lplq/errors.hpp"
#include "lplq/tolerances.hpp"

namespace lplq {

PLMap1D::PLMap1D(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw invariant_error("PLMap1D: no pieces");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.s0 < b.s0; });
    const double eps = tol().part;
    double cursor = 0.0;
    for (auto& p : pieces_) {
        if (std::abs(p.s0 - cursor) > 1e-9)
            throw invariant_error("PLMap1D: source pieces must partition [0,1]");
        p.s0 = cursor;
        if (!(p.s1 > p.s0 + eps / 10) || !(p.d1 > p.d0))
            throw invariant_error("PLMap1D: degenerate piece");
        cursor = p.s1;
    }
    if (std::abs(cursor - 1.0) > 1e-9)
        throw invariant_error("PLMap1D: source pieces must cover [0,1]");
    pieces_.back().s1 = 1.0;
}

PLMap1D PLMap1D::identity() { return PLMap1D({Piece{0.0, 1.0, 0.0, 1.0}}); }

PLMap1D PLMap1D::from_cdf(const std::vector<double>& breaks, const std::vector<double>& values) {
    if (breaks.size() != values.size() || breaks.size() < 2)
        throw invariant_error("PLMap1D::from_cdf: need matching lists of size >= 2");
    if (std::abs(breaks.front()) > 1e-12 || std::abs(breaks.back() - 1.0) > 1e-9 ||
        std::abs(values.front()) > 1e-9 || std::abs(values.back() - 1.0) > 1e-9)
        throw invariant_error("PLMap1D::from_cdf: ends must map 0->0, 1->1");
    std::vector<Piece> ps;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]) || !(values[i + 1] > values[i]))
            throw invariant_error("PLMap1D::from_cdf: strictly increasing required");
        ps.push_back(Piece{breaks[i], breaks[i + 1], values[i], values[i + 1]});
    }
    ps.front().d0 = 0.0;
    ps.back().d1 = 1.0;
    return PLMap1D(std::move(ps));
}

PLMap1D PLMap1D::pairing(const std::vector<std::pair<double, double>>& src,
                         const std::vector<std::pair<double, double>>& dst) {
    if (src.size() != dst.size() || src.empty())
        throw invariant_error("PLMap1D::pairing: mismatched families");
    std::vector<Piece> ps;
    for (std::size_t k = 0; k < src.size(); ++k)
        ps.push_back(Piece{src[k].first, src[k].second, dst[k].first, dst[k].second});
    return PLMap1D(std::move(ps));
}

double PLMap1D::operator()(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.s1; });
    const Piece& p = it == pieces_.end() ? pieces_.back() : *it;
    double t = (x - p.s0) / (p.s1 - p.s0);
    t = std::clamp(t, 0.0, 1.0);
    return p.d0 + t * (p.d1 - p.d0);
}

PLMap1D PLMap1D::inverse() const {
    std::vector<Piece> ps;
    ps.reserve(pieces_.size());
    for (const Piece& p : pieces_) ps.push_back(Piece{p.d0, p.d1, p.s0, p.s1});
    return PLMap1D(std::move(ps));
}

PLMap1D compose_pointmaps(const PLMap1D& first, const PLMap1D& then) {
    // Refine first's sources by preimages of then's source cuts, then chain
    // each refined piece through the unique piece of `then` containing its
    // destination (selected by midpoint so boundary evaluation stays inside
    // one piece even when `then` is a rearrangement).
    std::vector<double> cuts = first.preimage_cuts(then.source_cuts());
    auto piece_of = [&then](double x) -> const PLMap1D::Piece& {
        auto it = std::upper_bound(then.pieces_.begin(), then.pieces_.end(), x,
                                   [](double v, const PLMap1D::Piece& p) { return v < p.s1; });
        return it == then.pieces_.end() ? then.pieces_.back() : *it;
    };
    std::vector<PLMap1D::Piece> ps;
    for (const auto& p : first.pieces_) {
        std::vector<double> local{p.s0};
        for (double c : cuts)
            if (c > p.s0 + 1e-15 && c < p.s1 - 1e-15) local.push_back(c);
        local.push_back(p.s1);
        for (std::size_t i = 0; i + 1 < local.size(); ++i) {
            double s0 = local[i], s1 = local[i + 1];
            double t0 = (s0 - p.s0) / (p.s1 - p.s0), t1 = (s1 - p.s0) / (p.s1 - p.s0);
            double d0 = p.d0 + t0 * (p.d1 - p.d0), d1 = p.d0 + t1 * (p.d1 - p.d0);
            const PLMap1D::Piece& tp = piece_of(0.5 * (d0 + d1));
            auto through = [&tp](double x) {
                double t = (x - tp.s0) / (tp.s1 - tp.s0);
                return tp.d0 + t * (tp.d1 - tp.d0);
            };
            ps.push_back(PLMap1D::Piece{s0, s1, through(d0), through(d1)});
        }
    }
    // Guard against collapsed pieces from float dedup.
    std::vector<PLMap1D::Piece> kept;
    for (auto& p : ps) {
        if (p.s1 - p.s0 <= 1e-15 || p.d1 - p.d0 <= 0.0) {
            if (!kept.empty()) kept.back().s1 = p.s1;
            continue;
        }
        kept.push_back(p);
    }
    return PLMap1D(std::move(kept));
}

std::vector<double> PLMap1D::source_cuts() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].s1);
    return out;
}

std::vector<double> PLMap1D::preimage_cuts(const std::vector<double>& dst_cuts) const {
    std::vector<double> out;
    for (const Piece& p : pieces_) {
        double lo = std::min(p.d0, p.d1), hi = std::max(p.d0, p.d1);
        for (double c : dst_cuts) {
            if (c <= lo || c >= hi) continue;
            double t = (c - p.d0) / (p.d1 - p.d0);
            out.push_back(p.s0 + t * (p.s1 - p.s0));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
              out.end());
    return out;
}

bool PLMap1D::is_identity(double eps) const {
    for (const Piece& p : pieces_)
        if (std::abs(p.d0 - p.s0) > eps || std::abs(p.d1 - p.s1) > eps) return false;
    return true;
}

}  // namespace lplq
