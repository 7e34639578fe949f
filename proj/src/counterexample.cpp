#include "lplq/counterexample.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "lplq/equimeasure.hpp"
#include "lplq/errors.hpp"

namespace lplq {

namespace {

Rat coefficient_bound(const RationalPoly& p) {
    // |p(x)| <= sum |c_i| on [0,1]
    Rat b(0);
    for (const Rat& c : p.coeffs()) b += abs(c);
    return b;
}

Rat binom(int n, int k) {
    Rat r(1);
    for (int i = 0; i < k; ++i) r = r * Rat(n - i) / Rat(i + 1);
    return r;
}

}  // namespace

RatInterval SignSplit::integral_plus(const RationalPoly& phi, const Rat& u) const {
    const RationalPoly P = phi * g;
    const RationalPoly F = P.antiderivative();
    const Rat M = coefficient_bound(P);
    RatInterval acc(Rat(0));
    Rat cursor(0);
    auto add_gap = [&](const Rat& lo, const Rat& hi, int sign) {
        Rat a = std::max(lo, Rat(0)), b = std::min(hi, u);
        if (b <= a) return;
        if (sign > 0) acc = acc + RatInterval(F.eval(b) - F.eval(a));
    };
    auto add_box = [&](const RatInterval& box) {
        Rat a = std::max(box.lo, Rat(0)), b = std::min(box.hi, u);
        if (b <= a) return;
        acc = acc + RatInterval(Rat(0), M * (b - a));
    };
    for (std::size_t i = 0; i <= root_boxes.size(); ++i) {
        Rat gap_hi = i < root_boxes.size() ? root_boxes[i].lo : Rat(1);
        add_gap(cursor, gap_hi, gap_signs[i]);
        if (i < root_boxes.size()) {
            add_box(root_boxes[i]);
            cursor = root_boxes[i].hi;
        }
    }
    return acc;
}

RatInterval SignSplit::cdf(const Rat& u, bool plus) const {
    RatInterval ip = integral_plus(RationalPoly({Rat(1)}), u);
    if (!plus) ip = ip - RatInterval(g.integrate(Rat(0), u));  // int g_- = int g_+ - int g
    return RatInterval(u / 2) + ip / abs_integral;
}

RatInterval SignSplit::mean_integral(const Rat& u, bool plus) const {
    const RationalPoly t = RationalPoly::monomial(1);
    RatInterval ip = integral_plus(t, u);
    if (!plus) ip = ip - RatInterval((t * g).integrate(Rat(0), u));
    return RatInterval(u * u / 4) + ip / abs_integral;
}

Rat SignSplit::quantile(const Rat& x, bool plus, int bits) const {
    Rat lo(0), hi(1);
    for (int it = 0; it < bits; ++it) {
        Rat mid = (lo + hi) / 2;
        RatInterval h = cdf(mid, plus);
        if (h.hi < x)
            lo = mid;
        else if (h.lo > x)
            hi = mid;
        else
            return mid;  // enclosure straddles x: already within its width
    }
    return (lo + hi) / 2;
}

SignSplit analyze_sign_split(const RationalPoly& g) {
    SignSplit split;
    split.g = g;
    const int expected = g.degree();
    Rat width = Rat(1, BigInt(1) << 90);
    split.root_boxes = isolate_roots(g, Rat(0), Rat(1), width);
    if (static_cast<int>(split.root_boxes.size()) != expected)
        throw invariant_error("sign split: expected all roots of g inside (0,1)");
    Rat cursor(0);
    for (std::size_t i = 0; i <= split.root_boxes.size(); ++i) {
        Rat gap_hi = i < split.root_boxes.size() ? split.root_boxes[i].lo : Rat(1);
        Rat mid = (cursor + gap_hi) / 2;
        Rat v = g.eval(mid);
        split.gap_signs.push_back(v > 0 ? 1 : (v < 0 ? -1 : 0));
        if (i < split.root_boxes.size()) cursor = split.root_boxes[i].hi;
    }
    // S = int |g| = 2 int g_+ since int g = 0.
    split.abs_integral = RatInterval(Rat(2)) * split.integral_plus(RationalPoly({Rat(1)}), Rat(1));
    return split;
}

std::vector<Rat> quantile_table(const SignSplit& split, bool plus,
                                const std::vector<Rat>& positions, int bits, bool parallel) {
    std::vector<Rat> out(positions.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(positions.size()); ++i)
            out[static_cast<std::size_t>(i)] =
                split.quantile(positions[static_cast<std::size_t>(i)], plus, bits);
    } else {
        for (std::size_t i = 0; i < positions.size(); ++i)
            out[i] = split.quantile(positions[i], plus, bits);
    }
    return out;
}

CounterexampleBundle build_counterexample(const NormParams& pq, int resolution) {
    const double rd = pq.p / pq.q;
    const int r = static_cast<int>(std::lround(rd));
    if (std::abs(rd - static_cast<double>(r)) > 1e-12 || r < 2)
        throw precondition_error("build_counterexample: p/q must be an integer >= 2");
    if (resolution < 2) throw precondition_error("build_counterexample: resolution >= 2 required");

    CounterexampleBundle b{r, pq, resolution, {}, {}, {}, {}, {}, {}};
    b.split = analyze_sign_split(hilbert_nullspace(r));
    for (int j = 0; j <= r + 1; ++j)
        b.moments.push_back((RationalPoly::monomial(j) * b.split.g).integrate01());
    for (int j = 0; j <= r; ++j)
        if (b.moments[static_cast<std::size_t>(j)] != 0)
            throw invariant_error("build_counterexample: moment orthogonality failed");
    if (b.moments.back() == 0)
        throw invariant_error("build_counterexample: degree r+1 gap vanished");

    // Step layer: exact cell means of F^i = H_i^{-1} through the substitution
    // x = H_i(u); quantiles at the cell boundaries first.
    const int n = resolution;
    std::vector<Rat> xs(static_cast<std::size_t>(n) + 1);
    for (int c = 0; c <= n; ++c) xs[static_cast<std::size_t>(c)] = Rat(c, n);
    const int bits = 60;
    for (bool plus : {true, false}) {
        std::vector<Rat> us = quantile_table(b.split, plus, xs, bits, true);
        std::vector<double>& heights = plus ? b.heights1 : b.heights2;
        heights.resize(static_cast<std::size_t>(n));
        std::vector<RatInterval> J(us.size());
        for (std::size_t c = 0; c < us.size(); ++c) J[c] = b.split.mean_integral(us[c], plus);
        for (int c = 0; c < n; ++c) {
            RatInterval cell = (J[static_cast<std::size_t>(c) + 1] - J[static_cast<std::size_t>(c)]) *
                               RatInterval(Rat(n));
            heights[static_cast<std::size_t>(c)] = cell.mid_double();
        }
    }

    auto make_atoms = [n](const std::vector<double>& h) {
        Partition1D base = Partition1D::uniform(static_cast<std::size_t>(n));
        std::vector<StepFunction1D> f1, f2;
        for (int c = 0; c < n; ++c) {
            double hc = std::clamp(h[static_cast<std::size_t>(c)], 1e-15, 1.0 - 1e-15);
            Partition1D fp({hc, 1.0 - hc});
            f1.emplace_back(fp, std::vector<double>{1.0, 0.0});
            f2.emplace_back(fp, std::vector<double>{0.0, 1.0});
        }
        return Embedding{{StepFunction2D(base, std::move(f1)), StepFunction2D(base, std::move(f2))}};
    };
    b.atoms1 = make_atoms(b.heights1);
    b.atoms2 = make_atoms(b.heights2);
    return b;
}

IsometryCertificate certify_isometry(const CounterexampleBundle& bundle,
                                     const std::vector<std::pair<Rat, Rat>>& vs) {
    const int r = bundle.r;
    IsometryCertificate cert;
    cert.all_equal = true;
    for (const auto& [v1, v2] : vs) {
        IsometryCertificate::Row row{v1, v2, Rat(0), RatInterval(Rat(0)), RatInterval(Rat(0))};
        // int |v1 F_1 + v2 F_2|^r dx = int ((v1-v2) u + v2)^r h_i(u) du; the
        // difference of the two sides expands over the certified moments.
        for (int j = 0; j <= r; ++j) {
            Rat term = binom(r, j);
            Rat d = v1 - v2;
            for (int i = 0; i < j; ++i) term *= d;
            for (int i = 0; i < r - j; ++i) term *= v2;
            row.difference += term * bundle.moments[static_cast<std::size_t>(j)];
        }
        // Side enclosures: P(u) = ((v1-v2)u+v2)^r integrated against h_i.
        RationalPoly lin({v2, v1 - v2});
        RationalPoly P({Rat(1)});
        for (int i = 0; i < r; ++i) P = P * lin;
        RatInterval half_part(P.integrate01() / 2);
        RatInterval plus_part = bundle.split.integral_plus(P, Rat(1));
        RatInterval minus_part = plus_part - RatInterval((P * bundle.split.g).integrate01());
        row.value1 = half_part + plus_part / bundle.split.abs_integral;
        row.value2 = half_part + minus_part / bundle.split.abs_integral;
        if (row.difference != 0) cert.all_equal = false;
        cert.rows.push_back(std::move(row));
    }
    return cert;
}

NonEquimeasurabilityCertificate certify_non_equimeasurable(const CounterexampleBundle& bundle) {
    NonEquimeasurabilityCertificate cert;
    cert.gap_degree = bundle.r + 1;
    cert.gap = bundle.moments.back();
    cert.gap_normalized = RatInterval(cert.gap) / bundle.split.abs_integral;
    VectorMeasure m1 = pushforward(bundle.atoms1.images, bundle.params);
    VectorMeasure m2 = pushforward(bundle.atoms2.images, bundle.params);
    cert.step_unmatched_mass = unmatched_mass(m1, m2, 1e-9);
    return cert;
}

ObstructionReport obstruction_report(const CounterexampleBundle& bundle, double eps_min) {
    VectorMeasure m1 = pushforward(bundle.atoms1.images, bundle.params);
    VectorMeasure m2 = pushforward(bundle.atoms2.images, bundle.params);

    auto mass_in = [](const VectorMeasure& m, double x0, double y0, double x1, double y1) {
        double s = 0.0;
        for (const auto& a : m.atoms)
            if (a.point[0] >= x0 && a.point[0] <= x1 && a.point[1] >= y0 && a.point[1] <= y1)
                s += a.mass;
        return s;
    };
    // Margin of the witness inequality for rectangle C and inflation eps.
    auto margin = [&](double x0, double y0, double x1, double y1, double eps) {
        double inflated = mass_in(m1, x0 - eps, y0 - eps, x1 + eps, y1 + eps);
        return mass_in(m2, x0, y0, x1, y1) - inflated - eps;
    };

    const int G = 64;
    std::vector<double> grid(static_cast<std::size_t>(G) + 1);
    for (int i = 0; i <= G; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / G;
    std::vector<double> eps_list{0.25, 0.2, 0.15, 0.1, 0.075, 0.05, 0.03, 0.02, 0.01, 0.0075, 0.005};

    ObstructionReport rep;
    for (double eps : eps_list) {
        if (eps < eps_min) break;
        double best = 0.0;
        double rect[4] = {0, 0, 1, 1};
        auto consider = [&](double x0, double y0, double x1, double y1) {
            double m = margin(x0, y0, x1, y1, eps);
            if (m > best) {
                best = m;
                rect[0] = x0;
                rect[1] = y0;
                rect[2] = x1;
                rect[3] = y1;
            }
        };
        for (int i = 0; i <= G; ++i)
            for (int j = i; j <= G; ++j) {
                consider(grid[i], 0.0, grid[j], 1.0);   // z1-interval
                consider(0.0, grid[i], 1.0, grid[j]);   // z2-interval
                consider(0.0, 0.0, grid[i], grid[j]);   // corner at origin
                consider(grid[i], grid[j], 1.0, 1.0);   // far corner
            }
        if (best > 0.0) {
            rep.found = true;
            rep.eps = eps;
            rep.margin = best;
            std::copy(rect, rect + 4, rep.rect);
            rep.conclusion =
                "witness rectangle found: no 1-fixing automorphism can carry embedding 1 onto "
                "embedding 2 within eps, since such automorphisms preserve base pushforwards";
            return rep;
        }
    }
    rep.conclusion = "no witness rectangle found on the threshold grid";
    return rep;
}

nlohmann::json certificate_json(const CounterexampleBundle& bundle,
                                const IsometryCertificate& iso,
                                const NonEquimeasurabilityCertificate& neq) {
    nlohmann::json j;
    j["r"] = bundle.r;
    nlohmann::json gj = nlohmann::json::array();
    for (const Rat& c : bundle.split.g.coeffs()) gj.push_back(rat_string(c));
    j["g"] = std::move(gj);
    // Scale-invariant statement: S * (int u^j h1 - int u^j h2) = int u^j g,
    // so lhs is the exact moment of g and rhs its required value 0.
    nlohmann::json rows = nlohmann::json::array();
    for (int deg = 0; deg <= bundle.r; ++deg) {
        nlohmann::json row;
        row["degree"] = deg;
        row["lhs"] = rat_string(bundle.moments[static_cast<std::size_t>(deg)]);
        row["rhs"] = "0";
        rows.push_back(std::move(row));
    }
    j["moment_identities"] = std::move(rows);
    j["gap_degree"] = neq.gap_degree;
    j["gap"] = rat_string(neq.gap);
    j["gap_normalized_lo"] = rat_double(neq.gap_normalized.lo);
    j["gap_normalized_hi"] = rat_double(neq.gap_normalized.hi);
    j["abs_integral_lo"] = rat_double(bundle.split.abs_integral.lo);
    j["abs_integral_hi"] = rat_double(bundle.split.abs_integral.hi);
    j["step_unmatched_mass"] = neq.step_unmatched_mass;
    nlohmann::json isoj = nlohmann::json::array();
    for (const auto& row : iso.rows) {
        nlohmann::json rj;
        rj["v1"] = rat_string(row.v1);
        rj["v2"] = rat_string(row.v2);
        rj["difference"] = rat_string(row.difference);
        rj["value_lo"] = rat_double(row.value1.lo);
        rj["value_hi"] = rat_double(row.value1.hi);
        isoj.push_back(std::move(rj));
    }
    j["isometry_checks"] = std::move(isoj);
    j["isometry_all_equal"] = iso.all_equal;
    return j;
}

}  // namespace lplq
