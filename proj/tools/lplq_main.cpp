#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lplq/batch.hpp"
#include "lplq/blpq.hpp"
#include "lplq/counterexample.hpp"
#include "lplq/equimeasure.hpp"
#include "lplq/errors.hpp"
#include "lplq/json_io.hpp"
#include "lplq/random_gen.hpp"
#include "lplq/tolerances.hpp"
#include "lplq/transport.hpp"

namespace {

// Exit code contract: 0 ok, 2 parse, 3 invariant, 4 precondition.
constexpr int kExitParse = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitPrecondition = 4;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

lplq::StepFunction2D load_step(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nlohmann::json::parse_error::create(101, 0, "cannot open " + path, nullptr);
    nlohmann::json j = nlohmann::json::parse(in);
    return lplq::step2d_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

int cmd_norm(const std::string& file, double p, double q, const std::string& out_csv) {
    lplq::NormParams pq(p, q);
    lplq::StepFunction2D f = load_step(file);
    std::cout << fmt(lplq::mixed_norm(f, pq)) << "\n";
    lplq::StepFunction1D n = lplq::n_map(f, pq);
    std::ostringstream csv;
    csv << "x_lo,x_hi,N\n";
    for (std::size_t i = 0; i < n.size(); ++i)
        csv << fmt(n.partition().breakpoints()[i]) << "," << fmt(n.partition().breakpoints()[i + 1])
            << "," << fmt(n.value(i)) << "\n";
    if (!out_csv.empty())
        write_text(out_csv, csv.str());
    else
        std::cout << csv.str();
    return 0;
}

int cmd_auh_demo(const std::vector<int>& blocks, double p, double q, double eps,
                 std::uint64_t seed, int trials, const std::string& out_path) {
    lplq::BKpqSpec spec(blocks, lplq::NormParams(p, q));
    std::vector<double> residuals(static_cast<std::size_t>(trials), 0.0);
    std::vector<nlohmann::json> rows(static_cast<std::size_t>(trials));
    // Trials are independent: each derives its own engine from (seed, trial).
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        lplq::RandomGen gen(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1));
        lplq::Embedding e1 = gen.transported_embedding(spec);
        lplq::Embedding e2 = gen.transported_embedding(spec);
        auto [phi, rep] = lplq::auh_pipeline(e1, e2, spec, eps);
        residuals[static_cast<std::size_t>(trial)] = rep.max_residual;
        nlohmann::json row;
        row["trial"] = trial;
        row["max_residual"] = rep.max_residual;
        row["residuals"] = rep.residuals;
        row["ok"] = rep.ok;
        rows[static_cast<std::size_t>(trial)] = std::move(row);
    }
    nlohmann::json report;
    report["blocks"] = blocks;
    report["p"] = p;
    report["q"] = q;
    report["epsilon"] = eps;
    report["seed"] = seed;
    report["trials"] = trials;
    report["results"] = rows;
    double worst = 0.0;
    bool all_ok = true;
    for (int t = 0; t < trials; ++t) {
        worst = std::max(worst, residuals[static_cast<std::size_t>(t)]);
        all_ok = all_ok && (residuals[static_cast<std::size_t>(t)] < eps);
    }
    report["max_residual"] = worst;
    report["all_within_epsilon"] = all_ok;
    std::string text = report.dump(2) + "\n";
    if (!out_path.empty())
        write_text(out_path, text);
    else
        std::cout << text;
    return 0;
}

int cmd_counterexample(double p, double q, int resolution, const std::string& out_prefix) {
    lplq::NormParams pq(p, q);
    lplq::CounterexampleBundle bundle = lplq::build_counterexample(pq, resolution);
    std::vector<std::pair<lplq::Rat, lplq::Rat>> vs;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 3; ++b) vs.emplace_back(lplq::Rat(a), lplq::Rat(b, 2));
    lplq::IsometryCertificate iso = lplq::certify_isometry(bundle, vs);
    lplq::NonEquimeasurabilityCertificate neq = lplq::certify_non_equimeasurable(bundle);
    lplq::ObstructionReport obs = lplq::obstruction_report(bundle);

    nlohmann::json cert = lplq::certificate_json(bundle, iso, neq);
    nlohmann::json obsj;
    obsj["found"] = obs.found;
    obsj["epsilon"] = obs.eps;
    obsj["rect"] = {obs.rect[0], obs.rect[1], obs.rect[2], obs.rect[3]};
    obsj["margin"] = obs.margin;
    obsj["conclusion"] = obs.conclusion;
    cert["obstruction"] = obsj;

    nlohmann::json atoms;
    atoms["f1_1"] = lplq::to_json(bundle.atoms1.images[0]);
    atoms["f1_2"] = lplq::to_json(bundle.atoms1.images[1]);
    atoms["f2_1"] = lplq::to_json(bundle.atoms2.images[0]);
    atoms["f2_2"] = lplq::to_json(bundle.atoms2.images[1]);

    if (!out_prefix.empty()) {
        write_text(out_prefix + "_certificate.json", cert.dump(2) + "\n");
        write_text(out_prefix + "_atoms.json", atoms.dump(2) + "\n");
    } else {
        std::cout << cert.dump(2) << "\n";
    }
    return 0;
}

int cmd_equimeasure(const std::string& file_a, const std::string& file_b, double p, double q,
                    const std::string& out_csv) {
    lplq::NormParams pq(p, q);
    nlohmann::json ja = nlohmann::json::parse(std::ifstream(file_a));
    nlohmann::json jb = nlohmann::json::parse(std::ifstream(file_b));
    auto load_family = [](const nlohmann::json& j) {
        std::vector<lplq::StepFunction2D> fs;
        if (j.is_array())
            for (const auto& item : j) fs.push_back(lplq::step2d_from_json(item));
        else
            fs.push_back(lplq::step2d_from_json(j));
        return fs;
    };
    std::vector<lplq::StepFunction2D> fa = load_family(ja);
    std::vector<lplq::StepFunction2D> fb = load_family(jb);
    lplq::VectorMeasure ma = lplq::pushforward(fa, pq);
    lplq::VectorMeasure mb = lplq::pushforward(fb, pq);
    bool verdict = lplq::equimeasurable(ma, mb);
    std::cout << (verdict ? "equimeasurable: true" : "equimeasurable: false") << "\n";

    double r = pq.ratio();
    int degree_max = static_cast<int>(2 * (r + 2));
    std::vector<std::pair<double, std::vector<double>>> vs;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    for (int i = 0; i < 12; ++i) {
        std::vector<double> v(ma.dim());
        for (double& x : v) x = ud(rng);
        vs.emplace_back(ud(rng), std::move(v));
    }
    lplq::MomentMatchReport rep =
        lplq::moment_match_report(ma, mb, r, degree_max, vs, 1e-9);
    std::ostringstream csv;
    lplq::write_csv(rep, csv);
    if (!out_csv.empty())
        write_text(out_csv, csv.str());
    else
        std::cout << csv.str();
    return verdict ? 0 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* scale = std::getenv("LPLQ_TOLERANCE_SCALE")) {
        try {
            lplq::tol().norm *= std::stod(scale);
        } catch (...) {
            std::cerr << "invalid LPLQ_TOLERANCE_SCALE\n";
            return kExitParse;
        }
    }

    CLI::App app{"step-function L_p(L_q) toolkit: mixed norms, lattice transports, "
                 "homogeneity demos, and exact counterexample certificates"};
    app.require_subcommand(1);

    double p = 2.0, q = 1.0, eps = 1e-3;
    std::uint64_t seed = 1;
    int trials = 10, resolution = 1024;
    std::string file, file_b, out;
    std::vector<int> blocks{1, 2};

    CLI::App* norm = app.add_subcommand("norm", "mixed norm and N-profile of a JSON step function");
    norm->add_option("--file", file, "step function JSON")->required();
    norm->add_option("--p", p)->required();
    norm->add_option("--q", q)->required();
    norm->add_option("--out", out, "N-profile CSV path (stdout otherwise)");

    CLI::App* demo = app.add_subcommand("auh-demo", "seeded homogeneity pipeline trials");
    demo->add_option("--blocks", blocks, "block sizes m_k")->required();
    demo->add_option("--p", p)->required();
    demo->add_option("--q", q)->required();
    demo->add_option("--epsilon", eps);
    demo->add_option("--seed", seed);
    demo->add_option("--trials", trials);
    demo->add_option("--out", out, "JSON report path (stdout otherwise)");

    CLI::App* cex = app.add_subcommand("counterexample",
                                       "exact certificates for integer p/q non-homogeneity");
    cex->add_option("--p", p)->required();
    cex->add_option("--q", q)->required();
    cex->add_option("--resolution", resolution);
    cex->add_option("--out", out, "output path prefix (stdout otherwise)");

    CLI::App* eqm = app.add_subcommand("equimeasure", "pushforward comparison of two families");
    eqm->add_option("--fileA", file, "step function (or array) JSON")->required();
    eqm->add_option("--fileB", file_b, "step function (or array) JSON")->required();
    eqm->add_option("--p", p)->required();
    eqm->add_option("--q", q)->required();
    eqm->add_option("--out", out, "moment report CSV path (stdout otherwise)");

    try {
        app.parse(argc, argv);
        if (norm->parsed()) return cmd_norm(file, p, q, out);
        if (demo->parsed()) return cmd_auh_demo(blocks, p, q, eps, seed, trials, out);
        if (cex->parsed()) return cmd_counterexample(p, q, resolution, out);
        if (eqm->parsed()) return cmd_equimeasure(file, file_b, p, q, out);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const lplq::precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const lplq::invariant_error& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
