// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "mgt/boundary.hpp"
#include "mgt/cli.hpp"
#include "mgt/ensemble.hpp"
#include "mgt/eval.hpp"
#include "mgt/features.hpp"
#include "mgt/regress.hpp"
#include "mgt/text.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace mgt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

corpus::Corpus plain_corpus(const std::vector<std::string>& texts) {
    std::vector<corpus::Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({"d" + std::to_string(i), texts[i], {}, {}, {}});
    return corpus::Corpus(corpus::LabelScheme::binary, std::move(docs));
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

Outcome ac1_tfidf() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int corpora = 0;
    while (corpora < 20) {
        const auto texts = testing::random_corpus(rng, 10, 20);
        const auto oracle = testing::tfidf_oracle(texts, 1, 50000, true);
        if (oracle.terms.empty()) continue;
        ++corpora;
        const auto model = features::fit_tfidf(plain_corpus(texts), {1, 50000, true});
        if (model.vocab.terms() != oracle.terms) return {false, "vocabulary differs from oracle"};
        for (const auto& t : texts) {
            const auto got = features::transform_tfidf(model, t);
            const auto want = oracle.transform(t);
            for (std::size_t j = 0; j < want.size(); ++j)
                worst = std::max(worst, std::abs(got[static_cast<Eigen::Index>(j)] - want[j]));
        }
    }
    return {worst <= 1e-9, "20 corpora, max |diff| = " + fmt(worst)};
}

Outcome ac2_ppmi() {
    std::mt19937_64 rng(202);
    double worst = 0.0, lowest = 0.0;
    int corpora = 0;
    while (corpora < 20) {
        const auto texts = testing::random_corpus(rng, 10, 20);
        const auto oracle = testing::ppmi_oracle(texts);
        if (oracle.terms.empty()) continue;
        ++corpora;
        const auto model = features::fit_ppmi(plain_corpus(texts));
        if (model.vocab.terms() != oracle.terms) return {false, "vocabulary differs from oracle"};
        for (const auto& t : texts) {
            const auto got = features::transform_ppmi(model, t);
            const auto want = oracle.transform(t);
            lowest = std::min(lowest, got.minCoeff());
            for (std::size_t j = 0; j < want.size(); ++j)
                worst = std::max(worst, std::abs(got[static_cast<Eigen::Index>(j)] - want[j]));
        }
    }
    return {worst <= 1e-9 && lowest >= 0.0, "20 corpora, max |diff| = " + fmt(worst) + ", min value = " + fmt(lowest)};
}

Outcome ac3_ols() {
    std::mt19937_64 rng(303);
    double coef_err = 0.0, ortho = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 10 + trial, p = 1 + trial % 6;
        const Eigen::MatrixXd X = gaussian(rng, n, p);
        const Eigen::VectorXd w = gaussian(rng, p, 1).col(0);
        const double b = 3.0 * gaussian(rng, 1, 1)(0, 0);
        const Eigen::VectorXd y = (X * w).array() + b;
        const auto m = regress::fit_ols(X, y, {0.0, trial % 2 == 0, true});
        coef_err = std::max({coef_err, (m.raw_coefficients() - w).cwiseAbs().maxCoeff(), std::abs(m.raw_intercept() - b)});
        const Eigen::VectorXd noisy = y + gaussian(rng, n, 1).col(0);
        const auto mn = regress::fit_ols(X, noisy, {0.0, false, true});
        const Eigen::VectorXd r = noisy - regress::predict(mn, X);
        ortho = std::max({ortho, (X.transpose() * r).cwiseAbs().maxCoeff(), std::abs(r.sum())});
    }
    return {coef_err <= 1e-8 && ortho <= 1e-6,
            "max coefficient error = " + fmt(coef_err) + ", max |X'r| = " + fmt(ortho)};
}

Outcome ac4_elasticnet() {
    std::mt19937_64 rng(404);
    double vs_ols = 0.0, vs_closed = 0.0;
    std::size_t sweeps = 0, violations = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd X = gaussian(rng, 20, 5);
        const Eigen::VectorXd y = X * gaussian(rng, 5, 1).col(0) + 0.3 * gaussian(rng, 20, 1).col(0);
        const auto ols = regress::fit_ols(X, y, {0.0, true, true});
        const auto en = regress::fit_elasticnet(X, y, {0.0, 0.0, 100000, 1e-13, true, true});
        vs_ols = std::max({vs_ols, (ols.raw_coefficients() - en.raw_coefficients()).cwiseAbs().maxCoeff(),
                           std::abs(ols.raw_intercept() - en.raw_intercept())});
    }
    std::uniform_real_distribution<double> lam(0.0, 1.5);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 6 + trial % 7, p = 1 + trial % 5;
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, n, p));
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::VectorXd y = 2.0 * gaussian(rng, n, 1).col(0);
        const double l1 = lam(rng), l2 = lam(rng);
        const auto m = regress::fit_elasticnet(Q, y, {l1, l2, 1000, 1e-12, false, false});
        const Eigen::VectorXd xty = Q.transpose() * y;
        for (Eigen::Index j = 0; j < p; ++j)
            vs_closed = std::max(vs_closed, std::abs(m.weights[j] - regress::soft_threshold(xty[j], l1) / (1 + l2)));
    }
    std::uniform_real_distribution<double> lam3(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 5 + trial % 11, p = 1 + trial % 7;
        const Eigen::MatrixXd X = gaussian(rng, n, p);
        const Eigen::VectorXd y = 4.0 * gaussian(rng, n, 1).col(0);
        const auto m = regress::fit_elasticnet(X, y, {lam3(rng), lam3(rng), 200, 1e-10, trial % 2 == 0, true});
        const auto& t = m.fit_meta.objective_trace;
        for (std::size_t k = 1; k < t.size(); ++k) {
            ++sweeps;
            if (t[k] > t[k - 1] + 1e-12 * std::max(1.0, std::abs(t[k - 1]))) ++violations;
        }
    }
    return {vs_ols <= 1e-6 && vs_closed <= 1e-6 && violations == 0 && sweeps > 0,
            "vs OLS = " + fmt(vs_ols) + ", vs soft-threshold = " + fmt(vs_closed) + ", " + std::to_string(violations) +
                " increases in " + std::to_string(sweeps) + " sweeps"};
}

Outcome ac5_softmax_gradient() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> cls(0, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd X = gaussian(rng, 4, 3);
        std::vector<std::int64_t> y(4);
        for (auto& v : y) v = cls(rng);
        regress::ClassifierModel m{gaussian(rng, 3, 3), gaussian(rng, 3, 1).col(0)};
        const double l2 = trial % 2 ? 0.1 : 0.0;
        const auto g = regress::softmax_gradient(m, X, y, l2);
        constexpr double h = 1e-5;
        Eigen::MatrixXd gw(3, 3);
        Eigen::VectorXd gb(3);
        for (Eigen::Index k = 0; k < 3; ++k) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                auto a = m, b = m;
                a.weights(k, j) += h;
                b.weights(k, j) -= h;
                gw(k, j) = (regress::softmax_loss(a, X, y, l2) - regress::softmax_loss(b, X, y, l2)) / (2 * h);
            }
            auto a = m, b = m;
            a.bias[k] += h;
            b.bias[k] -= h;
            gb[k] = (regress::softmax_loss(a, X, y, l2) - regress::softmax_loss(b, X, y, l2)) / (2 * h);
        }
        worst = std::max(worst, (g.weights - gw).norm() / std::max({g.weights.norm(), gw.norm(), 1e-12}));
        worst = std::max(worst, (g.bias - gb).norm() / std::max({g.bias.norm(), gb.norm(), 1e-12}));
    }
    return {worst <= 1e-4, "50 problems, max relative error = " + fmt(worst)};
}

Outcome ac6_voting() {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> n_comp(1, 7), cls(0, 5), small(1, 4);
    std::uniform_real_distribution<double> cont(0.01, 1.0), scale(1e-3, 1e3);
    std::size_t mismatches = 0, scale_changes = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(n_comp(rng));
        std::vector<std::int64_t> votes(n);
        for (auto& v : votes) v = cls(rng);
        std::vector<double> iw(n), cw(n);
        for (auto& w : iw) w = small(rng);
        for (auto& w : cw) w = cont(rng);
        const auto ei = testing::brute_force_vote(votes, iw);
        const auto ec = testing::brute_force_vote(votes, cw);
        mismatches += ensemble::weighted_vote(votes, iw) != ei;
        mismatches += ensemble::weighted_vote(votes, cw) != ec;
        auto si = iw;
        for (auto& w : si) w *= 1024.0;
        auto sc = cw;
        const double c = scale(rng);
        for (auto& w : sc) w *= c;
        scale_changes += ensemble::weighted_vote(votes, si) != ei;
        scale_changes += ensemble::weighted_vote(votes, sc) != ec;
    }
    return {mismatches == 0 && scale_changes == 0,
            "1000 instances, " + std::to_string(mismatches) + " oracle mismatches, " + std::to_string(scale_changes) +
                " changes under rescaling"};
}

Outcome ac7_weights() {
    std::vector<corpus::Document> docs;
    for (int i = 0; i < 100; ++i) docs.push_back({"g" + std::to_string(i), "t", i % 2, {}, {}});
    const corpus::Corpus gold(corpus::LabelScheme::binary, docs);
    std::vector<PredictionSet> sets;
    for (int correct : {70, 69, 78}) {
        std::vector<std::int64_t> p;
        for (int i = 0; i < 100; ++i) p.push_back(i < correct ? i % 2 : 1 - i % 2);
        sets.push_back(PredictionSet::classes("c" + std::to_string(correct), gold.ids(), p));
    }
    const auto aw = ensemble::accuracy_weights(sets, gold);
    const std::vector<double> expect_aw{0.70, 0.69, 0.78};
    bool ok = aw.size() == 3;
    for (std::size_t i = 0; ok && i < 3; ++i) ok = std::abs(aw[i] - expect_aw[i]) <= 1e-12;

    const std::vector<double> maes{44.15, 41.93, 37.52, 38.36, 35.67, 33.28};
    const auto w = ensemble::inverse_mae_weights(maes);
    double recip = 0.0;
    for (double m : maes) recip += 1.0 / m;
    double worst = 0.0;
    for (std::size_t i = 0; i < maes.size(); ++i) worst = std::max(worst, std::abs(w[i] - (1.0 / maes[i]) / recip));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    bool order = true;
    for (std::size_t i = 0; i < maes.size(); ++i)
        for (std::size_t j = 0; j < maes.size(); ++j)
            if (maes[i] < maes[j] && !(w[i] > w[j])) order = false;
    std::string ws;
    for (double x : w) ws += (ws.empty() ? "" : " ") + fmt(x);
    return {ok && worst <= 1e-6 && std::abs(sum - 1.0) <= 1e-9 && order,
            "accuracy weights unchanged = " + std::string(ok ? "yes" : "no") + ", inverse-MAE [" + ws +
                "], sum - 1 = " + fmt(sum - 1.0)};
}

Outcome ac8_postprocess() {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<std::size_t> len(0, 400), gap(0, 30);
    std::uniform_real_distribution<double> raw(-1000.0, 1500.0);
    std::size_t out_of_range = 0, not_member = 0, checked = 0;
    for (int d = 0; d < 100; ++d) {
        std::string text;
        const auto n = len(rng);
        const auto g = gap(rng);
        for (std::size_t i = 0; i < n; ++i) {
            if (i) text += g && i % g == 0 ? "\n" : " ";
            text += "w";
        }
        const auto wc = static_cast<std::int64_t>(corpus::word_count(text));
        const auto starts = corpus::paragraph_starts(text);
        for (int k = 0; k < 100; ++k, ++checked) {
            const double r = raw(rng);
            const auto s = boundary::snap_to_paragraph(r, starts);
            not_member += std::find(starts.begin(), starts.end(), static_cast<std::size_t>(s)) == starts.end();
            for (bool snap : {true, false}) {
                const auto f = boundary::postprocess(r, text, {snap, true});
                out_of_range += f < 0 || f > wc;
            }
        }
    }
    return {checked == 10000 && out_of_range == 0 && not_member == 0,
            std::to_string(checked) + " raw values, " + std::to_string(out_of_range) + " out of range, " +
                std::to_string(not_member) + " non-member snaps"};
}

Outcome ac9_convexity() {
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<int> n_comp(1, 6), n_docs(1, 50);
    std::uniform_real_distribution<double> val(-50.0, 300.0), wd(0.01, 1.0);
    double worst_gap = -1e300;
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto k = static_cast<std::size_t>(n_comp(rng));
        const auto n = static_cast<std::size_t>(n_docs(rng));
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
        std::vector<double> gold(n);
        for (auto& g : gold) g = std::round(val(rng));
        std::vector<PredictionSet> sets;
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> v(n);
            for (auto& x : v) x = val(rng);
            sets.push_back(PredictionSet::scalars("c" + std::to_string(c), ids, v));
        }
        std::vector<double> w(k);
        for (auto& x : w) x = wd(rng);
        const double t = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= t;
        const auto avg = ensemble::average(sets, w);
        double bound = 0.0;
        for (std::size_t c = 0; c < k; ++c) bound += w[c] * eval::mean_absolute_error(sets[c].scalars(), gold);
        const double lhs = eval::mean_absolute_error(avg.scalars(), gold);
        worst_gap = std::max(worst_gap, lhs - bound);
        ok = ok && lhs <= bound + 1e-12 * std::max(1.0, bound);
    }
    return {ok, "100 trials, max (ensemble MAE - weighted MAE) = " + fmt(worst_gap)};
}

Outcome ac10_benchmark() {
    std::mt19937_64 rng(1010);
    const corpus::Corpus train(corpus::LabelScheme::boundary, testing::boundary_documents(rng, 200, "tr"));
    const corpus::Corpus dev(corpus::LabelScheme::boundary, testing::boundary_documents(rng, 200, "dv"));
    const corpus::Corpus test(corpus::LabelScheme::boundary, testing::boundary_documents(rng, 200, "te"));

    const auto tfidf = std::make_shared<const features::Featurizer>(features::fit_tfidf(train, features::TfidfConfig{}));
    const auto ppmi = std::make_shared<const features::Featurizer>(features::fit_ppmi(train));
    const auto y = [](const corpus::Corpus& c) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
        for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = static_cast<double>(*c[i].label);
        return v;
    };
    const Eigen::VectorXd y_train = y(train);

    std::vector<boundary::Component> comps;
    for (const auto& [fname, f] : {std::pair{std::string("tfidf"), tfidf}, std::pair{std::string("ppmi"), ppmi}}) {
        const auto X = features::featurize(train, *f).values;
        comps.push_back({fname + "+ols", f, regress::fit_ols(X, y_train, {1e-6, true, true})});
        comps.push_back({fname + "+elasticnet", f, regress::fit_elasticnet(X, y_train, {})});
    }

    const boundary::PostProcess pp{true, true};
    std::vector<double> dev_mae;
    std::vector<std::string> names;
    for (const auto& c : comps) {
        const auto raw = PredictionSet::scalars(c.name, dev.ids(), boundary::predict_raw(c, dev));
        dev_mae.push_back(boundary::evaluate_boundary(boundary::postprocess(raw, dev, pp), dev));
        names.push_back(c.name);
    }
    const auto weights = ensemble::inverse_mae_weights(dev_mae);
    const boundary::BoundaryPipeline pipeline{comps, {names, weights, ensemble::CombineRule::weighted_average}, pp};
    const auto out = boundary::run_pipeline_detailed(pipeline, test);

    const double ens = boundary::evaluate_boundary(out.final, test);
    double weighted = 0.0;
    std::string parts;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const double m = boundary::evaluate_boundary(out.components[i], test);
        weighted += weights[i] * m;
        parts += (parts.empty() ? "" : ", ") + names[i] + " " + fmt(m);
    }
    std::vector<double> midpoint;
    for (const auto& d : test) midpoint.push_back(static_cast<double>(boundary::round_index(corpus::word_count(d.text) / 2.0)));
    const double base = boundary::evaluate_boundary(PredictionSet::scalars("midpoint", test.ids(), midpoint), test);
    return {ens < base && ens <= weighted,
            "ensemble " + fmt(ens) + " vs midpoint " + fmt(base) + " vs weighted components " + fmt(weighted) + " [" +
                parts + "]"};
}

Outcome ac11_determinism() {
    testing::TempDir dir;
    std::mt19937_64 rng(1111);
    testing::write_file(dir / "train.jsonl", testing::to_jsonl(testing::boundary_documents(rng, 80, "tr")));
    testing::write_file(dir / "dev.jsonl", testing::to_jsonl(testing::boundary_documents(rng, 40, "dv")));
    testing::write_file(dir / "test.jsonl", testing::to_jsonl(testing::boundary_documents(rng, 40, "te")));
    const nlohmann::json cfg{
        {"task", "boundary"},
        {"data", {{"train", "train.jsonl"}, {"dev", "dev.jsonl"}, {"test", "test.jsonl"}}},
        {"seed", 42},
        {"components",
         {{{"name", "tfidf+ols"}, {"featurizer", {{"type", "tfidf"}}}, {"model", {{"type", "ols"}}}},
          {{"name", "tfidf+elasticnet"}, {"featurizer", {{"type", "tfidf"}}}, {"model", {{"type", "elasticnet"}}}},
          {{"name", "ppmi+ols"}, {"featurizer", {{"type", "ppmi"}}}, {"model", {{"type", "ols"}}}},
          {{"name", "ppmi+elasticnet"}, {"featurizer", {{"type", "ppmi"}}}, {"model", {{"type", "elasticnet"}}}}}}};
    testing::write_file(dir / "config.json", cfg.dump(2));

    for (const std::string run : {"a", "b"}) {
        const std::string out = (dir / run).string();
        for (std::vector<std::string> args : std::vector<std::vector<std::string>>{
                 {"fit"}, {"predict", "--split", "dev"}, {"predict", "--split", "test"},
                 {"ensemble", "--target", "test"}, {"evaluate", "--split", "test"}}) {
            std::vector<std::string> full{"mgt", "--config", (dir / "config.json").string(), "--seed", "42",
                                          "--out-dir", out};
            full.insert(full.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : full) argv.push_back(a.c_str());
            std::ostringstream o, e;
            if (cli::run(static_cast<int>(argv.size()), argv.data(), o, e) != 0) return {false, "run failed: " + e.str()};
        }
    }
    std::size_t files = 0, differ = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir / "a");
        const auto top = rel.begin()->string();
        if (top != "predictions" && top != "reports" && top != "models" && top != "ensemble") continue;
        ++files;
        const auto other = dir / "b" / rel;
        differ += !fs::exists(other) || testing::read_file(entry.path()) != testing::read_file(other);
    }
    return {files > 0 && differ == 0, std::to_string(files) + " artifacts compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        double budget_s;  // <= 0: no runtime bound
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {"AC1", "TF-IDF matches brute-force oracle", 5, ac1_tfidf},
        {"AC2", "PPMI matches brute-force oracle, non-negative", 5, ac2_ppmi},
        {"AC3", "OLS exact recovery and residual orthogonality", 0, ac3_ols},
        {"AC4", "ElasticNet vs OLS, soft-threshold, monotone objective", 0, ac4_elasticnet},
        {"AC5", "Softmax gradient vs central differences", 0, ac5_softmax_gradient},
        {"AC6", "Weighted vote vs brute force, scale invariance", 0, ac6_voting},
        {"AC7", "Accuracy and inverse-MAE weight arithmetic", 0, ac7_weights},
        {"AC8", "Post-processed indices in range, snaps are paragraph starts", 5, ac8_postprocess},
        {"AC9", "Weighted-average ensemble convexity", 0, ac9_convexity},
        {"AC10", "Synthetic boundary benchmark", 60, ac10_benchmark},
        {"AC11", "CLI determinism", 0, ac11_determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0 && secs >= c.budget_s) {
            o.pass = false;
            o.detail += "; exceeded " + fmt(c.budget_s) + " s";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << ' ' << c.title << " (" << o.detail << "; " << fmt(secs)
                  << " s)" << std::endl;
    }
    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : std::string("acceptance: all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
