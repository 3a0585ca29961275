// Acceptance suite: one criterion per command-line argument (1..10), all of
// them when run bare. Prints one [PASS]/[FAIL] line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "genaug/annotate.hpp"
#include "genaug/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace genaug;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    const char* description;
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------- C1
bool c1_metric_formulas(std::string& detail) {
    const auto fixture = classification_metrics({2, 1, 3, 4});
    if (fixture.accuracy != 0.5 || fixture.precision != 2.0 / 3.0 ||
        fixture.recall != 1.0 / 3.0 || fixture.f1 != 4.0 / 9.0) {
        detail = "fixture TP=2,FP=1,TN=3,FN=4 mismatch";
        return false;
    }
    Rng rng(20240817);
    for (int t = 0; t < 20; ++t) {
        const ConfusionMatrix cm{static_cast<std::int64_t>(1 + rng.bounded(50)),
                                 static_cast<std::int64_t>(rng.bounded(50)),
                                 static_cast<std::int64_t>(rng.bounded(50)),
                                 static_cast<std::int64_t>(rng.bounded(50))};
        const auto m = classification_metrics(cm);
        // rational expectations, one division each
        const double acc = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
        const double prec = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
        const double rec = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
        const double f1 = static_cast<double>(2 * cm.tp) / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
        if (m.accuracy != acc || m.precision != prec || m.recall != rec || m.f1 != f1) {
            detail = "random matrix " + std::to_string(t) + " not exactly rational";
            return false;
        }
    }
    detail = "fixture + 20 random matrices exact";
    return true;
}

// ---------------------------------------------------------------- C2
bool is_subsequence(const std::vector<int>& needle, const std::vector<int>& hay) {
    std::size_t i = 0;
    for (int h : hay)
        if (i < needle.size() && needle[i] == h) ++i;
    return i == needle.size();
}

std::size_t lcs_brute(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t best = 0;
    for (std::uint32_t bits = 0; bits < (1u << a.size()); ++bits) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (bits & (1u << i)) sub.push_back(a[i]);
        if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
    }
    return best;
}

bool c2_rouge_oracle(std::string& detail) {
    std::vector<std::vector<int>> seqs;
    for (int len = 1; len <= 8; ++len) {
        std::vector<int> cur(static_cast<std::size_t>(len), 0);
        for (;;) {
            seqs.push_back(cur);
            int i = len - 1;
            while (i >= 0 && cur[static_cast<std::size_t>(i)] == 2) {
                cur[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
            ++cur[static_cast<std::size_t>(i)];
        }
    }
    const auto to_tokens = [](const std::vector<int>& ids) {
        std::vector<std::string> out;
        for (int i : ids) out.push_back(std::string(1, static_cast<char>('a' + i)));
        return out;
    };

    Rng rng(7);
    std::size_t checked = 0;
    for (const auto& a : seqs) {
        const auto& b = seqs[rng.bounded(seqs.size())];
        const auto lcs = static_cast<double>(lcs_brute(a, b));
        double expected = 0.0;
        if (lcs > 0.0) {
            const double p = lcs / static_cast<double>(a.size());
            const double r = lcs / static_cast<double>(b.size());
            expected = 2.0 * p * r / (p + r);
        }
        if (rouge_l(to_tokens(a), to_tokens(b)) != expected) {
            detail = "mismatch on pair " + std::to_string(checked);
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " pairs exact vs exhaustive enumeration";
    return true;
}

// ---------------------------------------------------------------- C3
bool c3_normalization(std::string& detail) {
    Dataset d{"enum", {}};
    d.add("a b", Label::hate);
    d.add("b c d", Label::hate);
    d.add("a", Label::hate);
    d.add("d c", Label::hate);
    const auto vocab = Vocabulary::build({d}, 1);
    if (vocab.size() != Vocabulary::kNumSpecials + 4) {
        detail = "expected a 4-token vocabulary";
        return false;
    }
    const auto lm = GenerativeLM::train(d, vocab, 2, 0.1);

    std::vector<std::int32_t> tokens;
    for (std::int32_t id = Vocabulary::kNumSpecials; id < vocab.size(); ++id) tokens.push_back(id);

    // mass of the length-capped sampler output space: EOS-terminated
    // sequences via sequence_log_prob, full-length prefixes via the
    // independent per-step next_distribution route
    const int max_len = 5;
    double total = std::exp(lm.sequence_log_prob_ids({}));
    std::vector<std::vector<std::int32_t>> frontier{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::int32_t>> next;
        for (const auto& prefix : frontier) {
            for (auto id : tokens) {
                auto seq = prefix;
                seq.push_back(id);
                if (len < max_len) {
                    total += std::exp(lm.sequence_log_prob_ids(seq));
                    next.push_back(std::move(seq));
                } else {
                    double lp = 0.0;
                    std::vector<std::int32_t> ctx;
                    for (auto tok : seq) {
                        lp += std::log(lm.next_distribution(ctx)[static_cast<std::size_t>(tok)]);
                        ctx.push_back(tok);
                    }
                    total += std::exp(lp);
                }
            }
        }
        frontier = std::move(next);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "total mass %.12f", total);
    detail = buf;
    return std::abs(total - 1.0) < 1e-9;
}

// ---------------------------------------------------------------- C4
bool c4_sampler(std::string& detail) {
    const auto shaped = shape_distribution({0.5, 0.3, 0.2}, 1.0, 0.7);
    Rng rng(20240818);
    const int n = 100000;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) ++counts[sample_index(shaped, rng)];
    if (counts[2] != 0) {
        detail = "nucleus leak: token c drawn " + std::to_string(counts[2]) + " times";
        return false;
    }
    const double expect[2] = {0.625, 0.375};
    for (int k = 0; k < 2; ++k) {
        const double sigma = std::sqrt(n * expect[k] * (1.0 - expect[k]));
        if (std::abs(counts[k] - n * expect[k]) > 3.0 * sigma) {
            detail = "frequency of token " + std::to_string(k) + " outside 3 sigma";
            return false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "a=%d b=%d c=0 within 3 sigma of {62500, 37500}", counts[0],
                  counts[1]);
    detail = buf;
    return true;
}

// ---------------------------------------------------------------- C5
bool c5_detector_gradients(std::string& detail) {
    Dataset dv{"tv", {}};
    std::string text;
    for (int i = 0; i < 8; ++i) text += "t" + std::to_string(i) + " ";
    dv.add(text, Label::hate);
    const auto vocab = Vocabulary::build({dv}, 1);

    DetectorConfig cfg;
    cfg.embed_dim = 4;
    cfg.conv_filters = 3;
    cfg.kernel_width = 2;
    cfg.pool_width = 2;
    cfg.hidden = 3;
    cfg.max_len = 6;
    cfg.dropout = 0.0;
    cfg.vocab_size = vocab.size();
    DetectorModel model(cfg, vocab, 4242);

    const std::vector<std::vector<std::int32_t>> batch = {
        {4, 5, 6, 7, 8, 9}, {5, 5, 4, 0, 0, 0}, {10, 11, 4, 6, 0, 0}, {7, 8, 9, 10, 11, 4}};
    const std::vector<double> targets = {1.0, 0.0, 1.0, 0.0};

    DetectorParams grads = DetectorParams::zeros(cfg);
    ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double p = model.forward(batch[i], false, 0, &cache);
        model.backward(cache, p - targets[i], grads);
    }
    const auto total_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i)
            loss += bce_loss(model.forward(batch[i], false, 0), targets[i]);
        return loss;
    };

    const double h = 1e-5;
    double worst = 0.0;
    std::size_t n_params = 0;
    const auto tensors = model.params().tensors();
    const auto grad_tensors = grads.tensors();
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        auto& param = *tensors[t];
        for (Eigen::Index c = 0; c < param.cols(); ++c) {
            for (Eigen::Index r = 0; r < param.rows(); ++r) {
                const double saved = param(r, c);
                param(r, c) = saved + h;
                const double up = total_loss();
                param(r, c) = saved - h;
                const double down = total_loss();
                param(r, c) = saved;
                const double numeric = (up - down) / (2 * h);
                const double analytic = (*grad_tensors[t])(r, c);
                const double rel = std::abs(numeric - analytic) /
                                   std::max({std::abs(numeric), std::abs(analytic), 1e-6});
                worst = std::max(worst, rel);
                ++n_params;
                if (rel >= 1e-4) {
                    detail = DetectorParams::names()[t] + "(" + std::to_string(r) + "," +
                             std::to_string(c) + ") rel err " + std::to_string(rel);
                    return false;
                }
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu parameters, worst relative error %.2e", n_params, worst);
    detail = buf;
    return true;
}

// ---------------------------------------------------------------- C6
bool c6_selection_contract(std::string& detail) {
    // vocabulary of 64 score tokens; weights chosen so that the score of the
    // single-token sequence "s<i>" is an arbitrary value in (0,1)
    Dataset dv{"sel", {}};
    std::string text;
    for (int i = 0; i < 64; ++i) text += "s" + std::to_string(i) + " ";
    dv.add(text, Label::hate);
    const auto vocab = Vocabulary::build({dv}, 1);

    Rng rng(315);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.bounded(64);
        std::vector<double> scores(n);
        std::vector<double> weights(static_cast<std::size_t>(vocab.size()), 0.0);
        GeneratedCorpus corpus;
        corpus.class_label = Label::hate;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.next_double() * 0.999 + 0.0005;
            const auto token = "s" + std::to_string(i);
            weights[static_cast<std::size_t>(vocab.id(token))] =
                std::log(scores[i] / (1.0 - scores[i]));
            corpus.sequences.push_back({token});
            corpus.seeds.push_back(i);
        }
        const FilterClassifier f(vocab, weights, 0.0);
        SelectionConfig cfg{0.7, static_cast<std::int64_t>(1 + rng.bounded(32))};

        const auto [kept, report] = filter_and_select(corpus, f, Label::hate, cfg);
        if (kept.size() > static_cast<std::size_t>(cfg.top_k)) {
            detail = "top_k exceeded";
            return false;
        }
        double prev = 1.0;
        for (const auto& seq : kept.sequences) {
            const double conf = f.score(seq);
            if (conf < cfg.tau) {
                detail = "retained confidence below threshold";
                return false;
            }
            if (conf > prev) {
                detail = "retained list not sorted";
                return false;
            }
            prev = conf;
        }
        const auto [again, report2] = filter_and_select(kept, f, Label::hate, cfg);
        if (again.sequences != kept.sequences || again.seeds != kept.seeds) {
            detail = "not idempotent";
            return false;
        }
    }
    detail = "1000 random score vectors: threshold, order, top_k, idempotence";
    return true;
}

// ---------------------------------------------------------------- C7
bool c7_fleiss(std::string& detail) {
    const auto perfect = fleiss_kappa({{3, 0}, {0, 3}, {3, 0}, {0, 3}}, 3);
    if (perfect.kappa != 1.0) {
        detail = "perfect agreement kappa != 1";
        return false;
    }
    const auto hand = fleiss_kappa({{1, 1}, {1, 1}}, 2);
    if (hand.kappa != -1.0) {
        detail = "2x2 hand example kappa != -1";
        return false;
    }
    Rng rng(9090);
    double sum = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::vector<std::int64_t>> rows(200, std::vector<std::int64_t>(2, 0));
        for (auto& row : rows)
            for (int r = 0; r < 3; ++r) ++row[rng.bounded(2)];
        sum += fleiss_kappa(rows, 3).kappa;
    }
    const double mean = sum / trials;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "monte-carlo mean kappa %.4f", mean);
    detail = buf;
    return std::abs(mean) < 0.05;
}

// ---------------------------------------------------------------- C8 / C9
struct CellOutcome {
    double base_recall = 0.0, aug_recall = 0.0;
    double base_f1 = 0.0, aug_f1 = 0.0;
    std::string report_bytes;
};

CellOutcome run_cross_cell(std::uint64_t master_seed, int jobs, const fs::path& workdir) {
    testsupport::SyntheticSpec spec;
    auto [a, b] = testsupport::make_synthetic_pair(master_seed, spec);

    std::map<std::string, SplitDataset> splits;
    splits.emplace("A", split_dataset(a, 0.8, mix64(master_seed, 1)));
    splits.emplace("B", split_dataset(b, 0.8, mix64(master_seed, 2)));

    GenerationPlan gplan;
    gplan.dataset = "A";
    gplan.count = 20000;
    gplan.selection.tau = 0.7;
    gplan.selection.top_k = 2000;
    gplan.lm.order = 3;
    gplan.lm.alpha = 0.1;
    gplan.filter_target_stage.epochs = 80;
    gplan.master_seed = mix64(master_seed, 0x51);
    const auto gen = run_generation(gplan, splits, jobs);

    ExperimentPlan eplan;
    eplan.mode = ExperimentMode::cross;
    eplan.datasets = {"A"};
    eplan.include_combined = false;
    eplan.cross_pairs = {{"A", "B"}};
    eplan.detector.embed_dim = 32;
    eplan.detector.dropout = 0.3;
    eplan.detector.conv_filters = 32;
    eplan.detector.kernel_width = 4;
    eplan.detector.pool_width = 4;
    eplan.detector.hidden = 32;
    eplan.detector.max_len = 20;
    eplan.train.batch_size = 32;
    eplan.train.learning_rate = 1e-3;
    eplan.train.max_epochs = 10;
    eplan.train.patience = 3;
    eplan.tau = 0.7;
    eplan.augment_cap = 2000;
    eplan.master_seed = master_seed;

    CorporaByDataset corpora;
    corpora.emplace("A", std::make_pair(gen.hate, gen.non_hate));
    const auto report = run_experiment(eplan, splits, corpora, jobs);

    fs::create_directories(workdir);
    CellOutcome out;
    for (const auto format : {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown}) {
        const char* ext = format == ReportFormat::csv ? "csv"
                          : format == ReportFormat::json ? "json"
                                                         : "md";
        const auto path = (workdir / (std::string("report.") + ext)).string();
        emit_report(report, format, path);
        std::ifstream is(path, std::ios::binary);
        std::ostringstream buf;
        buf << is.rdbuf();
        out.report_bytes += buf.str();
    }
    const auto& cell = report.cells.front();
    out.base_recall = cell.baseline.metrics.recall;
    out.aug_recall = cell.augmented.metrics.recall;
    out.base_f1 = cell.baseline.metrics.f1;
    out.aug_f1 = cell.augmented.metrics.f1;
    return out;
}

const std::vector<std::uint64_t> kMasterSeeds{101, 102, 103, 104, 105};

bool c8_directional(std::string& detail) {
    const auto dir = fs::temp_directory_path() / "genaug_acceptance_c8";
    int wins = 0;
    double worst_f1_drop = 0.0;
    std::string per_seed;
    for (const auto seed : kMasterSeeds) {
        const auto out = run_cross_cell(seed, 1, dir / std::to_string(seed));
        wins += out.aug_recall > out.base_recall ? 1 : 0;
        worst_f1_drop = std::max(worst_f1_drop, out.base_f1 - out.aug_f1);
        char buf[160];
        std::snprintf(buf, sizeof(buf), " seed %llu: recall %.3f->%.3f f1 %.3f->%.3f;",
                      static_cast<unsigned long long>(seed), out.base_recall, out.aug_recall,
                      out.base_f1, out.aug_f1);
        per_seed += buf;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "recall wins %d/5, worst f1 drop %.3f;", wins, worst_f1_drop);
    detail = buf + per_seed;
    return wins >= 4 && worst_f1_drop <= 0.05;
}

bool c9_determinism(std::string& detail) {
    const auto dir = fs::temp_directory_path() / "genaug_acceptance_c9";
    const auto seed = kMasterSeeds.front();
    const auto first = run_cross_cell(seed, 1, dir / "first");
    const auto second = run_cross_cell(seed, 1, dir / "second");
    if (first.report_bytes != second.report_bytes) {
        detail = "reports differ across reruns with the same master seed";
        return false;
    }
    const auto parallel = run_cross_cell(seed, 4, dir / "parallel");
    if (first.report_bytes != parallel.report_bytes) {
        detail = "jobs=4 report differs from jobs=1";
        return false;
    }
    detail = "rerun and jobs=4 reports byte-identical (" +
             std::to_string(first.report_bytes.size()) + " bytes)";
    return true;
}

// ---------------------------------------------------------------- C10
bool c10_report_fixtures(std::string& detail) {
    RunReport report;
    report.tau = 0.7;
    ReportCell cell;
    cell.train_dataset = "FN";
    cell.test_dataset = "SE";
    cell.baseline.metrics = {0.613, 0.689, 0.155, 0.253, false, false, false};
    cell.augmented.metrics = {0.645, 0.570, 0.644, 0.605, false, false, false};
    report.cells.push_back(cell);

    const auto md = report_markdown(report);
    if (md.find("| FN-SE") == std::string::npos || md.find("+315.48") == std::string::npos) {
        detail = "cross-table fixture row not rendered";
        return false;
    }

    const auto dir = fs::temp_directory_path() / "genaug_acceptance_c10";
    fs::create_directories(dir);
    const auto csv_path = (dir / "cross.csv").string();
    emit_report(report, ReportFormat::csv, csv_path);
    const auto back = load_report_csv(csv_path);
    if (back.cells.size() != 1 || back.cells[0].baseline.metrics.recall != 0.155) {
        detail = "csv round trip mismatch";
        return false;
    }

    const auto rouge_md = rouge_table_markdown({{"WS", 0.12, 0.05},
                                                {"DV", 0.07, 0.05},
                                                {"FN", 0.11, 0.14},
                                                {"WH", 0.09, 0.16},
                                                {"SE", 0.05, 0.03}});
    if (rouge_md.find("| WS | 0.12 | 0.05 |") == std::string::npos) {
        detail = "rouge fixture row not rendered";
        return false;
    }
    const auto rouge_csv = rouge_table_csv({{"WS", 0.12, 0.05}});
    if (rouge_csv.find("WS,0.12,0.05") == std::string::npos) {
        detail = "rouge csv fixture row not rendered";
        return false;
    }
    detail = "cross-table and rouge fixtures rendered verbatim";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "metric formulas exact (rational check)", c1_metric_formulas},
        {2, "rouge-l equals exhaustive LCS enumeration", c2_rouge_oracle},
        {3, "n-gram output distribution sums to 1", c3_normalization},
        {4, "shaped sampler frequencies within 3 sigma", c4_sampler},
        {5, "detector gradients match finite differences", c5_detector_gradients},
        {6, "filter selection contract (1000 random vectors)", c6_selection_contract},
        {7, "fleiss kappa fixtures and monte-carlo", c7_fleiss},
        {8, "cross-dataset recall gain from augmentation", c8_directional},
        {9, "byte-identical reports: rerun and jobs=4 vs jobs=1", c9_determinism},
        {10, "report-format fixture rows rendered verbatim", c10_report_fixtures},
    };

    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const auto& criterion : criteria) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), criterion.number) == wanted.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        std::printf("[%s] C%d %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", criterion.number,
                    criterion.description, elapsed.count() / 1000.0,
                    detail.empty() ? "" : ("- " + detail).c_str());
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
