#include "genaug/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "genaug/rng.hpp"

namespace genaug {

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
    if (cm.total() < 1) throw EmptyEvaluationError("empty confusion matrix");
    if (cm.tp < 0 || cm.fp < 0 || cm.tn < 0 || cm.fn < 0)
        throw UsageError("negative confusion counts");

    ClassificationMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0) {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    } else {
        m.precision_degenerate = true;
    }
    if (cm.tp + cm.fn > 0) {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    } else {
        m.recall_degenerate = true;
    }
    // 2PR/(P+R) computed as the equivalent single division 2TP/(2TP+FP+FN)
    if (!m.precision_degenerate && !m.recall_degenerate && cm.tp > 0) {
        m.f1 = static_cast<double>(2 * cm.tp) / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
    } else {
        m.f1_degenerate = true;
    }
    return m;
}

ConfusionMatrix confusion_at(const std::vector<std::pair<double, Label>>& posteriors, double tau) {
    ConfusionMatrix cm;
    for (const auto& [p, label] : posteriors) {
        const bool predicted_hate = p > tau;
        const bool is_hate = label == Label::hate;
        if (predicted_hate && is_hate) ++cm.tp;
        else if (predicted_hate) ++cm.fp;
        else if (is_hate) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

PRCurve pr_curve(const std::vector<std::pair<double, Label>>& posteriors) {
    if (posteriors.empty()) throw EmptyEvaluationError("pr_curve on empty evaluation");
    PRCurve c;
    for (int i = 0; i < 10; ++i) {
        const double tau = static_cast<double>(50 + 5 * i) / 100.0;
        const auto m = classification_metrics(confusion_at(posteriors, tau));
        c.points[static_cast<std::size_t>(i)] = {tau, m.precision, m.recall};
    }
    return c;
}

void save_pr_curve(const PRCurve& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    os << "tau,precision,recall\n";
    char buf[96];
    for (const auto& p : c.points) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.6f,%.6f\n", p.tau, p.precision, p.recall);
        os << buf;
    }
}

namespace {

template <typename T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (a[i - 1] == b[j - 1]) cur[j] = prev[j - 1] + 1;
            else cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

template <typename T>
double rouge_impl(const std::vector<T>& candidate, const std::vector<T>& reference) {
    if (candidate.empty() || reference.empty())
        throw EmptySequenceError("rouge_l requires non-empty sequences");
    const auto lcs = static_cast<double>(lcs_length(candidate, reference));
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(candidate.size());
    const double r = lcs / static_cast<double>(reference.size());
    return 2.0 * p * r / (p + r);
}

}  // namespace

double rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
    return rouge_impl(candidate, reference);
}

double rouge_l_ids(const std::vector<std::int32_t>& candidate, const std::vector<std::int32_t>& reference) {
    return rouge_impl(candidate, reference);
}

RougeReport corpus_rouge(const std::vector<std::vector<std::string>>& generated,
                         const Dataset& source, std::size_t sample_cap, std::uint64_t seed,
                         int jobs) {
    if (generated.empty()) throw EmptyCorpusError("corpus_rouge: empty generated corpus");

    std::vector<std::vector<std::string>> references;
    references.reserve(source.size());
    for (const auto& e : source.examples) {
        auto toks = tokenize(e.text);
        if (!toks.empty()) references.push_back(std::move(toks));
    }
    if (references.empty()) throw EmptyCorpusError("corpus_rouge: empty source corpus");

    std::vector<std::size_t> picked;
    if (sample_cap > 0 && sample_cap < generated.size()) {
        Rng rng(seed);
        picked = rng.sample_indices(generated.size(), sample_cap);
        std::sort(picked.begin(), picked.end());
    } else {
        picked.resize(generated.size());
        for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
    }

    RougeReport report;
    report.sample_cap = sample_cap;
    report.sampled = picked.size();
    report.pairs.resize(picked.size());

    const auto score_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const auto& cand = generated[picked[k]];
            RougePair best{picked[k], 0, 0.0};
            if (!cand.empty()) {
                for (std::size_t r = 0; r < references.size(); ++r) {
                    const double s = rouge_l(cand, references[r]);
                    if (s > best.score) {
                        best.score = s;
                        best.best_reference = r;
                    }
                }
            }
            report.pairs[k] = best;
        }
    };

    const std::size_t n = picked.size();
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n));
    if (workers == 1) {
        score_range(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(score_range, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    double sum = 0.0;
    for (const auto& p : report.pairs) sum += p.score;
    report.mean = sum / static_cast<double>(report.pairs.size());
    return report;
}

void save_rouge_report(const RougeReport& r, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    os << "candidate_index,best_reference,score\n";
    char buf[96];
    for (const auto& p : r.pairs) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f\n", p.candidate_index, p.best_reference, p.score);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "mean,,%.6f\n", r.mean);
    os << buf;
}

KappaReport fleiss_kappa(const std::vector<std::vector<std::int64_t>>& ratings, int raters_per_item) {
    if (ratings.empty()) throw EmptyEvaluationError("fleiss_kappa on empty ratings");
    if (raters_per_item < 2) throw InsufficientAnnotatorsError(static_cast<std::size_t>(raters_per_item));
    const std::size_t categories = ratings.front().size();
    const auto n = static_cast<double>(raters_per_item);
    const auto N = static_cast<double>(ratings.size());

    KappaReport rep;
    rep.item_agreement.reserve(ratings.size());
    std::vector<double> col_sums(categories, 0.0);

    for (std::size_t i = 0; i < ratings.size(); ++i) {
        const auto& row = ratings[i];
        if (row.size() != categories)
            throw RowSumMismatchError(i, static_cast<std::int64_t>(row.size()),
                                      static_cast<std::int64_t>(categories));
        std::int64_t row_sum = 0;
        double sq = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            row_sum += row[j];
            sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
            col_sums[j] += static_cast<double>(row[j]);
        }
        if (row_sum != raters_per_item)
            throw RowSumMismatchError(i, row_sum, raters_per_item);
        rep.item_agreement.push_back((sq - n) / (n * (n - 1.0)));
    }

    double p_bar = 0.0;
    for (double pi : rep.item_agreement) p_bar += pi;
    p_bar /= N;

    double p_e = 0.0;
    rep.category_proportions.reserve(categories);
    for (double cs : col_sums) {
        const double pj = cs / (N * n);
        rep.category_proportions.push_back(pj);
        p_e += pj * pj;
    }

    rep.mean_agreement = p_bar;
    rep.expected_agreement = p_e;
    if (p_e >= 1.0) {
        rep.degenerate = true;
        rep.kappa = 0.0;
    } else {
        rep.kappa = (p_bar - p_e) / (1.0 - p_e);
    }
    return rep;
}

std::string kappa_report_json(const KappaReport& r) {
    nlohmann::ordered_json j;
    j["kappa"] = r.kappa;
    j["mean_agreement"] = r.mean_agreement;
    j["expected_agreement"] = r.expected_agreement;
    j["category_proportions"] = r.category_proportions;
    j["degenerate"] = r.degenerate;
    return j.dump(2);
}

RelativeChange relative_change(double baseline, double augmented) {
    if (baseline == 0.0) return {0.0, false};
    return {100.0 * (augmented - baseline) / baseline, true};
}

std::string format_relative(const RelativeChange& rc) {
    if (!rc.defined) return "n/a";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%+.2f", rc.percent);
    return buf;
}

}  // namespace genaug
