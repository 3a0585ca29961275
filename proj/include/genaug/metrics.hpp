#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "genaug/corpus.hpp"

namespace genaug {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Zero-denominator metrics are reported as 0 with the matching flag set, so
// tables stay total (no NaN).
struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

// Positive class is hate; predicted hate iff posterior > tau (strict).
ConfusionMatrix confusion_at(const std::vector<std::pair<double, Label>>& posteriors, double tau);

struct PRPoint {
    double tau = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PRCurve {
    std::array<PRPoint, 10> points;  // tau = 0.50 .. 0.95 step 0.05
};

PRCurve pr_curve(const std::vector<std::pair<double, Label>>& posteriors);
void save_pr_curve(const PRCurve& c, const std::string& path);

// LCS-based F measure between token sequences, in [0,1].
double rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);
double rouge_l_ids(const std::vector<std::int32_t>& candidate, const std::vector<std::int32_t>& reference);

struct RougePair {
    std::size_t candidate_index = 0;
    std::size_t best_reference = 0;
    double score = 0.0;
};

struct RougeReport {
    std::vector<RougePair> pairs;
    double mean = 0.0;
    std::string policy = "max-reference-then-mean";
    std::size_t sample_cap = 0;   // 0 = exact (all candidates)
    std::size_t sampled = 0;
};

class GeneratedCorpus;  // langmodel.hpp

// Per sampled generated sequence, the max ROUGE-L against every source
// example; aggregate is the mean. sample_cap 0 scores every sequence.
RougeReport corpus_rouge(const std::vector<std::vector<std::string>>& generated,
                         const Dataset& source, std::size_t sample_cap, std::uint64_t seed,
                         int jobs = 1);
void save_rouge_report(const RougeReport& r, const std::string& path);

struct KappaReport {
    double kappa = 0.0;
    std::vector<double> item_agreement;    // P_i
    double mean_agreement = 0.0;           // P-bar
    double expected_agreement = 0.0;       // P-bar_e
    std::vector<double> category_proportions;
    bool degenerate = false;               // P-bar_e == 1, kappa undefined
};

KappaReport fleiss_kappa(const std::vector<std::vector<std::int64_t>>& ratings, int raters_per_item);
std::string kappa_report_json(const KappaReport& r);

struct RelativeChange {
    double percent = 0.0;
    bool defined = false;
};

RelativeChange relative_change(double baseline, double augmented);
// "+315.48" / "-14.56" / "n/a"
std::string format_relative(const RelativeChange& rc);

}  // namespace genaug
