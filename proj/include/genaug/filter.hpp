#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genaug/corpus.hpp"
#include "genaug/langmodel.hpp"

namespace genaug {

struct FilterStageParams {
    int epochs = 200;
    double learning_rate = 0.5;
    double l2 = 1e-4;
};

struct StagedTrainingPlan {
    std::optional<Dataset> pretrain;   // sentiment-style warm start, optional
    Dataset target;                    // balanced hate / non-hate corpus
    FilterStageParams pretrain_stage;
    FilterStageParams target_stage;
    int vocab_min_count = 1;
    std::uint64_t seed = 0;
};

struct FilterStageHistory {
    std::string stage;
    std::vector<double> losses;  // per epoch, regularized mean logistic loss
};

// Log-linear bag-of-tokens classifier: P(hate | x) = sigmoid(w . counts + b).
class FilterClassifier {
public:
    FilterClassifier() = default;
    FilterClassifier(Vocabulary vocab, std::vector<double> weights, double bias);

    static FilterClassifier train(const StagedTrainingPlan& plan);

    double score(const std::vector<std::string>& tokens) const;
    double score_ids(const std::vector<std::int32_t>& ids) const;

    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const std::vector<FilterStageHistory>& history() const { return history_; }

    void save(std::ostream& os) const;
    static FilterClassifier load(std::istream& is);
    void save(const std::string& path) const;
    static FilterClassifier load_file(const std::string& path);

private:
    Vocabulary vocab_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<FilterStageHistory> history_;
};

inline FilterClassifier train_filter(const StagedTrainingPlan& plan) {
    return FilterClassifier::train(plan);
}

struct SelectionConfig {
    double tau = 0.7;
    std::int64_t top_k = 100000;
};

struct SelectionReport {
    std::size_t input_count = 0;
    std::size_t above_threshold = 0;
    std::size_t retained = 0;
    bool empty_warning = false;
    std::vector<double> scores;            // per input sequence, input order
    std::vector<bool> retained_mask;       // per input sequence
    std::array<std::int64_t, 20> histogram{};  // 0.05-wide confidence bins
};

// Confidence of `target_class` per sequence; drops < tau, sorts descending
// (ties by original index), truncates to top_k. An empty result is legal and
// flagged in the report.
std::pair<GeneratedCorpus, SelectionReport> filter_and_select(const GeneratedCorpus& corpus,
                                                              const FilterClassifier& filter,
                                                              Label target_class,
                                                              const SelectionConfig& cfg);

// CSV columns: index,text,score,retained
void save_selection_report(const SelectionReport& r, const GeneratedCorpus& corpus,
                           const std::string& path);

// Loss and gradient of the regularized mean logistic loss at (weights, bias);
// exposed for the finite-difference checks.
double filter_loss(const Dataset& corpus, const Vocabulary& vocab,
                   const std::vector<double>& weights, double bias, double l2);
void filter_gradient(const Dataset& corpus, const Vocabulary& vocab,
                     const std::vector<double>& weights, double bias, double l2,
                     std::vector<double>& grad_w, double& grad_b);

}  // namespace genaug
