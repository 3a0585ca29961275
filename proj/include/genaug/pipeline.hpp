#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genaug/corpus.hpp"
#include "genaug/detector.hpp"
#include "genaug/filter.hpp"
#include "genaug/langmodel.hpp"
#include "genaug/metrics.hpp"

namespace genaug {

struct LmParams {
    int order = 3;
    double alpha = 0.1;
    int vocab_min_count = 1;
};

struct GenerationPlan {
    std::string dataset;
    LmParams lm;
    SamplerConfig sampler;          // seed derived from master_seed
    std::int64_t count = 600000;
    SelectionConfig selection;      // tau 0.7, top_k 100000
    std::optional<Dataset> filter_pretrain;
    FilterStageParams filter_pretrain_stage;
    FilterStageParams filter_target_stage;
    int filter_min_count = 1;
    bool filter_non_hate = true;
    std::uint64_t master_seed = 0;
};

struct GenerationResult {
    GeneratedCorpus hate;
    GeneratedCorpus non_hate;
    FilterClassifier filter;
    SelectionReport hate_report;
    SelectionReport non_hate_report;
    std::vector<std::string> log;
};

// Per-dataset corpus generation: train the hate-class LM on the train side,
// sample, train the staged filter on the balanced combination of every train
// set, select by confidence, then repeat for the non-hate class (filtered
// when filter_non_hate is set). Only train sides are ever read.
GenerationResult run_generation(const GenerationPlan& plan,
                                const std::map<std::string, SplitDataset>& splits, int jobs = 1);

struct AugmentedTrainSet {
    Dataset data;
    std::size_t injected_hate = 0;
    std::size_t injected_non_hate = 0;
};

// Base examples plus up to cap_per_class injected sequences per class
// (highest confidence first), provenance-tagged, then seed-shuffled.
AugmentedTrainSet augment_training_set(const Dataset& base, const GeneratedCorpus& gen_hate,
                                       const GeneratedCorpus& gen_non_hate,
                                       std::int64_t cap_per_class, std::uint64_t seed);

enum class ExperimentMode { intra, cross, both };

struct ExperimentPlan {
    ExperimentMode mode = ExperimentMode::both;
    std::vector<std::string> datasets;
    bool include_combined = true;
    // empty = every ordered pair of `datasets`
    std::vector<std::pair<std::string, std::string>> cross_pairs;
    DetectorConfig detector;
    TrainConfig train;
    double tau = 0.7;
    std::int64_t augment_cap = 100000;
    int detector_vocab_min_count = 1;
    std::uint64_t master_seed = 0;
};

struct ArmResult {
    ClassificationMetrics metrics;
    ConfusionMatrix confusion;
    std::optional<PRCurve> pr;  // intra cells only
};

struct ReportCell {
    std::string train_dataset;
    std::string test_dataset;
    bool intra = false;
    ArmResult baseline;
    ArmResult augmented;
};

struct RunReport {
    std::vector<ReportCell> cells;
    std::uint64_t master_seed = 0;
    double tau = 0.7;
};

using CorporaByDataset = std::map<std::string, std::pair<GeneratedCorpus, GeneratedCorpus>>;

// Baseline and augmented arms share the detector config and the per-cell
// seed schedule; only the training data differs. Cells run independently
// across `jobs` threads and are assembled in plan order.
RunReport run_experiment(const ExperimentPlan& plan,
                         const std::map<std::string, SplitDataset>& splits,
                         const CorporaByDataset& corpora, int jobs = 1);

enum class ReportFormat { csv, json, markdown };

// Writes the metric table at `path` plus one pr_<train>_<test>_<arm>.csv per
// stored curve next to it; returns every path written. Deterministic bytes.
std::vector<std::string> emit_report(const RunReport& report, ReportFormat format,
                                     const std::string& path);

// Table round-trip used by tests and tooling (PR curves live in side files).
RunReport load_report_csv(const std::string& path);

// Markdown table in the report layout (Baseline / Augmented / (%) columns).
std::string report_markdown(const RunReport& report);

struct RougeTableRow {
    std::string dataset;
    double generated_hate = 0.0;
    double generated_non_hate = 0.0;
};

std::string rouge_table_markdown(const std::vector<RougeTableRow>& rows);
std::string rouge_table_csv(const std::vector<RougeTableRow>& rows);

}  // namespace genaug
