#include "genaug/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "genaug/rng.hpp"

namespace genaug {

namespace {

// sub-stream ids hashed with the master seed; fixed so runs are reproducible
constexpr std::uint64_t kStreamHateSampler = 0x11;
constexpr std::uint64_t kStreamNonHateSampler = 0x12;
constexpr std::uint64_t kStreamBalanced = 0x13;
constexpr std::uint64_t kStreamFilter = 0x14;
constexpr std::uint64_t kStreamAugment = 0x21;
constexpr std::uint64_t kStreamDetector = 0x22;

const SplitDataset& split_for(const std::map<std::string, SplitDataset>& splits,
                              const std::string& name) {
    const auto it = splits.find(name);
    if (it == splits.end()) throw MissingArtifactsError("split dataset \"" + name + "\"");
    return it->second;
}

std::string joined_text(const std::vector<std::string>& tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text.push_back(' ');
        text += tokens[i];
    }
    return text;
}

}  // namespace

GenerationResult run_generation(const GenerationPlan& plan,
                                const std::map<std::string, SplitDataset>& splits, int jobs) {
    const SplitDataset& split = split_for(splits, plan.dataset);
    assert_train_side(split.train, "run_generation");

    GenerationResult result;
    const auto log = [&](std::string line) { result.log.push_back(std::move(line)); };

    const Dataset hate_train = class_subset(split.train, Label::hate);
    const Dataset non_hate_train = class_subset(split.train, Label::non_hate);
    log("train examples: hate=" + std::to_string(hate_train.size()) +
        " non-hate=" + std::to_string(non_hate_train.size()));

    // hate-class generator
    const Vocabulary hate_vocab = Vocabulary::build({hate_train}, plan.lm.vocab_min_count);
    const GenerativeLM g_hate = GenerativeLM::train(hate_train, hate_vocab, plan.lm.order, plan.lm.alpha);
    SamplerConfig hate_sampler = plan.sampler;
    hate_sampler.seed = mix64(plan.master_seed, kStreamHateSampler);
    GeneratedCorpus raw_hate =
        generate_corpus(g_hate, plan.count, hate_sampler, jobs, plan.dataset, Label::hate);
    log("generated hate sequences: " + std::to_string(raw_hate.size()));

    // staged filter over the balanced combination of every train set
    std::vector<SplitDataset> all_splits;
    all_splits.reserve(splits.size());
    for (const auto& [name, s] : splits) all_splits.push_back(s);
    StagedTrainingPlan filter_plan;
    filter_plan.pretrain = plan.filter_pretrain;
    filter_plan.target = balanced_combined(all_splits, mix64(plan.master_seed, kStreamBalanced));
    filter_plan.pretrain_stage = plan.filter_pretrain_stage;
    filter_plan.target_stage = plan.filter_target_stage;
    filter_plan.vocab_min_count = plan.filter_min_count;
    filter_plan.seed = mix64(plan.master_seed, kStreamFilter);
    result.filter = train_filter(filter_plan);
    log("filter trained: stages=" + std::to_string(result.filter.history().size()) +
        " balanced corpus=" + std::to_string(filter_plan.target.size()));

    auto [kept_hate, hate_report] =
        filter_and_select(raw_hate, result.filter, Label::hate, plan.selection);
    result.hate = std::move(kept_hate);
    result.hate_report = std::move(hate_report);
    log("hate selection: above threshold=" + std::to_string(result.hate_report.above_threshold) +
        " retained=" + std::to_string(result.hate_report.retained) +
        (result.hate_report.empty_warning ? " (warning: empty)" : ""));

    // non-hate generator
    const Vocabulary non_hate_vocab = Vocabulary::build({non_hate_train}, plan.lm.vocab_min_count);
    const GenerativeLM g_non_hate =
        GenerativeLM::train(non_hate_train, non_hate_vocab, plan.lm.order, plan.lm.alpha);
    SamplerConfig non_hate_sampler = plan.sampler;
    non_hate_sampler.seed = mix64(plan.master_seed, kStreamNonHateSampler);
    GeneratedCorpus raw_non_hate = generate_corpus(g_non_hate, plan.count, non_hate_sampler, jobs,
                                                   plan.dataset, Label::non_hate);
    log("generated non-hate sequences: " + std::to_string(raw_non_hate.size()));

    if (plan.filter_non_hate) {
        auto [kept, report] =
            filter_and_select(raw_non_hate, result.filter, Label::non_hate, plan.selection);
        result.non_hate = std::move(kept);
        result.non_hate_report = std::move(report);
    } else {
        // unfiltered, but still capped at top_k in generation order
        result.non_hate = std::move(raw_non_hate);
        if (result.non_hate.size() > static_cast<std::size_t>(plan.selection.top_k)) {
            result.non_hate.sequences.resize(static_cast<std::size_t>(plan.selection.top_k));
            result.non_hate.seeds.resize(static_cast<std::size_t>(plan.selection.top_k));
        }
        result.non_hate_report.input_count = plan.count < 0 ? 0 : static_cast<std::size_t>(plan.count);
        result.non_hate_report.retained = result.non_hate.size();
    }
    log("non-hate selection: retained=" + std::to_string(result.non_hate.size()));
    return result;
}

AugmentedTrainSet augment_training_set(const Dataset& base, const GeneratedCorpus& gen_hate,
                                       const GeneratedCorpus& gen_non_hate,
                                       std::int64_t cap_per_class, std::uint64_t seed) {
    assert_train_side(base, "augment_training_set");
    if (cap_per_class < 0) throw UsageError("augment cap must be >= 0");

    AugmentedTrainSet out;
    out.data.name = base.name + ".augmented";
    out.data.examples = base.examples;

    const auto inject = [&](const GeneratedCorpus& corpus, Label label, std::size_t& counter) {
        const auto n = std::min<std::size_t>(corpus.size(), static_cast<std::size_t>(cap_per_class));
        for (std::size_t i = 0; i < n; ++i) {
            Provenance prov;
            prov.generated = true;
            prov.origin = corpus.source_dataset;
            prov.seed = corpus.seeds[i];
            out.data.add(joined_text(corpus.sequences[i]), label, std::move(prov));
            ++counter;
        }
    };
    inject(gen_hate, Label::hate, out.injected_hate);
    inject(gen_non_hate, Label::non_hate, out.injected_non_hate);

    Rng rng(seed);
    rng.shuffle(out.data.examples);
    return out;
}

namespace {

struct CellSpec {
    std::string train_ds;
    std::string test_ds;
    bool intra = false;
};

ArmResult evaluate_arm(const Dataset& train, const Dataset& test, const ExperimentPlan& plan,
                       std::uint64_t cell_seed, bool with_pr) {
    const Vocabulary vocab = Vocabulary::build({train}, plan.detector_vocab_min_count);
    TrainConfig tcfg = plan.train;
    tcfg.seed = mix64(cell_seed, kStreamDetector);
    auto trained = train_detector(train, vocab, plan.detector, tcfg);

    std::vector<std::pair<double, Label>> posteriors;
    posteriors.reserve(test.size());
    for (const auto& e : test.examples)
        posteriors.emplace_back(trained.model.forward(trained.model.encode(e.text), false, 0), e.label);

    ArmResult arm;
    arm.confusion = confusion_at(posteriors, plan.tau);
    arm.metrics = classification_metrics(arm.confusion);
    if (with_pr) arm.pr = pr_curve(posteriors);
    return arm;
}

}  // namespace

RunReport run_experiment(const ExperimentPlan& plan,
                         const std::map<std::string, SplitDataset>& splits,
                         const CorporaByDataset& corpora, int jobs) {
    if (plan.datasets.empty()) throw UsageError("experiment plan lists no datasets");

    // fail fast with the complete listing of anything missing
    std::string missing;
    for (const auto& name : plan.datasets) {
        if (splits.find(name) == splits.end()) missing += " split:" + name;
        if (corpora.find(name) == corpora.end()) missing += " corpora:" + name;
    }
    if (!missing.empty()) throw MissingArtifactsError(missing.substr(1));

    std::vector<CellSpec> cells;
    const bool want_intra = plan.mode != ExperimentMode::cross;
    const bool want_cross = plan.mode != ExperimentMode::intra;
    if (want_intra) {
        for (const auto& name : plan.datasets) cells.push_back({name, name, true});
        if (plan.include_combined) cells.push_back({"combined", "combined", true});
    }
    if (want_cross) {
        auto pairs = plan.cross_pairs;
        if (pairs.empty()) {
            for (const auto& a : plan.datasets)
                for (const auto& b : plan.datasets)
                    if (a != b) pairs.emplace_back(a, b);
        }
        for (const auto& [a, b] : pairs) {
            if (a == b) throw UsageError("cross pair with identical train and test dataset: " + a);
            if (splits.find(a) == splits.end() || splits.find(b) == splits.end())
                throw MissingArtifactsError("split for cross pair " + a + "-" + b);
            cells.push_back({a, b, false});
        }
    }

    // per-dataset augmented train sets, built once
    std::map<std::string, Dataset> base_train, augmented_train;
    Dataset combined_base{"combined.train", {}};
    Dataset combined_aug{"combined.train.augmented", {}};
    Dataset combined_test{"combined.test", {}};
    for (const auto& name : plan.datasets) {
        const auto& split = split_for(splits, name);
        const auto& [gen_hate, gen_non_hate] = corpora.at(name);
        const std::uint64_t aug_seed = mix64(plan.master_seed, mix64(kStreamAugment, hash_str64(name)));
        auto aug = augment_training_set(split.train, gen_hate, gen_non_hate, plan.augment_cap, aug_seed);
        base_train.emplace(name, split.train);
        augmented_train.emplace(name, std::move(aug.data));

        combined_base.examples.insert(combined_base.examples.end(), split.train.examples.begin(),
                                      split.train.examples.end());
        combined_test.examples.insert(combined_test.examples.end(), split.test.examples.begin(),
                                      split.test.examples.end());
    }
    if (want_intra && plan.include_combined) {
        // union of the per-dataset injections over the combined base
        combined_aug.examples = combined_base.examples;
        for (const auto& name : plan.datasets) {
            const auto& [gen_hate, gen_non_hate] = corpora.at(name);
            const std::uint64_t aug_seed =
                mix64(plan.master_seed, mix64(kStreamAugment, hash_str64(name)));
            auto aug = augment_training_set(split_for(splits, name).train, gen_hate, gen_non_hate,
                                            plan.augment_cap, aug_seed);
            for (auto& e : aug.data.examples)
                if (e.prov.generated) combined_aug.examples.push_back(std::move(e));
        }
        Rng rng(mix64(plan.master_seed, mix64(kStreamAugment, hash_str64("combined"))));
        rng.shuffle(combined_aug.examples);
        base_train.emplace("combined", std::move(combined_base));
        augmented_train.emplace("combined", std::move(combined_aug));
    }

    RunReport report;
    report.master_seed = plan.master_seed;
    report.tau = plan.tau;
    report.cells.resize(cells.size());

    const auto run_cell = [&](std::size_t i) {
        const auto& spec = cells[i];
        const std::uint64_t cell_seed =
            mix64(plan.master_seed, hash_str64(spec.train_ds + "\x1f" + spec.test_ds));
        const Dataset& test =
            spec.test_ds == "combined" ? combined_test : split_for(splits, spec.test_ds).test;

        ReportCell cell;
        cell.train_dataset = spec.train_ds;
        cell.test_dataset = spec.test_ds;
        cell.intra = spec.intra;
        cell.baseline = evaluate_arm(base_train.at(spec.train_ds), test, plan, cell_seed, spec.intra);
        cell.augmented =
            evaluate_arm(augmented_train.at(spec.train_ds), test, plan, cell_seed, spec.intra);
        report.cells[i] = std::move(cell);
    };

    const std::size_t n = cells.size();
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) run_cell(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    run_cell(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return report;
}

}  // namespace genaug
