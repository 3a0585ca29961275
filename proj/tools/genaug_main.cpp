#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genaug/annotate.hpp"
#include "genaug/manifest.hpp"
#include "genaug/pipeline.hpp"
#include "genaug/rng.hpp"

namespace fs = std::filesystem;
using namespace genaug;

namespace {

// every verb echoes its resolved options so a run can be reproduced from the log
void print_banner(const CLI::App* cmd) {
    std::cout << "# effective-config: " << cmd->get_name() << '\n';
    for (const auto* opt : cmd->get_options()) {
        if (opt->get_name() == "--help") continue;
        std::string value = opt->count() ? opt->as<std::string>() : opt->get_default_str();
        if (value.empty()) value = "(unset)";
        std::cout << "#   " << opt->get_name() << " = " << value << '\n';
    }
}

Dataset load_any(const std::string& path, const std::string& name) {
    return load_dataset(path, format_from_path(path), name);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

struct PrepareArgs {
    std::string input;
    std::string name;
    std::string out_dir = ".";
    double ratio = 0.8;
    std::uint64_t seed = 0;
    bool no_preprocess = false;
};

int cmd_prepare(const PrepareArgs& args) {
    auto raw = load_any(args.input, args.name.empty() ? stem_of(args.input) : args.name);
    std::size_t dropped = 0;
    if (!args.no_preprocess) {
        auto [clean, n] = preprocess_dataset(raw);
        raw = std::move(clean);
        dropped = n;
    }
    const auto split = split_dataset(raw, args.ratio, args.seed);
    fs::create_directories(args.out_dir);
    const auto train_path = (fs::path(args.out_dir) / (raw.name + ".train.jsonl")).string();
    const auto test_path = (fs::path(args.out_dir) / (raw.name + ".test.jsonl")).string();
    save_dataset(split.train, train_path, FileFormat::jsonl);
    save_dataset(split.test, test_path, FileFormat::jsonl);
    std::cout << "prepared " << raw.name << ": train=" << split.train.size()
              << " test=" << split.test.size() << " dropped_empty=" << dropped << '\n'
              << "wrote " << train_path << '\n'
              << "wrote " << test_path << '\n';
    return 0;
}

struct TrainLmArgs {
    std::string train_file;
    std::string class_name = "hate";
    std::string out;
    int order = 3;
    double alpha = 0.1;
    int min_count = 1;
};

int cmd_train_lm(const TrainLmArgs& args) {
    const auto label = parse_label(args.class_name);
    if (!label) throw UsageError("--class must be hate or non-hate");
    const auto data = load_any(args.train_file, stem_of(args.train_file));
    const auto subset = class_subset(data, *label);
    if (subset.size() == 0) throw EmptyCorpusError("no examples of class " + args.class_name);
    const auto vocab = Vocabulary::build({subset}, args.min_count);
    const auto lm = GenerativeLM::train(subset, vocab, args.order, args.alpha);
    lm.save(args.out);
    std::cout << "trained lm on " << subset.size() << " examples, vocab=" << vocab.size()
              << ", wrote " << args.out << '\n';
    return 0;
}

struct GenerateArgs {
    std::string lm_path;
    std::string out;
    std::int64_t count = 600000;
    double top_p = 0.9;
    double temperature = 0.9;
    int max_tokens = 30;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string source;
    std::string class_name = "hate";
};

int cmd_generate(const GenerateArgs& args) {
    const auto lm = GenerativeLM::load_file(args.lm_path);
    SamplerConfig cfg{args.temperature, args.top_p, args.max_tokens, args.seed};
    const auto label = parse_label(args.class_name);
    if (!label) throw UsageError("--class must be hate or non-hate");
    const auto corpus = generate_corpus(lm, args.count, cfg, args.jobs, args.source, *label);
    save_generated_corpus(corpus, args.out);
    std::cout << "generated " << corpus.size() << " sequences, wrote " << args.out << '\n';
    return 0;
}

struct TrainFilterArgs {
    std::vector<std::string> train_files;
    std::string pretrain_file;
    std::string out;
    int epochs = 200;
    double lr = 0.5;
    double l2 = 1e-4;
    int pretrain_epochs = 100;
    int min_count = 1;
    std::uint64_t seed = 0;
};

int cmd_train_filter(const TrainFilterArgs& args) {
    std::vector<Dataset> trains;
    for (const auto& f : args.train_files) trains.push_back(load_any(f, stem_of(f)));
    StagedTrainingPlan plan;
    plan.target = balanced_combined_trains(trains, mix64(args.seed, 0x13));
    if (!args.pretrain_file.empty()) {
        plan.pretrain = load_any(args.pretrain_file, stem_of(args.pretrain_file));
        plan.pretrain_stage.epochs = args.pretrain_epochs;
        plan.pretrain_stage.learning_rate = args.lr;
        plan.pretrain_stage.l2 = args.l2;
    }
    plan.target_stage = {args.epochs, args.lr, args.l2};
    plan.vocab_min_count = args.min_count;
    plan.seed = args.seed;
    const auto filter = train_filter(plan);
    filter.save(args.out);
    std::cout << "trained filter: stages=" << filter.history().size()
              << " balanced corpus=" << plan.target.size() << ", wrote " << args.out << '\n';
    return 0;
}

struct FilterArgs {
    std::string input;
    std::string model;
    std::string out;
    std::string report;
    std::string class_name = "hate";
    double tau = 0.7;
    std::int64_t top_k = 100000;
};

int cmd_filter(const FilterArgs& args) {
    const auto corpus = load_generated_corpus(args.input);
    const auto filter = FilterClassifier::load_file(args.model);
    const auto label = parse_label(args.class_name);
    if (!label) throw UsageError("--class must be hate or non-hate");
    const auto [kept, report] = filter_and_select(corpus, filter, *label, {args.tau, args.top_k});
    save_generated_corpus(kept, args.out);
    if (!args.report.empty()) save_selection_report(report, corpus, args.report);
    std::cout << "kept " << report.retained << " of " << report.input_count << " ("
              << report.above_threshold << " above tau)"
              << (report.empty_warning ? " [warning: empty result]" : "") << ", wrote " << args.out
              << '\n';
    return 0;
}

struct TrainDetectorArgs {
    std::string train_file;
    std::string out;
    std::string history;
    int embed_dim = 300;
    double dropout = 0.3;
    int filters = 100;
    int kernel = 4;
    int pool = 4;
    int hidden = 100;
    int max_len = 30;
    int min_count = 1;
    double lr = 1e-3;
    int batch = 32;
    int max_epochs = 20;
    int patience = 3;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
};

int cmd_train_detector(const TrainDetectorArgs& args) {
    const auto train = load_any(args.train_file, stem_of(args.train_file));
    const auto vocab = Vocabulary::build({train}, args.min_count);
    DetectorConfig dcfg{args.embed_dim, args.dropout, args.filters, args.kernel,
                        args.pool,      args.hidden,  args.max_len, vocab.size()};
    TrainConfig tcfg;
    tcfg.learning_rate = args.lr;
    tcfg.batch_size = args.batch;
    tcfg.max_epochs = args.max_epochs;
    tcfg.patience = args.patience;
    tcfg.val_fraction = args.val_fraction;
    tcfg.seed = args.seed;
    const auto trained = train_detector(train, vocab, dcfg, tcfg);
    trained.model.save(args.out);
    if (!args.history.empty()) save_history_csv(trained.history, args.history);
    std::cout << "trained detector: epochs=" << trained.history.epochs.size()
              << (trained.history.early_stopped ? " (early stop)" : "") << ", wrote " << args.out
              << '\n';
    return 0;
}

struct EvaluateArgs {
    std::string model;
    std::string test_file;
    std::string out;
    std::string pr_out;
    double tau = 0.7;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const auto model = DetectorModel::load_file(args.model);
    const auto test = load_any(args.test_file, stem_of(args.test_file));
    if (test.size() == 0) throw EmptyEvaluationError("empty test set");

    std::vector<std::pair<double, Label>> posteriors;
    posteriors.reserve(test.size());
    for (const auto& e : test.examples)
        posteriors.emplace_back(model.forward(model.encode(e.text), false, 0), e.label);

    const auto cm = confusion_at(posteriors, args.tau);
    const auto m = classification_metrics(cm);
    nlohmann::ordered_json j;
    j["tau"] = args.tau;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["tp"] = cm.tp;
    j["fp"] = cm.fp;
    j["tn"] = cm.tn;
    j["fn"] = cm.fn;
    const auto text = j.dump(2) + "\n";
    if (args.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(args.out, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + args.out);
        os << text;
        std::cout << "wrote " << args.out << '\n';
    }
    if (!args.pr_out.empty()) {
        save_pr_curve(pr_curve(posteriors), args.pr_out);
        std::cout << "wrote " << args.pr_out << '\n';
    }
    return 0;
}

struct RougeArgs {
    std::string generated;
    std::string source;
    std::string out;
    std::string markdown;
    std::int64_t cap = 10000;
    std::uint64_t seed = 0;
    int jobs = 1;
};

int cmd_rouge(const RougeArgs& args) {
    const auto gen = load_generated_corpus(args.generated);
    const auto source = load_any(args.source, stem_of(args.source));
    const auto report = corpus_rouge(gen.sequences, source, static_cast<std::size_t>(args.cap),
                                     args.seed, args.jobs);
    save_rouge_report(report, args.out);
    std::cout << "rouge-l mean=" << report.mean << " over " << report.sampled
              << " sequences, wrote " << args.out << '\n';
    if (!args.markdown.empty()) {
        std::ofstream os(args.markdown, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + args.markdown);
        const auto label = gen.class_label == Label::hate;
        os << rouge_table_markdown({{gen.source_dataset.empty() ? stem_of(args.source)
                                                                : gen.source_dataset,
                                     label ? report.mean : 0.0, label ? 0.0 : report.mean}});
    }
    return 0;
}

struct AnnotateArgs {
    std::vector<std::string> items_files;
    std::string replay;
    std::string out;
    std::int64_t n_items = 1000;
    std::int64_t overlap = 250;
    std::vector<std::string> annotators;
    std::uint64_t seed = 0;
};

int cmd_annotate(const AnnotateArgs& args) {
    std::vector<GeneratedCorpus> corpora;
    for (const auto& f : args.items_files) corpora.push_back(load_generated_corpus(f));
    const auto items = sample_annotation_items(corpora, static_cast<std::size_t>(args.n_items),
                                               args.seed);
    const auto overlap = std::min<std::size_t>(static_cast<std::size_t>(args.overlap), items.size());

    std::vector<Rating> ratings;
    if (!args.replay.empty()) {
        ratings = load_replay(args.replay, items.size(), args.annotators);
    } else {
        ratings = interactive_ratings(items, overlap, args.annotators, std::cin, std::cout);
    }
    const auto report = annotation_session(items, overlap, args.annotators, ratings);
    const auto text = annotation_report_json(report);
    if (args.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(args.out, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + args.out);
        os << text;
        std::cout << "wrote " << args.out << '\n';
    }
    return 0;
}

struct ExperimentArgs {
    std::string config;
    std::string mode;
    std::string workdir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    bool require_artifacts = false;
};

// artifact cache key: content-independent run inputs (file bytes would be
// ideal; dataset name + plan + seed covers the manifest-driven flow)
std::string corpus_cache_name(const std::string& dataset, const GenerationPlan& plan, Label label) {
    std::ostringstream key;
    key << dataset << '|' << plan.lm.order << '|' << plan.lm.alpha << '|' << plan.count << '|'
        << plan.selection.tau << '|' << plan.selection.top_k << '|' << plan.sampler.top_p << '|'
        << plan.sampler.temperature << '|' << plan.sampler.max_tokens << '|' << plan.master_seed
        << '|' << label_name(label) << '|' << plan.filter_non_hate;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_str64(key.str())));
    return dataset + "." + std::string(label_name(label)) + ".gen." + buf + ".jsonl";
}

int cmd_experiment(const ExperimentArgs& args) {
    const Manifest manifest = args.config.empty() ? Manifest{} : Manifest::load(args.config);

    const std::string workdir =
        !args.workdir.empty() ? args.workdir : manifest.get("workdir", "work");
    fs::create_directories(workdir);
    const std::uint64_t master_seed = args.seed_set ? args.seed : manifest.get_u64("seed", 0);
    const int jobs = args.jobs > 0 ? args.jobs : static_cast<int>(manifest.get_int("jobs", 1));

    // datasets: "A,B" with optional dataset.<name> = raw path or
    // dataset.<name>.train / dataset.<name>.test pointing at prepared splits
    const auto names = manifest.get_list("datasets");
    if (names.empty()) throw UsageError("manifest must list datasets = name1,name2,...");

    std::map<std::string, SplitDataset> splits;
    for (const auto& name : names) {
        const auto train_key = "dataset." + name + ".train";
        const auto test_key = "dataset." + name + ".test";
        if (manifest.has(train_key)) {
            SplitDataset split;
            split.train = load_any(manifest.require(train_key), name + ".train");
            split.test = load_any(manifest.require(test_key), name + ".test");
            for (auto& e : split.test.examples) e.prov.test_side = true;
            splits.emplace(name, std::move(split));
        } else {
            const auto raw_key = "dataset." + name;
            const auto default_train = (fs::path(workdir) / (name + ".train.jsonl")).string();
            if (!manifest.has(raw_key) && fs::exists(default_train)) {
                SplitDataset split;
                split.train = load_any(default_train, name + ".train");
                split.test =
                    load_any((fs::path(workdir) / (name + ".test.jsonl")).string(), name + ".test");
                for (auto& e : split.test.examples) e.prov.test_side = true;
                splits.emplace(name, std::move(split));
                continue;
            }
            auto raw = load_any(manifest.require(raw_key), name);
            auto [clean, dropped] = preprocess_dataset(raw);
            splits.emplace(name, split_dataset(clean, manifest.get_double("split_ratio", 0.8),
                                               mix64(master_seed, hash_str64(name))));
        }
    }

    // per-dataset generation (cached under the workdir)
    CorporaByDataset corpora;
    for (const auto& name : names) {
        GenerationPlan plan;
        plan.dataset = name;
        plan.lm.order = static_cast<int>(manifest.get_int("lm.order", 3));
        plan.lm.alpha = manifest.get_double("lm.alpha", 0.1);
        plan.lm.vocab_min_count = static_cast<int>(manifest.get_int("lm.min_count", 1));
        plan.sampler.top_p = manifest.get_double("sampler.top_p", 0.9);
        plan.sampler.temperature = manifest.get_double("sampler.temperature", 0.9);
        plan.sampler.max_tokens = static_cast<int>(manifest.get_int("sampler.max_tokens", 30));
        plan.count = manifest.get_int("generate.count", 600000);
        plan.selection.tau = manifest.get_double("select.tau", 0.7);
        plan.selection.top_k = manifest.get_int("select.top_k", 100000);
        plan.filter_target_stage.epochs = static_cast<int>(manifest.get_int("filter.epochs", 200));
        plan.filter_target_stage.learning_rate = manifest.get_double("filter.lr", 0.5);
        plan.filter_target_stage.l2 = manifest.get_double("filter.l2", 1e-4);
        plan.filter_min_count = static_cast<int>(manifest.get_int("filter.min_count", 1));
        plan.filter_non_hate = manifest.get_bool("filter.non_hate", true);
        plan.master_seed = mix64(master_seed, hash_str64("generation:" + name));
        if (manifest.has("filter.pretrain")) {
            const auto path = manifest.require("filter.pretrain");
            plan.filter_pretrain = load_any(path, stem_of(path));
            plan.filter_pretrain_stage.epochs =
                static_cast<int>(manifest.get_int("filter.pretrain_epochs", 100));
        }

        const auto hate_path = fs::path(workdir) / corpus_cache_name(name, plan, Label::hate);
        const auto non_path = fs::path(workdir) / corpus_cache_name(name, plan, Label::non_hate);
        if (fs::exists(hate_path) && fs::exists(non_path)) {
            corpora.emplace(name, std::make_pair(load_generated_corpus(hate_path.string()),
                                                 load_generated_corpus(non_path.string())));
            std::cout << "cache hit: " << name << '\n';
            continue;
        }
        if (args.require_artifacts)
            throw MissingArtifactsError("generated corpora for " + name + " (run without --require-artifacts)");
        std::cout << "generating for " << name << " ..." << std::endl;
        auto result = run_generation(plan, splits, jobs);
        for (const auto& line : result.log) std::cout << "  " << line << '\n';
        save_generated_corpus(result.hate, hate_path.string());
        save_generated_corpus(result.non_hate, non_path.string());
        corpora.emplace(name, std::make_pair(std::move(result.hate), std::move(result.non_hate)));
    }

    ExperimentPlan plan;
    const std::string mode = !args.mode.empty() ? args.mode : manifest.get("mode", "both");
    if (mode == "intra") plan.mode = ExperimentMode::intra;
    else if (mode == "cross") plan.mode = ExperimentMode::cross;
    else if (mode == "both") plan.mode = ExperimentMode::both;
    else throw UsageError("mode must be intra, cross or both");
    plan.datasets = names;
    plan.include_combined = manifest.get_bool("include_combined", true);
    for (const auto& pair : manifest.get_list("pairs")) {
        const auto dash = pair.find('-');
        if (dash == std::string::npos) throw UsageError("pairs entries look like TRAIN-TEST");
        plan.cross_pairs.emplace_back(pair.substr(0, dash), pair.substr(dash + 1));
    }
    plan.detector.embed_dim = static_cast<int>(manifest.get_int("detector.embed_dim", 300));
    plan.detector.dropout = manifest.get_double("detector.dropout", 0.3);
    plan.detector.conv_filters = static_cast<int>(manifest.get_int("detector.filters", 100));
    plan.detector.kernel_width = static_cast<int>(manifest.get_int("detector.kernel", 4));
    plan.detector.pool_width = static_cast<int>(manifest.get_int("detector.pool", 4));
    plan.detector.hidden = static_cast<int>(manifest.get_int("detector.hidden", 100));
    plan.detector.max_len = static_cast<int>(manifest.get_int("detector.max_len", 30));
    plan.train.learning_rate = manifest.get_double("train.lr", 1e-3);
    plan.train.batch_size = static_cast<int>(manifest.get_int("train.batch", 32));
    plan.train.max_epochs = static_cast<int>(manifest.get_int("train.max_epochs", 20));
    plan.train.patience = static_cast<int>(manifest.get_int("train.patience", 3));
    plan.train.val_fraction = manifest.get_double("train.val_fraction", 0.1);
    plan.tau = manifest.get_double("tau", 0.7);
    plan.augment_cap = manifest.get_int("augment.cap", 100000);
    plan.detector_vocab_min_count = static_cast<int>(manifest.get_int("detector.min_count", 1));
    plan.master_seed = master_seed;

    const auto report = run_experiment(plan, splits, corpora, jobs);
    const auto base = fs::path(workdir) / "report";
    for (const auto& f : emit_report(report, ReportFormat::csv, base.string() + ".csv"))
        std::cout << "wrote " << f << '\n';
    for (const auto& f : emit_report(report, ReportFormat::json, base.string() + ".json"))
        if (f.find("_pr_") == std::string::npos) std::cout << "wrote " << f << '\n';
    for (const auto& f : emit_report(report, ReportFormat::markdown, base.string() + ".md"))
        if (f.find("_pr_") == std::string::npos) std::cout << "wrote " << f << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generative data augmentation for binary hate-speech detection"};
    app.require_subcommand(1);

    PrepareArgs prepare;
    auto* prepare_cmd = app.add_subcommand("prepare", "normalize, split and emit a dataset");
    prepare_cmd->add_option("--in", prepare.input, "input csv/jsonl file")->required();
    prepare_cmd->add_option("--name", prepare.name, "dataset name (default: file stem)")
        ->capture_default_str();
    prepare_cmd->add_option("--split", prepare.ratio, "train fraction")->capture_default_str();
    prepare_cmd->add_option("--seed", prepare.seed, "split seed")->capture_default_str();
    prepare_cmd->add_option("--out", prepare.out_dir, "output directory")->capture_default_str();
    prepare_cmd->add_flag("--no-preprocess", prepare.no_preprocess, "skip text normalization");

    TrainLmArgs train_lm_args;
    auto* train_lm_cmd = app.add_subcommand("train-lm", "train a class-conditional language model");
    train_lm_cmd->add_option("--train", train_lm_args.train_file, "training split (jsonl/csv)")
        ->required();
    train_lm_cmd->add_option("--class", train_lm_args.class_name, "hate or non-hate")
        ->capture_default_str();
    train_lm_cmd->add_option("--order", train_lm_args.order, "n-gram context length")
        ->capture_default_str();
    train_lm_cmd->add_option("--alpha", train_lm_args.alpha, "additive smoothing")
        ->capture_default_str();
    train_lm_cmd->add_option("--min-count", train_lm_args.min_count, "vocabulary min count")
        ->capture_default_str();
    train_lm_cmd->add_option("--out", train_lm_args.out, "model output path")->required();

    GenerateArgs generate_args;
    auto* generate_cmd = app.add_subcommand("generate", "sample sequences from a language model");
    generate_cmd->add_option("--lm", generate_args.lm_path, "language model file")->required();
    generate_cmd->add_option("--count", generate_args.count, "sequences to generate")
        ->capture_default_str();
    generate_cmd->add_option("--top-p", generate_args.top_p, "nucleus mass")->capture_default_str();
    generate_cmd->add_option("--temperature", generate_args.temperature, "softmax temperature")
        ->capture_default_str();
    generate_cmd->add_option("--max-tokens", generate_args.max_tokens, "max sequence length")
        ->capture_default_str();
    generate_cmd->add_option("--seed", generate_args.seed, "master sampling seed")
        ->capture_default_str();
    generate_cmd->add_option("--jobs", generate_args.jobs, "worker threads")->capture_default_str();
    generate_cmd->add_option("--source", generate_args.source, "source dataset tag")
        ->capture_default_str();
    generate_cmd->add_option("--class", generate_args.class_name, "generated class tag")
        ->capture_default_str();
    generate_cmd->add_option("--out", generate_args.out, "output jsonl")->required();

    TrainFilterArgs train_filter_args;
    auto* train_filter_cmd =
        app.add_subcommand("train-filter", "train the staged selection classifier");
    train_filter_cmd
        ->add_option("--datasets", train_filter_args.train_files, "training splits (comma separated)")
        ->required()
        ->delimiter(',');
    train_filter_cmd->add_option("--pretrain", train_filter_args.pretrain_file,
                                 "optional sentiment-style pretrain corpus");
    train_filter_cmd->add_option("--epochs", train_filter_args.epochs, "target-stage epochs")
        ->capture_default_str();
    train_filter_cmd
        ->add_option("--pretrain-epochs", train_filter_args.pretrain_epochs, "pretrain-stage epochs")
        ->capture_default_str();
    train_filter_cmd->add_option("--lr", train_filter_args.lr, "learning rate")->capture_default_str();
    train_filter_cmd->add_option("--l2", train_filter_args.l2, "l2 strength")->capture_default_str();
    train_filter_cmd->add_option("--min-count", train_filter_args.min_count, "vocabulary min count")
        ->capture_default_str();
    train_filter_cmd->add_option("--seed", train_filter_args.seed, "balancing seed")
        ->capture_default_str();
    train_filter_cmd->add_option("--out", train_filter_args.out, "model output path")->required();

    FilterArgs filter_args;
    auto* filter_cmd = app.add_subcommand("filter", "score and select generated sequences");
    filter_cmd->add_option("--in", filter_args.input, "generated corpus jsonl")->required();
    filter_cmd->add_option("--model", filter_args.model, "filter model file")->required();
    filter_cmd->add_option("--class", filter_args.class_name, "target class")->capture_default_str();
    filter_cmd->add_option("--tau", filter_args.tau, "confidence threshold")->capture_default_str();
    filter_cmd->add_option("--top-k", filter_args.top_k, "max sequences kept")->capture_default_str();
    filter_cmd->add_option("--out", filter_args.out, "output jsonl")->required();
    filter_cmd->add_option("--report", filter_args.report, "score report csv");

    TrainDetectorArgs train_detector_args;
    auto* train_detector_cmd = app.add_subcommand("train-detector", "train the CNN-GRU detector");
    train_detector_cmd->add_option("--train", train_detector_args.train_file, "training split")
        ->required();
    train_detector_cmd->add_option("--embed-dim", train_detector_args.embed_dim, "embedding size")
        ->capture_default_str();
    train_detector_cmd->add_option("--dropout", train_detector_args.dropout, "dropout rate")
        ->capture_default_str();
    train_detector_cmd->add_option("--filters", train_detector_args.filters, "conv filters")
        ->capture_default_str();
    train_detector_cmd->add_option("--kernel", train_detector_args.kernel, "conv window")
        ->capture_default_str();
    train_detector_cmd->add_option("--pool", train_detector_args.pool, "max-pool width")
        ->capture_default_str();
    train_detector_cmd->add_option("--hidden", train_detector_args.hidden, "GRU hidden units")
        ->capture_default_str();
    train_detector_cmd->add_option("--max-len", train_detector_args.max_len, "max sequence length")
        ->capture_default_str();
    train_detector_cmd->add_option("--min-count", train_detector_args.min_count, "vocab min count")
        ->capture_default_str();
    train_detector_cmd->add_option("--lr", train_detector_args.lr, "Adam learning rate")
        ->capture_default_str();
    train_detector_cmd->add_option("--batch", train_detector_args.batch, "mini-batch size")
        ->capture_default_str();
    train_detector_cmd->add_option("--max-epochs", train_detector_args.max_epochs, "epoch cap")
        ->capture_default_str();
    train_detector_cmd->add_option("--patience", train_detector_args.patience, "early-stop patience")
        ->capture_default_str();
    train_detector_cmd
        ->add_option("--val-fraction", train_detector_args.val_fraction, "validation slice")
        ->capture_default_str();
    train_detector_cmd->add_option("--seed", train_detector_args.seed, "training seed")
        ->capture_default_str();
    train_detector_cmd->add_option("--out", train_detector_args.out, "checkpoint path")->required();
    train_detector_cmd->add_option("--history", train_detector_args.history, "history csv path");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a detector checkpoint");
    evaluate_cmd->add_option("--model", evaluate_args.model, "detector checkpoint")->required();
    evaluate_cmd->add_option("--test", evaluate_args.test_file, "test split")->required();
    evaluate_cmd->add_option("--tau", evaluate_args.tau, "decision threshold")->capture_default_str();
    evaluate_cmd->add_option("--out", evaluate_args.out, "metrics json (stdout when unset)");
    evaluate_cmd->add_option("--pr", evaluate_args.pr_out, "PR-curve csv path");

    ExperimentArgs experiment_args;
    auto* experiment_cmd =
        app.add_subcommand("experiment", "run the full intra/cross evaluation from a manifest");
    experiment_cmd->add_option("--config", experiment_args.config, "manifest file");
    experiment_cmd->add_option("--mode", experiment_args.mode, "intra, cross or both");
    experiment_cmd->add_option("--workdir", experiment_args.workdir, "artifact directory");
    auto* seed_opt = experiment_cmd->add_option("--seed", experiment_args.seed, "master seed");
    experiment_cmd->add_option("--jobs", experiment_args.jobs, "worker threads");
    experiment_cmd->add_flag("--require-artifacts", experiment_args.require_artifacts,
                             "fail instead of generating missing corpora");

    RougeArgs rouge_args;
    auto* rouge_cmd = app.add_subcommand("rouge", "similarity audit of generated vs source text");
    rouge_cmd->add_option("--generated", rouge_args.generated, "generated corpus jsonl")->required();
    rouge_cmd->add_option("--source", rouge_args.source, "source training split")->required();
    rouge_cmd->add_option("--cap", rouge_args.cap, "sampled candidates (0 = all)")
        ->capture_default_str();
    rouge_cmd->add_option("--seed", rouge_args.seed, "sampling seed")->capture_default_str();
    rouge_cmd->add_option("--jobs", rouge_args.jobs, "worker threads")->capture_default_str();
    rouge_cmd->add_option("--out", rouge_args.out, "report csv")->required();
    rouge_cmd->add_option("--markdown", rouge_args.markdown, "markdown table path");

    AnnotateArgs annotate_args;
    auto* annotate_cmd = app.add_subcommand("annotate", "human evaluation session over a sample");
    annotate_cmd->add_option("--items", annotate_args.items_files, "generated corpora (comma separated)")
        ->required()
        ->delimiter(',');
    annotate_cmd->add_option("--n", annotate_args.n_items, "items to sample")->capture_default_str();
    annotate_cmd->add_option("--overlap", annotate_args.overlap, "co-annotated items")
        ->capture_default_str();
    annotate_cmd->add_option("--annotators", annotate_args.annotators, "annotator ids")
        ->required()
        ->delimiter(',');
    annotate_cmd->add_option("--replay", annotate_args.replay, "replay csv (interactive when unset)");
    annotate_cmd->add_option("--seed", annotate_args.seed, "sampling seed")->capture_default_str();
    annotate_cmd->add_option("--out", annotate_args.out, "report json (stdout when unset)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const auto* cmd = app.get_subcommands().front();
        print_banner(cmd);
        if (cmd == prepare_cmd) return cmd_prepare(prepare);
        if (cmd == train_lm_cmd) return cmd_train_lm(train_lm_args);
        if (cmd == generate_cmd) return cmd_generate(generate_args);
        if (cmd == train_filter_cmd) return cmd_train_filter(train_filter_args);
        if (cmd == filter_cmd) return cmd_filter(filter_args);
        if (cmd == train_detector_cmd) return cmd_train_detector(train_detector_args);
        if (cmd == evaluate_cmd) return cmd_evaluate(evaluate_args);
        if (cmd == experiment_cmd) {
            experiment_args.seed_set = seed_opt->count() > 0;
            return cmd_experiment(experiment_args);
        }
        if (cmd == rouge_cmd) return cmd_rouge(rouge_args);
        if (cmd == annotate_cmd) return cmd_annotate(annotate_args);
        throw UsageError("unknown subcommand");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
