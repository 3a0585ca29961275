#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "genaug/annotate.hpp"
#include "genaug/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace genaug;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "genaug_pipeline_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::map<std::string, SplitDataset> toy_splits(std::uint64_t seed) {
    testsupport::SyntheticSpec spec;
    spec.examples = 120;
    auto [a, b] = testsupport::make_synthetic_pair(seed, spec);
    std::map<std::string, SplitDataset> splits;
    splits.emplace("A", split_dataset(a, 0.8, mix64(seed, 1)));
    splits.emplace("B", split_dataset(b, 0.8, mix64(seed, 2)));
    return splits;
}

GenerationPlan toy_plan(std::uint64_t seed) {
    GenerationPlan plan;
    plan.dataset = "A";
    plan.count = 50;
    plan.selection.tau = 0.7;
    plan.selection.top_k = 10;
    plan.sampler.max_tokens = 12;
    plan.filter_target_stage.epochs = 40;
    plan.master_seed = seed;
    return plan;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("run_generation composes the workflow contracts") {
    const auto splits = toy_splits(1);
    const auto plan = toy_plan(7);
    const auto result = run_generation(plan, splits);

    CHECK(result.hate.size() <= 10);
    CHECK(result.non_hate.size() <= 10);
    CHECK(result.hate.class_label == Label::hate);
    CHECK(result.non_hate.class_label == Label::non_hate);
    CHECK(result.hate.source_dataset == "A");
    for (const auto& seq : result.hate.sequences)
        CHECK(result.filter.score(seq) >= plan.selection.tau);
    CHECK(result.log.size() >= 4);

    // rerun with the same master seed: byte-identical corpora
    const auto again = run_generation(plan, splits);
    CHECK(result.hate.sequences == again.hate.sequences);
    CHECK(result.non_hate.sequences == again.non_hate.sequences);
    CHECK(result.hate.seeds == again.hate.seeds);

    // jobs do not change the outcome
    const auto parallel = run_generation(plan, splits, 4);
    CHECK(result.hate.sequences == parallel.hate.sequences);
    CHECK(result.non_hate.sequences == parallel.non_hate.sequences);
}

TEST_CASE("run_generation can leave the non-hate corpus unfiltered") {
    const auto splits = toy_splits(2);
    auto plan = toy_plan(8);
    plan.filter_non_hate = false;
    const auto result = run_generation(plan, splits);
    CHECK(result.non_hate.size() == 10);  // top_k cap still applies, generation order
    CHECK(result.non_hate.seeds[0] == mix64(mix64(plan.master_seed, 0x12), 0));
}

TEST_CASE("run_generation never reads the test side") {
    auto splits = toy_splits(3);
    // poisoning the train side with a test-side example must trip the guard
    auto poisoned = splits;
    auto& train = poisoned.at("A").train;
    auto leaked = poisoned.at("A").test.examples.front();
    train.examples.push_back(leaked);
    CHECK_THROWS_AS(run_generation(toy_plan(1), poisoned), LeakageError);
}

TEST_CASE("augment_training_set caps, tags and shuffles") {
    Dataset base{"base", {}};
    for (int i = 0; i < 100; ++i)
        base.add("b" + std::to_string(i), i < 50 ? Label::hate : Label::non_hate);

    GeneratedCorpus gh;
    gh.source_dataset = "A";
    gh.class_label = Label::hate;
    for (int i = 0; i < 40; ++i) {
        gh.sequences.push_back({"gen", "hate", std::to_string(i)});
        gh.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    GeneratedCorpus gn = gh;
    gn.class_label = Label::non_hate;

    const auto full = augment_training_set(base, gh, gn, 40, 5);
    CHECK(full.data.size() == 180);
    CHECK(full.injected_hate == 40);
    CHECK(full.injected_non_hate == 40);

    const auto capped = augment_training_set(base, gh, gn, 10, 5);
    CHECK(capped.data.size() == 120);

    std::size_t generated = 0;
    for (const auto& e : capped.data.examples) {
        if (e.prov.generated) {
            ++generated;
            CHECK(e.prov.origin == "A");
        }
    }
    CHECK(generated == 20);

    // provenance tags survive jsonl round-trip
    const auto path = (temp_dir() / "aug.jsonl").string();
    save_dataset(capped.data, path, FileFormat::jsonl);
    const auto back = load_dataset(path, FileFormat::jsonl, capped.data.name);
    std::size_t tagged = 0;
    for (const auto& e : back.examples) tagged += e.prov.generated ? 1 : 0;
    CHECK(tagged == 20);
}

TEST_CASE("run_experiment produces paired rows per cell") {
    const auto splits = toy_splits(4);

    CorporaByDataset corpora;
    for (const auto& name : {"A", "B"}) {
        auto plan = toy_plan(11);
        plan.dataset = name;
        plan.selection.top_k = 20;
        auto result = run_generation(plan, splits);
        corpora.emplace(name, std::make_pair(std::move(result.hate), std::move(result.non_hate)));
    }

    ExperimentPlan plan;
    plan.mode = ExperimentMode::both;
    plan.datasets = {"A", "B"};
    plan.include_combined = true;
    plan.detector.embed_dim = 8;
    plan.detector.conv_filters = 4;
    plan.detector.kernel_width = 2;
    plan.detector.pool_width = 2;
    plan.detector.hidden = 4;
    plan.detector.max_len = 10;
    plan.detector.dropout = 0.1;
    plan.train.batch_size = 16;
    plan.train.max_epochs = 2;
    plan.train.patience = 1;
    plan.augment_cap = 10;
    plan.master_seed = 99;

    const auto report = run_experiment(plan, splits, corpora);
    // intra: A, B, combined; cross: A-B, B-A
    REQUIRE(report.cells.size() == 5);
    CHECK(report.cells[0].train_dataset == "A");
    CHECK(report.cells[0].intra);
    CHECK(report.cells[2].train_dataset == "combined");
    CHECK(!report.cells[3].intra);
    for (const auto& cell : report.cells) {
        if (cell.intra) {
            CHECK(cell.baseline.pr.has_value());
            CHECK(cell.augmented.pr.has_value());
        } else {
            CHECK(!cell.baseline.pr.has_value());
        }
        CHECK(cell.baseline.confusion.total() > 0);
        CHECK(cell.augmented.confusion.total() == cell.baseline.confusion.total());
    }

    // deterministic across reruns and jobs
    const auto again = run_experiment(plan, splits, corpora, 4);
    REQUIRE(again.cells.size() == report.cells.size());
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        CHECK(report.cells[i].baseline.metrics.f1 == again.cells[i].baseline.metrics.f1);
        CHECK(report.cells[i].augmented.metrics.recall == again.cells[i].augmented.metrics.recall);
    }
}

TEST_CASE("run_experiment reports missing artifacts by name") {
    const auto splits = toy_splits(5);
    ExperimentPlan plan;
    plan.datasets = {"A", "B"};
    try {
        run_experiment(plan, splits, {});
        FAIL("expected MissingArtifactsError");
    } catch (const MissingArtifactsError& e) {
        const std::string what = e.what();
        CHECK(what.find("corpora:A") != std::string::npos);
        CHECK(what.find("corpora:B") != std::string::npos);
    }
}

TEST_CASE("emit_report round-trips csv and renders the fixture rows") {
    RunReport report;
    report.tau = 0.7;
    ReportCell cell;
    cell.train_dataset = "FN";
    cell.test_dataset = "SE";
    cell.intra = false;
    cell.baseline.metrics = {0.613, 0.689, 0.155, 0.253, false, false, false};
    cell.augmented.metrics = {0.645, 0.570, 0.644, 0.605, false, false, false};
    report.cells.push_back(cell);

    const auto csv_path = (temp_dir() / "report.csv").string();
    const auto files = emit_report(report, ReportFormat::csv, csv_path);
    REQUIRE(files.size() == 1);
    const auto back = load_report_csv(csv_path);
    REQUIRE(back.cells.size() == 1);
    CHECK(back.cells[0].train_dataset == "FN");
    CHECK(back.cells[0].baseline.metrics.recall == doctest::Approx(0.155));
    CHECK(back.cells[0].augmented.metrics.recall == doctest::Approx(0.644));

    const auto md = report_markdown(report);
    CHECK(md.find("FN-SE") != std::string::npos);
    CHECK(md.find("+315.48") != std::string::npos);  // recall relative change

    // golden-file stability: emitting twice gives identical bytes
    const auto md_path = (temp_dir() / "report.md").string();
    emit_report(report, ReportFormat::markdown, md_path);
    const auto first = slurp(md_path);
    emit_report(report, ReportFormat::markdown, md_path);
    CHECK(first == slurp(md_path));
    CHECK(first == md);

    const auto json_path = (temp_dir() / "report.json").string();
    emit_report(report, ReportFormat::json, json_path);
    CHECK(slurp(json_path).find("\"+315.48\"") != std::string::npos);
}

TEST_CASE("pr curve side files are written for intra cells") {
    const auto splits = toy_splits(6);
    CorporaByDataset corpora;
    auto plan = toy_plan(13);
    plan.selection.top_k = 5;
    auto result = run_generation(plan, splits);
    corpora.emplace("A", std::make_pair(result.hate, result.non_hate));

    ExperimentPlan eplan;
    eplan.mode = ExperimentMode::intra;
    eplan.datasets = {"A"};
    eplan.include_combined = false;
    eplan.detector = DetectorConfig{8, 0.0, 4, 2, 2, 4, 10, 0};
    eplan.train.batch_size = 16;
    eplan.train.max_epochs = 1;
    eplan.augment_cap = 5;
    eplan.master_seed = 3;

    const auto report = run_experiment(eplan, splits, corpora);
    const auto csv_path = (temp_dir() / "intra.csv").string();
    const auto files = emit_report(report, ReportFormat::csv, csv_path);
    REQUIRE(files.size() == 3);
    CHECK(fs::exists(files[1]));
    const auto pr_text = slurp(files[1]);
    CHECK(pr_text.rfind("tau,precision,recall\n", 0) == 0);
    CHECK(std::count(pr_text.begin(), pr_text.end(), '\n') == 11);
}

TEST_CASE("annotation session: perfect replay yields unit ratios and kappa") {
    std::vector<AnnotationItem> items;
    for (int i = 0; i < 8; ++i)
        items.push_back({"item " + std::to_string(i), i % 2 ? Label::hate : Label::non_hate});
    const std::vector<std::string> annotators{"ann1", "ann2", "ann3"};

    std::vector<Rating> ratings;
    for (std::size_t i = 0; i < items.size(); ++i)
        for (const auto& a : annotators)
            if (rating_required(i, 4, annotators, a))
                ratings.push_back({a, i, items[i].intended, 5});

    const auto report = annotation_session(items, 4, annotators, ratings);
    CHECK(report.kappa.kappa == 1.0);
    CHECK(report.hate_perceived_ratio == 1.0);
    CHECK(report.non_hate_perceived_ratio == 1.0);
    CHECK(report.mean_quality == 5.0);
    CHECK(report.n_items == 8);
    CHECK(report.overlap == 4);

    const auto json = annotation_report_json(report);
    CHECK(json.find("\"fleiss_kappa\": 1.0") != std::string::npos);
}

TEST_CASE("annotation session validates annotators and coverage") {
    std::vector<AnnotationItem> items{{"x", Label::hate}, {"y", Label::non_hate}};
    CHECK_THROWS_AS(annotation_session(items, 1, {"solo"}, {}), InsufficientAnnotatorsError);
    CHECK_THROWS_AS(annotation_session(items, 2, {"a", "b"}, {}), IncompleteReplayFileError);
}

TEST_CASE("replay file validation names the offending line") {
    const auto path = (temp_dir() / "replay.csv").string();
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << "annotator,item_index,label,quality\n";
        os << "a,0,hate,5\n";
        os << "b,0,hate,9\n";  // quality outside 1..5
    }
    try {
        load_replay(path, 4, {"a", "b"});
        FAIL("expected IncompleteReplayFileError");
    } catch (const IncompleteReplayFileError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("interactive prompt loop collects ratings") {
    std::vector<AnnotationItem> items{{"first", Label::hate}, {"second", Label::non_hate}};
    const std::vector<std::string> annotators{"a", "b"};
    // overlap 1: both rate item 0; item 1 goes to annotator "a"
    std::istringstream in("h\n5\nn\n4\nh\n3\n");
    std::ostringstream out;
    const auto ratings = interactive_ratings(items, 1, annotators, in, out);
    REQUIRE(ratings.size() == 3);
    CHECK(ratings[0].annotator == "a");
    CHECK(ratings[0].label == Label::hate);
    CHECK(ratings[0].quality == 5);
    CHECK(ratings[1].item == 1);
    CHECK(ratings[2].annotator == "b");
    const auto report = annotation_session(items, 1, annotators, ratings);
    CHECK(report.n_items == 2);
}

TEST_CASE("sampled annotation items carry their generating class") {
    GeneratedCorpus hate;
    hate.class_label = Label::hate;
    hate.sequences = {{"h1"}, {"h2"}};
    hate.seeds = {1, 2};
    GeneratedCorpus non;
    non.class_label = Label::non_hate;
    non.sequences = {{"n1"}};
    non.seeds = {3};

    const auto items = sample_annotation_items({hate, non}, 3, 5);
    CHECK(items.size() == 3);
    int hates = 0;
    for (const auto& item : items) hates += item.intended == Label::hate ? 1 : 0;
    CHECK(hates == 2);
}
