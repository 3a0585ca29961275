#include <doctest.h>

#include <cmath>
#include <sstream>

#include "genaug/filter.hpp"
#include "genaug/rng.hpp"

using namespace genaug;

namespace {

// two disjoint marker tokens, trivially separable
Dataset separable_corpus(int per_class) {
    Dataset d{"sep", {}};
    for (int i = 0; i < per_class; ++i) {
        d.add("bad awful t" + std::to_string(i), Label::hate);
        d.add("good fine t" + std::to_string(i), Label::non_hate);
    }
    return d;
}

GeneratedCorpus corpus_from(std::vector<std::vector<std::string>> seqs) {
    GeneratedCorpus c;
    c.source_dataset = "sep";
    c.class_label = Label::hate;
    c.seeds.resize(seqs.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) c.seeds[i] = i;
    c.sequences = std::move(seqs);
    return c;
}

}  // namespace

TEST_CASE("train_filter reaches full accuracy on a separable corpus") {
    StagedTrainingPlan plan;
    plan.target = separable_corpus(20);
    plan.target_stage.epochs = 150;
    plan.target_stage.learning_rate = 0.5;
    plan.target_stage.l2 = 1e-6;
    const auto f = train_filter(plan);

    int correct = 0;
    for (const auto& e : plan.target.examples) {
        const double p = f.score(tokenize(e.text));
        correct += ((p > 0.5) == (e.label == Label::hate)) ? 1 : 0;
    }
    CHECK(correct == static_cast<int>(plan.target.size()));
    CHECK(f.history().size() == 1);
}

TEST_CASE("pretrain stage runs first and is recorded") {
    StagedTrainingPlan plan;
    plan.pretrain = separable_corpus(5);
    plan.pretrain->name = "sentiment";
    plan.target = separable_corpus(10);
    plan.pretrain_stage.epochs = 3;
    plan.target_stage.epochs = 4;
    const auto f = train_filter(plan);
    REQUIRE(f.history().size() == 2);
    CHECK(f.history()[0].stage == "pretrain");
    CHECK(f.history()[0].losses.size() == 3);
    CHECK(f.history()[1].stage == "target");
    CHECK(f.history()[1].losses.size() == 4);
}

TEST_CASE("single-class target is rejected") {
    StagedTrainingPlan plan;
    plan.target.name = "one";
    plan.target.add("only hate", Label::hate);
    CHECK_THROWS_AS(train_filter(plan), SingleClassCorpusError);
}

TEST_CASE("score is a probability, and sigmoid(bias) on empty input") {
    Dataset d{"b", {}};
    d.add("x", Label::hate);
    d.add("y", Label::non_hate);
    FilterClassifier f(Vocabulary::build({d}, 1), {0.0, 0.0, 0.0, 0.0, 0.5, -0.5}, 0.25);

    CHECK(f.score({}) == doctest::Approx(1.0 / (1.0 + std::exp(-0.25))).epsilon(1e-12));
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::string> tokens;
        for (std::uint64_t i = 0, n = rng.bounded(6); i < n; ++i)
            tokens.push_back(rng.bounded(2) ? "x" : "y");
        const double p = f.score(tokens);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("score increases strictly with the count of a positive marker") {
    Dataset d{"m", {}};
    d.add("marker", Label::hate);
    d.add("other", Label::non_hate);
    const auto vocab = Vocabulary::build({d}, 1);
    std::vector<double> w(static_cast<std::size_t>(vocab.size()), 0.0);
    w[static_cast<std::size_t>(vocab.id("marker"))] = 0.8;
    FilterClassifier f(vocab, w, -0.1);

    double prev = 0.0;
    for (int count = 0; count <= 6; ++count) {
        const double p = f.score(std::vector<std::string>(static_cast<std::size_t>(count), "marker"));
        if (count > 0) CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("filter gradient matches central finite differences") {
    const auto corpus = separable_corpus(6);
    const auto vocab = Vocabulary::build({corpus}, 1);
    const double l2 = 1e-3;

    Rng rng(77);
    std::vector<double> w(static_cast<std::size_t>(vocab.size()));
    for (auto& x : w) x = rng.next_double() - 0.5;
    const double b = 0.3;

    std::vector<double> grad_w;
    double grad_b = 0.0;
    filter_gradient(corpus, vocab, w, b, l2, grad_w, grad_b);

    const double h = 1e-6;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        const double numeric =
            (filter_loss(corpus, vocab, wp, b, l2) - filter_loss(corpus, vocab, wm, b, l2)) / (2 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grad_w[i]), 1e-8});
        CHECK(std::abs(numeric - grad_w[i]) / denom < 1e-6);
    }
    const double numeric_b =
        (filter_loss(corpus, vocab, w, b + h, l2) - filter_loss(corpus, vocab, w, b - h, l2)) / (2 * h);
    CHECK(std::abs(numeric_b - grad_b) / std::max({std::abs(numeric_b), std::abs(grad_b), 1e-8}) < 1e-6);
}

TEST_CASE("training loss is non-increasing for a small learning rate") {
    StagedTrainingPlan plan;
    plan.target = separable_corpus(10);
    plan.target_stage.epochs = 60;
    plan.target_stage.learning_rate = 0.05;
    plan.target_stage.l2 = 1e-4;
    const auto f = train_filter(plan);
    const auto& losses = f.history().back().losses;
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-6);
}

TEST_CASE("filter_and_select thresholds, sorts, caps") {
    Dataset d{"f", {}};
    d.add("bad", Label::hate);
    d.add("good", Label::non_hate);
    const auto vocab = Vocabulary::build({d}, 1);
    std::vector<double> w(static_cast<std::size_t>(vocab.size()), 0.0);
    w[static_cast<std::size_t>(vocab.id("bad"))] = 2.0;
    w[static_cast<std::size_t>(vocab.id("good"))] = -2.0;
    FilterClassifier f(vocab, w, 0.0);

    // scores: 3x bad ~ 0.997, 1x bad ~ 0.88, 1x good ~ 0.12
    auto corpus = corpus_from({{"bad"}, {"good"}, {"bad", "bad", "bad"}});
    SelectionConfig cfg{0.7, 2};
    const auto [kept, report] = filter_and_select(corpus, f, Label::hate, cfg);
    REQUIRE(kept.size() == 2);
    CHECK(kept.sequences[0] == std::vector<std::string>{"bad", "bad", "bad"});
    CHECK(kept.sequences[1] == std::vector<std::string>{"bad"});
    CHECK(kept.seeds == std::vector<std::uint64_t>{2, 0});
    CHECK(report.input_count == 3);
    CHECK(report.above_threshold == 2);
    CHECK(report.retained == 2);
    CHECK(!report.empty_warning);

    // all below threshold: legal empty output, flagged
    auto weak = corpus_from({{"good"}, {"good"}});
    const auto [none, warn_report] = filter_and_select(weak, f, Label::hate, cfg);
    CHECK(none.size() == 0);
    CHECK(warn_report.empty_warning);

    // non-hate selection scores 1 - P(hate)
    const auto [non, non_report] = filter_and_select(weak, f, Label::non_hate, cfg);
    CHECK(non.size() == 2);
}

TEST_CASE("filter_and_select is idempotent and respects the threshold, property-style") {
    Dataset d{"f", {}};
    d.add("bad", Label::hate);
    d.add("good", Label::non_hate);
    const auto vocab = Vocabulary::build({d}, 1);

    Rng rng(919);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w(static_cast<std::size_t>(vocab.size()), 0.0);
        w[static_cast<std::size_t>(vocab.id("bad"))] = rng.next_double() * 4.0 - 1.0;
        w[static_cast<std::size_t>(vocab.id("good"))] = rng.next_double() * 2.0 - 1.0;
        FilterClassifier f(vocab, w, rng.next_double() - 0.5);

        std::vector<std::vector<std::string>> seqs;
        for (std::uint64_t i = 0, n = 1 + rng.bounded(40); i < n; ++i) {
            std::vector<std::string> s;
            for (std::uint64_t t = 0, m = rng.bounded(5); t < m; ++t)
                s.push_back(rng.bounded(2) ? "bad" : "good");
            seqs.push_back(std::move(s));
        }
        auto corpus = corpus_from(std::move(seqs));
        SelectionConfig cfg{0.7, static_cast<std::int64_t>(1 + rng.bounded(20))};

        const auto [kept, report] = filter_and_select(corpus, f, Label::hate, cfg);
        CHECK(kept.size() <= static_cast<std::size_t>(cfg.top_k));
        double prev = 1.0;
        for (const auto& seq : kept.sequences) {
            const double conf = f.score(seq);
            CHECK(conf >= cfg.tau);
            CHECK(conf <= prev + 1e-15);
            prev = conf;
        }
        const auto [again, report2] = filter_and_select(kept, f, Label::hate, cfg);
        CHECK(again.sequences == kept.sequences);
        CHECK(again.seeds == kept.seeds);
    }
}

TEST_CASE("filter io round-trips") {
    StagedTrainingPlan plan;
    plan.target = separable_corpus(5);
    plan.target_stage.epochs = 10;
    const auto f = train_filter(plan);
    std::stringstream ss;
    f.save(ss);
    const auto back = FilterClassifier::load(ss);
    CHECK(back.bias() == f.bias());
    CHECK(back.weights() == f.weights());
    CHECK(back.score({"bad", "awful"}) == f.score({"bad", "awful"}));
}
