#include "genaug/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace genaug {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// sparse token-count features
struct Encoded {
    std::vector<std::pair<std::int32_t, double>> counts;
    double y = 0.0;
};

std::vector<Encoded> encode_corpus(const Dataset& corpus, const Vocabulary& vocab) {
    std::vector<Encoded> out;
    out.reserve(corpus.size());
    std::vector<double> dense(static_cast<std::size_t>(vocab.size()), 0.0);
    for (const auto& e : corpus.examples) {
        Encoded enc;
        enc.y = e.label == Label::hate ? 1.0 : 0.0;
        for (auto id : vocab.encode(tokenize(e.text))) dense[static_cast<std::size_t>(id)] += 1.0;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i] != 0.0) {
                enc.counts.emplace_back(static_cast<std::int32_t>(i), dense[i]);
                dense[i] = 0.0;
            }
        }
        out.push_back(std::move(enc));
    }
    return out;
}

double dot_score(const Encoded& enc, const std::vector<double>& w, double b) {
    double s = b;
    for (const auto& [id, c] : enc.counts) s += w[static_cast<std::size_t>(id)] * c;
    return s;
}

}  // namespace

FilterClassifier::FilterClassifier(Vocabulary vocab, std::vector<double> weights, double bias)
    : vocab_(std::move(vocab)), weights_(std::move(weights)), bias_(bias) {}

FilterClassifier FilterClassifier::train(const StagedTrainingPlan& plan) {
    assert_train_side(plan.target, "train_filter");
    if (plan.pretrain) assert_train_side(*plan.pretrain, "train_filter");
    if (plan.target.count(Label::hate) == 0 || plan.target.count(Label::non_hate) == 0)
        throw SingleClassCorpusError("train_filter: target corpus must contain both classes");

    std::vector<Dataset> vocab_sources;
    if (plan.pretrain) vocab_sources.push_back(*plan.pretrain);
    vocab_sources.push_back(plan.target);

    FilterClassifier f;
    f.vocab_ = Vocabulary::build(vocab_sources, plan.vocab_min_count);
    f.weights_.assign(static_cast<std::size_t>(f.vocab_.size()), 0.0);
    f.bias_ = 0.0;

    const auto run_stage = [&](const Dataset& corpus, const FilterStageParams& params,
                               const std::string& name) {
        const auto data = encode_corpus(corpus, f.vocab_);
        const auto n = static_cast<double>(data.size());
        FilterStageHistory hist{name, {}};
        std::vector<double> grad(f.weights_.size(), 0.0);
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            double loss = 0.0;
            for (const auto& enc : data) {
                const double p = sigmoid(dot_score(enc, f.weights_, f.bias_));
                const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
                loss += -(enc.y * std::log(pc) + (1.0 - enc.y) * std::log(1.0 - pc));
                const double g = p - enc.y;
                for (const auto& [id, c] : enc.counts) grad[static_cast<std::size_t>(id)] += g * c;
                grad_b += g;
            }
            double w_norm_sq = 0.0;
            for (double w : f.weights_) w_norm_sq += w * w;
            hist.losses.push_back(loss / n + 0.5 * params.l2 * w_norm_sq);

            for (std::size_t i = 0; i < f.weights_.size(); ++i)
                f.weights_[i] -= params.learning_rate * (grad[i] / n + params.l2 * f.weights_[i]);
            f.bias_ -= params.learning_rate * grad_b / n;
        }
        f.history_.push_back(std::move(hist));
    };

    if (plan.pretrain) {
        if (plan.pretrain->count(Label::hate) == 0 || plan.pretrain->count(Label::non_hate) == 0)
            throw SingleClassCorpusError("train_filter: pretrain corpus must contain both classes");
        run_stage(*plan.pretrain, plan.pretrain_stage, "pretrain");
    }
    run_stage(plan.target, plan.target_stage, "target");
    return f;
}

double FilterClassifier::score_ids(const std::vector<std::int32_t>& ids) const {
    double s = bias_;
    for (auto id : ids) {
        if (id < 0 || id >= vocab_.size()) throw TokenIdOutOfRangeError(id, vocab_.size());
        s += weights_[static_cast<std::size_t>(id)];
    }
    return sigmoid(s);
}

double FilterClassifier::score(const std::vector<std::string>& tokens) const {
    return score_ids(vocab_.encode(tokens));
}

std::pair<GeneratedCorpus, SelectionReport> filter_and_select(const GeneratedCorpus& corpus,
                                                              const FilterClassifier& filter,
                                                              Label target_class,
                                                              const SelectionConfig& cfg) {
    if (!(cfg.tau >= 0.0 && cfg.tau <= 1.0)) throw UsageError("selection tau must be in [0,1]");
    if (cfg.top_k < 1) throw UsageError("selection top_k must be >= 1");

    SelectionReport report;
    report.input_count = corpus.size();
    report.scores.resize(corpus.size());
    report.retained_mask.assign(corpus.size(), false);

    std::vector<std::pair<double, std::size_t>> kept;  // (confidence, original index)
    for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
        const double p_hate = filter.score(corpus.sequences[i]);
        const double conf = target_class == Label::hate ? p_hate : 1.0 - p_hate;
        report.scores[i] = conf;
        const auto bin = std::min<std::size_t>(19, static_cast<std::size_t>(conf * 20.0));
        ++report.histogram[bin];
        if (conf >= cfg.tau) kept.emplace_back(conf, i);
    }
    report.above_threshold = kept.size();

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (kept.size() > static_cast<std::size_t>(cfg.top_k))
        kept.resize(static_cast<std::size_t>(cfg.top_k));

    GeneratedCorpus out;
    out.source_dataset = corpus.source_dataset;
    out.class_label = corpus.class_label;
    out.sequences.reserve(kept.size());
    out.seeds.reserve(kept.size());
    for (const auto& [conf, idx] : kept) {
        out.sequences.push_back(corpus.sequences[idx]);
        out.seeds.push_back(corpus.seeds[idx]);
        report.retained_mask[idx] = true;
    }
    report.retained = kept.size();
    report.empty_warning = kept.empty();
    return {std::move(out), std::move(report)};
}

void save_selection_report(const SelectionReport& r, const GeneratedCorpus& corpus,
                           const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    os << "index,text,score,retained\n";
    char buf[32];
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
        std::string text;
        for (std::size_t t = 0; t < corpus.sequences[i].size(); ++t) {
            if (t) text.push_back(' ');
            text += corpus.sequences[i][t];
        }
        std::string quoted = "\"";
        for (char c : text) {
            if (c == '"') quoted += "\"\"";
            else quoted.push_back(c);
        }
        quoted.push_back('"');
        std::snprintf(buf, sizeof(buf), "%.6f", r.scores[i]);
        os << i << ',' << quoted << ',' << buf << ',' << (r.retained_mask[i] ? 1 : 0) << '\n';
    }
}

double filter_loss(const Dataset& corpus, const Vocabulary& vocab,
                   const std::vector<double>& weights, double bias, double l2) {
    const auto data = encode_corpus(corpus, vocab);
    double loss = 0.0;
    for (const auto& enc : data) {
        const double p = std::clamp(sigmoid(dot_score(enc, weights, bias)), 1e-12, 1.0 - 1e-12);
        loss += -(enc.y * std::log(p) + (1.0 - enc.y) * std::log(1.0 - p));
    }
    double w_norm_sq = 0.0;
    for (double w : weights) w_norm_sq += w * w;
    return loss / static_cast<double>(data.size()) + 0.5 * l2 * w_norm_sq;
}

void filter_gradient(const Dataset& corpus, const Vocabulary& vocab,
                     const std::vector<double>& weights, double bias, double l2,
                     std::vector<double>& grad_w, double& grad_b) {
    const auto data = encode_corpus(corpus, vocab);
    grad_w.assign(weights.size(), 0.0);
    grad_b = 0.0;
    for (const auto& enc : data) {
        const double g = sigmoid(dot_score(enc, weights, bias)) - enc.y;
        for (const auto& [id, c] : enc.counts) grad_w[static_cast<std::size_t>(id)] += g * c;
        grad_b += g;
    }
    const auto n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < grad_w.size(); ++i) grad_w[i] = grad_w[i] / n + l2 * weights[i];
    grad_b /= n;
}

void FilterClassifier::save(std::ostream& os) const {
    os << "genaug-filter 1\n";
    vocab_.save(os);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", bias_);
    os << "bias " << buf << '\n';
    os << "weights " << weights_.size() << '\n';
    for (double w : weights_) {
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        os << buf << '\n';
    }
}

FilterClassifier FilterClassifier::load(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "genaug-filter" || version != 1) throw IoError("bad filter header");
    is.ignore();
    FilterClassifier f;
    f.vocab_ = Vocabulary::load(is);
    std::size_t n = 0;
    is >> tag >> f.bias_;
    if (tag != "bias") throw IoError("bad filter: bias");
    is >> tag >> n;
    if (tag != "weights") throw IoError("bad filter: weights");
    f.weights_.resize(n);
    for (auto& w : f.weights_)
        if (!(is >> w)) throw IoError("truncated filter weights");
    return f;
}

void FilterClassifier::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    save(os);
}

FilterClassifier FilterClassifier::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    return load(is);
}

}  // namespace genaug
