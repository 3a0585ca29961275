#include "genaug/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace genaug {

using json = nlohmann::json;

std::size_t GenerativeLM::VecHash::operator()(const std::vector<std::int32_t>& v) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::int32_t x : v) {
        h ^= static_cast<std::uint32_t>(x);
        h *= 0x100000001B3ULL;
    }
    return static_cast<std::size_t>(h);
}

GenerativeLM::GenerativeLM(Vocabulary vocab, int order, double alpha)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha) {
    if (order_ < 1) throw UsageError("n-gram order must be >= 1");
    if (!(alpha_ > 0.0)) throw UsageError("smoothing alpha must be > 0");
}

GenerativeLM GenerativeLM::train(const Dataset& corpus, const Vocabulary& vocab, int order,
                                 double alpha) {
    if (corpus.size() == 0) throw EmptyCorpusError("train_lm: empty corpus");
    assert_train_side(corpus, "train_lm");

    GenerativeLM lm(vocab, order, alpha);

    std::vector<std::vector<std::int32_t>> encoded;
    encoded.reserve(corpus.size());
    bool has_unk = false;
    for (const auto& e : corpus.examples) {
        auto ids = vocab.encode(tokenize(e.text));
        for (auto id : ids) has_unk = has_unk || id == Vocabulary::kUnk;
        encoded.push_back(std::move(ids));
    }
    lm.unk_is_candidate_ = has_unk;

    std::vector<std::int32_t> ctx;
    for (const auto& ids : encoded) {
        ctx.assign(static_cast<std::size_t>(order), Vocabulary::kBos);
        const auto step = [&](std::int32_t next) {
            auto& cc = lm.counts_[ctx];
            ++cc.next[next];
            ++cc.total;
            ctx.erase(ctx.begin());
            ctx.push_back(next);
        };
        for (auto id : ids) step(id);
        step(Vocabulary::kEos);
    }
    return lm;
}

std::vector<std::int32_t> GenerativeLM::candidate_ids() const {
    std::vector<std::int32_t> out;
    out.reserve(static_cast<std::size_t>(vocab_.size()));
    if (unk_is_candidate_) out.push_back(Vocabulary::kUnk);
    out.push_back(Vocabulary::kEos);
    for (std::int32_t id = Vocabulary::kNumSpecials; id < vocab_.size(); ++id) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int32_t> GenerativeLM::context_of(const std::vector<std::int32_t>& prefix) const {
    std::vector<std::int32_t> ctx(static_cast<std::size_t>(order_), Vocabulary::kBos);
    const std::size_t k = std::min(prefix.size(), static_cast<std::size_t>(order_));
    for (std::size_t i = 0; i < k; ++i)
        ctx[static_cast<std::size_t>(order_) - k + i] = prefix[prefix.size() - k + i];
    return ctx;
}

std::vector<double> GenerativeLM::next_distribution(const std::vector<std::int32_t>& prefix_ids) const {
    for (auto id : prefix_ids)
        if (id < 0 || id >= vocab_.size()) throw TokenIdOutOfRangeError(id, vocab_.size());

    const auto cands = candidate_ids();
    const auto v = static_cast<double>(cands.size());
    std::vector<double> dist(static_cast<std::size_t>(vocab_.size()), 0.0);

    const auto it = counts_.find(context_of(prefix_ids));
    if (it == counts_.end()) {
        const double u = 1.0 / v;
        for (auto id : cands) dist[static_cast<std::size_t>(id)] = u;
        return dist;
    }
    const auto& cc = it->second;
    const double denom = static_cast<double>(cc.total) + alpha_ * v;
    for (auto id : cands) {
        const auto nit = cc.next.find(id);
        const double count = nit == cc.next.end() ? 0.0 : static_cast<double>(nit->second);
        dist[static_cast<std::size_t>(id)] = (count + alpha_) / denom;
    }
    return dist;
}

double GenerativeLM::prefix_log_prob_ids(const std::vector<std::int32_t>& ids) const {
    double lp = 0.0;
    std::vector<std::int32_t> prefix;
    prefix.reserve(ids.size());
    for (auto id : ids) {
        const auto dist = next_distribution(prefix);
        const double p = dist[static_cast<std::size_t>(id)];
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        lp += std::log(p);
        prefix.push_back(id);
    }
    return lp;
}

double GenerativeLM::sequence_log_prob_ids(const std::vector<std::int32_t>& ids) const {
    const double lp = prefix_log_prob_ids(ids);
    if (std::isinf(lp)) return lp;
    const auto dist = next_distribution(ids);
    const double p_eos = dist[Vocabulary::kEos];
    if (p_eos <= 0.0) return -std::numeric_limits<double>::infinity();
    return lp + std::log(p_eos);
}

double GenerativeLM::sequence_log_prob(const std::vector<std::string>& tokens) const {
    return sequence_log_prob_ids(vocab_.encode(tokens));
}

std::vector<double> shape_distribution(const std::vector<double>& dist, double temperature,
                                       double top_p) {
    if (!(temperature > 0.0)) throw UsageError("temperature must be > 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw UsageError("top_p must be in (0,1]");

    const std::size_t n = dist.size();
    std::vector<double> shaped(n, 0.0);

    // temperature via logs to keep p^(1/T) stable for small T
    std::vector<double> q(n, 0.0);
    if (temperature == 1.0) {
        q = dist;
    } else {
        double max_l = -std::numeric_limits<double>::infinity();
        std::vector<double> logs(n, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            if (dist[i] > 0.0) {
                logs[i] = std::log(dist[i]) / temperature;
                max_l = std::max(max_l, logs[i]);
            }
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (dist[i] > 0.0) {
                q[i] = std::exp(logs[i] - max_l);
                sum += q[i];
            }
        }
        for (auto& x : q) x /= sum;
    }

    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (q[i] > 0.0) order.push_back(i);
    if (order.empty()) throw UsageError("shape_distribution: distribution has no mass");
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (q[a] != q[b]) return q[a] > q[b];
        return a < b;
    });

    double kept_mass = 0.0;
    std::size_t kept = order.size();  // rounding may leave the cumsum below top_p
    for (std::size_t k = 0; k < order.size(); ++k) {
        kept_mass += q[order[k]];
        if (kept_mass >= top_p) {
            kept = k + 1;
            break;
        }
    }

    for (std::size_t k = 0; k < kept; ++k) {
        const std::size_t i = order[k];
        shaped[i] = q[i] / kept_mass;
    }
    return shaped;
}

int sample_index(const std::vector<double>& dist, Rng& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] <= 0.0) continue;
        cum += dist[i];
        last_positive = static_cast<int>(i);
        if (u < cum) return last_positive;
    }
    return last_positive;  // rounding left u >= cum; take the last support point
}

std::vector<std::int32_t> GenerativeLM::sample_ids(const SamplerConfig& config) const {
    if (config.max_tokens < 1) throw UsageError("max_tokens must be >= 1");
    Rng rng(config.seed);
    std::vector<std::int32_t> out;
    out.reserve(static_cast<std::size_t>(config.max_tokens));
    for (int t = 0; t < config.max_tokens; ++t) {
        const auto shaped =
            shape_distribution(next_distribution(out), config.temperature, config.top_p);
        const int id = sample_index(shaped, rng);
        if (id == Vocabulary::kEos || id < 0) break;
        out.push_back(static_cast<std::int32_t>(id));
    }
    return out;
}

std::vector<std::string> GenerativeLM::sample(const SamplerConfig& config) const {
    return vocab_.decode(sample_ids(config));
}

GeneratedCorpus generate_corpus(const GenerativeLM& lm, std::int64_t count,
                                const SamplerConfig& config, int jobs,
                                std::string source_dataset, Label label) {
    if (count < 1) throw UsageError("generation count must be >= 1");

    GeneratedCorpus corpus;
    corpus.source_dataset = std::move(source_dataset);
    corpus.class_label = label;
    corpus.sequences.resize(static_cast<std::size_t>(count));
    corpus.seeds.resize(static_cast<std::size_t>(count));

    const auto fill = [&](std::int64_t lo, std::int64_t hi) {
        SamplerConfig item = config;
        for (std::int64_t i = lo; i < hi; ++i) {
            item.seed = mix64(config.seed, static_cast<std::uint64_t>(i));
            corpus.seeds[static_cast<std::size_t>(i)] = item.seed;
            corpus.sequences[static_cast<std::size_t>(i)] = lm.sample(item);
        }
    };

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1) {
        fill(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (count + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
            const std::int64_t hi = std::min<std::int64_t>(count, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(fill, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return corpus;
}

void GenerativeLM::save(std::ostream& os) const {
    os << "genaug-lm 1\n";
    os << "order " << order_ << '\n';
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", alpha_);
    os << "alpha " << buf << '\n';
    os << "unk_candidate " << (unk_is_candidate_ ? 1 : 0) << '\n';
    vocab_.save(os);

    std::vector<const std::vector<std::int32_t>*> keys;
    keys.reserve(counts_.size());
    for (const auto& [ctx, cc] : counts_) keys.push_back(&ctx);
    std::sort(keys.begin(), keys.end(),
              [](const auto* a, const auto* b) { return *a < *b; });

    os << "contexts " << keys.size() << '\n';
    for (const auto* key : keys) {
        for (std::size_t i = 0; i < key->size(); ++i) os << (i ? " " : "") << (*key)[i];
        os << " :";
        for (const auto& [tok, cnt] : counts_.at(*key).next) os << ' ' << tok << ' ' << cnt;
        os << '\n';
    }
}

GenerativeLM GenerativeLM::load(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "genaug-lm" || version != 1) throw IoError("bad language model header");

    int order = 0;
    double alpha = 0.0;
    int unk = 0;
    is >> tag >> order;
    if (tag != "order") throw IoError("bad language model: order");
    is >> tag >> alpha;
    if (tag != "alpha") throw IoError("bad language model: alpha");
    is >> tag >> unk;
    if (tag != "unk_candidate") throw IoError("bad language model: unk_candidate");
    is.ignore();

    Vocabulary vocab = Vocabulary::load(is);
    GenerativeLM lm(std::move(vocab), order, alpha);
    lm.unk_is_candidate_ = unk != 0;

    std::size_t n_contexts = 0;
    is >> tag >> n_contexts;
    if (tag != "contexts") throw IoError("bad language model: contexts");
    is.ignore();

    std::string line;
    for (std::size_t i = 0; i < n_contexts; ++i) {
        if (!std::getline(is, line)) throw IoError("truncated language model");
        std::istringstream ls(line);
        std::vector<std::int32_t> ctx;
        std::string item;
        while (ls >> item && item != ":") ctx.push_back(std::stoi(item));
        ContextCounts cc;
        std::int32_t tok;
        std::int64_t cnt;
        while (ls >> tok >> cnt) {
            cc.next[tok] = cnt;
            cc.total += cnt;
        }
        lm.counts_.emplace(std::move(ctx), std::move(cc));
    }
    return lm;
}

void GenerativeLM::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    save(os);
    if (!os) throw IoError("failed writing " + path);
}

GenerativeLM GenerativeLM::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    return load(is);
}

void save_generated_corpus(const GeneratedCorpus& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    for (std::size_t i = 0; i < c.sequences.size(); ++i) {
        json obj;
        obj["tokens"] = c.sequences[i];
        std::string text;
        for (std::size_t t = 0; t < c.sequences[i].size(); ++t) {
            if (t) text.push_back(' ');
            text += c.sequences[i][t];
        }
        obj["text"] = text;
        obj["seed"] = c.seeds[i];
        obj["source"] = c.source_dataset;
        obj["label"] = std::string(label_name(c.class_label));
        os << obj.dump() << '\n';
    }
    if (!os) throw IoError("failed writing " + path);
}

GeneratedCorpus load_generated_corpus(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    GeneratedCorpus c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.contains("tokens") || !obj["tokens"].is_array())
            throw MalformedRowError(line_no, "expected object with \"tokens\" array");
        c.sequences.push_back(obj["tokens"].get<std::vector<std::string>>());
        c.seeds.push_back(obj.value("seed", std::uint64_t{0}));
        if (line_no == 1) {
            c.source_dataset = obj.value("source", std::string{});
            const auto label = parse_label(obj.value("label", "hate"));
            c.class_label = label.value_or(Label::hate);
        }
    }
    return c;
}

}  // namespace genaug
