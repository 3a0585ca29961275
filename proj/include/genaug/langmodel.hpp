#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "genaug/corpus.hpp"
#include "genaug/rng.hpp"

namespace genaug {

struct SamplerConfig {
    double temperature = 0.9;
    double top_p = 0.9;
    int max_tokens = 30;
    std::uint64_t seed = 0;
};

struct GeneratedCorpus {
    std::string source_dataset;
    Label class_label = Label::hate;
    std::vector<std::vector<std::string>> sequences;
    std::vector<std::uint64_t> seeds;

    std::size_t size() const { return sequences.size(); }
};

// Order-k additively smoothed n-gram model over a fixed vocabulary.
// Candidate next tokens are the non-special tokens plus EOS; UNK joins the
// candidate set only when the training corpus itself contained UNK, so
// conditionals always sum to 1 over the candidates.
class GenerativeLM {
public:
    GenerativeLM(Vocabulary vocab, int order, double alpha);

    static GenerativeLM train(const Dataset& corpus, const Vocabulary& vocab, int order,
                              double alpha);

    // Full-vocabulary probability vector; zero outside the candidate set.
    // The prefix is truncated to the last `order` ids and BOS-padded.
    std::vector<double> next_distribution(const std::vector<std::int32_t>& prefix_ids) const;

    // Natural log of P(tokens) * P(EOS | tokens); -inf when any step has
    // zero probability (e.g. UNK outside the candidate set).
    double sequence_log_prob(const std::vector<std::string>& tokens) const;
    double sequence_log_prob_ids(const std::vector<std::int32_t>& ids) const;
    // Without the trailing EOS factor (the mass of `ids` as a prefix).
    double prefix_log_prob_ids(const std::vector<std::int32_t>& ids) const;

    std::vector<std::int32_t> sample_ids(const SamplerConfig& config) const;
    std::vector<std::string> sample(const SamplerConfig& config) const;

    const Vocabulary& vocabulary() const { return vocab_; }
    int order() const { return order_; }
    double alpha() const { return alpha_; }
    bool unk_is_candidate() const { return unk_is_candidate_; }
    std::vector<std::int32_t> candidate_ids() const;

    void save(std::ostream& os) const;
    static GenerativeLM load(std::istream& is);
    void save(const std::string& path) const;
    static GenerativeLM load_file(const std::string& path);

private:
    struct VecHash {
        std::size_t operator()(const std::vector<std::int32_t>& v) const noexcept;
    };
    struct ContextCounts {
        std::map<std::int32_t, std::int64_t> next;
        std::int64_t total = 0;
    };

    std::vector<std::int32_t> context_of(const std::vector<std::int32_t>& prefix) const;

    Vocabulary vocab_;
    int order_;
    double alpha_;
    bool unk_is_candidate_ = false;
    std::unordered_map<std::vector<std::int32_t>, ContextCounts, VecHash> counts_;
};

// Temperature first (q_i proportional to p_i^(1/T)), then nucleus: keep the
// smallest prefix of the (prob desc, id asc) order with cumulative mass
// >= top_p, renormalized. Same length as the input, zeros outside the kept set.
std::vector<double> shape_distribution(const std::vector<double>& dist, double temperature,
                                       double top_p);

// Inverse-CDF draw in index order.
int sample_index(const std::vector<double>& dist, Rng& rng);

// count sequences, item i seeded with mix64(config.seed, i); `jobs` threads
// produce byte-identical output to a serial run.
GeneratedCorpus generate_corpus(const GenerativeLM& lm, std::int64_t count,
                                const SamplerConfig& config, int jobs = 1,
                                std::string source_dataset = {}, Label label = Label::hate);

void save_generated_corpus(const GeneratedCorpus& c, const std::string& path);
GeneratedCorpus load_generated_corpus(const std::string& path);

}  // namespace genaug
