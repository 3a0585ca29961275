#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genaug/errors.hpp"

namespace genaug {

enum class Label { hate, non_hate };

std::string_view label_name(Label l);
std::optional<Label> parse_label(std::string_view s);

// Origin metadata. Not part of example identity (operator== ignores it);
// training entry points use test_side to reject held-out data.
struct Provenance {
    std::string origin;
    bool generated = false;
    bool test_side = false;
    std::uint64_t seed = 0;
};

struct LabeledExample {
    std::string text;
    Label label = Label::non_hate;
    Provenance prov;

    friend bool operator==(const LabeledExample& a, const LabeledExample& b) {
        return a.text == b.text && a.label == b.label;
    }
};

struct Dataset {
    std::string name;
    std::vector<LabeledExample> examples;

    std::size_t size() const { return examples.size(); }
    std::size_t count(Label l) const;
    void add(std::string text, Label label, Provenance prov = {});

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.name == b.name && a.examples == b.examples;
    }
};

struct SplitDataset {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double ratio = 0.8;
};

enum class FileFormat { csv, jsonl };

// Infers csv/jsonl from the file extension, defaulting to jsonl.
FileFormat format_from_path(std::string_view path);

Dataset load_dataset(const std::string& path, FileFormat format, const std::string& name);
void save_dataset(const Dataset& d, const std::string& path, FileFormat format);

// Normalization applied to every raw text before tokenization, in order:
// strip emoji, drop standalone "RT" tokens, drop @-mentions, collapse >2
// repeated characters to 2, collapse whitespace. Idempotent and total.
std::string preprocess(std::string_view raw);

// preprocess() every example, dropping those that normalize to empty.
// Returns the cleaned dataset and the dropped count.
std::pair<Dataset, std::size_t> preprocess_dataset(const Dataset& d);

// Lowercased whitespace split with punctuation detached, except '#' and
// word-internal apostrophes.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
public:
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kUnk = 1;
    static constexpr std::int32_t kBos = 2;
    static constexpr std::int32_t kEos = 3;
    static constexpr std::int32_t kNumSpecials = 4;

    Vocabulary();

    // Tokens appearing >= min_count times across the datasets, ids assigned
    // by (count desc, token asc) after the four specials.
    static Vocabulary build(std::span<const Dataset> datasets, int min_count);
    static Vocabulary build(const std::vector<Dataset>& datasets, int min_count);

    std::int32_t id(std::string_view token) const;  // kUnk when absent
    const std::string& token(std::int32_t id) const;
    std::int32_t size() const { return static_cast<std::int32_t>(tokens_.size()); }
    int min_count() const { return min_count_; }

    std::vector<std::int32_t> encode(const std::vector<std::string>& tokens) const;
    std::vector<std::string> decode(const std::vector<std::int32_t>& ids) const;

    void save(std::ostream& os) const;
    static Vocabulary load(std::istream& is);

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.tokens_ == b.tokens_ && a.min_count_ == b.min_count_;
    }

private:
    std::vector<std::string> tokens_;
    std::map<std::string, std::int32_t, std::less<>> ids_;
    int min_count_ = 1;
};

// Seed-keyed uniform permutation; first floor(ratio*|d|) examples form the
// train side, the remainder the test side (marked test_side).
SplitDataset split_dataset(const Dataset& d, double ratio, std::uint64_t seed);

Dataset class_subset(const Dataset& d, Label label);

// All hate train examples plus an equal-size seed-keyed sample of non-hate
// train examples, shuffled. Train sides only.
Dataset balanced_combined(std::span<const SplitDataset> splits, std::uint64_t seed);
Dataset balanced_combined(const std::vector<SplitDataset>& splits, std::uint64_t seed);
Dataset balanced_combined_trains(std::span<const Dataset> trains, std::uint64_t seed);

// Throws LeakageError if any example is marked test_side.
void assert_train_side(const Dataset& d, std::string_view where);

}  // namespace genaug
