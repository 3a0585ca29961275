#include "genaug/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "genaug/rng.hpp"
#include "genaug/unicode.hpp"

namespace genaug {

using json = nlohmann::json;

std::string_view label_name(Label l) {
    return l == Label::hate ? "hate" : "non-hate";
}

std::optional<Label> parse_label(std::string_view s) {
    if (s == "hate") return Label::hate;
    if (s == "non-hate") return Label::non_hate;
    return std::nullopt;
}

std::size_t Dataset::count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(examples.begin(), examples.end(),
                      [l](const LabeledExample& e) { return e.label == l; }));
}

void Dataset::add(std::string text, Label label, Provenance prov) {
    examples.push_back({std::move(text), label, std::move(prov)});
}

FileFormat format_from_path(std::string_view path) {
    const auto dot = path.rfind('.');
    if (dot != std::string_view::npos) {
        auto ext = path.substr(dot + 1);
        if (ext == "csv") return FileFormat::csv;
    }
    return FileFormat::jsonl;
}

namespace {

// RFC 4180 field splitting; returns false on an unterminated quote.
bool split_csv_row(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) return false;
    fields.push_back(std::move(cur));
    return true;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

Dataset load_csv(std::istream& is, const std::string& name) {
    Dataset d{name, {}};
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    if (!std::getline(is, line)) throw MalformedRowError(1, "empty file, expected header text,label");
    ++line_no;
    line = strip_cr(line);
    if (!line.empty() && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
        line = line.substr(3);  // UTF-8 BOM
    if (line != "text,label")
        throw MalformedRowError(1, "expected header \"text,label\", got \"" + line + "\"");
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (!split_csv_row(line, fields))
            throw MalformedRowError(line_no, "unterminated quote");
        if (fields.size() != 2)
            throw MalformedRowError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        const auto label = parse_label(fields[1]);
        if (!label) throw UnknownLabelError(fields[1], line_no);
        d.add(fields[0], *label, Provenance{name, false, false, 0});
    }
    return d;
}

Dataset load_jsonl(std::istream& is, const std::string& name) {
    Dataset d{name, {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw MalformedRowError(line_no, "invalid json object");
        if (!obj.contains("text") || !obj["text"].is_string())
            throw MalformedRowError(line_no, "missing string field \"text\"");
        if (!obj.contains("label") || !obj["label"].is_string())
            throw MalformedRowError(line_no, "missing string field \"label\"");
        const auto label = parse_label(obj["label"].get<std::string>());
        if (!label) throw UnknownLabelError(obj["label"].get<std::string>(), line_no);
        Provenance prov{name, false, false, 0};
        if (obj.contains("generated") && obj["generated"].is_boolean())
            prov.generated = obj["generated"].get<bool>();
        if (obj.contains("source") && obj["source"].is_string())
            prov.origin = obj["source"].get<std::string>();
        if (obj.contains("seed") && obj["seed"].is_number_unsigned())
            prov.seed = obj["seed"].get<std::uint64_t>();
        d.add(obj["text"].get<std::string>(), *label, std::move(prov));
    }
    return d;
}

}  // namespace

Dataset load_dataset(const std::string& path, FileFormat format, const std::string& name) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    return format == FileFormat::csv ? load_csv(is, name) : load_jsonl(is, name);
}

void save_dataset(const Dataset& d, const std::string& path, FileFormat format) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    if (format == FileFormat::csv) {
        os << "text,label\n";
        for (const auto& e : d.examples)
            os << csv_escape(e.text) << ',' << label_name(e.label) << '\n';
    } else {
        for (const auto& e : d.examples) {
            json obj;
            obj["text"] = e.text;
            obj["label"] = std::string(label_name(e.label));
            if (e.prov.generated) {
                obj["generated"] = true;
                obj["source"] = e.prov.origin;
                obj["seed"] = e.prov.seed;
            }
            os << obj.dump() << '\n';
        }
    }
    if (!os) throw IoError("failed writing " + path);
}

std::string preprocess(std::string_view raw) {
    auto cps = uni::decode(raw);

    // 1) strip emoji / symbol codepoints
    std::vector<char32_t> kept;
    kept.reserve(cps.size());
    for (char32_t cp : cps)
        if (!uni::is_emoji(cp)) kept.push_back(cp);

    // 2)+3) drop standalone RT tokens and @-mentions
    std::vector<std::vector<char32_t>> words;
    std::vector<char32_t> word;
    const auto flush = [&] {
        if (word.empty()) return;
        const bool is_rt = word.size() == 2 && word[0] == U'R' && word[1] == U'T';
        const bool is_mention = word[0] == U'@';
        if (!is_rt && !is_mention) words.push_back(word);
        word.clear();
    };
    for (char32_t cp : kept) {
        if (uni::is_whitespace(cp)) flush();
        else word.push_back(cp);
    }
    flush();

    // 4) collapse runs of >2 identical letters/digits to exactly 2
    //    (punctuation runs like "***" stay as written)
    // 5) rejoin with single spaces (trims and collapses whitespace)
    const auto collapsible = [](char32_t cp) {
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
               (cp >= U'0' && cp <= U'9') || cp >= 0x80;
    };
    std::vector<char32_t> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) out.push_back(U' ');
        const auto& cs = words[w];
        std::size_t run = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            run = (i > 0 && cs[i] == cs[i - 1]) ? run + 1 : 1;
            if (run <= 2 || !collapsible(cs[i])) out.push_back(cs[i]);
        }
    }
    return uni::encode(out);
}

std::pair<Dataset, std::size_t> preprocess_dataset(const Dataset& d) {
    Dataset out{d.name, {}};
    std::size_t dropped = 0;
    for (const auto& e : d.examples) {
        std::string text = preprocess(e.text);
        if (text.empty()) {
            ++dropped;
            continue;
        }
        out.add(std::move(text), e.label, e.prov);
    }
    return {std::move(out), dropped};
}

namespace {

bool is_word_cp(char32_t cp) {
    if (cp >= 0x80) return true;
    if (cp >= U'a' && cp <= U'z') return true;
    if (cp >= U'0' && cp <= U'9') return true;
    return cp == U'#' || cp == U'_';
}

bool is_apostrophe(char32_t cp) { return cp == 0x27 || cp == 0x2019; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    auto cps = uni::decode(text);
    for (auto& cp : cps)
        if (cp >= U'A' && cp <= U'Z') cp += 32;

    std::vector<std::string> tokens;
    std::vector<char32_t> chunk;
    const auto flush_chunk = [&] {
        std::vector<char32_t> tok;
        const auto emit = [&] {
            if (!tok.empty()) {
                tokens.push_back(uni::encode(tok));
                tok.clear();
            }
        };
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            const char32_t cp = chunk[i];
            const bool internal_apostrophe =
                is_apostrophe(cp) && i > 0 && i + 1 < chunk.size() &&
                is_word_cp(chunk[i - 1]) && is_word_cp(chunk[i + 1]);
            if (is_word_cp(cp) || internal_apostrophe) {
                tok.push_back(cp);
            } else {
                emit();
                tokens.push_back(uni::encode({cp}));
            }
        }
        emit();
        chunk.clear();
    };
    for (char32_t cp : cps) {
        if (uni::is_whitespace(cp)) flush_chunk();
        else chunk.push_back(cp);
    }
    flush_chunk();
    return tokens;
}

Vocabulary::Vocabulary() : tokens_{"<pad>", "<unk>", "<bos>", "<eos>"} {
    for (std::int32_t i = 0; i < kNumSpecials; ++i) ids_.emplace(tokens_[i], i);
}

Vocabulary Vocabulary::build(std::span<const Dataset> datasets, int min_count) {
    if (min_count < 1) throw UsageError("min_count must be >= 1");
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& d : datasets)
        for (const auto& e : d.examples)
            for (auto& t : tokenize(e.text)) ++counts[std::move(t)];

    std::vector<std::pair<std::string, std::int64_t>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count_ = min_count;
    for (auto& [token, count] : order) {
        if (count < min_count) continue;
        v.ids_.emplace(token, static_cast<std::int32_t>(v.tokens_.size()));
        v.tokens_.push_back(token);
    }
    return v;
}

Vocabulary Vocabulary::build(const std::vector<Dataset>& datasets, int min_count) {
    return build(std::span<const Dataset>(datasets), min_count);
}

std::int32_t Vocabulary::id(std::string_view token) const {
    const auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
    if (id < 0 || id >= size()) throw TokenIdOutOfRangeError(id, size());
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::int32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<std::int32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<std::int32_t>& ids) const {
    std::vector<std::string> tokens;
    tokens.reserve(ids.size());
    for (auto i : ids) tokens.push_back(token(i));
    return tokens;
}

void Vocabulary::save(std::ostream& os) const {
    os << "vocab " << (size() - kNumSpecials) << ' ' << min_count_ << '\n';
    for (std::int32_t i = kNumSpecials; i < size(); ++i) os << tokens_[i] << '\n';
}

Vocabulary Vocabulary::load(std::istream& is) {
    std::string tag;
    std::int64_t n = 0;
    int min_count = 1;
    is >> tag >> n >> min_count;
    if (tag != "vocab" || n < 0) throw IoError("bad vocabulary header");
    is.ignore();
    Vocabulary v;
    v.min_count_ = min_count;
    std::string line;
    for (std::int64_t i = 0; i < n; ++i) {
        if (!std::getline(is, line)) throw IoError("truncated vocabulary");
        v.ids_.emplace(line, static_cast<std::int32_t>(v.tokens_.size()));
        v.tokens_.push_back(line);
    }
    return v;
}

SplitDataset split_dataset(const Dataset& d, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("split ratio must be in (0,1)");
    if (d.size() < 2) throw DatasetTooSmallError(d.size());

    std::vector<std::size_t> perm(d.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    const auto n_train = static_cast<std::size_t>(ratio * static_cast<double>(d.size()));
    SplitDataset out;
    out.seed = seed;
    out.ratio = ratio;
    out.train.name = d.name + ".train";
    out.test.name = d.name + ".test";
    for (std::size_t i = 0; i < perm.size(); ++i) {
        LabeledExample e = d.examples[perm[i]];
        if (e.prov.origin.empty()) e.prov.origin = d.name;
        e.prov.test_side = i >= n_train;
        (i < n_train ? out.train : out.test).examples.push_back(std::move(e));
    }
    return out;
}

Dataset class_subset(const Dataset& d, Label label) {
    Dataset out{d.name + "." + std::string(label_name(label)), {}};
    for (const auto& e : d.examples)
        if (e.label == label) out.examples.push_back(e);
    return out;
}

Dataset balanced_combined(std::span<const SplitDataset> splits, std::uint64_t seed) {
    std::vector<Dataset> trains;
    trains.reserve(splits.size());
    for (const auto& s : splits) trains.push_back(s.train);
    return balanced_combined_trains(trains, seed);
}

Dataset balanced_combined(const std::vector<SplitDataset>& splits, std::uint64_t seed) {
    return balanced_combined(std::span<const SplitDataset>(splits), seed);
}

Dataset balanced_combined_trains(std::span<const Dataset> trains, std::uint64_t seed) {
    Dataset out{"balanced-combined", {}};
    std::vector<const LabeledExample*> non_hate;
    for (const auto& t : trains) {
        assert_train_side(t, "balanced_combined");
        for (const auto& e : t.examples) {
            if (e.label == Label::hate) out.examples.push_back(e);
            else non_hate.push_back(&e);
        }
    }
    const std::size_t n_hate = out.size();
    if (non_hate.size() < n_hate) throw NotEnoughNonHateError(n_hate, non_hate.size());

    Rng rng(seed);
    for (auto idx : rng.sample_indices(non_hate.size(), n_hate))
        out.examples.push_back(*non_hate[idx]);
    rng.shuffle(out.examples);
    return out;
}

void assert_train_side(const Dataset& d, std::string_view where) {
    for (const auto& e : d.examples)
        if (e.prov.test_side) throw LeakageError(std::string(where));
}

}  // namespace genaug
