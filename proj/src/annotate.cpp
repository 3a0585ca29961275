#include "genaug/annotate.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genaug/rng.hpp"

namespace genaug {

bool rating_required(std::size_t item, std::size_t overlap,
                     const std::vector<std::string>& annotators, const std::string& annotator) {
    if (item < overlap) return true;
    const std::size_t slot = (item - overlap) % annotators.size();
    return annotators[slot] == annotator;
}

std::vector<AnnotationItem> sample_annotation_items(const std::vector<GeneratedCorpus>& corpora,
                                                    std::size_t n_items, std::uint64_t seed) {
    std::vector<AnnotationItem> all;
    for (const auto& corpus : corpora) {
        for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
            std::string text;
            for (std::size_t t = 0; t < corpus.sequences[i].size(); ++t) {
                if (t) text.push_back(' ');
                text += corpus.sequences[i][t];
            }
            all.push_back({std::move(text), corpus.class_label});
        }
    }
    if (all.empty()) throw EmptyCorpusError("annotation sample from empty corpora");

    Rng rng(seed);
    std::vector<AnnotationItem> picked;
    for (auto idx : rng.sample_indices(all.size(), std::min(n_items, all.size())))
        picked.push_back(all[idx]);
    return picked;
}

AnnotationReport annotation_session(const std::vector<AnnotationItem>& items, std::size_t overlap,
                                    const std::vector<std::string>& annotators,
                                    const std::vector<Rating>& ratings) {
    if (annotators.size() < 2) throw InsufficientAnnotatorsError(annotators.size());
    if (overlap > items.size()) throw UsageError("overlap exceeds item count");
    if (overlap < 1) throw UsageError("overlap must be >= 1 for agreement");

    std::set<std::string> names(annotators.begin(), annotators.end());
    std::map<std::pair<std::string, std::size_t>, const Rating*> by_pair;
    for (const auto& r : ratings) {
        if (names.find(r.annotator) == names.end())
            throw IncompleteReplayFileError("unknown annotator \"" + r.annotator + "\"");
        if (r.item >= items.size())
            throw IncompleteReplayFileError("item index " + std::to_string(r.item) + " out of range");
        by_pair[{r.annotator, r.item}] = &r;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (const auto& a : annotators) {
            if (rating_required(i, overlap, annotators, a) && by_pair.find({a, i}) == by_pair.end())
                throw IncompleteReplayFileError("missing rating for annotator \"" + a + "\" item " +
                                                std::to_string(i));
        }
    }

    // kappa over the co-annotated subset
    std::vector<std::vector<std::int64_t>> table(overlap, std::vector<std::int64_t>(2, 0));
    for (std::size_t i = 0; i < overlap; ++i) {
        for (const auto& a : annotators) {
            const auto& r = *by_pair.at({a, i});
            ++table[i][r.label == Label::hate ? 0 : 1];
        }
    }

    AnnotationReport report;
    report.kappa = fleiss_kappa(table, static_cast<int>(annotators.size()));
    report.n_items = items.size();
    report.overlap = overlap;
    report.annotators = annotators;

    std::size_t hate_total = 0, hate_agree = 0, non_total = 0, non_agree = 0;
    double quality_sum = 0.0;
    std::size_t quality_count = 0;
    for (const auto& [key, r] : by_pair) {
        const auto& item = items[r->item];
        if (item.intended == Label::hate) {
            ++hate_total;
            hate_agree += r->label == Label::hate ? 1 : 0;
        } else {
            ++non_total;
            non_agree += r->label == Label::non_hate ? 1 : 0;
        }
        quality_sum += r->quality;
        ++quality_count;
    }
    report.hate_ratio_defined = hate_total > 0;
    report.non_hate_ratio_defined = non_total > 0;
    if (hate_total > 0)
        report.hate_perceived_ratio = static_cast<double>(hate_agree) / static_cast<double>(hate_total);
    if (non_total > 0)
        report.non_hate_perceived_ratio =
            static_cast<double>(non_agree) / static_cast<double>(non_total);
    report.mean_quality = quality_count ? quality_sum / static_cast<double>(quality_count) : 0.0;
    return report;
}

std::vector<Rating> load_replay(const std::string& path, std::size_t n_items,
                                const std::vector<std::string>& annotators) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);

    std::set<std::string> names(annotators.begin(), annotators.end());
    std::vector<Rating> ratings;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw IncompleteReplayFileError(1, "empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "annotator,item_index,label,quality")
        throw IncompleteReplayFileError(1, "expected header annotator,item_index,label,quality");

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string annotator, item_s, label_s, quality_s;
        if (!std::getline(ls, annotator, ',') || !std::getline(ls, item_s, ',') ||
            !std::getline(ls, label_s, ',') || !std::getline(ls, quality_s, ','))
            throw IncompleteReplayFileError(line_no, "expected 4 fields");

        Rating r;
        r.annotator = annotator;
        if (names.find(annotator) == names.end())
            throw IncompleteReplayFileError(line_no, "unknown annotator \"" + annotator + "\"");
        try {
            r.item = std::stoull(item_s);
        } catch (const std::exception&) {
            throw IncompleteReplayFileError(line_no, "bad item index \"" + item_s + "\"");
        }
        if (r.item >= n_items)
            throw IncompleteReplayFileError(line_no, "item index out of range");
        const auto label = parse_label(label_s);
        if (!label) throw IncompleteReplayFileError(line_no, "bad label \"" + label_s + "\"");
        r.label = *label;
        try {
            r.quality = std::stoi(quality_s);
        } catch (const std::exception&) {
            throw IncompleteReplayFileError(line_no, "bad quality \"" + quality_s + "\"");
        }
        if (r.quality < 1 || r.quality > 5)
            throw IncompleteReplayFileError(line_no, "quality outside 1..5");
        ratings.push_back(std::move(r));
    }
    return ratings;
}

std::vector<Rating> interactive_ratings(const std::vector<AnnotationItem>& items,
                                        std::size_t overlap,
                                        const std::vector<std::string>& annotators,
                                        std::istream& in, std::ostream& out) {
    std::vector<Rating> ratings;
    for (const auto& annotator : annotators) {
        out << "--- annotator: " << annotator << " ---\n";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!rating_required(i, overlap, annotators, annotator)) continue;
            out << "[" << i + 1 << "/" << items.size() << "] " << items[i].text << "\n";
            Rating r;
            r.annotator = annotator;
            r.item = i;
            for (;;) {
                out << "label (h = hate, n = non-hate): " << std::flush;
                std::string answer;
                if (!std::getline(in, answer)) throw IncompleteReplayFileError("input ended early");
                if (answer == "h" || answer == "hate") {
                    r.label = Label::hate;
                    break;
                }
                if (answer == "n" || answer == "non-hate") {
                    r.label = Label::non_hate;
                    break;
                }
            }
            for (;;) {
                out << "quality (1-5): " << std::flush;
                std::string answer;
                if (!std::getline(in, answer)) throw IncompleteReplayFileError("input ended early");
                if (answer.size() == 1 && answer[0] >= '1' && answer[0] <= '5') {
                    r.quality = answer[0] - '0';
                    break;
                }
            }
            ratings.push_back(std::move(r));
        }
    }
    return ratings;
}

std::string annotation_report_json(const AnnotationReport& r) {
    nlohmann::ordered_json j;
    j["n_items"] = r.n_items;
    j["overlap"] = r.overlap;
    j["annotators"] = r.annotators;
    j["fleiss_kappa"] = r.kappa.kappa;
    j["kappa_degenerate"] = r.kappa.degenerate;
    j["hate_perceived_ratio"] = r.hate_ratio_defined ? nlohmann::ordered_json(r.hate_perceived_ratio)
                                                     : nlohmann::ordered_json(nullptr);
    j["non_hate_perceived_ratio"] = r.non_hate_ratio_defined
                                        ? nlohmann::ordered_json(r.non_hate_perceived_ratio)
                                        : nlohmann::ordered_json(nullptr);
    j["mean_quality"] = r.mean_quality;
    return j.dump(2) + "\n";
}

}  // namespace genaug
