#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "genaug/corpus.hpp"
#include "genaug/langmodel.hpp"
#include "genaug/metrics.hpp"

namespace genaug {

struct AnnotationItem {
    std::string text;
    Label intended = Label::hate;  // the class whose generator produced it
};

struct Rating {
    std::string annotator;
    std::size_t item = 0;
    Label label = Label::hate;
    int quality = 0;  // 1..5
};

struct AnnotationReport {
    KappaReport kappa;
    double hate_perceived_ratio = 0.0;
    double non_hate_perceived_ratio = 0.0;
    bool hate_ratio_defined = false;
    bool non_hate_ratio_defined = false;
    double mean_quality = 0.0;
    std::size_t n_items = 0;
    std::size_t overlap = 0;
    std::vector<std::string> annotators;
};

// Items [0, overlap) are rated by every annotator (the kappa subset); the
// rest round-robin across annotators.
bool rating_required(std::size_t item, std::size_t overlap,
                     const std::vector<std::string>& annotators, const std::string& annotator);

// Up to n_items seed-sampled items drawn from the given corpora, tagged with
// their generating class.
std::vector<AnnotationItem> sample_annotation_items(const std::vector<GeneratedCorpus>& corpora,
                                                    std::size_t n_items, std::uint64_t seed);

// Kappa over the overlap subset, perceived-class ratios per intended class,
// mean quality over every rating. Ratings must cover the required pairs.
AnnotationReport annotation_session(const std::vector<AnnotationItem>& items, std::size_t overlap,
                                    const std::vector<std::string>& annotators,
                                    const std::vector<Rating>& ratings);

// CSV columns: annotator,item_index,label,quality
std::vector<Rating> load_replay(const std::string& path, std::size_t n_items,
                                const std::vector<std::string>& annotators);

// Prompt loop on the given streams; one label + quality per required pair.
std::vector<Rating> interactive_ratings(const std::vector<AnnotationItem>& items,
                                        std::size_t overlap,
                                        const std::vector<std::string>& annotators,
                                        std::istream& in, std::ostream& out);

std::string annotation_report_json(const AnnotationReport& r);

}  // namespace genaug
