#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "genaug/annotate.hpp"
#include "genaug/pipeline.hpp"

namespace py = pybind11;
using namespace genaug;

namespace {

Dataset dataset_from_pairs(const std::string& name,
                           const std::vector<std::pair<std::string, std::string>>& rows) {
    Dataset d{name, {}};
    for (const auto& [text, label] : rows) {
        const auto parsed = parse_label(label);
        if (!parsed) throw UnknownLabelError(label, d.size() + 1);
        d.add(text, *parsed);
    }
    return d;
}

std::vector<std::pair<std::string, std::string>> dataset_to_pairs(const Dataset& d) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.reserve(d.size());
    for (const auto& e : d.examples) rows.emplace_back(e.text, std::string(label_name(e.label)));
    return rows;
}

py::dict metrics_dict(const ClassificationMetrics& m) {
    py::dict out;
    out["accuracy"] = m.accuracy;
    out["precision"] = m.precision;
    out["recall"] = m.recall;
    out["f1"] = m.f1;
    out["precision_degenerate"] = m.precision_degenerate;
    out["recall_degenerate"] = m.recall_degenerate;
    out["f1_degenerate"] = m.f1_degenerate;
    return out;
}

}  // namespace

PYBIND11_MODULE(_genaug, m) {
    m.doc() = "generative data augmentation for binary text classification";

    py::register_exception<DataError>(m, "DataError");

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_pairs), py::arg("name"), py::arg("rows"))
        .def_readonly("name", &Dataset::name)
        .def("__len__", &Dataset::size)
        .def("rows", &dataset_to_pairs)
        .def("count", [](const Dataset& d, const std::string& label) {
            const auto parsed = parse_label(label);
            if (!parsed) throw UnknownLabelError(label, 0);
            return d.count(*parsed);
        });

    m.def("load_dataset", [](const std::string& path, const std::string& name) {
        return load_dataset(path, format_from_path(path), name);
    });
    m.def("save_dataset", [](const Dataset& d, const std::string& path) {
        save_dataset(d, path, format_from_path(path));
    });
    m.def("preprocess", &preprocess);
    m.def("tokenize", [](const std::string& text) { return tokenize(text); });

    py::class_<Vocabulary>(m, "Vocabulary")
        .def("__len__", &Vocabulary::size)
        .def("id", [](const Vocabulary& v, const std::string& t) { return v.id(t); })
        .def("token", &Vocabulary::token)
        .def("encode", &Vocabulary::encode)
        .def("decode", &Vocabulary::decode);
    m.def("build_vocabulary", [](const std::vector<Dataset>& datasets, int min_count) {
        return Vocabulary::build(datasets, min_count);
    }, py::arg("datasets"), py::arg("min_count") = 1);

    py::class_<SplitDataset>(m, "SplitDataset")
        .def_readonly("train", &SplitDataset::train)
        .def_readonly("test", &SplitDataset::test);
    m.def("split_dataset", &split_dataset, py::arg("dataset"), py::arg("ratio"), py::arg("seed"));
    m.def("class_subset", [](const Dataset& d, const std::string& label) {
        const auto parsed = parse_label(label);
        if (!parsed) throw UnknownLabelError(label, 0);
        return class_subset(d, *parsed);
    });
    m.def("balanced_combined", [](const std::vector<SplitDataset>& splits, std::uint64_t seed) {
        return balanced_combined(splits, seed);
    });

    py::class_<SamplerConfig>(m, "SamplerConfig")
        .def(py::init([](double temperature, double top_p, int max_tokens, std::uint64_t seed) {
                 return SamplerConfig{temperature, top_p, max_tokens, seed};
             }),
             py::arg("temperature") = 0.9, py::arg("top_p") = 0.9, py::arg("max_tokens") = 30,
             py::arg("seed") = 0)
        .def_readwrite("temperature", &SamplerConfig::temperature)
        .def_readwrite("top_p", &SamplerConfig::top_p)
        .def_readwrite("max_tokens", &SamplerConfig::max_tokens)
        .def_readwrite("seed", &SamplerConfig::seed);

    py::class_<GeneratedCorpus>(m, "GeneratedCorpus")
        .def_readonly("source_dataset", &GeneratedCorpus::source_dataset)
        .def_readonly("sequences", &GeneratedCorpus::sequences)
        .def_readonly("seeds", &GeneratedCorpus::seeds)
        .def_property_readonly("class_label",
                               [](const GeneratedCorpus& c) {
                                   return std::string(label_name(c.class_label));
                               })
        .def("__len__", &GeneratedCorpus::size);
    m.def("save_generated_corpus", &save_generated_corpus);
    m.def("load_generated_corpus", &load_generated_corpus);

    py::class_<GenerativeLM>(m, "GenerativeLM")
        .def_static("train", &GenerativeLM::train, py::arg("corpus"), py::arg("vocab"),
                    py::arg("order") = 3, py::arg("alpha") = 0.1)
        .def("next_distribution", &GenerativeLM::next_distribution)
        .def("sequence_log_prob", &GenerativeLM::sequence_log_prob)
        .def("sample", &GenerativeLM::sample)
        .def("save", py::overload_cast<const std::string&>(&GenerativeLM::save, py::const_))
        .def_static("load", &GenerativeLM::load_file)
        .def_property_readonly("order", &GenerativeLM::order)
        .def_property_readonly("vocabulary", &GenerativeLM::vocabulary);
    m.def("shape_distribution", &shape_distribution, py::arg("dist"), py::arg("temperature"),
          py::arg("top_p"));
    m.def(
        "generate_corpus",
        [](const GenerativeLM& lm, std::int64_t count, const SamplerConfig& cfg, int jobs,
           const std::string& source, const std::string& label) {
            const auto parsed = parse_label(label);
            if (!parsed) throw UnknownLabelError(label, 0);
            return generate_corpus(lm, count, cfg, jobs, source, *parsed);
        },
        py::arg("lm"), py::arg("count"), py::arg("config"), py::arg("jobs") = 1,
        py::arg("source") = std::string{}, py::arg("label") = "hate");

    py::class_<FilterClassifier>(m, "FilterClassifier")
        .def("score", &FilterClassifier::score)
        .def("save", py::overload_cast<const std::string&>(&FilterClassifier::save, py::const_))
        .def_static("load", &FilterClassifier::load_file);
    m.def(
        "train_filter",
        [](const Dataset& target, std::optional<Dataset> pretrain, int epochs, double lr, double l2,
           int min_count, std::uint64_t seed) {
            StagedTrainingPlan plan;
            plan.target = target;
            plan.pretrain = std::move(pretrain);
            plan.target_stage = {epochs, lr, l2};
            plan.pretrain_stage = {epochs, lr, l2};
            plan.vocab_min_count = min_count;
            plan.seed = seed;
            return train_filter(plan);
        },
        py::arg("target"), py::arg("pretrain") = std::nullopt, py::arg("epochs") = 200,
        py::arg("lr") = 0.5, py::arg("l2") = 1e-4, py::arg("min_count") = 1, py::arg("seed") = 0);
    m.def(
        "filter_and_select",
        [](const GeneratedCorpus& corpus, const FilterClassifier& filter, const std::string& label,
           double tau, std::int64_t top_k) {
            const auto parsed = parse_label(label);
            if (!parsed) throw UnknownLabelError(label, 0);
            auto [kept, report] = filter_and_select(corpus, filter, *parsed, {tau, top_k});
            py::dict rep;
            rep["input_count"] = report.input_count;
            rep["above_threshold"] = report.above_threshold;
            rep["retained"] = report.retained;
            rep["empty_warning"] = report.empty_warning;
            rep["scores"] = report.scores;
            return py::make_tuple(kept, rep);
        },
        py::arg("corpus"), py::arg("filter"), py::arg("target_class") = "hate",
        py::arg("tau") = 0.7, py::arg("top_k") = 100000);

    py::class_<DetectorConfig>(m, "DetectorConfig")
        .def(py::init([](int embed_dim, double dropout, int conv_filters, int kernel_width,
                         int pool_width, int hidden, int max_len) {
                 return DetectorConfig{embed_dim, dropout, conv_filters, kernel_width,
                                       pool_width, hidden,  max_len,    0};
             }),
             py::arg("embed_dim") = 300, py::arg("dropout") = 0.3, py::arg("conv_filters") = 100,
             py::arg("kernel_width") = 4, py::arg("pool_width") = 4, py::arg("hidden") = 100,
             py::arg("max_len") = 30)
        .def_readwrite("embed_dim", &DetectorConfig::embed_dim)
        .def_readwrite("dropout", &DetectorConfig::dropout)
        .def_readwrite("conv_filters", &DetectorConfig::conv_filters)
        .def_readwrite("kernel_width", &DetectorConfig::kernel_width)
        .def_readwrite("pool_width", &DetectorConfig::pool_width)
        .def_readwrite("hidden", &DetectorConfig::hidden)
        .def_readwrite("max_len", &DetectorConfig::max_len);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init([](double lr, int batch_size, int max_epochs, int patience,
                         double val_fraction, std::uint64_t seed) {
                 TrainConfig t;
                 t.learning_rate = lr;
                 t.batch_size = batch_size;
                 t.max_epochs = max_epochs;
                 t.patience = patience;
                 t.val_fraction = val_fraction;
                 t.seed = seed;
                 return t;
             }),
             py::arg("learning_rate") = 1e-3, py::arg("batch_size") = 32,
             py::arg("max_epochs") = 20, py::arg("patience") = 3, py::arg("val_fraction") = 0.1,
             py::arg("seed") = 0)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("patience", &TrainConfig::patience)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<DetectorModel>(m, "DetectorModel")
        .def("predict_proba",
             [](const DetectorModel& m_, const std::string& text) {
                 return m_.forward(m_.encode(text), false, 0);
             })
        .def("classify",
             [](const DetectorModel& m_, const std::string& text, double tau) {
                 const auto pred = m_.classify(m_.encode(text), tau);
                 py::dict out;
                 out["posterior"] = pred.posterior;
                 out["tau"] = pred.tau;
                 out["label"] = std::string(label_name(pred.label));
                 return out;
             },
             py::arg("text"), py::arg("tau") = 0.7)
        .def("save", py::overload_cast<const std::string&>(&DetectorModel::save, py::const_))
        .def_static("load", &DetectorModel::load_file);
    m.def(
        "train_detector",
        [](const Dataset& train, const Vocabulary& vocab, const DetectorConfig& dcfg,
           const TrainConfig& tcfg) {
            auto trained = train_detector(train, vocab, dcfg, tcfg);
            py::list history;
            for (const auto& e : trained.history.epochs) {
                py::dict row;
                row["epoch"] = e.epoch;
                row["train_loss"] = e.train_loss;
                row["val_loss"] = e.val_loss;
                history.append(row);
            }
            return py::make_tuple(std::move(trained.model), history);
        },
        py::arg("train"), py::arg("vocab"), py::arg("detector_config") = DetectorConfig{},
        py::arg("train_config") = TrainConfig{});

    m.def("classification_metrics",
          [](std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
              return metrics_dict(classification_metrics({tp, fp, tn, fn}));
          });
    m.def("rouge_l", &rouge_l, py::arg("candidate"), py::arg("reference"));
    m.def(
        "corpus_rouge",
        [](const std::vector<std::vector<std::string>>& generated, const Dataset& source,
           std::size_t cap, std::uint64_t seed, int jobs) {
            const auto rep = corpus_rouge(generated, source, cap, seed, jobs);
            py::dict out;
            out["mean"] = rep.mean;
            out["sampled"] = rep.sampled;
            out["policy"] = rep.policy;
            return out;
        },
        py::arg("generated"), py::arg("source"), py::arg("sample_cap") = 10000, py::arg("seed") = 0,
        py::arg("jobs") = 1);
    m.def(
        "pr_curve",
        [](const std::vector<std::pair<double, std::string>>& posteriors) {
            std::vector<std::pair<double, Label>> converted;
            converted.reserve(posteriors.size());
            for (const auto& [p, label] : posteriors) {
                const auto parsed = parse_label(label);
                if (!parsed) throw UnknownLabelError(label, 0);
                converted.emplace_back(p, *parsed);
            }
            const auto curve = pr_curve(converted);
            py::list out;
            for (const auto& pt : curve.points)
                out.append(py::make_tuple(pt.tau, pt.precision, pt.recall));
            return out;
        });
    m.def("fleiss_kappa",
          [](const std::vector<std::vector<std::int64_t>>& ratings, int raters) {
              const auto rep = fleiss_kappa(ratings, raters);
              py::dict out;
              out["kappa"] = rep.kappa;
              out["mean_agreement"] = rep.mean_agreement;
              out["expected_agreement"] = rep.expected_agreement;
              out["degenerate"] = rep.degenerate;
              return out;
          });
    m.def("relative_change", [](double baseline, double augmented) {
        return format_relative(relative_change(baseline, augmented));
    });

    py::class_<GenerationPlan>(m, "GenerationPlan")
        .def(py::init([](const std::string& dataset, std::int64_t count, std::int64_t top_k,
                         double tau, int order, double alpha, std::uint64_t master_seed) {
                 GenerationPlan plan;
                 plan.dataset = dataset;
                 plan.count = count;
                 plan.selection.top_k = top_k;
                 plan.selection.tau = tau;
                 plan.lm.order = order;
                 plan.lm.alpha = alpha;
                 plan.master_seed = master_seed;
                 return plan;
             }),
             py::arg("dataset"), py::arg("count") = 600000, py::arg("top_k") = 100000,
             py::arg("tau") = 0.7, py::arg("order") = 3, py::arg("alpha") = 0.1,
             py::arg("master_seed") = 0);

    m.def(
        "run_generation",
        [](const GenerationPlan& plan, const std::map<std::string, SplitDataset>& splits, int jobs) {
            auto result = run_generation(plan, splits, jobs);
            py::dict out;
            out["hate"] = std::move(result.hate);
            out["non_hate"] = std::move(result.non_hate);
            out["log"] = result.log;
            return out;
        },
        py::arg("plan"), py::arg("splits"), py::arg("jobs") = 1);

    m.def(
        "augment_training_set",
        [](const Dataset& base, const GeneratedCorpus& gh, const GeneratedCorpus& gn,
           std::int64_t cap, std::uint64_t seed) {
            auto out = augment_training_set(base, gh, gn, cap, seed);
            return py::make_tuple(std::move(out.data), out.injected_hate, out.injected_non_hate);
        },
        py::arg("base"), py::arg("gen_hate"), py::arg("gen_non_hate"), py::arg("cap") = 100000,
        py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::vector<std::string>& datasets, const std::string& mode,
           const std::map<std::string, SplitDataset>& splits,
           const std::map<std::string, std::pair<GeneratedCorpus, GeneratedCorpus>>& corpora,
           const DetectorConfig& dcfg, const TrainConfig& tcfg, double tau, std::int64_t cap,
           bool include_combined, std::uint64_t master_seed, int jobs) {
            ExperimentPlan plan;
            plan.datasets = datasets;
            if (mode == "intra") plan.mode = ExperimentMode::intra;
            else if (mode == "cross") plan.mode = ExperimentMode::cross;
            else plan.mode = ExperimentMode::both;
            plan.detector = dcfg;
            plan.train = tcfg;
            plan.tau = tau;
            plan.augment_cap = cap;
            plan.include_combined = include_combined;
            plan.master_seed = master_seed;
            const auto report = run_experiment(plan, splits, corpora, jobs);
            py::list cells;
            for (const auto& cell : report.cells) {
                py::dict c;
                c["train"] = cell.train_dataset;
                c["test"] = cell.test_dataset;
                c["intra"] = cell.intra;
                c["baseline"] = metrics_dict(cell.baseline.metrics);
                c["augmented"] = metrics_dict(cell.augmented.metrics);
                cells.append(std::move(c));
            }
            return cells;
        },
        py::arg("datasets"), py::arg("mode"), py::arg("splits"), py::arg("corpora"),
        py::arg("detector_config") = DetectorConfig{}, py::arg("train_config") = TrainConfig{},
        py::arg("tau") = 0.7, py::arg("augment_cap") = 100000, py::arg("include_combined") = false,
        py::arg("master_seed") = 0, py::arg("jobs") = 1);

    m.def(
        "annotation_session",
        [](const std::vector<std::pair<std::string, std::string>>& items, std::size_t overlap,
           const std::vector<std::string>& annotators,
           const std::vector<std::tuple<std::string, std::size_t, std::string, int>>& ratings) {
            std::vector<AnnotationItem> converted_items;
            for (const auto& [text, label] : items) {
                const auto parsed = parse_label(label);
                if (!parsed) throw UnknownLabelError(label, 0);
                converted_items.push_back({text, *parsed});
            }
            std::vector<Rating> converted_ratings;
            for (const auto& [annotator, item, label, quality] : ratings) {
                const auto parsed = parse_label(label);
                if (!parsed) throw UnknownLabelError(label, 0);
                converted_ratings.push_back({annotator, item, *parsed, quality});
            }
            const auto rep = annotation_session(converted_items, overlap, annotators, converted_ratings);
            py::dict out;
            out["kappa"] = rep.kappa.kappa;
            out["hate_perceived_ratio"] = rep.hate_perceived_ratio;
            out["non_hate_perceived_ratio"] = rep.non_hate_perceived_ratio;
            out["mean_quality"] = rep.mean_quality;
            return out;
        },
        py::arg("items"), py::arg("overlap"), py::arg("annotators"), py::arg("ratings"));
}
