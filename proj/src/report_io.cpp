#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genaug/pipeline.hpp"

namespace genaug {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string pr_file_name(const std::string& stem, const ReportCell& cell, const char* arm) {
    return stem + "_pr_" + cell.train_dataset + "_" + cell.test_dataset + "_" + arm + ".csv";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    os << text;
    if (!os) throw IoError("failed writing " + path);
}

}  // namespace

std::string report_markdown(const RunReport& report) {
    std::ostringstream os;
    os << "| Train-Test | Accuracy | | (%) | Precision | | (%) | Recall | | (%) | F1 | | (%) |\n";
    os << "| | Baseline | Augmented | | Baseline | Augmented | | Baseline | Augmented | | "
          "Baseline | Augmented | |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& cell : report.cells) {
        const std::string pair = cell.intra ? cell.train_dataset
                                            : cell.train_dataset + "-" + cell.test_dataset;
        os << "| " << pair;
        const auto metric_cols = [&](double base, double aug) {
            os << " | " << fmt3(base) << " | " << fmt3(aug) << " | "
               << format_relative(relative_change(base, aug));
        };
        metric_cols(cell.baseline.metrics.accuracy, cell.augmented.metrics.accuracy);
        metric_cols(cell.baseline.metrics.precision, cell.augmented.metrics.precision);
        metric_cols(cell.baseline.metrics.recall, cell.augmented.metrics.recall);
        metric_cols(cell.baseline.metrics.f1, cell.augmented.metrics.f1);
        os << " |\n";
    }
    return os.str();
}

namespace {

std::string report_csv(const RunReport& report) {
    std::ostringstream os;
    os << "train,test,arm,accuracy,precision,recall,f1\n";
    for (const auto& cell : report.cells) {
        const auto row = [&](const char* arm, const ClassificationMetrics& m) {
            os << cell.train_dataset << ',' << cell.test_dataset << ',' << arm << ','
               << fmt(m.accuracy) << ',' << fmt(m.precision) << ',' << fmt(m.recall) << ','
               << fmt(m.f1) << '\n';
        };
        row("baseline", cell.baseline.metrics);
        row("augmented", cell.augmented.metrics);
    }
    return os.str();
}

std::string report_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["master_seed"] = report.master_seed;
    j["tau"] = report.tau;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& cell : report.cells) {
        nlohmann::ordered_json c;
        c["train"] = cell.train_dataset;
        c["test"] = cell.test_dataset;
        c["intra"] = cell.intra;
        const auto arm_json = [](const ArmResult& arm) {
            nlohmann::ordered_json a;
            a["accuracy"] = arm.metrics.accuracy;
            a["precision"] = arm.metrics.precision;
            a["recall"] = arm.metrics.recall;
            a["f1"] = arm.metrics.f1;
            a["tp"] = arm.confusion.tp;
            a["fp"] = arm.confusion.fp;
            a["tn"] = arm.confusion.tn;
            a["fn"] = arm.confusion.fn;
            return a;
        };
        c["baseline"] = arm_json(cell.baseline);
        c["augmented"] = arm_json(cell.augmented);
        nlohmann::ordered_json rel;
        rel["accuracy"] =
            format_relative(relative_change(cell.baseline.metrics.accuracy, cell.augmented.metrics.accuracy));
        rel["precision"] = format_relative(
            relative_change(cell.baseline.metrics.precision, cell.augmented.metrics.precision));
        rel["recall"] =
            format_relative(relative_change(cell.baseline.metrics.recall, cell.augmented.metrics.recall));
        rel["f1"] = format_relative(relative_change(cell.baseline.metrics.f1, cell.augmented.metrics.f1));
        c["relative_change"] = rel;
        j["cells"].push_back(std::move(c));
    }
    return j.dump(2) + "\n";
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& report, ReportFormat format,
                                     const std::string& path) {
    if (report.cells.empty()) throw EmptyEvaluationError("emit_report on empty report");

    std::vector<std::string> written;
    switch (format) {
        case ReportFormat::csv: write_text(path, report_csv(report)); break;
        case ReportFormat::json: write_text(path, report_json(report)); break;
        case ReportFormat::markdown: write_text(path, report_markdown(report)); break;
    }
    written.push_back(path);

    std::string stem = path;
    const auto dot = stem.rfind('.');
    if (dot != std::string::npos && stem.find('/', dot) == std::string::npos)
        stem = stem.substr(0, dot);
    for (const auto& cell : report.cells) {
        if (cell.baseline.pr) {
            const auto p = pr_file_name(stem, cell, "baseline");
            save_pr_curve(*cell.baseline.pr, p);
            written.push_back(p);
        }
        if (cell.augmented.pr) {
            const auto p = pr_file_name(stem, cell, "augmented");
            save_pr_curve(*cell.augmented.pr, p);
            written.push_back(p);
        }
    }
    return written;
}

RunReport load_report_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    RunReport report;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw MalformedRowError(1, "empty report");
    ++line_no;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string train, test, arm, a, p, r, f1;
        if (!std::getline(ls, train, ',') || !std::getline(ls, test, ',') ||
            !std::getline(ls, arm, ',') || !std::getline(ls, a, ',') || !std::getline(ls, p, ',') ||
            !std::getline(ls, r, ',') || !std::getline(ls, f1, ','))
            throw MalformedRowError(line_no, "expected 7 fields");
        if (report.cells.empty() || report.cells.back().train_dataset != train ||
            report.cells.back().test_dataset != test) {
            ReportCell cell;
            cell.train_dataset = train;
            cell.test_dataset = test;
            cell.intra = train == test;
            report.cells.push_back(std::move(cell));
        }
        ArmResult& slot =
            arm == "baseline" ? report.cells.back().baseline : report.cells.back().augmented;
        slot.metrics.accuracy = std::stod(a);
        slot.metrics.precision = std::stod(p);
        slot.metrics.recall = std::stod(r);
        slot.metrics.f1 = std::stod(f1);
    }
    return report;
}

std::string rouge_table_markdown(const std::vector<RougeTableRow>& rows) {
    std::ostringstream os;
    os << "| Source dataset | Generated hate | Generated non-hate |\n";
    os << "|---|---|---|\n";
    char buf[48];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "| %s | %.2f | %.2f |\n", row.dataset.c_str(),
                      row.generated_hate, row.generated_non_hate);
        os << buf;
    }
    return os.str();
}

std::string rouge_table_csv(const std::vector<RougeTableRow>& rows) {
    std::ostringstream os;
    os << "dataset,generated_hate,generated_non_hate\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f\n", row.dataset.c_str(), row.generated_hate,
                      row.generated_non_hate);
        os << buf;
    }
    return os.str();
}

}  // namespace genaug
