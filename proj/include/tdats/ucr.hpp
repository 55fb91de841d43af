#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "tdats/ensemble.hpp"
#include "tdats/series.hpp"

namespace tdats {

struct LabeledSeries {
    std::string label;
    TimeSeries series;
};

struct LabeledDataset {
    std::string name;
    std::vector<LabeledSeries> train;
    std::vector<LabeledSeries> test;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> tokens;
    std::string token;
    std::istringstream in(line);
    while (std::getline(in, token, '\t')) {
        tokens.push_back(token);
    }
    return tokens;
}

inline std::vector<LabeledSeries> parse_ucr_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_ucr: missing file: " + path.string());
    }
    std::vector<LabeledSeries> rows;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> tokens = split_tabs(line);
        // Tolerate a single trailing tab.
        if (tokens.size() > 1 && tokens.back().empty()) {
            tokens.pop_back();
        }
        const std::string where = path.string() + ":" + std::to_string(line_number);
        if (tokens.size() < 2) {
            throw std::runtime_error("load_ucr: " + where +
                                     ": malformed row (expected label and at least one value)");
        }
        std::vector<double> values;
        values.reserve(tokens.size() - 1);
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const std::string& tok = tokens[i];
            std::string lower(tok);
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower == "nan") {
                values.push_back(TimeSeries::missing());
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("load_ucr: " + where + ": non-numeric value token '" +
                                         tok + "'");
            }
            if (used != tok.size() || !std::isfinite(v)) {
                throw std::runtime_error("load_ucr: " + where + ": non-numeric value token '" +
                                         tok + "'");
            }
            values.push_back(v);
        }
        rows.push_back({tokens[0], TimeSeries(std::move(values))});
    }
    if (rows.empty()) {
        throw std::runtime_error("load_ucr: empty file: " + path.string());
    }
    return rows;
}

}  // namespace detail

/// Loads a dataset directory holding <Name>_TRAIN.tsv and <Name>_TEST.tsv,
/// one "label \t value \t value ..." row per series; "NaN" tokens become
/// missing entries. Rows of unequal length are accepted. Test labels absent
/// from the train alphabet produce a warning on stderr, not an error.
inline LabeledDataset load_ucr(const std::filesystem::path& dir) {
    std::filesystem::path normalized = dir;
    if (normalized.filename().empty()) {
        normalized = normalized.parent_path();
    }
    const std::string name = normalized.filename().string();
    if (name.empty()) {
        throw std::runtime_error("load_ucr: cannot infer dataset name from path: " + dir.string());
    }
    LabeledDataset ds;
    ds.name = name;
    ds.train = detail::parse_ucr_file(normalized / (name + "_TRAIN.tsv"));
    ds.test = detail::parse_ucr_file(normalized / (name + "_TEST.tsv"));

    std::set<std::string> alphabet;
    for (const LabeledSeries& item : ds.train) {
        alphabet.insert(item.label);
    }
    std::set<std::string> warned;
    for (const LabeledSeries& item : ds.test) {
        if (!alphabet.count(item.label) && warned.insert(item.label).second) {
            std::cerr << "load_ucr: warning: test label '" << item.label
                      << "' does not appear in the training split of " << name << "\n";
        }
    }
    return ds;
}

/// Label of the training item nearest to the query; ties go to the smallest
/// training index.
template <typename DistanceFn>
const std::string& knn1_predict(DistanceFn&& distance, const std::vector<LabeledSeries>& train,
                                const TimeSeries& query) {
    if (train.empty()) {
        throw std::invalid_argument("knn1_predict: empty training set");
    }
    std::size_t best = 0;
    double best_dist = distance(train[0].series, query);
    for (std::size_t i = 1; i < train.size(); ++i) {
        const double d = distance(train[i].series, query);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return train[best].label;
}

struct BenchmarkRow {
    std::string metric;
    std::optional<double> alpha;     // empty for baseline rows
    std::optional<double> accuracy;  // empty when the config was skipped
    double elapsed_seconds = 0.0;
    std::string skip_reason;         // nonempty iff the config was skipped
};

struct BenchmarkResult {
    std::string dataset;
    std::vector<BenchmarkRow> rows;
};

struct BenchmarkOptions {
    bool include_baselines = false;
    int jobs = 1;
    bool use_cache = true;      // precompute per-series curves and term matrices
    bool record_timing = true;  // false pins elapsed_seconds to 0 for reproducible output
};

inline std::string metric_id(const EnsembleConfig& cfg) {
    std::string prefix;
    switch (cfg.pipeline.curve_kind) {
        case CurveKind::betti: prefix = "betti"; break;
        case CurveKind::life: prefix = "life"; break;
        case CurveKind::stabilized_life: prefix = "sl"; break;
        case CurveKind::custom: prefix = "custom"; break;
    }
    return prefix + "-" + to_string(cfg.base);
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    const std::size_t workers =
        jobs > 1 ? std::min<std::size_t>(static_cast<std::size_t>(jobs), count) : 1;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

using TermMatrix = std::vector<std::vector<double>>;  // [test][train]

/// Precomputed per-run state: geometric operands and curves are derived once
/// per series, term matrices once per (term, settings) combination, then
/// shared read-only across configs and worker threads.
class BenchmarkCache {
public:
    BenchmarkCache(const LabeledDataset& ds, int jobs) : ds_(ds), jobs_(jobs) {}

    const TermMatrix& raw_matrix(BaseMetric base, GeomOperand geom, std::optional<int> window) {
        const std::string key = "raw/" + to_string(base) + "/" +
                                (geom == GeomOperand::raw ? "raw" : "quantized") + "/" +
                                (window ? std::to_string(*window) : "none");
        auto it = matrices_.find(key);
        if (it != matrices_.end()) {
            return it->second;
        }
        const std::vector<std::vector<double>>& train_ops = operands(geom, ds_.train);
        const std::vector<std::vector<double>>& test_ops = operands(geom, ds_.test);
        TermMatrix matrix(ds_.test.size(), std::vector<double>(ds_.train.size(), 0.0));
        parallel_for(ds_.test.size(), jobs_, [&](std::size_t j) {
            for (std::size_t i = 0; i < ds_.train.size(); ++i) {
                if (base == BaseMetric::l1) {
                    if (test_ops[j].size() != train_ops[i].size()) {
                        throw std::invalid_argument(
                            "ensemble_l1 requires equal-length series; use ensemble_dtw");
                    }
                    matrix[j][i] = dist_l1(test_ops[j], train_ops[i]);
                } else {
                    matrix[j][i] = dtw(test_ops[j], train_ops[i], window);
                }
            }
        });
        return matrices_.emplace(key, std::move(matrix)).first->second;
    }

    const TermMatrix& curve_matrix(BaseMetric base, const PipelineOptions& pipeline) {
        const std::string key = "curve/" + to_string(base) + "/" + pipeline_key(pipeline);
        auto it = matrices_.find(key);
        if (it != matrices_.end()) {
            return it->second;
        }
        const std::vector<PersistenceCurve>& train_curves = curves(pipeline, ds_.train);
        const std::vector<PersistenceCurve>& test_curves = curves(pipeline, ds_.test);
        const CurveDistance kind = base == BaseMetric::l1 ? CurveDistance::l1 : CurveDistance::dtw;
        TermMatrix matrix(ds_.test.size(), std::vector<double>(ds_.train.size(), 0.0));
        parallel_for(ds_.test.size(), jobs_, [&](std::size_t j) {
            for (std::size_t i = 0; i < ds_.train.size(); ++i) {
                matrix[j][i] = curve_dist(test_curves[j], train_curves[i], kind);
            }
        });
        return matrices_.emplace(key, std::move(matrix)).first->second;
    }

    const TermMatrix& baseline_matrix(const std::string& which) {
        const std::string key = "baseline/" + which;
        auto it = matrices_.find(key);
        if (it != matrices_.end()) {
            return it->second;
        }
        const std::vector<std::vector<double>>& train_ops = operands(GeomOperand::raw, ds_.train);
        const std::vector<std::vector<double>>& test_ops = operands(GeomOperand::raw, ds_.test);
        TermMatrix matrix(ds_.test.size(), std::vector<double>(ds_.train.size(), 0.0));
        parallel_for(ds_.test.size(), jobs_, [&](std::size_t j) {
            for (std::size_t i = 0; i < ds_.train.size(); ++i) {
                matrix[j][i] = which == "ed" ? dist_l2(test_ops[j], train_ops[i])
                                             : dtw(test_ops[j], train_ops[i]);
            }
        });
        return matrices_.emplace(key, std::move(matrix)).first->second;
    }

private:
    static std::string pipeline_key(const PipelineOptions& p) {
        return to_string(p.curve_kind) + "/" + std::to_string(p.mesh_min) + ".." +
               std::to_string(p.mesh_max) + "/" + (p.include_essential ? "ess" : "noess");
    }

    const std::vector<std::vector<double>>& operands(GeomOperand geom,
                                                     const std::vector<LabeledSeries>& items) {
        const std::string key = std::string(geom == GeomOperand::raw ? "raw" : "quantized") + "/" +
                                (&items == &ds_.train ? "train" : "test");
        auto it = operands_.find(key);
        if (it != operands_.end()) {
            return it->second;
        }
        std::vector<std::vector<double>> ops(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            ops[i] = geometric_operand(items[i].series, geom);
        }
        return operands_.emplace(key, std::move(ops)).first->second;
    }

    const std::vector<PersistenceCurve>& curves(const PipelineOptions& pipeline,
                                                const std::vector<LabeledSeries>& items) {
        const std::string key =
            pipeline_key(pipeline) + "/" + (&items == &ds_.train ? "train" : "test");
        auto it = curves_.find(key);
        if (it != curves_.end()) {
            return it->second;
        }
        std::vector<PersistenceCurve> out;
        out.reserve(items.size());
        for (const LabeledSeries& item : items) {
            out.push_back(series_curve(item.series, pipeline));
        }
        return curves_.emplace(key, std::move(out)).first->second;
    }

    const LabeledDataset& ds_;
    int jobs_;
    std::map<std::string, TermMatrix> matrices_;
    std::map<std::string, std::vector<std::vector<double>>> operands_;
    std::map<std::string, std::vector<PersistenceCurve>> curves_;
};

inline double accuracy_from_predictions(const LabeledDataset& ds,
                                        const std::vector<std::string>& predictions) {
    std::size_t correct = 0;
    for (std::size_t j = 0; j < ds.test.size(); ++j) {
        if (predictions[j] == ds.test[j].label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(ds.test.size());
}

/// 1-NN predictions from two precomputed term matrices blended with alpha;
/// ties go to the smallest training index.
inline std::vector<std::string> predict_blended(const LabeledDataset& ds, double alpha,
                                                const TermMatrix& raw, const TermMatrix& curve) {
    std::vector<std::string> predictions(ds.test.size());
    for (std::size_t j = 0; j < ds.test.size(); ++j) {
        std::size_t best = 0;
        double best_dist = ensemble_blend(alpha, raw[j][0], curve[j][0]);
        for (std::size_t i = 1; i < ds.train.size(); ++i) {
            const double d = ensemble_blend(alpha, raw[j][i], curve[j][i]);
            if (d < best_dist) {
                best_dist = d;
                best = i;
            }
        }
        predictions[j] = ds.train[best].label;
    }
    return predictions;
}

inline std::vector<std::string> predict_matrix(const LabeledDataset& ds, const TermMatrix& m) {
    std::vector<std::string> predictions(ds.test.size());
    for (std::size_t j = 0; j < ds.test.size(); ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < ds.train.size(); ++i) {
            if (m[j][i] < m[j][best]) {
                best = i;
            }
        }
        predictions[j] = ds.train[best].label;
    }
    return predictions;
}

}  // namespace detail

/// Runs 1-NN classification of the test split against the train split for
/// every config, plus the ED and windowless-DTW baselines when requested.
/// Configs that cannot apply (e.g. an l1 base on variable-length series) are
/// recorded as skipped rows with the reason, never as aborts.
inline BenchmarkResult run_benchmark(const LabeledDataset& ds,
                                     const std::vector<EnsembleConfig>& configs,
                                     const BenchmarkOptions& opt = {}) {
    if (ds.train.empty() || ds.test.empty()) {
        throw std::invalid_argument("run_benchmark: dataset needs nonempty train and test splits");
    }
    if (configs.empty()) {
        throw std::invalid_argument("run_benchmark: no configs");
    }
    for (const EnsembleConfig& cfg : configs) {
        validate_alpha(cfg.alpha);
    }

    using Clock = std::chrono::steady_clock;
    BenchmarkResult result;
    result.dataset = ds.name;
    detail::BenchmarkCache cache(ds, opt.jobs);

    for (const EnsembleConfig& cfg : configs) {
        BenchmarkRow row;
        row.metric = metric_id(cfg);
        row.alpha = cfg.alpha;
        const auto t0 = Clock::now();
        try {
            std::vector<std::string> predictions;
            if (opt.use_cache) {
                const detail::TermMatrix& raw = cache.raw_matrix(cfg.base, cfg.geom, cfg.window);
                const detail::TermMatrix& curve = cache.curve_matrix(cfg.base, cfg.pipeline);
                predictions = detail::predict_blended(ds, cfg.alpha, raw, curve);
            } else {
                predictions.resize(ds.test.size());
                detail::parallel_for(ds.test.size(), opt.jobs, [&](std::size_t j) {
                    predictions[j] = knn1_predict(
                        [&cfg](const TimeSeries& a, const TimeSeries& b) {
                            return ensemble_distance(cfg, a, b);
                        },
                        ds.train, ds.test[j].series);
                });
            }
            row.accuracy = detail::accuracy_from_predictions(ds, predictions);
        } catch (const std::exception& e) {
            row.skip_reason = e.what();
        }
        if (opt.record_timing) {
            row.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        }
        result.rows.push_back(std::move(row));
    }

    if (opt.include_baselines) {
        for (const std::string& which : {std::string("ed"), std::string("dtw")}) {
            BenchmarkRow row;
            row.metric = which;
            const auto t0 = Clock::now();
            try {
                std::vector<std::string> predictions;
                if (opt.use_cache) {
                    predictions = detail::predict_matrix(ds, cache.baseline_matrix(which));
                } else {
                    predictions.resize(ds.test.size());
                    detail::parallel_for(ds.test.size(), opt.jobs, [&](std::size_t j) {
                        predictions[j] = knn1_predict(
                            [&which](const TimeSeries& a, const TimeSeries& b) {
                                const std::vector<double> fa = a.filled();
                                const std::vector<double> fb = b.filled();
                                return which == "ed" ? dist_l2(fa, fb) : dtw(fa, fb);
                            },
                            ds.train, ds.test[j].series);
                    });
                }
                row.accuracy = detail::accuracy_from_predictions(ds, predictions);
            } catch (const std::exception& e) {
                row.skip_reason = e.what();
            }
            if (opt.record_timing) {
                row.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

namespace detail {

inline std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string format_alpha(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

/// Writes "dataset,metric,alpha,accuracy,elapsed_seconds" rows sorted by
/// (dataset, metric, alpha). Skipped configs leave accuracy and elapsed
/// empty; their reasons go to stderr at run time, not into the CSV.
inline void write_results_csv(const std::vector<BenchmarkResult>& results, std::ostream& out) {
    struct FlatRow {
        std::string dataset;
        std::string metric;
        double alpha_key;
        std::string alpha;
        std::string accuracy;
        std::string elapsed;
    };
    std::vector<FlatRow> flat;
    for (const BenchmarkResult& result : results) {
        for (const BenchmarkRow& row : result.rows) {
            FlatRow f;
            f.dataset = result.dataset;
            f.metric = row.metric;
            f.alpha_key = row.alpha.value_or(-1.0);
            f.alpha = row.alpha ? detail::format_alpha(*row.alpha) : "";
            if (row.accuracy) {
                f.accuracy = detail::format_fixed(*row.accuracy);
                f.elapsed = detail::format_fixed(row.elapsed_seconds);
            }
            flat.push_back(std::move(f));
        }
    }
    std::sort(flat.begin(), flat.end(), [](const FlatRow& a, const FlatRow& b) {
        return std::tie(a.dataset, a.metric, a.alpha_key) <
               std::tie(b.dataset, b.metric, b.alpha_key);
    });
    out << "dataset,metric,alpha,accuracy,elapsed_seconds\n";
    for (const FlatRow& f : flat) {
        out << f.dataset << ',' << f.metric << ',' << f.alpha << ',' << f.accuracy << ','
            << f.elapsed << '\n';
    }
}

struct ResultsRecord {
    std::string dataset;
    std::string metric;
    std::optional<double> alpha;
    std::optional<double> accuracy;
};

inline std::vector<ResultsRecord> read_results_csv(std::istream& in) {
    std::vector<ResultsRecord> records;
    std::string line;
    bool first = true;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (first && line.rfind("dataset,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream fin(line);
        while (std::getline(fin, field, ',')) {
            fields.push_back(field);
        }
        while (fields.size() < 5) {
            fields.emplace_back();
        }
        ResultsRecord rec;
        rec.dataset = fields[0];
        rec.metric = fields[1];
        try {
            if (!fields[2].empty()) rec.alpha = std::stod(fields[2]);
            if (!fields[3].empty()) rec.accuracy = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw std::runtime_error("read_results_csv: line " + std::to_string(line_number) +
                                     ": malformed numeric field");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// Reference accuracies keyed by dataset name, from a "dataset,accuracy" CSV.
using ReferenceTable = std::map<std::string, double>;

inline ReferenceTable read_reference_csv(std::istream& in) {
    ReferenceTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("read_reference_csv: line " + std::to_string(line_number) +
                                     ": expected 'dataset,accuracy'");
        }
        const std::string name = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (line_number == 1 && name == "dataset") {
            continue;
        }
        try {
            table[name] = std::stod(value);
        } catch (const std::exception&) {
            throw std::runtime_error("read_reference_csv: line " + std::to_string(line_number) +
                                     ": non-numeric accuracy '" + value + "'");
        }
    }
    return table;
}

struct AccuracyEntry {
    std::string dataset;
    double accuracy;
};

struct ResidualRow {
    std::string dataset;
    double ours = 0.0;
    double reference = 0.0;
    double residual = 0.0;
    std::string outcome;  // win | tie | loss
};

struct ResidualReport {
    std::vector<ResidualRow> rows;
    std::vector<std::string> uncompared;
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

/// Per-dataset accuracy difference (ours - reference) with win/tie/loss
/// tallies; datasets without a reference row are listed as uncompared.
inline ResidualReport compare_results(const std::vector<AccuracyEntry>& ours,
                                      const ReferenceTable& reference) {
    ResidualReport report;
    for (const AccuracyEntry& entry : ours) {
        auto it = reference.find(entry.dataset);
        if (it == reference.end()) {
            report.uncompared.push_back(entry.dataset);
            continue;
        }
        ResidualRow row;
        row.dataset = entry.dataset;
        row.ours = entry.accuracy;
        row.reference = it->second;
        row.residual = entry.accuracy - it->second;
        if (row.residual > 0.0) {
            row.outcome = "win";
            ++report.wins;
        } else if (row.residual < 0.0) {
            row.outcome = "loss";
            ++report.losses;
        } else {
            row.outcome = "tie";
            ++report.ties;
        }
        report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ResidualRow& a, const ResidualRow& b) { return a.dataset < b.dataset; });
    std::sort(report.uncompared.begin(), report.uncompared.end());
    return report;
}

inline void write_residual_csv(const ResidualReport& report, std::ostream& out) {
    out << "dataset,ours,reference,residual,outcome\n";
    for (const ResidualRow& row : report.rows) {
        out << row.dataset << ',' << detail::format_fixed(row.ours) << ','
            << detail::format_fixed(row.reference) << ',' << detail::format_fixed(row.residual)
            << ',' << row.outcome << '\n';
    }
}

}  // namespace tdats
