// tda-ts: sublevel-set persistence features and ensemble-distance benchmarks
// for time series. Subcommands: diagram, curve, dist, bench, compare.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdats/curves.hpp"
#include "tdats/distances.hpp"
#include "tdats/ensemble.hpp"
#include "tdats/persistence.hpp"
#include "tdats/series.hpp"
#include "tdats/svg.hpp"
#include "tdats/ucr.hpp"

namespace {

namespace fs = std::filesystem;

double parse_value_token(const std::string& tok) {
    std::string lower(tok);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "nan") {
        return tdats::TimeSeries::missing();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("cli: non-numeric value token '" + tok + "'");
    }
    if (used != tok.size()) {
        throw std::runtime_error("cli: non-numeric value token '" + tok + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

tdats::TimeSeries series_from_tokens(const std::vector<std::string>& tokens) {
    std::vector<double> values;
    values.reserve(tokens.size());
    for (const std::string& tok : tokens) {
        values.push_back(parse_value_token(tok));
    }
    return tdats::TimeSeries(std::move(values));
}

tdats::TimeSeries series_from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cli: cannot open series file: " + path.string());
    }
    std::vector<std::string> tokens{std::istream_iterator<std::string>(in),
                                    std::istream_iterator<std::string>()};
    return series_from_tokens(tokens);
}

tdats::TimeSeries read_series(const std::string& values_flag, const std::string& file_flag) {
    if (!values_flag.empty()) {
        return series_from_tokens(split(values_flag, ','));
    }
    if (!file_flag.empty()) {
        return series_from_file(file_flag);
    }
    std::vector<std::string> tokens{std::istream_iterator<std::string>(std::cin),
                                    std::istream_iterator<std::string>()};
    return series_from_tokens(tokens);
}

/// Reinterprets an already-integer series as quantized levels without
/// applying the normalization map.
tdats::QuantizedSeries as_integer_levels(const tdats::TimeSeries& s) {
    tdats::QuantizedSeries q;
    q.values.reserve(s.size());
    for (double v : s.values()) {
        if (tdats::TimeSeries::is_missing(v) || v != std::floor(v)) {
            throw std::runtime_error(
                "cli: input has non-integer or missing entries; pass --quantize to normalize first");
        }
        q.values.push_back(static_cast<int>(v));
    }
    return q;
}

tdats::QuantizedSeries levels_of(const tdats::TimeSeries& s, bool apply_quantize) {
    return apply_quantize ? tdats::quantize(s) : as_integer_levels(s);
}

tdats::PersistenceCurve curve_from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cli: cannot open curve file: " + path.string());
    }
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            return tdats::curve_from_csv_row(line);
        }
    }
    throw std::runtime_error("cli: empty curve file: " + path.string());
}

struct MetricSpec {
    bool ensemble = false;
    tdats::BaseMetric base = tdats::BaseMetric::l1;
    tdats::CurveKind kind = tdats::CurveKind::stabilized_life;
    std::string raw;  // nonempty for plain metrics: l1 | l2 | dtw | bottleneck
};

MetricSpec parse_metric(const std::string& id) {
    MetricSpec spec;
    const std::size_t dash = id.rfind('-');
    if (dash != std::string::npos) {
        const std::string prefix = id.substr(0, dash);
        const std::string base = id.substr(dash + 1);
        if ((prefix == "sl" || prefix == "betti" || prefix == "life") &&
            (base == "l1" || base == "dtw")) {
            spec.ensemble = true;
            spec.kind = tdats::curve_kind_from_string(prefix);
            spec.base = base == "l1" ? tdats::BaseMetric::l1 : tdats::BaseMetric::dtw;
            return spec;
        }
    }
    if (id == "l1" || id == "l2" || id == "dtw" || id == "bottleneck") {
        spec.raw = id;
        return spec;
    }
    throw std::runtime_error("cli: unknown metric '" + id + "'");
}

std::ostream& open_output(std::ofstream& file, const std::string& out_path) {
    if (out_path.empty()) {
        return std::cout;
    }
    file.open(out_path);
    if (!file) {
        throw std::runtime_error("cli: cannot open output file: " + out_path);
    }
    return file;
}

void print_distance(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    std::cout << buf << '\n';
}

bool is_dataset_dir(const fs::path& dir) {
    fs::path normalized = dir;
    if (normalized.filename().empty()) {
        normalized = normalized.parent_path();
    }
    const std::string name = normalized.filename().string();
    return fs::exists(normalized / (name + "_TRAIN.tsv"));
}

std::vector<fs::path> dataset_dirs(const fs::path& root) {
    if (is_dataset_dir(root)) {
        return {root};
    }
    std::vector<fs::path> dirs;
    if (!fs::is_directory(root)) {
        throw std::runtime_error("cli: not a directory: " + root.string());
    }
    for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && is_dataset_dir(entry.path())) {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) {
        throw std::runtime_error("cli: no datasets found under: " + root.string());
    }
    return dirs;
}

struct PipelineFlags {
    int mesh_min = 1;
    int mesh_max = 101;
    std::string essential = "include";
    std::string geom = "raw";
    int window = -1;  // <0 means no window

    tdats::PipelineOptions pipeline(tdats::CurveKind kind) const {
        if (essential != "include" && essential != "exclude") {
            throw std::runtime_error("cli: --essential must be 'include' or 'exclude'");
        }
        return tdats::PipelineOptions{kind, mesh_min, mesh_max, essential == "include"};
    }

    tdats::GeomOperand geom_operand() const {
        if (geom == "raw") return tdats::GeomOperand::raw;
        if (geom == "quantized") return tdats::GeomOperand::quantized;
        throw std::runtime_error("cli: --geom must be 'raw' or 'quantized'");
    }

    std::optional<int> window_opt() const {
        return window < 0 ? std::nullopt : std::optional<int>(window);
    }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
    cmd->add_option("--mesh-min", flags.mesh_min, "Mesh lower bound (default 1)");
    cmd->add_option("--mesh-max", flags.mesh_max, "Mesh upper bound (default 101)");
    cmd->add_option("--essential", flags.essential,
                    "Essential pair handling: include|exclude (default include)");
}

int run_diagram(const std::string& values_flag, const std::string& file_flag, bool quantize_flag) {
    const tdats::TimeSeries s = read_series(values_flag, file_flag);
    const tdats::PersistenceDiagram d = tdats::sublevel_diagram(levels_of(s, quantize_flag));
    std::cout << d.to_text();
    return 0;
}

int run_curve(const std::string& values_flag, const std::string& file_flag, bool quantize_flag,
              const std::string& kind_name, const PipelineFlags& flags,
              const std::string& out_path) {
    const tdats::TimeSeries s = read_series(values_flag, file_flag);
    const tdats::CurveKind kind = tdats::curve_kind_from_string(kind_name);
    const tdats::PersistenceDiagram d = tdats::sublevel_diagram(levels_of(s, quantize_flag));
    const tdats::PersistenceCurve c = tdats::curve_of_diagram(d, flags.pipeline(kind));
    std::ofstream file;
    std::ostream& out = open_output(file, out_path);
    out << tdats::curve_to_csv_row(c) << '\n';
    return 0;
}

int run_dist(const std::string& metric_id, double alpha, const std::string& a_path,
             const std::string& b_path, bool from_curves, bool quantize_flag,
             const PipelineFlags& flags) {
    if (a_path.empty() || b_path.empty()) {
        throw std::runtime_error("cli: dist requires --a and --b");
    }
    if (from_curves) {
        if (metric_id != "l1" && metric_id != "dtw") {
            throw std::runtime_error("cli: --from-curves supports metrics l1 and dtw");
        }
        const tdats::PersistenceCurve c1 = curve_from_file(a_path);
        const tdats::PersistenceCurve c2 = curve_from_file(b_path);
        print_distance(tdats::curve_dist(c1, c2, tdats::curve_distance_from_string(metric_id)));
        return 0;
    }

    const tdats::TimeSeries s = series_from_file(a_path);
    const tdats::TimeSeries t = series_from_file(b_path);
    const MetricSpec spec = parse_metric(metric_id);
    if (spec.ensemble) {
        tdats::EnsembleConfig cfg;
        cfg.alpha = alpha;
        cfg.base = spec.base;
        cfg.pipeline = flags.pipeline(spec.kind);
        cfg.geom = flags.geom_operand();
        cfg.window = flags.window_opt();
        print_distance(tdats::ensemble_distance(cfg, s, t));
        return 0;
    }
    if (spec.raw == "bottleneck") {
        const tdats::PersistenceDiagram d1 = tdats::sublevel_diagram(levels_of(s, quantize_flag));
        const tdats::PersistenceDiagram d2 = tdats::sublevel_diagram(levels_of(t, quantize_flag));
        print_distance(tdats::bottleneck(d1, d2));
        return 0;
    }
    const std::vector<double> fs = s.filled();
    const std::vector<double> ft = t.filled();
    if (spec.raw == "l1") {
        print_distance(tdats::dist_l1(fs, ft));
    } else if (spec.raw == "l2") {
        print_distance(tdats::dist_l2(fs, ft));
    } else {
        print_distance(tdats::dtw(fs, ft, flags.window_opt()));
    }
    return 0;
}

int run_bench(const std::string& data_dir, const std::string& alphas_flag,
              const std::string& metrics_flag, bool baselines, int jobs, bool no_timing,
              bool no_cache, const PipelineFlags& flags, const std::string& out_path) {
    std::vector<double> alphas;
    for (const std::string& tok : split(alphas_flag, ',')) {
        alphas.push_back(parse_value_token(tok));
    }
    if (alphas.empty()) {
        throw std::runtime_error("cli: --alphas must list at least one value");
    }
    std::vector<MetricSpec> metrics;
    for (const std::string& tok : split(metrics_flag, ',')) {
        MetricSpec spec = parse_metric(tok);
        if (!spec.ensemble) {
            throw std::runtime_error("cli: bench metrics must be ensemble metrics, got '" + tok +
                                     "'");
        }
        metrics.push_back(spec);
    }
    if (metrics.empty()) {
        throw std::runtime_error("cli: --metrics must list at least one metric");
    }

    std::vector<tdats::EnsembleConfig> configs;
    for (const MetricSpec& spec : metrics) {
        for (double alpha : alphas) {
            tdats::EnsembleConfig cfg;
            cfg.alpha = alpha;
            cfg.base = spec.base;
            cfg.pipeline = flags.pipeline(spec.kind);
            cfg.geom = flags.geom_operand();
            cfg.window = flags.window_opt();
            configs.push_back(cfg);
        }
    }

    tdats::BenchmarkOptions options;
    options.include_baselines = baselines;
    options.jobs = jobs;
    options.use_cache = !no_cache;
    options.record_timing = !no_timing;

    std::vector<tdats::BenchmarkResult> results;
    for (const fs::path& dir : dataset_dirs(data_dir)) {
        const tdats::LabeledDataset ds = tdats::load_ucr(dir);
        tdats::BenchmarkResult result = tdats::run_benchmark(ds, configs, options);
        for (const tdats::BenchmarkRow& row : result.rows) {
            if (!row.skip_reason.empty()) {
                std::cerr << "bench: " << result.dataset << " " << row.metric;
                if (row.alpha) {
                    std::cerr << " alpha=" << *row.alpha;
                }
                std::cerr << ": skipped: " << row.skip_reason << "\n";
            }
        }
        results.push_back(std::move(result));
    }

    std::ofstream file;
    std::ostream& out = open_output(file, out_path);
    tdats::write_results_csv(results, out);
    return 0;
}

int run_compare(const std::string& ours_path, const std::string& metric_id,
                const std::string& alpha_flag, const std::string& reference_path,
                const std::string& out_path, const std::string& svg_path) {
    std::ifstream ours_file(ours_path);
    if (!ours_file) {
        throw std::runtime_error("cli: cannot open results file: " + ours_path);
    }
    const std::vector<tdats::ResultsRecord> records = tdats::read_results_csv(ours_file);

    std::optional<double> alpha;
    if (!alpha_flag.empty()) {
        alpha = parse_value_token(alpha_flag);
    }
    std::vector<tdats::AccuracyEntry> ours;
    for (const tdats::ResultsRecord& rec : records) {
        if (rec.metric != metric_id || !rec.accuracy) {
            continue;
        }
        if (alpha.has_value() != rec.alpha.has_value()) {
            continue;
        }
        if (alpha && *rec.alpha != *alpha) {
            continue;
        }
        ours.push_back({rec.dataset, *rec.accuracy});
    }
    if (ours.empty()) {
        throw std::runtime_error("cli: no rows in " + ours_path + " match metric '" + metric_id +
                                 "'" + (alpha ? " alpha " + alpha_flag : ""));
    }

    std::ifstream ref_file(reference_path);
    if (!ref_file) {
        throw std::runtime_error("cli: cannot open reference file: " + reference_path);
    }
    const tdats::ReferenceTable reference = tdats::read_reference_csv(ref_file);
    const tdats::ResidualReport report = tdats::compare_results(ours, reference);

    std::ofstream file;
    std::ostream& out = open_output(file, out_path);
    tdats::write_residual_csv(report, out);
    std::cerr << "compare: wins=" << report.wins << " ties=" << report.ties
              << " losses=" << report.losses << " uncompared=" << report.uncompared.size() << "\n";
    if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) {
            throw std::runtime_error("cli: cannot open svg file: " + svg_path);
        }
        tdats::write_residual_svg(report, svg);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological feature vectors and ensemble distances for time series"};
    app.require_subcommand(1);

    // diagram
    auto* diagram = app.add_subcommand("diagram", "Print the sublevel persistence diagram");
    std::string dg_values, dg_file;
    bool dg_quantize = false;
    diagram->add_option("--values", dg_values, "Comma-separated series values");
    diagram->add_option("--file", dg_file, "File of whitespace-separated values");
    diagram->add_flag("--quantize", dg_quantize, "Normalize onto [1, 101] first");

    // curve
    auto* curve = app.add_subcommand("curve", "Print a persistence curve as one CSV row");
    std::string cv_values, cv_file, cv_kind = "sl", cv_out;
    bool cv_quantize = false;
    PipelineFlags cv_flags;
    curve->add_option("--values", cv_values, "Comma-separated series values");
    curve->add_option("--file", cv_file, "File of whitespace-separated values");
    curve->add_option("--kind", cv_kind, "Curve kind: sl|betti|life (default sl)");
    curve->add_flag("--quantize", cv_quantize, "Normalize onto [1, 101] first");
    curve->add_option("--out", cv_out, "Output path (default stdout)");
    add_pipeline_flags(curve, cv_flags);

    // dist
    auto* dist = app.add_subcommand("dist", "Print one distance between two series");
    std::string ds_metric = "sl-l1", ds_a, ds_b;
    double ds_alpha = 0.5;
    bool ds_from_curves = false;
    bool ds_quantize = false;
    PipelineFlags ds_flags;
    dist->add_option("--metric", ds_metric,
                     "l1|l2|dtw|bottleneck|sl-l1|sl-dtw|betti-l1|betti-dtw|life-l1|life-dtw");
    dist->add_option("--alpha", ds_alpha, "Blend weight for ensemble metrics (default 0.5)");
    dist->add_option("--a", ds_a, "First input file")->required();
    dist->add_option("--b", ds_b, "Second input file")->required();
    dist->add_flag("--from-curves", ds_from_curves, "Inputs are curve CSV rows, not series");
    dist->add_flag("--quantize", ds_quantize, "Normalize before the bottleneck metric");
    dist->add_option("--geom", ds_flags.geom, "Geometric operand: raw|quantized (default raw)");
    dist->add_option("--window", ds_flags.window, "Sakoe-Chiba half-width for raw DTW");
    add_pipeline_flags(dist, ds_flags);

    // bench
    auto* bench = app.add_subcommand("bench", "Run 1-NN benchmarks over UCR-style datasets");
    std::string bn_data, bn_alphas = "0,0.25,0.5,0.75,1", bn_metrics = "sl-l1,sl-dtw", bn_out;
    bool bn_baselines = false, bn_no_timing = false, bn_no_cache = false;
    int bn_jobs = 1;
    PipelineFlags bn_flags;
    bench->add_option("--data", bn_data, "Dataset directory or archive root")->required();
    bench->add_option("--alphas", bn_alphas, "Comma-separated blend weights");
    bench->add_option("--metrics", bn_metrics, "Comma-separated ensemble metrics");
    bench->add_flag("--baselines", bn_baselines, "Also run ED and windowless DTW 1-NN");
    bench->add_option("--jobs", bn_jobs, "Worker threads (default 1)");
    bench->add_flag("--no-timing", bn_no_timing, "Write elapsed_seconds as 0 for reproducibility");
    bench->add_flag("--no-cache", bn_no_cache, "Recompute curves per pair (reference path)");
    bench->add_option("--geom", bn_flags.geom, "Geometric operand: raw|quantized (default raw)");
    bench->add_option("--window", bn_flags.window, "Sakoe-Chiba half-width for raw DTW");
    bench->add_option("--out", bn_out, "Results CSV path (default stdout)");
    add_pipeline_flags(bench, bn_flags);

    // compare
    auto* compare = app.add_subcommand("compare", "Residuals against reference accuracies");
    std::string cp_file, cp_metric = "sl-l1", cp_alpha, cp_reference, cp_out, cp_svg;
    compare->add_option("--file", cp_file, "Our results CSV")->required();
    compare->add_option("--metric", cp_metric, "Metric id to select (default sl-l1)");
    compare->add_option("--alpha", cp_alpha, "Alpha to select (empty selects baseline rows)");
    compare->add_option("--reference", cp_reference, "Reference CSV: dataset,accuracy")->required();
    compare->add_option("--out", cp_out, "Residual CSV path (default stdout)");
    compare->add_option("--svg", cp_svg, "Write a residual bar chart to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (diagram->parsed()) {
            return run_diagram(dg_values, dg_file, dg_quantize);
        }
        if (curve->parsed()) {
            return run_curve(cv_values, cv_file, cv_quantize, cv_kind, cv_flags, cv_out);
        }
        if (dist->parsed()) {
            return run_dist(ds_metric, ds_alpha, ds_a, ds_b, ds_from_curves, ds_quantize, ds_flags);
        }
        if (bench->parsed()) {
            return run_bench(bn_data, bn_alphas, bn_metrics, bn_baselines, bn_jobs, bn_no_timing,
                             bn_no_cache, bn_flags, bn_out);
        }
        if (compare->parsed()) {
            return run_compare(cp_file, cp_metric, cp_alpha, cp_reference, cp_out, cp_svg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
