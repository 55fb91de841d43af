#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdats/curves.hpp"
#include "tdats/distances.hpp"
#include "tdats/persistence.hpp"
#include "tdats/series.hpp"

namespace tdats {

enum class BaseMetric { l1, dtw };

inline std::string to_string(BaseMetric base) {
    return base == BaseMetric::l1 ? "l1" : "dtw";
}

/// Operand of the geometric term: the raw (missing-filled) values, or the
/// quantized values. Quantization exists to compute persistence, so raw is
/// the default; quantized is exposed for sensitivity runs.
enum class GeomOperand { raw, quantized };

/// Settings of the topological transformation applied to every series:
/// quantize, take the sublevel diagram, vectorize as a curve on the mesh.
/// exclude_essential drops the essential pair before the curve is computed
/// (both from the fundamental box and from any normalizer, keeping
/// stabilized-life samples in [0, 1]).
struct PipelineOptions {
    CurveKind curve_kind = CurveKind::stabilized_life;
    int mesh_min = 1;
    int mesh_max = 101;
    bool include_essential = true;

    friend bool operator==(const PipelineOptions&, const PipelineOptions&) = default;
};

inline PersistenceCurve curve_of_diagram(const PersistenceDiagram& d, const PipelineOptions& opt) {
    const Mesh mesh = Mesh::integer_range(opt.mesh_min, opt.mesh_max);
    const PersistenceDiagram source = opt.include_essential ? d : drop_essential(d);
    switch (opt.curve_kind) {
        case CurveKind::betti: return betti_curve(source, mesh);
        case CurveKind::life: return life_curve(source, mesh);
        case CurveKind::stabilized_life: return stabilized_life_curve(source, mesh);
        case CurveKind::custom:
            throw std::invalid_argument("curve_of_diagram: custom kind needs an explicit functional");
    }
    throw std::invalid_argument("curve_of_diagram: unknown kind");
}

/// Full topological transformation of one series.
inline PersistenceCurve series_curve(const TimeSeries& s, const PipelineOptions& opt = {}) {
    return curve_of_diagram(sublevel_diagram(quantize(s)), opt);
}

/// Configuration of one ensemble distance: the blend weight, the base metric
/// of both terms, and the pipeline producing the curves. The window, when
/// set, bounds the raw-series DTW term; curve DTW is always windowless.
struct EnsembleConfig {
    double alpha = 0.5;
    BaseMetric base = BaseMetric::l1;
    PipelineOptions pipeline{};
    GeomOperand geom = GeomOperand::raw;
    std::optional<int> window{};
};

inline void validate_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("ensemble: alpha must lie in [0, 1]");
    }
}

inline std::vector<double> geometric_operand(const TimeSeries& s, GeomOperand geom) {
    return geom == GeomOperand::raw ? s.filled() : quantize(s).as_doubles();
}

/// alpha * raw_term + (1 - alpha) * curve_term. Shared by the direct and the
/// precomputed (cached) evaluation paths so both produce identical doubles.
inline double ensemble_blend(double alpha, double raw_term, double curve_term) {
    return alpha * raw_term + (1.0 - alpha) * curve_term;
}

/// d^P_1(alpha): alpha * |s - t|_1 + (1 - alpha) * |curve_s - curve_t|_1.
/// Requires equal raw lengths.
inline double ensemble_l1(const EnsembleConfig& cfg, const TimeSeries& s, const TimeSeries& t) {
    validate_alpha(cfg.alpha);
    const std::vector<double> gs = geometric_operand(s, cfg.geom);
    const std::vector<double> gt = geometric_operand(t, cfg.geom);
    if (gs.size() != gt.size()) {
        throw std::invalid_argument("ensemble_l1 requires equal-length series; use ensemble_dtw");
    }
    const double raw_term = dist_l1(gs, gt);
    const double curve_term =
        curve_dist(series_curve(s, cfg.pipeline), series_curve(t, cfg.pipeline), CurveDistance::l1);
    return ensemble_blend(cfg.alpha, raw_term, curve_term);
}

/// d^P_DTW(alpha): alpha * |s - t|_DTW + (1 - alpha) * |curve_s -
/// curve_t|_DTW. Accepts any lengths.
inline double ensemble_dtw(const EnsembleConfig& cfg, const TimeSeries& s, const TimeSeries& t) {
    validate_alpha(cfg.alpha);
    const std::vector<double> gs = geometric_operand(s, cfg.geom);
    const std::vector<double> gt = geometric_operand(t, cfg.geom);
    const double raw_term = dtw(gs, gt, cfg.window);
    const double curve_term =
        curve_dist(series_curve(s, cfg.pipeline), series_curve(t, cfg.pipeline), CurveDistance::dtw);
    return ensemble_blend(cfg.alpha, raw_term, curve_term);
}

inline double ensemble_distance(const EnsembleConfig& cfg, const TimeSeries& s,
                                const TimeSeries& t) {
    return cfg.base == BaseMetric::l1 ? ensemble_l1(cfg, s, t) : ensemble_dtw(cfg, s, t);
}

}  // namespace tdats
