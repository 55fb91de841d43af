#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdats/persistence.hpp"

namespace tdats {

/// Strictly increasing integer levels on which curves are sampled. Must
/// contain every birth and death value of any diagram it is paired with.
class Mesh {
public:
    explicit Mesh(std::vector<int> points) : points_(std::move(points)) {
        if (points_.empty()) {
            throw std::invalid_argument("Mesh: empty mesh");
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (points_[i] <= points_[i - 1]) {
                throw std::invalid_argument("Mesh: points must be strictly increasing");
            }
        }
    }

    static Mesh integer_range(int lo, int hi) {
        if (lo > hi) {
            throw std::invalid_argument("Mesh: invalid range");
        }
        std::vector<int> pts;
        pts.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (int x = lo; x <= hi; ++x) {
            pts.push_back(x);
        }
        return Mesh(std::move(pts));
    }

    const std::vector<int>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    int min() const { return points_.front(); }
    int max() const { return points_.back(); }

    bool contains(int x) const {
        return std::binary_search(points_.begin(), points_.end(), x);
    }

    friend bool operator==(const Mesh&, const Mesh&) = default;

private:
    std::vector<int> points_;
};

/// The quantization range [1, 101] as a 101-point mesh; contains every birth
/// and death value a quantized series can produce.
inline Mesh default_mesh() { return Mesh::integer_range(1, 101); }

enum class CurveKind { betti, life, stabilized_life, custom };

inline std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::betti: return "betti";
        case CurveKind::life: return "life";
        case CurveKind::stabilized_life: return "stabilized_life";
        case CurveKind::custom: return "custom";
    }
    throw std::invalid_argument("CurveKind: unknown value");
}

inline CurveKind curve_kind_from_string(const std::string& name) {
    if (name == "betti") return CurveKind::betti;
    if (name == "life") return CurveKind::life;
    if (name == "stabilized_life" || name == "sl") return CurveKind::stabilized_life;
    if (name == "custom") return CurveKind::custom;
    throw std::invalid_argument("CurveKind: unknown name '" + name + "'");
}

/// A diagram vectorized on a mesh: samples[k] is the curve value at
/// mesh.points()[k].
struct PersistenceCurve {
    std::vector<double> samples;
    Mesh mesh;
    CurveKind kind = CurveKind::custom;
};

enum class Statistic { sum, mean, max };

/// The data of a curve: a pointwise weight psi(birth, death, x) that vanishes
/// on diagonal inputs, a statistic applied over the fundamental box, and an
/// optional diagram-level normalizer dividing every weight (a zero normalizer
/// yields the identically-zero curve).
struct CurveFunctional {
    std::function<double(int birth, int death, int x)> psi;
    Statistic statistic = Statistic::sum;
    std::function<double(const PersistenceDiagram&)> normalizer;
};

/// Samples T({psi(b, d, x) : b <= x < d}) at every mesh point, with
/// T(empty) = 0. The essential pair participates like any other pair.
inline PersistenceCurve curve_eval(const PersistenceDiagram& d, const CurveFunctional& f,
                                   const Mesh& mesh, CurveKind kind = CurveKind::custom) {
    if (!f.psi) {
        throw std::invalid_argument("curve_eval: missing psi");
    }
    for (const PersistencePair& p : d.pairs()) {
        if (!mesh.contains(p.birth) || !mesh.contains(p.death)) {
            throw std::invalid_argument("curve_eval: mesh too coarse");
        }
    }

    PersistenceCurve curve{std::vector<double>(mesh.size(), 0.0), mesh, kind};
    double divisor = 1.0;
    if (f.normalizer) {
        divisor = f.normalizer(d);
        if (divisor == 0.0) {
            return curve;
        }
    }

    for (std::size_t k = 0; k < mesh.size(); ++k) {
        const int x = mesh.points()[k];
        double sum = 0.0;
        double mx = -std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        for (const PersistencePair& p : d.pairs()) {
            if (p.birth <= x && x < p.death) {
                const double value = f.psi(p.birth, p.death, x);
                sum += value;
                mx = std::max(mx, value);
                ++count;
            }
        }
        // The normalizer divides the statistic, not each weight: identical
        // algebraically (the statistics are positively homogeneous) and it
        // keeps exact ratios exact, e.g. stabilized-life samples never drift
        // above 1.
        double value = 0.0;
        switch (f.statistic) {
            case Statistic::sum: value = sum; break;
            case Statistic::mean: value = count ? sum / static_cast<double>(count) : 0.0; break;
            case Statistic::max: value = count ? mx : 0.0; break;
        }
        curve.samples[k] = value / divisor;
    }
    return curve;
}

/// Counts the pairs alive at each level; recovers the Betti numbers of the
/// sublevel sets below the final level.
inline PersistenceCurve betti_curve(const PersistenceDiagram& d, const Mesh& mesh) {
    CurveFunctional f;
    f.psi = [](int, int, int) { return 1.0; };
    return curve_eval(d, f, mesh, CurveKind::betti);
}

inline PersistenceCurve life_curve(const PersistenceDiagram& d, const Mesh& mesh) {
    CurveFunctional f;
    f.psi = [](int b, int dd, int) { return static_cast<double>(dd - b); };
    return curve_eval(d, f, mesh, CurveKind::life);
}

/// Lifetimes normalized by the total lifetime of the diagram, summed over the
/// fundamental box; samples lie in [0, 1]. A diagram with zero total lifetime
/// yields the zero curve.
inline PersistenceCurve stabilized_life_curve(const PersistenceDiagram& d, const Mesh& mesh) {
    CurveFunctional f;
    f.psi = [](int b, int dd, int) { return static_cast<double>(dd - b); };
    f.normalizer = [](const PersistenceDiagram& diagram) { return diagram.total_lifetime(); };
    return curve_eval(d, f, mesh, CurveKind::stabilized_life);
}

/// One CSV row: kind, mesh min, mesh max, then one field per sample. Samples
/// are printed with 17 significant digits so a reparse reproduces the exact
/// doubles. Only contiguous integer meshes serialize.
inline std::string curve_to_csv_row(const PersistenceCurve& c) {
    const Mesh contiguous = Mesh::integer_range(c.mesh.min(), c.mesh.max());
    if (!(c.mesh == contiguous)) {
        throw std::invalid_argument("curve_to_csv_row: only contiguous integer meshes serialize");
    }
    std::ostringstream out;
    out << to_string(c.kind) << ',' << c.mesh.min() << ',' << c.mesh.max();
    char buf[64];
    for (double v : c.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    }
    return out.str();
}

inline PersistenceCurve curve_from_csv_row(const std::string& row) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(row);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (fields.size() < 4) {
        throw std::runtime_error("curve_from_csv_row: malformed row");
    }
    const CurveKind kind = curve_kind_from_string(fields[0]);
    int lo = 0;
    int hi = 0;
    try {
        lo = std::stoi(fields[1]);
        hi = std::stoi(fields[2]);
    } catch (const std::exception&) {
        throw std::runtime_error("curve_from_csv_row: bad mesh bounds");
    }
    Mesh mesh = Mesh::integer_range(lo, hi);
    if (fields.size() - 3 != mesh.size()) {
        throw std::runtime_error("curve_from_csv_row: sample count does not match mesh");
    }
    std::vector<double> samples;
    samples.reserve(mesh.size());
    for (std::size_t i = 3; i < fields.size(); ++i) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(fields[i], &used);
        } catch (const std::exception&) {
            throw std::runtime_error("curve_from_csv_row: non-numeric sample '" + fields[i] + "'");
        }
        if (used != fields[i].size()) {
            throw std::runtime_error("curve_from_csv_row: non-numeric sample '" + fields[i] + "'");
        }
        samples.push_back(v);
    }
    return PersistenceCurve{std::move(samples), std::move(mesh), kind};
}

}  // namespace tdats
