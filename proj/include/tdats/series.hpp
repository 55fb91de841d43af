#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdats {

/// A finite real-valued series. Missing observations are stored as quiet NaN;
/// every present entry must be finite.
class TimeSeries {
public:
    TimeSeries() = default;

    explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw std::invalid_argument("TimeSeries: empty input");
        }
        for (double v : values_) {
            if (std::isinf(v)) {
                throw std::invalid_argument("TimeSeries: entries must be finite or missing");
            }
        }
    }

    static constexpr double missing() { return std::numeric_limits<double>::quiet_NaN(); }
    static bool is_missing(double v) { return std::isnan(v); }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    bool has_missing() const {
        return std::any_of(values_.begin(), values_.end(),
                           [](double v) { return std::isnan(v); });
    }

    /// Copy of the values with every missing entry replaced by 0.
    std::vector<double> filled() const {
        std::vector<double> out(values_);
        for (double& v : out) {
            if (std::isnan(v)) {
                v = 0.0;
            }
        }
        return out;
    }

private:
    std::vector<double> values_;
};

/// Integer series on the normalized value range [1, 101], the domain of the
/// persistence computation.
struct QuantizedSeries {
    std::vector<int> values;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    std::vector<double> as_doubles() const {
        return std::vector<double>(values.begin(), values.end());
    }

    friend bool operator==(const QuantizedSeries&, const QuantizedSeries&) = default;
};

/// Rounding rule used by quantize: halfway cases round away from zero.
inline int round_half_away_from_zero(double x) {
    return static_cast<int>(std::llround(x));
}

/// Maps a series onto integers in [1, 101]: missing entries are filled with 0
/// first, then each value x becomes round(1 + (x - min) / (max - min) * 100)
/// with min/max taken over the filled series. A constant series maps to all
/// ones (the formula would divide by zero; a constant is a single component
/// living at one level, so it gets the bottom of the range).
inline QuantizedSeries quantize(const TimeSeries& s) {
    if (s.empty()) {
        throw std::invalid_argument("quantize: empty input");
    }
    const std::vector<double> filled = s.filled();
    const auto [mn_it, mx_it] = std::minmax_element(filled.begin(), filled.end());
    const double mn = *mn_it;
    const double mx = *mx_it;

    QuantizedSeries q;
    if (mx == mn) {
        q.values.assign(filled.size(), 1);
        return q;
    }
    q.values.reserve(filled.size());
    for (double x : filled) {
        q.values.push_back(round_half_away_from_zero(1.0 + (x - mn) / (mx - mn) * 100.0));
    }
    return q;
}

inline double norm_l1(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
        sum += std::abs(x);
    }
    return sum;
}

inline double norm_l1(const QuantizedSeries& q) {
    double sum = 0.0;
    for (int x : q.values) {
        sum += std::abs(x);
    }
    return sum;
}

inline double dist_l1(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dist_l1: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(a[i] - b[i]);
    }
    return sum;
}

inline double dist_l2(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dist_l2: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

inline double dist_linf(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dist_linf: length mismatch");
    }
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mx = std::max(mx, std::abs(a[i] - b[i]));
    }
    return mx;
}

}  // namespace tdats
