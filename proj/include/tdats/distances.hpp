#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tdats/curves.hpp"
#include "tdats/persistence.hpp"
#include "tdats/series.hpp"

namespace tdats {

/// Monotone lattice path from (0, 0) to (n-1, m-1) with unit steps
/// (1,0), (1,1), (0,1), stored as the visited index pairs.
struct WarpingPath {
    std::vector<std::pair<std::size_t, std::size_t>> steps;
};

namespace detail {

inline void check_dtw_inputs(std::size_t n, std::size_t m, std::optional<int> window) {
    if (n == 0 || m == 0) {
        throw std::invalid_argument("dtw: empty input");
    }
    if (window) {
        const auto diff = n > m ? n - m : m - n;
        if (*window < 0 || static_cast<std::size_t>(*window) < diff) {
            throw std::invalid_argument("dtw: infeasible window");
        }
    }
}

inline bool in_band(std::size_t i, std::size_t j, std::optional<int> window) {
    if (!window) {
        return true;
    }
    const auto diff = i > j ? i - j : j - i;
    return diff <= static_cast<std::size_t>(*window);
}

}  // namespace detail

/// Dynamic-time-warping distance with cost |x - y|: the minimum total cost
/// over all warping paths. An absent window means the full grid; a window is
/// a Sakoe-Chiba band half-width on the grid indices and must be at least the
/// length difference.
inline double dtw(std::span<const double> s, std::span<const double> t,
                  std::optional<int> window = std::nullopt) {
    const std::size_t n = s.size();
    const std::size_t m = t.size();
    detail::check_dtw_inputs(n, m, window);

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m, kInf);
    std::vector<double> cur(m, kInf);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(cur.begin(), cur.end(), kInf);
        for (std::size_t j = 0; j < m; ++j) {
            if (!detail::in_band(i, j, window)) {
                continue;
            }
            const double cost = std::abs(s[i] - t[j]);
            if (i == 0 && j == 0) {
                cur[j] = cost;
                continue;
            }
            double best = kInf;
            if (i > 0 && j > 0) best = prev[j - 1];
            if (i > 0) best = std::min(best, prev[j]);
            if (j > 0) best = std::min(best, cur[j - 1]);
            cur[j] = cost + best;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

/// DTW value plus one optimal path, ties broken diagonal > vertical >
/// horizontal during backtracking. The distance matches dtw() exactly.
inline std::pair<double, WarpingPath> dtw_path(std::span<const double> s,
                                               std::span<const double> t,
                                               std::optional<int> window = std::nullopt) {
    const std::size_t n = s.size();
    const std::size_t m = t.size();
    detail::check_dtw_inputs(n, m, window);

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> table(n * m, kInf);
    auto at = [&table, m](std::size_t i, std::size_t j) -> double& { return table[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!detail::in_band(i, j, window)) {
                continue;
            }
            const double cost = std::abs(s[i] - t[j]);
            if (i == 0 && j == 0) {
                at(i, j) = cost;
                continue;
            }
            double best = kInf;
            if (i > 0 && j > 0) best = at(i - 1, j - 1);
            if (i > 0) best = std::min(best, at(i - 1, j));
            if (j > 0) best = std::min(best, at(i, j - 1));
            at(i, j) = cost + best;
        }
    }

    WarpingPath path;
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    path.steps.emplace_back(i, j);
    while (i != 0 || j != 0) {
        const double residue = at(i, j) - std::abs(s[i] - t[j]);
        if (i > 0 && j > 0 && at(i - 1, j - 1) == residue) {
            --i;
            --j;
        } else if (i > 0 && at(i - 1, j) == residue) {
            --i;
        } else {
            --j;
        }
        path.steps.emplace_back(i, j);
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return {at(n - 1, m - 1), std::move(path)};
}

namespace detail {

struct DiagramPoint {
    double birth;
    double death;
};

inline double linf(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

inline double half_life(const DiagramPoint& p) { return (p.death - p.birth) / 2.0; }

/// Perfect-matching feasibility at threshold c in the diagonal-augmented
/// bipartite graph: left side = points of A plus one diagonal slot per point
/// of B, right side = points of B plus one diagonal slot per point of A.
/// Real-real edges cost their sup-norm distance, real-diagonal edges cost the
/// point's distance to the diagonal, diagonal-diagonal edges are free.
class BottleneckMatcher {
public:
    BottleneckMatcher(const std::vector<DiagramPoint>& a, const std::vector<DiagramPoint>& b)
        : a_(a), b_(b), n1_(a.size()), n2_(b.size()),
          match_right_(n1_ + n2_, kUnmatched) {}

    bool feasible(double c) {
        std::fill(match_right_.begin(), match_right_.end(), kUnmatched);
        for (std::size_t u = 0; u < n1_ + n2_; ++u) {
            visited_.assign(n1_ + n2_, false);
            if (!augment(u, c)) {
                return false;
            }
        }
        return true;
    }

private:
    static constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

    bool edge_ok(std::size_t u, std::size_t v, double c) const {
        const bool u_real = u < n1_;
        const bool v_real = v < n2_;
        if (u_real && v_real) return linf(a_[u], b_[v]) <= c;
        if (u_real) return half_life(a_[u]) <= c;
        if (v_real) return half_life(b_[v]) <= c;
        return true;
    }

    bool augment(std::size_t u, double c) {
        for (std::size_t v = 0; v < n1_ + n2_; ++v) {
            if (visited_[v] || !edge_ok(u, v, c)) {
                continue;
            }
            visited_[v] = true;
            if (match_right_[v] == kUnmatched || augment(match_right_[v], c)) {
                match_right_[v] = u;
                return true;
            }
        }
        return false;
    }

    const std::vector<DiagramPoint>& a_;
    const std::vector<DiagramPoint>& b_;
    std::size_t n1_;
    std::size_t n2_;
    std::vector<std::size_t> match_right_;
    std::vector<bool> visited_;
};

inline std::vector<DiagramPoint> diagram_points(const PersistenceDiagram& d) {
    std::vector<DiagramPoint> pts;
    pts.reserve(d.size());
    for (const PersistencePair& p : d.pairs()) {
        pts.push_back({static_cast<double>(p.birth), static_cast<double>(p.death)});
    }
    return pts;
}

}  // namespace detail

/// Bottleneck distance W_inf between diagrams under diagonal augmentation:
/// each point matches either a point of the other diagram (sup-norm cost) or
/// the diagonal (cost half its lifetime). Found by binary search over the
/// finite set of candidate costs with a matching feasibility test, so the
/// result is exact on integer diagrams. Essential pairs participate like
/// ordinary finite pairs.
inline double bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
    const std::vector<detail::DiagramPoint> a = detail::diagram_points(d1);
    const std::vector<detail::DiagramPoint> b = detail::diagram_points(d2);
    if (a.empty() && b.empty()) {
        return 0.0;
    }

    std::vector<double> candidates{0.0};
    for (const auto& p : a) candidates.push_back(detail::half_life(p));
    for (const auto& q : b) candidates.push_back(detail::half_life(q));
    for (const auto& p : a) {
        for (const auto& q : b) {
            candidates.push_back(detail::linf(p, q));
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    detail::BottleneckMatcher matcher(a, b);
    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (matcher.feasible(candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return candidates[lo];
}

enum class CurveDistance { l1, dtw };

inline CurveDistance curve_distance_from_string(const std::string& name) {
    if (name == "l1") return CurveDistance::l1;
    if (name == "dtw") return CurveDistance::dtw;
    throw std::invalid_argument("CurveDistance: unknown name '" + name + "'");
}

/// Distance between discretized curves: l1 requires a shared mesh, dtw
/// accepts any meshes.
inline double curve_dist(const PersistenceCurve& c1, const PersistenceCurve& c2,
                         CurveDistance kind) {
    switch (kind) {
        case CurveDistance::l1:
            if (!(c1.mesh == c2.mesh)) {
                throw std::invalid_argument("curve_dist: mesh mismatch");
            }
            return dist_l1(c1.samples, c2.samples);
        case CurveDistance::dtw:
            return dtw(c1.samples, c2.samples);
    }
    throw std::invalid_argument("curve_dist: unknown kind");
}

}  // namespace tdats
