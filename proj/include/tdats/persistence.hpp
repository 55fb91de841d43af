#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tdats/series.hpp"

namespace tdats {

struct PersistencePair {
    int birth = 0;
    int death = 0;
    bool essential = false;

    int lifetime() const { return death - birth; }

    friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

/// Multiset of birth/death pairs in canonical order: ascending (birth, death),
/// essential pair first on exact ties. Diagonal points of infinite
/// multiplicity are implicit and never stored.
class PersistenceDiagram {
public:
    PersistenceDiagram() = default;

    explicit PersistenceDiagram(std::vector<PersistencePair> pairs) : pairs_(std::move(pairs)) {
        for (const PersistencePair& p : pairs_) {
            if (p.birth > p.death) {
                throw std::invalid_argument("PersistenceDiagram: birth > death");
            }
        }
        std::sort(pairs_.begin(), pairs_.end(), [](const PersistencePair& a, const PersistencePair& b) {
            return std::make_tuple(a.birth, a.death, !a.essential) <
                   std::make_tuple(b.birth, b.death, !b.essential);
        });
    }

    const std::vector<PersistencePair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    /// The unique pair flagged essential, or nullptr for diagrams without one
    /// (hand-built test diagrams, the empty diagram).
    const PersistencePair* essential() const {
        for (const PersistencePair& p : pairs_) {
            if (p.essential) {
                return &p;
            }
        }
        return nullptr;
    }

    double total_lifetime() const {
        double sum = 0.0;
        for (const PersistencePair& p : pairs_) {
            sum += p.lifetime();
        }
        return sum;
    }

    /// One "birth death" line per pair, the essential pair marked with a
    /// trailing " *".
    std::string to_text() const {
        std::ostringstream out;
        for (const PersistencePair& p : pairs_) {
            out << p.birth << ' ' << p.death;
            if (p.essential) {
                out << " *";
            }
            out << '\n';
        }
        return out.str();
    }

    friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;

private:
    std::vector<PersistencePair> pairs_;
};

/// Copy of the diagram with the essential pair removed.
inline PersistenceDiagram drop_essential(const PersistenceDiagram& d) {
    std::vector<PersistencePair> kept;
    kept.reserve(d.size());
    for (const PersistencePair& p : d.pairs()) {
        if (!p.essential) {
            kept.push_back(p);
        }
    }
    return PersistenceDiagram(std::move(kept));
}

/// Contracts runs of equal consecutive values to a single vertex. The
/// piecewise-linear interpolation of a plateau has no extra critical points,
/// so the diagram is unchanged.
inline std::vector<int> collapse_plateaus(std::span<const int> values) {
    std::vector<int> out;
    out.reserve(values.size());
    for (int v : values) {
        if (out.empty() || out.back() != v) {
            out.push_back(v);
        }
    }
    return out;
}

/// H0 persistence of the sublevel filtration of the piecewise-linear
/// interpolation of an integer series. Sweeps vertices in increasing level
/// order with a union-find over index intervals: each local minimum births a
/// component, and when two components merge the younger one (larger birth;
/// ties broken toward the larger leftmost index) dies there. The surviving
/// component becomes the essential pair, closed at the global maximum.
inline PersistenceDiagram sublevel_diagram(std::span<const int> values) {
    if (values.empty()) {
        throw std::invalid_argument("sublevel_diagram: empty input");
    }
    const std::vector<int> v = collapse_plateaus(values);
    const std::size_t n = v.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) {
        return v[a] != v[b] ? v[a] < v[b] : a < b;
    });

    constexpr std::size_t kInactive = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(n, kInactive);
    std::vector<int> birth(n, 0);
    std::vector<std::size_t> leftmost(n, 0);

    auto find = [&parent](std::size_t x) {
        std::size_t root = x;
        while (parent[root] != root) {
            root = parent[root];
        }
        while (parent[x] != root) {
            x = std::exchange(parent[x], root);
        }
        return root;
    };

    std::vector<PersistencePair> pairs;
    for (std::size_t i : order) {
        parent[i] = i;
        birth[i] = v[i];
        leftmost[i] = i;

        const bool left = i > 0 && parent[i - 1] != kInactive;
        const bool right = i + 1 < n && parent[i + 1] != kInactive;
        if (left && right) {
            const std::size_t a = find(i - 1);
            const std::size_t b = find(i + 1);
            // Elder rule: larger birth dies; on equal births the component
            // with the larger leftmost index dies.
            std::size_t live = a;
            std::size_t die = b;
            if (std::make_pair(birth[a], leftmost[a]) > std::make_pair(birth[b], leftmost[b])) {
                live = b;
                die = a;
            }
            pairs.push_back({birth[die], v[i], false});
            parent[die] = live;
            parent[i] = live;
            leftmost[live] = std::min(leftmost[live], leftmost[die]);
        } else if (left) {
            parent[i] = find(i - 1);
        } else if (right) {
            const std::size_t b = find(i + 1);
            parent[i] = b;
            leftmost[b] = i;
        }
        // No active neighbor: a local minimum, component born at v[i].
    }

    const std::size_t root = find(order.front());
    pairs.push_back({birth[root], v[order.back()], true});
    return PersistenceDiagram(std::move(pairs));
}

inline PersistenceDiagram sublevel_diagram(const QuantizedSeries& q) {
    return sublevel_diagram(std::span<const int>(q.values));
}

/// Persistent Betti numbers of the sublevel filtration: beta(b, d) counts the
/// components of the sublevel set at level d that contain at least one vertex
/// of value <= b, i.e. the rank of the map H0(X_b) -> H0(X_d).
class PersistentBettiTable {
public:
    PersistentBettiTable(int min_level, int max_level, std::vector<int> table)
        : min_level_(min_level), max_level_(max_level), table_(std::move(table)) {}

    int min_level() const { return min_level_; }
    int max_level() const { return max_level_; }

    int at(int b, int d) const {
        if (b > d) {
            throw std::invalid_argument("PersistentBettiTable: requires b <= d");
        }
        if (b < min_level_ || d > max_level_) {
            return 0;
        }
        const std::size_t width = static_cast<std::size_t>(max_level_ - min_level_ + 1);
        return table_[static_cast<std::size_t>(b - min_level_) * width +
                      static_cast<std::size_t>(d - min_level_)];
    }

private:
    int min_level_;
    int max_level_;
    std::vector<int> table_;  // row-major over [min_level, max_level]^2
};

/// Builds the full Betti table by direct component tracking over the index
/// line. Intended for validation on small inputs; O(n * levels^2).
inline PersistentBettiTable oracle_betti_table(std::span<const int> values) {
    if (values.empty()) {
        throw std::invalid_argument("oracle_betti_table: empty input");
    }
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const int mn = *mn_it;
    const int mx = *mx_it;
    const std::size_t width = static_cast<std::size_t>(mx - mn + 1);
    std::vector<int> table(width * width, 0);

    for (int d = mn; d <= mx; ++d) {
        // Maximal runs of {i : values[i] <= d}, each with its minimum value.
        std::vector<int> run_min;
        bool in_run = false;
        for (int x : values) {
            if (x <= d) {
                if (!in_run) {
                    run_min.push_back(x);
                    in_run = true;
                } else {
                    run_min.back() = std::min(run_min.back(), x);
                }
            } else {
                in_run = false;
            }
        }
        for (int b = mn; b <= d; ++b) {
            int count = 0;
            for (int m : run_min) {
                if (m <= b) {
                    ++count;
                }
            }
            table[static_cast<std::size_t>(b - mn) * width + static_cast<std::size_t>(d - mn)] =
                count;
        }
    }
    return PersistentBettiTable(mn, mx, std::move(table));
}

/// Brute-force diagram via inclusion-exclusion over the persistent Betti
/// numbers: mu(b, d) = beta(b, d-1) - beta(b-1, d-1) + beta(b-1, d) -
/// beta(b, d). Independent of the union-find sweep; must agree with
/// sublevel_diagram exactly. Intended for tests on small inputs.
inline PersistenceDiagram oracle_diagram(std::span<const int> values) {
    if (values.empty()) {
        throw std::invalid_argument("oracle_diagram: empty input");
    }
    const PersistentBettiTable beta = oracle_betti_table(values);
    const int mn = beta.min_level();
    const int mx = beta.max_level();

    auto beta_at = [&beta, mn](int b, int d) { return b < mn ? 0 : beta.at(b, d); };

    std::vector<PersistencePair> pairs;
    for (int b = mn; b <= mx; ++b) {
        for (int d = b + 1; d <= mx; ++d) {
            const int mu =
                beta_at(b, d - 1) - beta_at(b - 1, d - 1) + beta_at(b - 1, d) - beta_at(b, d);
            for (int k = 0; k < mu; ++k) {
                pairs.push_back({b, d, false});
            }
        }
    }
    pairs.push_back({mn, mx, true});
    return PersistenceDiagram(std::move(pairs));
}

inline PersistenceDiagram oracle_diagram(const QuantizedSeries& q) {
    return oracle_diagram(std::span<const int>(q.values));
}

}  // namespace tdats
