#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tdats/ensemble.hpp"
#include "test_util.hpp"

using tdats::BaseMetric;
using tdats::CurveDistance;
using tdats::EnsembleConfig;
using tdats::GeomOperand;
using tdats::TimeSeries;

namespace {

EnsembleConfig config(double alpha, BaseMetric base = BaseMetric::l1) {
    EnsembleConfig cfg;
    cfg.alpha = alpha;
    cfg.base = base;
    return cfg;
}

}  // namespace

TEST_CASE("alpha = 1 reduces to the raw distance") {
    std::mt19937 rng(89);
    for (int trial = 0; trial < 30; ++trial) {
        const TimeSeries s = tdats::testing::random_real_series_of_len(rng, 12, -3.0, 3.0);
        const TimeSeries t = tdats::testing::random_real_series_of_len(rng, 12, -3.0, 3.0);
        CHECK(tdats::ensemble_l1(config(1.0), s, t) == tdats::dist_l1(s.filled(), t.filled()));
        CHECK(tdats::ensemble_dtw(config(1.0, BaseMetric::dtw), s, t) ==
              tdats::dtw(s.filled(), t.filled()));
    }
}

TEST_CASE("alpha = 0 vanishes on identical series") {
    const TimeSeries s({1, 4, 2, 5});
    CHECK(tdats::ensemble_l1(config(0.0), s, s) == 0.0);
    CHECK(tdats::ensemble_dtw(config(0.0, BaseMetric::dtw), s, s) == 0.0);
}

TEST_CASE("the blend is the stated convex combination") {
    std::mt19937 rng(97);
    for (int trial = 0; trial < 30; ++trial) {
        const TimeSeries s = tdats::testing::random_real_series_of_len(rng, 10, -3.0, 3.0);
        const TimeSeries t = tdats::testing::random_real_series_of_len(rng, 10, -3.0, 3.0);
        const double raw = tdats::dist_l1(s.filled(), t.filled());
        const double curves = tdats::curve_dist(tdats::series_curve(s), tdats::series_curve(t),
                                                CurveDistance::l1);
        CHECK(tdats::ensemble_l1(config(0.5), s, t) == 0.5 * raw + 0.5 * curves);
    }
    CHECK(tdats::ensemble_blend(0.5, 4.0, 2.0) == 3.0);
}

TEST_CASE("alpha = 0 is blind to horizontal translation") {
    // Identical diagrams by construction, verified against the oracle.
    const TimeSeries s({1, 3, 1, 1});
    const TimeSeries t({1, 1, 3, 1});
    CHECK(tdats::oracle_diagram(tdats::quantize(s)) == tdats::oracle_diagram(tdats::quantize(t)));
    CHECK(tdats::ensemble_l1(config(0.0), s, t) == 0.0);
    CHECK(tdats::ensemble_dtw(config(0.0, BaseMetric::dtw), s, t) == 0.0);
    // But the series differ, so alpha = 0 is only a pseudo-metric.
    CHECK(tdats::dist_l1(s.filled(), t.filled()) > 0.0);
}

TEST_CASE("ensemble_l1 requires equal lengths") {
    const TimeSeries s({1, 2, 3});
    const TimeSeries t({1, 2, 3, 4});
    CHECK_THROWS_WITH(tdats::ensemble_l1(config(0.5), s, t),
                      "ensemble_l1 requires equal-length series; use ensemble_dtw");
    CHECK_NOTHROW(tdats::ensemble_dtw(config(0.5, BaseMetric::dtw), s, t));
}

TEST_CASE("alpha outside [0, 1] is rejected") {
    const TimeSeries s({1, 2});
    CHECK_THROWS_AS(tdats::ensemble_l1(config(-0.1), s, s), std::invalid_argument);
    CHECK_THROWS_AS(tdats::ensemble_l1(config(1.1), s, s), std::invalid_argument);
}

TEST_CASE("ensemble distances are symmetric, non-negative, and zero on self") {
    std::mt19937 rng(101);
    const double alphas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int trial = 0; trial < 40; ++trial) {
        const TimeSeries s = tdats::testing::random_real_series_of_len(rng, 10, -4.0, 4.0);
        const TimeSeries t = tdats::testing::random_real_series_of_len(rng, 10, -4.0, 4.0);
        for (double alpha : alphas) {
            for (BaseMetric base : {BaseMetric::l1, BaseMetric::dtw}) {
                const EnsembleConfig cfg = config(alpha, base);
                const double st = tdats::ensemble_distance(cfg, s, t);
                CHECK(st >= 0.0);
                CHECK(st == tdats::ensemble_distance(cfg, t, s));
                CHECK(tdats::ensemble_distance(cfg, s, s) == 0.0);
            }
        }
    }
}

TEST_CASE("the l1 ensemble satisfies the triangle inequality") {
    std::mt19937 rng(103);
    const double alphas[] = {0.0, 0.5, 1.0};
    for (int trial = 0; trial < 60; ++trial) {
        const TimeSeries a = tdats::testing::random_real_series_of_len(rng, 8, -4.0, 4.0);
        const TimeSeries b = tdats::testing::random_real_series_of_len(rng, 8, -4.0, 4.0);
        const TimeSeries c = tdats::testing::random_real_series_of_len(rng, 8, -4.0, 4.0);
        for (double alpha : alphas) {
            const EnsembleConfig cfg = config(alpha);
            CHECK(tdats::ensemble_l1(cfg, a, b) <=
                  tdats::ensemble_l1(cfg, a, c) + tdats::ensemble_l1(cfg, c, b) + 1e-9);
        }
    }
}

TEST_CASE("the ensemble value is affine in alpha") {
    std::mt19937 rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const TimeSeries s = tdats::testing::random_real_series_of_len(rng, 10, -4.0, 4.0);
        const TimeSeries t = tdats::testing::random_real_series_of_len(rng, 10, -4.0, 4.0);
        for (BaseMetric base : {BaseMetric::l1, BaseMetric::dtw}) {
            const double at0 = tdats::ensemble_distance(config(0.0, base), s, t);
            const double at_half = tdats::ensemble_distance(config(0.5, base), s, t);
            const double at1 = tdats::ensemble_distance(config(1.0, base), s, t);
            CHECK(at_half == 0.5 * (at0 + at1));
            const double at_quarter = tdats::ensemble_distance(config(0.25, base), s, t);
            CHECK(at_quarter == Catch::Approx(0.75 * at0 + 0.25 * at1).margin(1e-12));
        }
    }
}

TEST_CASE("curve dtw never exceeds curve l1") {
    std::mt19937 rng(109);
    for (int trial = 0; trial < 200; ++trial) {
        const TimeSeries s = tdats::testing::random_real_series_of_len(rng, 15, -4.0, 4.0);
        const TimeSeries t = tdats::testing::random_real_series_of_len(rng, 15, -4.0, 4.0);
        const tdats::PersistenceCurve cs = tdats::series_curve(s);
        const tdats::PersistenceCurve ct = tdats::series_curve(t);
        CHECK(tdats::curve_dist(cs, ct, CurveDistance::dtw) <=
              tdats::curve_dist(cs, ct, CurveDistance::l1) + 1e-9);
    }
}

TEST_CASE("the geometric operand switch changes the raw term only") {
    const TimeSeries s({0, 5, 10});
    const TimeSeries t({0, 0, 10});
    EnsembleConfig raw_cfg = config(1.0);
    EnsembleConfig quantized_cfg = config(1.0);
    quantized_cfg.geom = GeomOperand::quantized;
    CHECK(tdats::ensemble_l1(raw_cfg, s, t) == 5.0);
    const auto qs = tdats::quantize(s).as_doubles();
    const auto qt = tdats::quantize(t).as_doubles();
    CHECK(tdats::ensemble_l1(quantized_cfg, s, t) == tdats::dist_l1(qs, qt));
    // The topological term is quantized either way.
    raw_cfg.alpha = 0.0;
    quantized_cfg.alpha = 0.0;
    CHECK(tdats::ensemble_l1(raw_cfg, s, t) == tdats::ensemble_l1(quantized_cfg, s, t));
}

TEST_CASE("excluding the essential pair changes the curve") {
    const TimeSeries s({1, 3, 2, 4});
    tdats::PipelineOptions with{};
    tdats::PipelineOptions without{};
    without.include_essential = false;
    const auto c_with = tdats::series_curve(s, with);
    const auto c_without = tdats::series_curve(s, without);
    CHECK(c_with.samples != c_without.samples);
    for (double v : c_without.samples) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}
