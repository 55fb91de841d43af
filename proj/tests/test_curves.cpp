#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tdats/curves.hpp"
#include "tdats/ensemble.hpp"
#include "tdats/persistence.hpp"
#include "test_util.hpp"

using tdats::CurveFunctional;
using tdats::CurveKind;
using tdats::Mesh;
using tdats::PersistenceCurve;
using tdats::PersistenceDiagram;
using tdats::PersistencePair;
using tdats::QuantizedSeries;
using tdats::Statistic;

namespace {

PersistenceDiagram diagram(std::vector<PersistencePair> pairs) {
    return PersistenceDiagram(std::move(pairs));
}

const PersistenceDiagram kSample = diagram({{1, 4, true}, {2, 3, false}});

}  // namespace

TEST_CASE("betti curve counts pairs alive at each level") {
    const Mesh mesh = Mesh::integer_range(1, 5);
    CHECK(tdats::betti_curve(kSample, mesh).samples == std::vector<double>{1, 2, 1, 0, 0});
    CHECK(tdats::betti_curve(diagram({{1, 3, true}}), Mesh::integer_range(1, 3)).samples ==
          std::vector<double>{1, 1, 0});
    CHECK(tdats::betti_curve(PersistenceDiagram{}, mesh).samples ==
          std::vector<double>{0, 0, 0, 0, 0});
}

TEST_CASE("curve_eval with a constant weight reproduces the betti curve") {
    CurveFunctional f;
    f.psi = [](int, int, int) { return 1.0; };
    const PersistenceCurve c = tdats::curve_eval(kSample, f, Mesh::integer_range(1, 5));
    CHECK(c.samples == std::vector<double>{1, 2, 1, 0, 0});
}

TEST_CASE("stabilized life curve on hand-evaluated diagrams") {
    CHECK(tdats::stabilized_life_curve(kSample, Mesh::integer_range(1, 5)).samples ==
          std::vector<double>{0.75, 1.0, 0.75, 0, 0});
    CHECK(tdats::stabilized_life_curve(diagram({{1, 3, true}}), Mesh::integer_range(1, 3)).samples ==
          std::vector<double>{1.0, 1.0, 0});
}

TEST_CASE("zero total lifetime yields the zero curve") {
    const PersistenceCurve c =
        tdats::stabilized_life_curve(diagram({{5, 5, true}}), Mesh::integer_range(1, 101));
    CHECK(std::all_of(c.samples.begin(), c.samples.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("diagonal-only diagrams produce the zero curve for any functional") {
    CurveFunctional f;
    f.psi = [](int, int, int) { return 42.0; };
    f.statistic = Statistic::max;
    const PersistenceCurve c =
        tdats::curve_eval(diagram({{2, 2, false}, {3, 3, false}}), f, Mesh::integer_range(1, 5));
    CHECK(std::all_of(c.samples.begin(), c.samples.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("a mesh missing a birth or death value is rejected") {
    CHECK_THROWS_WITH(tdats::betti_curve(kSample, Mesh::integer_range(2, 5)),
                      Catch::Matchers::ContainsSubstring("mesh too coarse"));
    CHECK_THROWS_WITH(tdats::betti_curve(kSample, Mesh::integer_range(1, 3)),
                      Catch::Matchers::ContainsSubstring("mesh too coarse"));
    CHECK_THROWS_AS(tdats::betti_curve(kSample, Mesh({1, 2, 3, 5})), std::invalid_argument);
}

TEST_CASE("mean and max statistics over the fundamental box") {
    CurveFunctional f;
    f.psi = [](int b, int d, int) { return static_cast<double>(d - b); };
    f.statistic = Statistic::mean;
    const Mesh mesh = Mesh::integer_range(1, 5);
    CHECK(tdats::curve_eval(kSample, f, mesh).samples == std::vector<double>{3, 2, 3, 0, 0});
    f.statistic = Statistic::max;
    CHECK(tdats::curve_eval(kSample, f, mesh).samples == std::vector<double>{3, 3, 3, 0, 0});
}

TEST_CASE("stabilized life samples stay in [0, 1]") {
    std::mt19937 rng(41);
    const Mesh mesh = tdats::default_mesh();
    for (int trial = 0; trial < 150; ++trial) {
        const QuantizedSeries q{tdats::testing::random_int_series(rng, 25, 1, 101)};
        const PersistenceCurve c = tdats::stabilized_life_curve(tdats::sublevel_diagram(q), mesh);
        for (double v : c.samples) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("betti curve matches direct component counts below the global max") {
    std::mt19937 rng(43);
    const Mesh mesh = tdats::default_mesh();
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<int> values = tdats::testing::random_int_series(rng, 20, 1, 10);
        const PersistenceCurve c =
            tdats::betti_curve(tdats::sublevel_diagram(QuantizedSeries{values}), mesh);
        const int global_max = *std::max_element(values.begin(), values.end());
        for (std::size_t k = 0; k < mesh.size(); ++k) {
            const int x = mesh.points()[k];
            if (x >= global_max) {
                break;
            }
            CHECK(c.samples[k] ==
                  static_cast<double>(tdats::testing::sublevel_component_count(values, x)));
        }
    }
}

TEST_CASE("curves vanish at and beyond the maximal death") {
    std::mt19937 rng(47);
    const Mesh mesh = tdats::default_mesh();
    for (int trial = 0; trial < 50; ++trial) {
        const QuantizedSeries q{tdats::testing::random_int_series(rng, 20, 1, 60)};
        const PersistenceDiagram d = tdats::sublevel_diagram(q);
        int max_death = 1;
        for (const PersistencePair& p : d.pairs()) {
            max_death = std::max(max_death, p.death);
        }
        const PersistenceCurve c = tdats::stabilized_life_curve(d, mesh);
        for (std::size_t k = 0; k < mesh.size(); ++k) {
            if (mesh.points()[k] >= max_death) {
                CHECK(c.samples[k] == 0.0);
            }
        }
    }
}

TEST_CASE("refining the mesh reproduces samples at shared points") {
    std::mt19937 rng(53);
    const Mesh coarse = tdats::default_mesh();
    const Mesh fine = Mesh::integer_range(0, 102);
    for (int trial = 0; trial < 30; ++trial) {
        const QuantizedSeries q{tdats::testing::random_int_series(rng, 20, 1, 101)};
        const PersistenceDiagram d = tdats::sublevel_diagram(q);
        const PersistenceCurve on_coarse = tdats::stabilized_life_curve(d, coarse);
        const PersistenceCurve on_fine = tdats::stabilized_life_curve(d, fine);
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            CHECK(on_coarse.samples[k] == on_fine.samples[k + 1]);
        }
    }
}

TEST_CASE("sl curves move boundedly under one-level perturbations") {
    // Regression guard, not a sharp bound: the worst l1 shift observed over
    // large randomized sweeps is just under 2.
    std::mt19937 rng(151);
    const Mesh mesh = tdats::default_mesh();
    std::uniform_int_distribution<std::size_t> len_dist(2, 25);
    std::uniform_int_distribution<int> value_dist(2, 100);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> values(len_dist(rng));
        for (int& v : values) {
            v = value_dist(rng);
        }
        std::vector<int> perturbed = values;
        std::uniform_int_distribution<std::size_t> index_dist(0, values.size() - 1);
        std::size_t i = index_dist(rng);
        perturbed[i] += (perturbed[i] + 1 <= 101) ? 1 : -1;
        const PersistenceCurve before =
            tdats::stabilized_life_curve(tdats::sublevel_diagram(QuantizedSeries{values}), mesh);
        const PersistenceCurve after =
            tdats::stabilized_life_curve(tdats::sublevel_diagram(QuantizedSeries{perturbed}), mesh);
        CHECK(tdats::dist_l1(before.samples, after.samples) < 10.0);
    }
}

TEST_CASE("mesh constructors validate their input") {
    CHECK_THROWS_AS(Mesh(std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh({3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh({5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::integer_range(7, 2), std::invalid_argument);
    CHECK(tdats::default_mesh().size() == 101);
}

TEST_CASE("curve CSV rows round-trip exactly") {
    const PersistenceCurve c = tdats::stabilized_life_curve(kSample, Mesh::integer_range(1, 5));
    const std::string row = tdats::curve_to_csv_row(c);
    CHECK(row.rfind("stabilized_life,1,5,", 0) == 0);
    const PersistenceCurve back = tdats::curve_from_csv_row(row);
    CHECK(back.kind == CurveKind::stabilized_life);
    CHECK(back.mesh == c.mesh);
    CHECK(back.samples == c.samples);
}

TEST_CASE("malformed curve rows are rejected") {
    CHECK_THROWS_AS(tdats::curve_from_csv_row("betti,1"), std::runtime_error);
    CHECK_THROWS_AS(tdats::curve_from_csv_row("betti,1,3,0.5"), std::runtime_error);
    CHECK_THROWS_AS(tdats::curve_from_csv_row("betti,1,2,0.5,abc"), std::runtime_error);
}
