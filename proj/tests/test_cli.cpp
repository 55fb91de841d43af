#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "tdats/curves.hpp"
#include "tdats/distances.hpp"
#include "tdats/ensemble.hpp"
#include "test_util.hpp"

using tdats::testing::CliResult;
using tdats::testing::run_cli;
using tdats::testing::TempDir;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool cli_available() { return tdats::testing::cli_binary() != nullptr; }

}  // namespace

TEST_CASE("cli diagram prints the serialized diagram") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    const CliResult r = run_cli("diagram --values 1,3,2,4");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "1 4 *\n2 3\n");
}

TEST_CASE("cli dist with alpha 1 prints the raw l1 distance") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    TempDir tmp;
    const auto a = tmp.write_file("a.txt", "0 5 10\n");
    const auto b = tmp.write_file("b.txt", "0 0 10\n");
    const CliResult r = run_cli("dist --metric sl-l1 --alpha 1 --a " + a.string() + " --b " +
                                b.string());
    CHECK(r.exit_code == 0);
    CHECK(std::stod(r.output) == 5.0);
}

TEST_CASE("cli curve output feeds dist --from-curves bit-identically") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    TempDir tmp;
    const auto c1 = tmp.path() / "c1.csv";
    const auto c2 = tmp.path() / "c2.csv";
    CHECK(run_cli("curve --values 1,3,2,4 --out " + c1.string()).exit_code == 0);
    CHECK(run_cli("curve --values 2,4,1,4 --out " + c2.string()).exit_code == 0);

    const CliResult via_cli =
        run_cli("dist --from-curves --metric l1 --a " + c1.string() + " --b " + c2.string());
    CHECK(via_cli.exit_code == 0);

    const tdats::PersistenceCurve in_process_1 =
        tdats::curve_of_diagram(tdats::sublevel_diagram(tdats::QuantizedSeries{{1, 3, 2, 4}}),
                                tdats::PipelineOptions{});
    const tdats::PersistenceCurve in_process_2 =
        tdats::curve_of_diagram(tdats::sublevel_diagram(tdats::QuantizedSeries{{2, 4, 1, 4}}),
                                tdats::PipelineOptions{});
    const double expected =
        tdats::curve_dist(in_process_1, in_process_2, tdats::CurveDistance::l1);
    CHECK(std::stod(via_cli.output) == expected);
}

TEST_CASE("cli curve emits 101 samples on the default mesh") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    const CliResult r = run_cli("curve --values 1,3,2,4");
    CHECK(r.exit_code == 0);
    const std::string row = r.output.substr(0, r.output.find('\n'));
    CHECK(std::count(row.begin(), row.end(), ',') == 103);  // kind + 2 bounds + 101 samples
    CHECK(row.rfind("stabilized_life,1,101,", 0) == 0);
}

TEST_CASE("cli bench writes five-alpha rows for both metric families") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    TempDir tmp;
    const auto out = tmp.path() / "results.csv";
    const std::string data = (tdats::testing::data_dir() / "ToyTranslations").string();
    const CliResult r = run_cli("bench --data " + data +
                                " --alphas 0,0.25,0.5,0.75,1 --metrics sl-l1,sl-dtw --no-timing "
                                "--out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(out);
    CHECK(csv.rfind("dataset,metric,alpha,accuracy,elapsed_seconds\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 5 alphas x 2 metrics

    // Byte-identical on a second run.
    const auto out2 = tmp.path() / "results2.csv";
    run_cli("bench --data " + data +
            " --alphas 0,0.25,0.5,0.75,1 --metrics sl-l1,sl-dtw --no-timing --out " +
            out2.string());
    CHECK(csv == read_file(out2));
}

TEST_CASE("cli bench walks every dataset under an archive root") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    TempDir tmp;
    tmp.write_file("root/Alpha/Alpha_TRAIN.tsv", "1\t0\t9\t0\n2\t5\t5\t5\n");
    tmp.write_file("root/Alpha/Alpha_TEST.tsv", "1\t0\t9\t0\n");
    tmp.write_file("root/Beta/Beta_TRAIN.tsv", "1\t1\t2\n2\t2\t1\n");
    tmp.write_file("root/Beta/Beta_TEST.tsv", "2\t2\t1\n");
    const CliResult r = run_cli("bench --data " + (tmp.path() / "root").string() +
                                " --alphas 1 --metrics sl-l1 --no-timing");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Alpha,sl-l1,1,1.000000") != std::string::npos);
    CHECK(r.output.find("Beta,sl-l1,1,1.000000") != std::string::npos);
}

TEST_CASE("cli compare emits residual csv and svg") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    TempDir tmp;
    const auto ours = tmp.write_file(
        "ours.csv",
        "dataset,metric,alpha,accuracy,elapsed_seconds\nToy,sl-l1,0.5,0.9,0.01\n");
    const auto ref = tmp.write_file("ref.csv", "dataset,accuracy\nToy,0.8\n");
    const auto out = tmp.path() / "residual.csv";
    const auto svg = tmp.path() / "residual.svg";
    const CliResult r = run_cli("compare --file " + ours.string() + " --metric sl-l1 --alpha 0.5" +
                                " --reference " + ref.string() + " --out " + out.string() +
                                " --svg " + svg.string());
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(out);
    CHECK(csv.find("Toy,0.900000,0.800000,0.100000,win") != std::string::npos);
    CHECK(read_file(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("cli exit codes distinguish usage and data errors") {
    if (!cli_available()) {
        SKIP("TDA_TS_BIN not set");
    }
    CHECK(run_cli("diagram --no-such-flag").exit_code == 1);
    CHECK(run_cli("nonsense").exit_code == 1);
    CHECK(run_cli("bench --data /nonexistent-dir-xyz").exit_code == 2);
    TempDir tmp;
    const auto a = tmp.write_file("a.txt", "1 2\n");
    CHECK(run_cli("dist --metric l1 --a " + a.string() + " --b /missing.txt").exit_code == 2);
}
