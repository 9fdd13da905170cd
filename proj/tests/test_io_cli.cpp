// Config parsing, JSON/CSV serialization, and the 17-digit float round-trip
// guarantee behind every exported artifact.

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qf/errors.hpp"
#include "qf/io.hpp"

using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qf_io_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("mixture config parsing") {
    const qf::io::json root = qf::io::json::parse(R"({
        "mixture": [
            {"w": 0.25, "mean": -1.0, "std": 0.5},
            {"w": 0.75, "mean": 2.0, "std": 1.5}
        ],
        "alpha": 0.3
    })");
    const qf::MixtureDensity mix = qf::io::mixture_from_json(root);
    REQUIRE(mix.size() == 2);
    CHECK(mix.components()[0].weight == 0.25);
    CHECK(mix.components()[1].mean == 2.0);
    CHECK(qf::io::alpha_from_json(root) == 0.3);
}

TEST_CASE("mixture weights are normalized with a warning when off by more than 1e-9") {
    const qf::io::json root = qf::io::json::parse(
        R"({"mixture": [{"w": 2.0, "mean": 0.0, "std": 1.0}, {"w": 2.0, "mean": 1.0, "std": 1.0}]})");
    const qf::MixtureDensity mix = qf::io::mixture_from_json(root);
    CHECK_THAT(mix.components()[0].weight, WithinAbs(0.5, 1e-15));
    CHECK_THAT(mix.components()[1].weight, WithinAbs(0.5, 1e-15));
}

TEST_CASE("malformed configs raise config errors") {
    using qf::io::json;
    CHECK_THROWS_AS(qf::io::mixture_from_json(json::parse(R"({})")), qf::config_error);
    CHECK_THROWS_AS(qf::io::mixture_from_json(json::parse(R"({"mixture": []})")),
                    qf::config_error);
    CHECK_THROWS_AS(qf::io::mixture_from_json(
                        json::parse(R"({"mixture": [{"w": 1.0, "mean": 0.0, "std": -1.0}]})")),
                    qf::config_error);
    CHECK_THROWS_AS(qf::io::mixture_from_json(
                        json::parse(R"({"mixture": [{"w": -1.0, "mean": 0.0, "std": 1.0}]})")),
                    qf::config_error);
    CHECK_THROWS_AS(qf::io::mixture_from_json(
                        json::parse(R"({"mixture": [{"mean": 0.0, "std": 1.0}]})")),
                    qf::config_error);
    const json ok = json::parse(R"({"alpha": 1.7})");
    CHECK_THROWS_AS(qf::io::alpha_from_json(ok), qf::config_error);
}

TEST_CASE("loading json files reports open and parse failures as config errors") {
    TempDir dir;
    CHECK_THROWS_AS(qf::io::load_json_file((dir.path / "missing.json").string()),
                    qf::config_error);
    const fs::path bad = dir.path / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(qf::io::load_json_file(bad.string()), qf::config_error);

    const fs::path good = dir.path / "good.json";
    std::ofstream(good) << R"({"alpha": 0.4})";
    CHECK(qf::io::load_json_file(good.string()).at("alpha") == 0.4);
}

TEST_CASE("format_g17 and csv export round-trip doubles exactly") {
    const std::vector<double> tricky{0.1,
                                     1.0 / 3.0,
                                     3.14159265358979323846,
                                     -0.46007559225530506,
                                     1e-300,
                                     123456789.123456789};
    for (double v : tricky) {
        const double back = std::strtod(qf::io::format_g17(v).c_str(), nullptr);
        CHECK(back == v);
    }

    TempDir dir;
    const fs::path csv = dir.path / "vals.csv";
    qf::io::write_csv(csv.string(), "a,b", {{tricky[0], tricky[1]}, {tricky[2], tricky[3]}});
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    std::vector<double> seen;
    while (std::getline(in, line)) {
        std::size_t comma = line.find(',');
        seen.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
        seen.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
    REQUIRE(seen.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(seen[i] == tricky[i]);
}

TEST_CASE("run sidecar lands next to the artifact with resolved settings") {
    TempDir dir;
    const fs::path out = dir.path / "report.json";
    qf::io::json resolved{{"command", "test"}, {"seed", 12345}};
    qf::io::write_run_sidecar(out.string(), resolved);
    const std::string text = slurp(out.string() + ".run.json");
    const qf::io::json parsed = qf::io::json::parse(text);
    CHECK(parsed.at("command") == "test");
    CHECK(parsed.at("seed") == 12345);
}

TEST_CASE("mixture serialization is stable") {
    const qf::MixtureDensity mix({{0.5, -1.0, 0.6}, {0.5, 1.0, 0.6}});
    const qf::io::json j = qf::io::mixture_to_json(mix);
    const qf::io::json root{{"mixture", j}};
    const qf::MixtureDensity back = qf::io::mixture_from_json(root);
    REQUIRE(back.size() == 2);
    CHECK(back.components()[0].mean == -1.0);
    CHECK(back.components()[1].std == 0.6);
    CHECK(back.fingerprint() == mix.fingerprint());
}
