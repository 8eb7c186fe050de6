#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "sagnacsr/config.hpp"
#include "sagnacsr/correlator.hpp"
#include "sagnacsr/io.hpp"

using namespace sagnacsr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("sagnacsr_cli_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text) const
    {
        write_text(path / name, text);
        return (path / name).string();
    }
};

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("simulate: default config")
{
    TempDir dir;
    const auto cfg = dir.file("run.cfg", "");
    const auto r = run_cli({"--out-dir", dir.path.string(), "simulate", cfg});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("fringe_count = 8") != std::string::npos);
    CHECK(r.out.find("visibility = 1\n") != std::string::npos);

    const CsvTable table = read_csv(dir.path / "trace.csv");
    CHECK(table.columns.front().label == "zeta");
    CHECK(table.column("zeta").values.size() == 4096);
    CHECK(table.column("I1_k3").values.size() == 4096);

    const auto manifest = nlohmann::json::parse(read_text(dir.path / "manifest.json"));
    CHECK(manifest["tool_version"] == cli::kToolVersion);
    CHECK(manifest["metrics"]["fringe_count"] == 8);
    CHECK(manifest["config"].get<std::string>() == serialize(RunConfig{}));

    // Re-ingest the CSV and recompute the manifest metrics exactly.
    const std::string col = manifest["metrics_column"];
    const FringeTrace trace{table.column("zeta").values, table.column(col).values, col};
    const auto again = summarize(trace, 8);
    CHECK(again.visibility == manifest["metrics"]["visibility"].get<double>());
    CHECK(*again.fringe_count == manifest["metrics"]["fringe_count"].get<int>());
    CHECK(*again.enhancement == manifest["metrics"]["enhancement"].get<double>());

    const std::string svg = read_text(dir.path / "trace.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
}

TEST_CASE("simulate: override and poisson detection")
{
    TempDir dir;
    const auto cfg = dir.file("run.cfg",
                              "[detection]\nkind = poisson\nphotons_per_channel = 1e12\nseed = 5\n"
                              "[output]\nformat = csv\npath = sub/out.csv\n"
                              "[output]\nformat = json\npath = sub/out.json\n");
    const auto r = run_cli({"--out-dir", dir.path.string(), "--override", "bank.block_count=8", "simulate", cfg});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("fringe_count = 16") != std::string::npos);

    const CsvTable table = read_csv(dir.path / "sub/out.csv");
    const auto manifest = nlohmann::json::parse(read_text(dir.path / "sub/out.json"));
    CHECK(manifest["metrics_column"] == "detected");
    const FringeTrace trace{table.column("zeta").values, table.column("detected").values, ""};
    CHECK(summarize(trace, 16).visibility == manifest["metrics"]["visibility"].get<double>());
    CHECK_FALSE(fs::exists(dir.path / "trace.svg"));
}

TEST_CASE("simulate: errors")
{
    TempDir dir;
    auto r = run_cli({"simulate", (dir.path / "missing.cfg").string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("cannot read") != std::string::npos);

    const auto bad = dir.file("bad.cfg", "[bank]\nblock_count = zero\n");
    r = run_cli({"simulate", bad});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("bad.cfg:2:15: error: expected integer") != std::string::npos);

    const auto sparse = dir.file("sparse.cfg", "[bank]\nblock_count = 16\n[sweep]\npoints = 512\n");
    r = run_cli({"simulate", sparse});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("sweep.points below 64") != std::string::npos);

    r = run_cli({"--override", "bank.nope=3", "simulate", dir.file("ok.cfg", "")});
    CHECK(r.code == cli::kExitConfig);
    r = run_cli({"frobnicate"});
    CHECK(r.code == cli::kExitConfig);
    r = run_cli({"reproduce", "fig9"});
    CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("config show prints the canonical form")
{
    TempDir dir;
    const auto cfg = dir.file("c.cfg", "[bank]\nblock_count=3\n");
    const auto r = run_cli({"config", "show", cfg});
    REQUIRE(r.code == cli::kExitOk);
    const auto back = parse(r.out);
    REQUIRE(std::holds_alternative<RunConfig>(back));
    CHECK(std::get<RunConfig>(back).bank.block_count == 3);
}

TEST_CASE("reproduce fig3 and fig2")
{
    TempDir dir;
    auto r = run_cli({"--out-dir", dir.path.string(), "reproduce", "fig3"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
    const CsvTable t = read_csv(dir.path / "fig3.csv");
    CHECK(t.column("R100").values.size() == 10000);
    CHECK(fs::exists(dir.path / "fig3.svg"));

    r = run_cli({"--out-dir", dir.path.string(), "reproduce", "fig2"});
    CHECK(r.code == cli::kExitOk);
    INFO(r.out);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
    for (char p : std::string("abcdef")) {
        CHECK(fs::exists(dir.path / (std::string("fig2") + p + ".csv")));
        CHECK(fs::exists(dir.path / (std::string("fig2") + p + ".svg")));
    }
    const CsvTable a = read_csv(dir.path / "fig2a.csv");
    CHECK(a.columns.size() == 257);
    const CsvTable e = read_csv(dir.path / "fig2e.csv");
    const FringeTrace r4{e.column("zeta").values, e.column("R4").values, ""};
    CHECK(count_fringes(r4) == 4);
}

TEST_CASE("noise-demo")
{
    TempDir dir;
    auto r = run_cli({"--out-dir", dir.path.string(), "--seed", "3", "noise-demo", "--sigma", "1.0", "--samples", "300",
                      "--order", "4"});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(read_text(dir.path / "noise_demo.json"));
    CHECK(std::abs(j["sagnac"]["product_visibility"].get<double>() - 1.0) <= 1e-12);
    CHECK(j["mzi"]["first_order_visibility"].get<double>() < 0.9);

    r = run_cli({"--out-dir", dir.path.string(), "noise-demo", "--sigma", "0", "--samples", "5", "--order", "2"});
    REQUIRE(r.code == cli::kExitOk);
    const auto z = nlohmann::json::parse(read_text(dir.path / "noise_demo.json"));
    CHECK(z["sagnac"]["product_visibility"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z["mzi"]["product_visibility"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run_cli({"noise-demo", "--sigma", "-1"}).code == cli::kExitConfig);
    CHECK(run_cli({"noise-demo", "--samples", "0"}).code == cli::kExitConfig);
    CHECK(run_cli({"noise-demo", "--order", "3"}).code == cli::kExitConfig);
}

TEST_CASE("sensitivity")
{
    TempDir dir;
    const auto ideal = dir.file("ideal.cfg", "");
    auto r = run_cli({"--out-dir", dir.path.string(), "sensitivity", ideal});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("poisson model required") != std::string::npos);

    const auto cfg = dir.file("p.cfg", "[detection]\nkind = poisson\nphotons_per_channel = 1e8\n");
    r = run_cli({"--out-dir", dir.path.string(), "sensitivity", cfg, "--orders", "8"});
    REQUIRE(r.code == cli::kExitOk);
    const CsvTable t = read_csv(dir.path / "sensitivity.csv");
    const auto& n = t.column("order").values;
    const auto& dz = t.column("delta_zeta").values;
    REQUIRE(n == std::vector<double>{1, 8});
    CHECK(dz[0] / dz[1] == doctest::Approx(8.0).epsilon(0.1));

    r = run_cli({"--out-dir", dir.path.string(), "sensitivity", cfg, "--orders", "2,4,8,16"});
    REQUIRE(r.code == cli::kExitOk);
    const auto dz2 = read_csv(dir.path / "sensitivity.csv").column("delta_zeta").values;
    REQUIRE(dz2.size() == 5);
    for (std::size_t i = 2; i < dz2.size(); ++i) CHECK(dz2[i] < dz2[i - 1]);

    CHECK(run_cli({"sensitivity", cfg, "--orders", "3"}).code == cli::kExitConfig);
}

TEST_CASE("global seed makes runs byte-identical")
{
    TempDir a, b;
    const auto cfg = a.file("n.cfg", "[noise]\nkind = common_path\nsigma = 0.5\n[detection]\nkind = poisson\n"
                                     "photons_per_channel = 100\n");
    ::setenv("SOURCE_DATE_EPOCH", "0", 1);
    REQUIRE(run_cli({"--seed", "42", "--out-dir", a.path.string(), "simulate", cfg}).code == 0);
    REQUIRE(run_cli({"--seed", "42", "--out-dir", b.path.string(), "simulate", cfg}).code == 0);
    CHECK(read_text(a.path / "trace.csv") == read_text(b.path / "trace.csv"));
    CHECK(read_text(a.path / "manifest.json") == read_text(b.path / "manifest.json"));
    REQUIRE(run_cli({"--seed", "43", "--out-dir", b.path.string(), "simulate", cfg}).code == 0);
    CHECK(read_text(a.path / "trace.csv") != read_text(b.path / "trace.csv"));
    ::unsetenv("SOURCE_DATE_EPOCH");
}
