#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mouldcalc_cli.hpp"
#include "support.hpp"

using namespace mouldcalc;
using namespace mouldcalc::testing;

namespace fs = std::filesystem;

namespace
{

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "mouldcalc");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string field(const std::string &name) { return (fs::path(MOULDCALC_DATA_DIR) / "fields" / name).string(); }

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// A fresh output directory and a private default cache directory.
struct Sandbox {
    fs::path root;

    explicit Sandbox(const std::string &name) : root(fs::temp_directory_path() / ("mouldcalc_cli_" + name))
    {
        fs::remove_all(root);
        fs::create_directories(root);
        ::setenv("MOULDCALC_CACHE_DIR", (root / "cache").c_str(), 1);
    }
    ~Sandbox() { fs::remove_all(root); }

    std::string out(const std::string &sub = "out") const { return (root / sub).string(); }
    fs::path cache_file(const SaddleNodeField &f) const { return root / "cache" / (field_fingerprint(f) + ".json"); }
};

TruncatedSeries read_component(const fs::path &p)
{
    const auto j = read_json_file(p);
    return series_from_json({{"order", j["x_order"]}, {"coeffs", j["coeffs"]}});
}

} // namespace

TEST_CASE("normalize writes the Euler components")
{
    Sandbox box("normalize");
    const auto r = run_cli({"normalize", "--field", field("euler.json"), "--x-order", "8", "--n-max", "2", "--out",
                            box.out()});
    REQUIRE(r.code == 0);
    TruncatedSeries expected(8);
    for (int k = 1; k <= 8; ++k) {
        expected.set(k, -factorial(static_cast<unsigned>(k - 1)));
    }
    CHECK(read_component(fs::path(box.out()) / "phi_0.json") == expected);
    CHECK(read_component(fs::path(box.out()) / "psi_0.json") == -expected);
    CHECK(read_component(fs::path(box.out()) / "phi_2.json").is_zero());
    CHECK(read_json_file(fs::path(box.out()) / "phi_0.json")["word_count"] == 1);
    CHECK(fs::exists(box.cache_file(euler_field())));
}

TEST_CASE("exit codes")
{
    Sandbox box("codes");
    SECTION("validation failures name the violated condition")
    {
        const auto r = run_cli({"normalize", "--field", field("bad.json"), "--out", box.out()});
        CHECK(r.code == 2);
        CHECK(r.err.find("A(0, y) = y") != std::string::npos);
        const auto m = run_cli({"check", "--field", field("bad_mixed.json"), "--out", box.out()});
        CHECK(m.code == 2);
        CHECK(m.err.find("d^2A/dxdy(0, 0) = 0") != std::string::npos);
        CHECK(run_cli({"normalize", "--field", field("bad.json"), "--repair", "--out", box.out()}).code == 0);
    }
    SECTION("malformed input")
    {
        CHECK(run_cli({"normalize", "--field", field("malformed.json"), "--out", box.out()}).code == 3);
        CHECK(run_cli({"normalize", "--field", field("nope.json"), "--out", box.out()}).code == 3);
        CHECK(run_cli({"normalize", "--field", field("euler.json"), "--x-order", "many"}).code == 3);
        CHECK(run_cli({"normalize"}).code == 3);
        CHECK(run_cli({"check", "--field", field("euler.json"), "--suite", "everything"}).code == 3);
        CHECK(run_cli({"borel", "--field", field("euler.json"), "--eval", "half", "--out", box.out()}).code == 3);
        CHECK(run_cli({}).code == 3);
    }
    SECTION("help")
    {
        const auto r = run_cli({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("normalize") != std::string::npos);
    }
}

TEST_CASE("check")
{
    Sandbox box("check");
    SECTION("all suites pass on a valid field")
    {
        const auto r = run_cli({"check", "--field", field("euler.json"), "--x-order", "6", "--max-length", "3",
                                "--out", box.out()});
        CHECK(r.code == 0);
        CHECK(r.out.find("FAIL") == std::string::npos);
        for (const auto &s : suite_names()) {
            CHECK(r.out.find("PASS " + s) != std::string::npos);
        }
        const auto report = read_json_file(fs::path(box.out()) / "check_report.json");
        CHECK(report.size() == suite_names().size());
    }
    SECTION("selected suites, CSV report")
    {
        const auto r = run_cli({"check", "--field", field("quadratic.json"), "--x-order", "5", "--suite",
                                "equation,symmetral", "--support", "-1,0,1", "--max-length", "3", "--format", "csv",
                                "--out", box.out()});
        CHECK(r.code == 0);
        const auto csv = slurp(fs::path(box.out()) / "check_report.csv");
        CHECK(csv.rfind("suite,status", 0) == 0);
        CHECK(csv.find("equation,pass") != std::string::npos);
        CHECK(csv.find("symmetral,pass") != std::string::npos);
    }
    SECTION("a poisoned cache entry is reported as an identity failure")
    {
        const auto f = euler_field();
        MouldCache c{field_fingerprint(f), 6, {{Word{-1}, TruncatedSeries(6, {0, 1})}}};
        save_cache(box.cache_file(f), c);
        const auto r = run_cli({"check", "--field", field("euler.json"), "--x-order", "6", "--suite", "equation",
                                "--out", box.out()});
        CHECK(r.code == 1);
        CHECK(r.out.find("FAIL equation") != std::string::npos);
        CHECK(run_cli({"check", "--field", field("euler.json"), "--x-order", "6", "--suite", "equation",
                       "--rebuild-cache", "--out", box.out()})
                  .code
              == 0);
    }
}

TEST_CASE("caching and threads do not change the output")
{
    Sandbox box("determinism");
    const auto base = std::vector<std::string>{"normalize", "--field", field("quadratic.json"), "--n-max", "3"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return run_cli(args);
    };
    REQUIRE(with({"--x-order", "3", "--no-cache", "--out", box.out("serial")}).code == 0);
    REQUIRE(with({"--x-order", "3", "--no-cache", "--threads", "4", "--out", box.out("threads")}).code == 0);
    REQUIRE(with({"--x-order", "3", "--out", box.out("cold")}).code == 0);
    REQUIRE(fs::exists(box.cache_file(quadratic_field())));
    REQUIRE(with({"--x-order", "3", "--out", box.out("warm")}).code == 0);
    for (const auto &name : {"phi_0.json", "phi_3.json", "psi_1.json", "psi_3.json"}) {
        const auto ref = slurp(fs::path(box.out("serial")) / name);
        CHECK(!ref.empty());
        CHECK(slurp(fs::path(box.out("threads")) / name) == ref);
        CHECK(slurp(fs::path(box.out("cold")) / name) == ref);
        CHECK(slurp(fs::path(box.out("warm")) / name) == ref);
    }

    SECTION("a lower-order run keeps the higher-order cache")
    {
        REQUIRE(with({"--x-order", "2", "--out", box.out("low")}).code == 0);
        CHECK(load_cache(box.cache_file(quadratic_field())).x_order == 3);
    }
    SECTION("inspect and clear")
    {
        const auto i = run_cli({"cache", "inspect", "--field", field("quadratic.json")});
        CHECK(i.code == 0);
        CHECK(i.out.find("x-order 3") != std::string::npos);
        CHECK(run_cli({"cache", "clear"}).code == 0);
        CHECK_FALSE(fs::exists(box.cache_file(quadratic_field())));
    }
    SECTION("a corrupted cache is an I/O error until rebuilt")
    {
        write_text_file(box.cache_file(quadratic_field()), "{ not json");
        const auto r = with({"--x-order", "3", "--out", box.out("corrupt")});
        CHECK(r.code == 3);
        CHECK(r.err.find("--rebuild-cache") != std::string::npos);
        CHECK(run_cli({"cache", "inspect", "--field", field("quadratic.json")}).code == 3);
        REQUIRE(with({"--x-order", "3", "--rebuild-cache", "--out", box.out("rebuilt")}).code == 0);
        CHECK(slurp(fs::path(box.out("rebuilt")) / "phi_3.json") == slurp(fs::path(box.out("serial")) / "phi_3.json"));
        CHECK(load_cache(box.cache_file(quadratic_field())).x_order == 3);
    }
}

TEST_CASE("word-count warning switches to the grouped sum")
{
    Sandbox box("warn");
    const auto r = run_cli({"normalize", "--field", field("quadratic.json"), "--x-order", "6", "--n-max", "2",
                            "--word-warn", "5", "--no-cache", "--out", box.out("grouped")});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    REQUIRE(run_cli({"normalize", "--field", field("quadratic.json"), "--x-order", "6", "--n-max", "2", "--no-cache",
                     "--out", box.out("words")})
                .code
            == 0);
    CHECK(slurp(fs::path(box.out("grouped")) / "psi_2.json") == slurp(fs::path(box.out("words")) / "psi_2.json"));
}

TEST_CASE("csv output")
{
    Sandbox box("csv");
    REQUIRE(run_cli({"normalize", "--field", field("euler.json"), "--x-order", "4", "--n-max", "0", "--format", "csv",
                     "--out", box.out()})
                .code
            == 0);
    CHECK(slurp(fs::path(box.out()) / "phi_0.csv") == "power,coefficient\n0,0\n1,-1\n2,-1\n3,-2\n4,-6\n");
}

TEST_CASE("borel")
{
    Sandbox box("borel");
    const auto r = run_cli({"borel", "--field", field("euler.json"), "--n-max", "0", "--zeta-order", "12", "--eval",
                            "1/2,2", "--out", box.out()});
    REQUIRE(r.code == 0);
    const auto j = read_json_file(fs::path(box.out()) / "phi_hat_0.json");
    CHECK(j["zeta_order"] == 12);
    CHECK(series_from_json({{"order", 12}, {"coeffs", j["coeffs"]}}) == borel_phi_n(euler_field(), 0, 12).series());
    CHECK(r.out.find("phi_hat_0(1/2) ~ 2731/4096 (tail bound 2.441406e-04)") != std::string::npos);
    CHECK(r.out.find("phi_hat_0(2) ~ ") != std::string::npos);
    CHECK(r.err.find("tail bound omitted") != std::string::npos);

    const auto evals = read_json_file(fs::path(box.out()) / "phi_hat_eval.json");
    REQUIRE(evals.size() == 2);
    CHECK(evals[0]["zeta"] == "1/2");
    CHECK(scalar_from_json(evals[0]["partial_sum"]) == Scalar::fraction(2731, 4096));
    CHECK(evals[1]["tail_bound"].is_null());
}
