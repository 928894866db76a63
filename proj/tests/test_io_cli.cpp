// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include "spinphase/cli.hpp"
#include "spinphase/io.hpp"
#include "test_util.hpp"

using namespace spinphase;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

HalfInt H(int twice) { return HalfInt::from_twice(twice); }

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("spinphase_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE("io_cli") {

TEST_CASE("number formatting round-trips") {
    for (double x : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-17, 6.02e23}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("state JSON round trip and validation") {
    std::mt19937_64 rng(71);
    for (int tj = 0; tj <= 6; ++tj) {
        const DensityMatrix rho = testing::random_state(H(tj), rng);
        const DensityMatrix back = state_from_json(state_to_json(rho));
        CHECK(back.J == rho.J);
        CHECK(max_abs_diff(back.mat, rho.mat) == 0.0);
    }
    CHECK_THROWS_AS((void)state_from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS((void)state_from_json(R"({"J": "1/2", "matrix": [[[1,0]]]})"), std::invalid_argument);
    CHECK_THROWS_AS((void)state_from_json(R"({"J": "1/2", "matrix": [[[2,0],[0,0]],[[0,0],[-1,0]]]})"),
                    std::invalid_argument);
    const DensityMatrix ok = state_from_json(R"({"J": 0, "matrix": [[[1,0]]]})");
    CHECK(ok.J.twice() == 0);
}

TEST_CASE("file errors are IoError") {
    CHECK_THROWS_AS((void)read_file("/nonexistent/spinphase/file.json"), IoError);
    CHECK_THROWS_AS(write_file("/nonexistent/spinphase/out.csv", "x"), IoError);
}

TEST_CASE("writers: CSV, PPM and tensor table") {
    const DensityMatrix up = DensityMatrix::basis_state(H(2), H(2));
    const QuasiDist F = quasidistribution(up, 0.0, SphereGrid::equiangular(5, 8), Sampling::spectral);
    const std::string csv = grid_csv(F);
    CHECK(csv.rfind("theta,phi,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
    const std::string ppm = render_ppm(F);
    CHECK(ppm.rfind("P3", 0) == 0);
    CHECK(ppm.find("8 5") != std::string::npos);
    const json spec = json::parse(spectral_json(F));
    CHECK(spec["coeffs"].size() == 9u);
    const json table = json::parse(tensor_table_json(*TensorBasis::shared(H(2))));
    CHECK(table.size() == 9u);
    CHECK(table[0]["matrix"].size() == 9u);
    const std::string rates = rates_csv(decay_rates(H(2), 1.0));
    CHECK(rates.find("L,gamma_lindblad,gamma_povm") == 0);
}

TEST_CASE("configuration parsing") {
    CHECK(cli::parse_sigma("q") == -1.0);
    CHECK(cli::parse_sigma("w") == 0.0);
    CHECK(cli::parse_sigma("p") == 1.0);
    CHECK(cli::parse_sigma("0.25") == 0.25);
    CHECK_THROWS_AS((void)cli::parse_sigma("x"), cli::ConfigError);
    CHECK(cli::parse_model("povm") == cli::Model::povm);
    CHECK_THROWS_AS((void)cli::parse_model("kraus"), cli::ConfigError);

    const auto s = cli::InitialState::parse("basis:-1/2");
    CHECK(s.kind == cli::InitialState::Kind::basis);
    CHECK(s.m.twice() == -1);
    CHECK(cli::InitialState::parse("coherent:1.0,2.0").theta == 1.0);
    CHECK_THROWS_AS((void)cli::InitialState::parse("ghz"), cli::ConfigError);
    CHECK_THROWS_AS((void)cli::InitialState::parse("basis:3").build(H(2)), cli::ConfigError);

    const cli::RunConfig c = cli::apply_config_json({}, R"({"J": "5", "gamma": 0.3, "grid": [19, 36]})");
    CHECK(c.J == "5");
    CHECK(*c.gamma == 0.3);
    CHECK(c.n_theta == 19);
    CHECK(c.n_phi == 36);
    CHECK_THROWS_AS((void)cli::apply_config_json({}, R"({"colour": 1})"), cli::ConfigError);

    cli::RunConfig g;
    g.J = "5";
    CHECK(cli::effective_gamma(g, H(10)) == doctest::Approx(0.2));
    CHECK(cli::effective_gamma(g, H(0)) == 1.0);
    g.gamma_rule = cli::GammaRule::fixed;
    CHECK(cli::effective_gamma(g, H(10)) == 1.0);
}

TEST_CASE("exit codes") {
    CHECK(invoke({"rates", "--J", "1"}).code == cli::kExitOk);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
    CHECK(invoke({}).code == cli::kExitConfig);
    CHECK(invoke({"rates", "--J", "0.3"}).code == cli::kExitConfig);
    CHECK(invoke({"rates", "--bogus"}).code == cli::kExitConfig);
    CHECK(invoke({"evolve", "--times", "1,0.5"}).code == cli::kExitConfig);
    CHECK(invoke({"rates", "--config", "/nonexistent/spinphase.json"}).code == cli::kExitIo);
    CHECK(invoke({"tensor-table", "--J", "1", "--out", "/nonexistent/dir/t.json"}).code == cli::kExitIo);
    const fs::path dir = scratch("badcfg");
    write_file(dir / "c.json", "{\"J\": ");
    CHECK(invoke({"rates", "--config", (dir / "c.json").string()}).code == cli::kExitConfig);
}

TEST_CASE("flags win over the configuration file") {
    const fs::path dir = scratch("flags");
    write_file(dir / "c.json", R"({"J": "2", "gamma": 0.5})");
    const Result a = invoke({"rates", "--config", (dir / "c.json").string()});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("\n4,") != std::string::npos);
    const Result b = invoke({"rates", "--config", (dir / "c.json").string(), "--J", "1"});
    REQUIRE(b.code == 0);
    CHECK(b.out.find("\n3,") == std::string::npos);
    CHECK(b.out.find("\n2,1.5,") != std::string::npos);  // gamma 0.5 from the file kept
}

TEST_CASE("rates output") {
    const Result r = invoke({"rates", "--J", "1", "--gamma", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\n1,1,0.6931471805599453\n") != std::string::npos);
    CHECK(r.out.find("\n2,3,2.302585092994046\n") != std::string::npos);
}

TEST_CASE("compare report") {
    const Result r = invoke({"compare", "--J", "1", "--gamma", "1", "--initial", "coherent:0.7,0.3"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["R"]["lindblad"]["mean"].get<double>() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(j["R"]["povm"]["mean"].get<double>() ==
          doctest::Approx(std::log(10.0) / std::log(2.0)).epsilon(1e-12));
    CHECK(j["R"]["lindblad"]["time_independent"].get<bool>());
    const Result h = invoke({"compare", "--J", "1/2", "--gamma", "1"});
    REQUIRE(h.code == 0);
    const json jh = json::parse(h.out);
    CHECK(jh["equivalence"]["max_state_difference"].get<double>() <= 1e-12);
    CHECK(jh["R"]["povm"].contains("error"));
}

TEST_CASE("evolve writes moments and snapshots") {
    const fs::path dir = scratch("evolve");
    const Result r = invoke({"evolve", "--J", "1", "--times", "0,1", "--output-dir", dir.string(), "--snapshots"});
    REQUIRE(r.code == 0);
    const std::string csv = read_file(dir / "moments.csv");
    CHECK(csv.rfind("t,L,k,re,im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 9);
    const DensityMatrix s1 = state_from_json(read_file(dir / "state_1.json"));
    CHECK(s1.J.twice() == 2);
    const Result p = invoke({"evolve", "--J", "1", "--model", "povm", "--iterations", "0,2", "--output-dir", dir.string()});
    CHECK(p.code == 0);
}

TEST_CASE("wigner writes grids and a summary") {
    const fs::path dir = scratch("wigner");
    const Result r = invoke({"wigner", "--J", "2", "--initial", "cat", "--grid", "19x36", "--times", "0,1",
                             "--iterations", "1", "--output-dir", dir.string()});
    REQUIRE(r.code == 0);
    for (const char* f : {"lindblad_t0.csv", "lindblad_t1.ppm", "povm_n1.json", "wigner_summary.json"}) {
        CHECK(fs::exists(dir / f));
    }
    const json s = json::parse(read_file(dir / "wigner_summary.json"));
    REQUIRE(s["frames"].size() == 3u);
    for (const auto& f : s["frames"]) CHECK(f["extrema_error"].get<double>() <= 1e-10);
    CHECK(s["frames"][0]["min"].get<double>() < 0.0);
}

TEST_CASE("unravel: reproducible output, exact at gamma = 0") {
    const fs::path d1 = scratch("unravel1");
    const fs::path d2 = scratch("unravel2");
    const std::vector<std::string> common = {"unravel", "--J", "1", "--n-traj", "200", "--times", "0,0.1", "--seed", "4"};
    auto with_dir = [&](const fs::path& d) {
        auto a = common;
        a.push_back("--output-dir");
        a.push_back(d.string());
        return a;
    };
    REQUIRE(invoke(with_dir(d1)).code == 0);
    ::setenv("SPINPHASE_THREADS", "1", 1);
    REQUIRE(invoke(with_dir(d2)).code == 0);
    ::unsetenv("SPINPHASE_THREADS");
    CHECK(read_file(d1 / "unravel.csv") == read_file(d2 / "unravel.csv"));

    const fs::path d0 = scratch("unravel0");
    auto still = with_dir(d0);
    still.push_back("--gamma");
    still.push_back("0");
    REQUIRE(invoke(still).code == 0);
    std::istringstream lines(read_file(d0 / "unravel.csv"));
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 10u);
        CHECK(cols[8] == "0");
        CHECK(cols[9] == "ok");
        ++rows;
    }
    CHECK(rows == 18);
}

TEST_CASE("positivity report") {
    const Result r = invoke({"positivity", "--J", "1/2", "--gamma", "1.0986122886681098", "--initial", "basis:1/2",
                             "--grid", "91x180"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["positivity_iterations"] == 1);
    CHECK(j["kind"] == "exact");
    CHECK(j["t_star"].get<double>() == doctest::Approx(1.0));
    CHECK(j["empirical_first_positive_iteration"] == 1);
    CHECK(j["empirical_first_positive_time"].get<double>() == doctest::Approx(0.5).epsilon(2e-3));
}

}  // TEST_SUITE
