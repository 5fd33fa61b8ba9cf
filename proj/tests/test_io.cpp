#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "corrnoise/cli.hpp"
#include "corrnoise/io.hpp"
#include "test_util.hpp"

using namespace corrnoise;
using corrnoise::testing::uniform;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "corrnoise");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("corrnoise_test_" + name);
}

io::CsvRow random_row() {
    io::CsvRow r;
    r.t = uniform(0, 2);
    r.gamma = uniform(0, 3);
    r.big_gamma = uniform(-1, 1) * 1e-7;
    r.omega = uniform(-1e5, 1e5);
    r.method = "full-rk4";
    r.concurrence = uniform(0, 1);
    r.branch_z = uniform();
    r.branch_w = uniform() * 1e-300;
    r.rho11 = uniform();
    r.rho22 = uniform();
    r.rho33 = uniform();
    r.rho44 = uniform();
    r.rho23_re = uniform();
    r.rho23_im = -0.0;
    r.rho14_re = uniform();
    r.rho14_im = uniform();
    return r;
}

} // namespace

TEST(Doubles, ShortestFormRoundTrips) {
    for (int i = 0; i < 2000; ++i) {
        const double v = uniform(-1, 1) * std::pow(10.0, uniform(-300, 300));
        EXPECT_EQ(io::parse_double(io::format_double(v), "v"), v);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_THROW(io::parse_double("1.5x", "gamma"), InvalidParameter);
    EXPECT_THROW(io::parse_double("", "gamma"), InvalidParameter);
}

TEST(Config, TextRoundTrip) {
    for (int i = 0; i < 100; ++i) {
        io::RunConfig c;
        c.command = "sweep";
        c.initial = "x-state";
        c.x_state = corrnoise::testing::random_x_state();
        c.gamma = uniform(0, 3);
        c.big_gamma = uniform(-1, 1);
        c.big_gammas = {uniform(), uniform(), uniform()};
        c.omega = uniform(0, 50);
        c.method = "trajectories";
        c.unraveling = "literal";
        c.t_max = uniform(0.1, 5);
        c.dt = uniform(1e-4, 1e-2);
        c.grid_points = 17 + i;
        c.seed = 1000003ULL * static_cast<unsigned>(i);
        c.n_traj = 5 + i;
        c.allow_unphysical = i % 2 == 0;
        c.output = "out.csv";
        EXPECT_EQ(io::parse_config_text(io::to_config_text(c)), c);
    }
}

TEST(Config, ErrorsNameTheProblem) {
    try {
        io::parse_config_text("gamma = 1\nbogus = 3\n");
        FAIL();
    } catch (const InvalidParameter& e) {
        EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
    EXPECT_THROW(io::parse_config_text("gamma = abc\n"), InvalidParameter);
    EXPECT_THROW(io::parse_config_text("gamma 1\n"), InvalidParameter);
    EXPECT_EQ(io::parse_config_text("# comment\n\n  gamma =  2.5  \n").gamma, 2.5);
}

TEST(Csv, HeaderIsExact) {
    EXPECT_EQ(io::csv_header,
              "t,gamma,big_gamma,omega,method,concurrence,branch_z,branch_w,rho11,rho22,rho33,rho44,"
              "rho23_re,rho23_im,rho14_re,rho14_im");
}

TEST(Csv, BellPhiInitialRow) {
    const std::vector<double> gs{0.0};
    const std::vector<double> grid{0.0, 0.1};
    const auto r = sweep_concurrence(initial::bell_phi(), 1.0, gs, grid, Method::Analytic);
    std::ostringstream os;
    io::write_csv(os, {"x"}, io::rows_of(r));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "# x");
    std::getline(is, line);
    EXPECT_EQ(line, io::csv_header);
    std::getline(is, line);
    EXPECT_EQ(line, "0,1,0,0,analytic,1,-0.5,0.5,0.5,0,0,0.5,0,0,0.5,0");
}

TEST(Csv, WernerRow) {
    const XState w = states::werner_phi(0.5);
    const auto row = io::make_row(0.0, 1.0, 0.0, 0.0, "analytic", concurrence_x(w), to_matrix(w));
    std::ostringstream os;
    io::write_csv(os, {}, {row});
    EXPECT_NE(os.str().find("\n0,1,0,0,analytic,0.25,"), std::string::npos);
    EXPECT_EQ(row.rho11, 0.375);
    EXPECT_EQ(row.rho22, 0.125);
    EXPECT_EQ(row.rho14_re, 0.25);
}

TEST(Csv, RoundTripIsExact) {
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<io::CsvRow> rows;
        for (int i = 0; i < 1 + trial % 7; ++i) rows.push_back(random_row());
        const std::vector<std::string> meta{"corrnoise csv v1", "gamma = 1.5"};
        std::ostringstream os;
        io::write_csv(os, meta, rows);
        std::istringstream is(os.str());
        const auto doc = io::parse_csv(is);
        EXPECT_EQ(doc.metadata, meta);
        EXPECT_EQ(doc.rows, rows);
    }
}

TEST(Csv, MalformedInputNamesTheLine) {
    const std::string good_header = std::string(io::csv_header) + "\n";
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return io::parse_csv(is);
    };
    try {
        parse("# m\n" + good_header + "1,2,3\n");
        FAIL();
    } catch (const InvalidParameter& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_THROW(parse("t,gamma\n"), InvalidParameter);
    EXPECT_THROW(parse(good_header + "0,1,0,0,analytic,x,0,0,0,0,0,0,0,0,0,0\n"), InvalidParameter);
}

TEST(Csv, MetadataRestoresTheConfig) {
    io::RunConfig c;
    c.command = "sweep";
    c.big_gammas = {0.0, 0.5};
    c.method = "secular-rk4";
    c.seed = 99;
    const auto meta = io::metadata_of(c, "calibrated/secular");
    EXPECT_EQ(meta.front(), "corrnoise csv v1");
    EXPECT_EQ(meta.back(), "generator = calibrated/secular");
    EXPECT_EQ(io::config_from_metadata(meta), c);
}

TEST(MatrixText, RealAndComplexRows) {
    const CMat4 real = io::parse_matrix_text("0.25 0 0 0\n0 0.25 0 0\n0 0 0.25 0\n0 0 0 0.25\n");
    EXPECT_EQ(real, 0.25 * CMat4::identity());
    const CMat4 cx = io::parse_matrix_text(
        "# re im pairs\n0.5 0 0 0 0 0 0 0.1\n0 0 0 0 0 0 0 0\n0 0 0 0 0 0 0 0\n0 -0.1 0 0 0 0 0.5 0\n");
    EXPECT_EQ(cx(0, 3), cplx(0.0, 0.1));
    EXPECT_EQ(cx(3, 0), cplx(0.0, -0.1));
    EXPECT_THROW(io::parse_matrix_text("1 0 0 0\n"), InvalidParameter);
    EXPECT_THROW(io::parse_matrix_text("1 0 0\n0 1 0\n0 0 1\n1 1 1\n"), InvalidParameter);
}

TEST(Json, ReportKeys) {
    SweepOptions o;
    const auto rep = compare_methods(initial::bell_phi(), 1.0, 0.5, uniform_grid(0.2, 3), o,
                                     {Method::Analytic, Method::SecularRk4});
    const auto j = io::to_json(rep);
    ASSERT_TRUE(j.contains("pairs"));
    const auto& p = j["pairs"][0];
    EXPECT_EQ(p["pair"][0], "analytic");
    EXPECT_EQ(p["pair"][1], "secular-rk4");
    EXPECT_TRUE(p.contains("max_abs_deviation"));
    EXPECT_TRUE(p.contains("time_of_max"));
}

TEST(Cli, EsdPrintsTheUncorrelatedDeathTime) {
    const auto r = run_cli({"esd", "--big-gamma", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("big_gamma,kind,t\n0,death,0.2203433967"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"evolve", "--gamma", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"evolve", "--big-gamma", "1.5"}).code, 2);
    EXPECT_EQ(run_cli({"evolve", "--big-gamma", "1.5", "--allow-unphysical", "--grid-points", "5"}).code, 0);
    EXPECT_EQ(run_cli({"evolve", "--method", "nope"}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"fig", "7"}).code, 2);
    EXPECT_EQ(run_cli({"evolve", "--gamma", "1e6", "--dt", "1", "--t-max", "100", "--grid-points", "2", "--method",
                       "full-rk4"})
                  .code,
              3);
    EXPECT_EQ(run_cli({"evolve", "--out", "/nonexistent-dir/x.csv", "--grid-points", "3"}).code, 1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, UnphysicalMessageExplainsTheBound) {
    const auto r = run_cli({"sweep", "--big-gammas", "0,2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unphysical"), std::string::npos);
}

TEST(Cli, FigureOutputMatchesTheLibrary) {
    const auto r = run_cli({"fig", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    const auto doc = io::parse_csv(is);
    const auto p = figure_preset(2);
    const auto expect = io::rows_of(sweep_concurrence(p.initial, p.gamma, p.big_gammas, p.grid, Method::Analytic));
    EXPECT_EQ(doc.rows, expect);
    const auto cfg = io::config_from_metadata(doc.metadata);
    EXPECT_EQ(cfg.big_gammas, p.big_gammas);
    EXPECT_EQ(cfg.grid_points, 2000u);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto path = temp_path("cfg.txt");
    {
        std::ofstream f(path);
        f << "initial = bell-psi\ngamma = 2\nbig_gamma = 0.5\nt_max = 0.5\ngrid_points = 6\n";
    }
    const auto r = run_cli({"evolve", "--config", path.string(), "--big-gamma", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    const auto doc = io::parse_csv(is);
    ASSERT_EQ(doc.rows.size(), 6u);
    EXPECT_EQ(doc.rows[0].gamma, 2.0);
    EXPECT_EQ(doc.rows[0].big_gamma, 1.0);
    const XState x = analytic::bell_psi_solution(2.0, 1.0, 0.5);
    EXPECT_NEAR(doc.rows.back().rho23_re, x.z, 1e-15);
    std::filesystem::remove(path);
}

TEST(Cli, TrajectoryOutputIsReproducibleAcrossThreadCounts) {
    const std::vector<std::string> base{"evolve", "--method", "trajectories", "--big-gamma", "0.5",
                                        "--n-traj", "300", "--t-max", "0.2", "--grid-points", "5", "--seed", "42"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1"});
    auto four = base;
    four.insert(four.end(), {"--threads", "4"});
    const auto a = run_cli(one), b = run_cli(four);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, WritesToFile) {
    const auto path = temp_path("out.csv");
    const auto r = run_cli({"sweep", "--big-gammas", "0,0.5", "--grid-points", "4", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    const auto doc = io::parse_csv(f);
    EXPECT_EQ(doc.rows.size(), 8u);
    std::filesystem::remove(path);
}

TEST(Cli, CompareEmitsJson) {
    const auto r = run_cli({"compare", "--big-gamma", "0.5", "--t-max", "0.2", "--grid-points", "5", "--n-traj", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["pairs"].size(), 6u);
}
