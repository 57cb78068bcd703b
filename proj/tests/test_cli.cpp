#include "addbo/csv.hpp"
#include "addbo/error.hpp"
#include "commands.hpp"
#include "config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace addbo;
using namespace addbo::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("addbo_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# experiment\n"
      "graph = grid\n"
      "grid_rows = 3\n"
      "grid_cols = 3\n"
      "modes = overlap, random  # two\n"
      "runs = 4\n"
      "beta = 0.5*log(2t)\n"
      "n_gibbs = 50\n"
      "max_eval = 1000\n");
  const auto cfg = parse_config(in);
  CHECK(cfg.true_graph() == DependencyGraph::lattice(3, 3));
  CHECK(cfg.modes == std::vector<BoMode>{BoMode::kOverlap, BoMode::kRandom});
  CHECK(cfg.runs == 4);
  const auto bo = cfg.bo_config(BoMode::kOverlap, 11);
  CHECK(bo.seed == 11);
  CHECK(bo.n_gibbs == 50);
  CHECK(bo.acquisition.max_eval == 1000);
  CHECK(bo.beta(1) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(bo.space.dim() == 9);
  CHECK(cfg.domain().dim() == 9);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(parse_error_line("runs = 3\nbogus = 1\n") == 2);
  CHECK(parse_error_line("runs = three\n") == 1);
  CHECK(parse_error_line("\n\nruns\n") == 3);
  CHECK(parse_error_line("modes = overlap,sideways\n") == 1);
  CHECK(parse_error_line("graph = file\ngraph_file = /nonexistent/graph.edges\n") > 0);
}

TEST_CASE("semantic config validation") {
  ExperimentConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.edge_prior = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.graph = "torus";
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("observation CSV round trip and errors") {
  ObservationSet obs(2);
  obs.add(Eigen::Vector2d(0.5, 1.0), -0.25);
  obs.add(Eigen::Vector2d(0.0, 2.0), 3.0);
  std::stringstream ss;
  write_observations_csv(ss, obs);
  CHECK(ss.str().rfind("x_1,x_2,y\n", 0) == 0);
  const auto back = read_observations_csv(ss);
  CHECK(back.points == obs.points);
  CHECK(back.values == obs.values);

  auto error_line = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_observations_csv(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(error_line("") == 1);
  CHECK(error_line("x_1,y\n") > 0);
  CHECK(error_line("x_1,x_2,y\n1,2,3\n1,2\n") == 3);
  CHECK(error_line("x_1,x_2,y\n1,abc,3\n") == 2);
  CHECK(error_line("a,b,c\n1,2,3\n") == 1);
}

TEST_CASE("synth smoke run writes well-formed outputs") {
  const auto dir = scratch("synth");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "graph = chain\nD = 3\ngrid_size = 4\nruns = 1\nn_init = 3\nn_iter = 2\nn_gibbs = 10\n";
  }
  Overrides o;
  o.config = dir / "run.cfg";
  o.out = dir / "out";
  std::ostringstream log;
  REQUIRE(run_command("synth", o, log) == kOk);
  for (const char* mode : {"overlap", "no_overlap", "oracle", "random"}) {
    const auto text = slurp(dir / "out" / mode / "run_0.csv");
    CHECK(text.rfind("t,x_1,x_2,x_3,y,r,S,Ravg\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(fs::exists(dir / "out" / (std::string(mode) + "_aggregate.csv")));
  }
  CHECK(fs::exists(dir / "out" / "overlap" / "run_0_rounds.csv"));
  std::ifstream edges(dir / "out" / "overlap" / "run_0_round_0.edges");
  CHECK(read_structure(edges).first.dim() == 3);
  std::ifstream truth(dir / "out" / "true_graph.edges");
  CHECK(read_edge_list(truth) == DependencyGraph::chain(3));

  // Same config, same bytes.
  o.out = dir / "again";
  REQUIRE(run_command("synth", o, log) == kOk);
  CHECK(slurp(dir / "out" / "overlap" / "run_0.csv") == slurp(dir / "again" / "overlap" / "run_0.csv"));
}

TEST_CASE("learn command") {
  const auto dir = scratch("learn");
  {
    std::ofstream data(dir / "data.csv");
    data << "x_1,x_2,x_3,y\n";
    for (int k = 0; k < 12; ++k) data << k % 3 << ',' << (k * 7) % 4 << ',' << (k * 5) % 3 << ',' << k * 0.1 << '\n';
    std::ofstream cfg(dir / "learn.cfg");
    cfg << "n_gibbs = 1\n";
  }
  Overrides o;
  o.config = dir / "learn.cfg";
  o.data = dir / "data.csv";
  o.out = dir / "out";
  std::ostringstream log;
  REQUIRE(run_command("learn", o, log) == kOk);
  std::ifstream learned(dir / "out" / "learned.edges");
  const auto [g, l] = read_structure(learned);
  CHECK(g == DependencyGraph(3));
  CHECK(l.has_value());
  const auto trace = slurp(dir / "out" / "gibbs_trace.csv");
  CHECK(trace.rfind("step,log_likelihood", 0) == 0);

  { std::ofstream empty(dir / "empty.csv"); }
  o.data = dir / "empty.csv";
  CHECK(run_command("learn", o, log) == kConfigError);
  CHECK(log.str().find("line 1") != std::string::npos);
}

TEST_CASE("analyze command") {
  const auto dir = scratch("analyze");
  {
    std::ofstream cfg(dir / "a.cfg");
    cfg << "graph = star\nD = 4\ngrid_size = 5\nn_obs = 30\nscan_points = 100\ninfo_gain_T = 5\n"
           "info_gain_candidates = 20\n";
  }
  Overrides o;
  o.config = dir / "a.cfg";
  o.out = dir / "out";
  std::ostringstream log;
  REQUIRE(run_command("analyze", o, log) == kOk);
  const auto gap = slurp(dir / "out" / "variance_gap.csv");
  CHECK(gap.rfind("true_std,approx_std,ratio\n", 0) == 0);
  CHECK(std::count(gap.begin(), gap.end(), '\n') == 101);
  const auto gain = slurp(dir / "out" / "info_gain.csv");
  CHECK(gain.rfind("T,gain\n1,", 0) == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  std::ostringstream log;
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "nonsense = 1\n";
  }
  Overrides o;
  o.config = dir / "bad.cfg";
  CHECK(run_command("synth", o, log) == kConfigError);

  {
    std::ofstream g(dir / "k6.edges");
    write_edge_list(g, DependencyGraph::complete(6));
    std::ofstream cfg(dir / "wide.cfg");
    cfg << "graph = file\ngraph_file = " << (dir / "k6.edges").string()
        << "\ngrid_size = 3\nmax_treewidth = 3\nruns = 1\nn_iter = 1\nmodes = oracle\n";
  }
  o.config = dir / "wide.cfg";
  o.out = dir / "out";
  CHECK(run_command("synth", o, log) == kCapacityError);
  CHECK(run_command("dance", Overrides{}, log) == kConfigError);
}
