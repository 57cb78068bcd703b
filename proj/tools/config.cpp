#include "config.hpp"

#include "addbo/error.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace addbo::cli {

namespace {

std::filesystem::path existing_file(const std::string& value) {
  if (!std::filesystem::is_regular_file(value)) throw InvalidArgument("no such file: " + value);
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text) {
  std::istringstream is(text);
  T value{};
  if (!(is >> value) || !(is >> std::ws).eof()) throw InvalidArgument("not a valid number: '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("not a boolean: '" + text + "'");
}

}  // namespace

std::vector<BoMode> parse_mode_list(const std::string& text) {
  std::vector<BoMode> modes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) modes.push_back(parse_mode(item));
  }
  if (modes.empty()) throw InvalidArgument("mode list is empty");
  return modes;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"graph", [&](const std::string& v) { cfg.graph = v; }},
      {"graph_file", [&](const std::string& v) { cfg.graph_file = existing_file(v); }},
      {"D", [&](const std::string& v) { cfg.dim = parse_number<int>(v); }},
      {"grid_rows", [&](const std::string& v) { cfg.grid_rows = parse_number<int>(v); }},
      {"grid_cols", [&](const std::string& v) { cfg.grid_cols = parse_number<int>(v); }},
      {"grid_size", [&](const std::string& v) { cfg.grid_size = parse_number<int>(v); }},
      {"domain_lo", [&](const std::string& v) { cfg.domain_lo = parse_number<double>(v); }},
      {"domain_hi", [&](const std::string& v) { cfg.domain_hi = parse_number<double>(v); }},
      {"modes", [&](const std::string& v) { cfg.modes = parse_mode_list(v); }},
      {"runs", [&](const std::string& v) { cfg.runs = parse_number<int>(v); }},
      {"seed", [&](const std::string& v) { cfg.seed = parse_number<std::uint64_t>(v); }},
      {"function_per_run", [&](const std::string& v) { cfg.function_per_run = parse_bool(v); }},
      {"out", [&](const std::string& v) { cfg.out = v; }},
      {"n_init", [&](const std::string& v) { cfg.n_init = parse_number<int>(v); }},
      {"n_iter", [&](const std::string& v) { cfg.n_iter = parse_number<int>(v); }},
      {"beta", [&](const std::string& v) { cfg.beta = v; }},
      {"n_cyc", [&](const std::string& v) { cfg.n_cyc = parse_number<int>(v); }},
      {"n_gibbs", [&](const std::string& v) { cfg.n_gibbs = parse_number<long>(v); }},
      {"max_eval", [&](const std::string& v) { cfg.max_eval = parse_number<long>(v); }},
      {"max_table_size", [&](const std::string& v) { cfg.max_table_size = parse_number<long>(v); }},
      {"max_treewidth", [&](const std::string& v) { cfg.max_treewidth = parse_number<int>(v); }},
      {"max_component_table", [&](const std::string& v) { cfg.max_component_table = parse_number<long>(v); }},
      {"noise_variance", [&](const std::string& v) { cfg.noise_variance = parse_number<double>(v); }},
      {"true_lengthscale", [&](const std::string& v) { cfg.true_lengthscale = parse_number<double>(v); }},
      {"lengthscale_min", [&](const std::string& v) { cfg.lengthscale_min = parse_number<double>(v); }},
      {"lengthscale_max", [&](const std::string& v) { cfg.lengthscale_max = parse_number<double>(v); }},
      {"lengthscale_count", [&](const std::string& v) { cfg.lengthscale_count = parse_number<int>(v); }},
      {"edge_prior", [&](const std::string& v) { cfg.edge_prior = parse_number<double>(v); }},
      {"n_obs", [&](const std::string& v) { cfg.n_obs = parse_number<int>(v); }},
      {"scan_points", [&](const std::string& v) { cfg.scan_points = parse_number<int>(v); }},
      {"info_gain_T", [&](const std::string& v) { cfg.info_gain_T = parse_number<int>(v); }},
      {"info_gain_candidates", [&](const std::string& v) { cfg.info_gain_candidates = parse_number<int>(v); }},
      {"data", [&](const std::string& v) { cfg.data = existing_file(v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + key + "'", line_no);
    try {
      it->second(value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(key + ": " + e.what(), line_no);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string(), 0);
  return parse_config(in);
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
  };
  require(graph == "star" || graph == "grid" || graph == "chain" || graph == "file",
          "graph must be star, grid, chain or file");
  if (graph == "file") require(std::filesystem::exists(graph_file), "graph_file does not exist: " + graph_file.string());
  require(dim >= 1 && dim <= DependencyGraph::kMaxVertices, "D must be in [1, 64]");
  require(grid_rows >= 1 && grid_cols >= 1 && grid_rows * grid_cols <= DependencyGraph::kMaxVertices,
          "grid_rows * grid_cols must be in [1, 64]");
  require(grid_size >= 1, "grid_size must be >= 1");
  require(domain_hi > domain_lo || grid_size == 1, "domain_hi must exceed domain_lo");
  require(runs >= 1, "runs must be >= 1");
  require(n_init >= 1 && n_iter >= 1 && n_cyc >= 1 && n_gibbs >= 1, "n_init, n_iter, n_cyc and n_gibbs must be >= 1");
  require(max_eval >= 0 && max_table_size >= 1 && max_treewidth >= 0 && max_component_table >= 1,
          "capacity caps out of range");
  require(noise_variance > 0.0, "noise_variance must be positive");
  require(true_lengthscale > 0.0, "true_lengthscale must be positive");
  require(lengthscale_min > 0.0 && lengthscale_max >= lengthscale_min && lengthscale_count >= 1,
          "lengthscale grid out of range");
  require(edge_prior > 0.0 && edge_prior < 1.0, "edge_prior must lie in (0, 1)");
  require(n_obs >= 0 && scan_points >= 0, "n_obs and scan_points must be nonnegative");
  require(info_gain_T >= 1 && info_gain_candidates >= info_gain_T, "need info_gain_candidates >= info_gain_T >= 1");
  require(!data.empty() ? std::filesystem::exists(data) : true, "data file does not exist: " + data.string());
  BetaSchedule::parse(beta);
}

DependencyGraph ExperimentConfig::true_graph() const {
  if (graph == "star") return DependencyGraph::star(dim);
  if (graph == "grid") return DependencyGraph::lattice(grid_rows, grid_cols);
  if (graph == "chain") return DependencyGraph::chain(dim);
  std::ifstream in(graph_file);
  if (!in) throw InvalidArgument("cannot open graph_file " + graph_file.string());
  return read_edge_list(in);
}

Domain ExperimentConfig::domain() const {
  return Domain::uniform_grid(true_graph().dim(), grid_size, domain_lo, domain_hi);
}

StructureSpace ExperimentConfig::structure_space() const {
  return StructureSpace::log_spaced(true_graph().dim(), lengthscale_min, lengthscale_max, lengthscale_count,
                                    noise_variance);
}

BoConfig ExperimentConfig::bo_config(BoMode mode, std::uint64_t run_seed) const {
  BoConfig c;
  c.n_init = n_init;
  c.n_iter = n_iter;
  c.beta = BetaSchedule::parse(beta);
  c.n_cyc = n_cyc;
  c.n_gibbs = n_gibbs;
  c.mode = mode;
  c.seed = run_seed;
  c.noise_variance = noise_variance;
  c.space = structure_space();
  c.edge_prior = edge_prior;
  c.tree.max_treewidth = max_treewidth;
  c.acquisition.max_table_size = max_table_size;
  c.acquisition.max_eval = max_eval;
  return c;
}

}  // namespace addbo::cli
