// Command-line surface: load a model config, run analytic or simulation
// computations, emit machine-readable tables (JSON or CSV).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "batchq/config.hpp"
#include "batchq/diffusion.hpp"
#include "batchq/exit.hpp"
#include "batchq/inversion.hpp"
#include "batchq/queueing.hpp"
#include "batchq/simulator.hpp"
#include "batchq/verify.hpp"
#include "batchq/version.hpp"

namespace {

using nlohmann::json;

struct OutputSpec {
  std::string path;    // empty -> stdout
  std::string format;  // "json" or "csv"
};

void write_text(const OutputSpec& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path);
  if (!f) throw std::runtime_error("cannot write output file '" + out.path + "'");
  f << text;
}

json provenance(const std::string& model_text, std::optional<std::uint64_t> seed) {
  json p;
  p["config_hash"] = batchq::config::config_hash_text(model_text);
  p["version"] = BATCHQ_VERSION_STRING;
  if (seed) p["seed"] = *seed;
  return p;
}

std::string csv_escape(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void emit(const OutputSpec& out, const json& doc,
          const std::vector<std::string>& csv_header,
          const std::vector<std::vector<double>>& csv_rows) {
  if (out.format == "csv") {
    std::ostringstream text;
    for (size_t i = 0; i < csv_header.size(); ++i)
      text << (i ? "," : "") << csv_header[i];
    text << "\n";
    for (const auto& row : csv_rows) {
      for (size_t i = 0; i < row.size(); ++i)
        text << (i ? "," : "") << csv_escape(row[i]);
      text << "\n";
    }
    write_text(out, text.str());
  } else {
    write_text(out, doc.dump(2) + "\n");
  }
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty value list '" + spec + "'");
  return out;
}

struct Common {
  std::string model_path;
  OutputSpec out;
  std::string model_text;
};

void add_common(CLI::App* cmd, Common& c, bool needs_model = true) {
  if (needs_model)
    cmd->add_option("--model", c.model_path, "model config (JSON)")->required();
  cmd->add_option("--output", c.out.path, "output path (default stdout)");
  cmd->add_option("--format", c.out.format, "json|csv")
      ->default_val("json")
      ->check(CLI::IsMember({"json", "csv"}));
}

int run_stationary(const Common& c) {
  const batchq::QueueModel model = batchq::config::model_from_json_text(c.model_text);
  batchq::queueing::System sys(model);
  const std::vector<double> pi = sys.stationary();
  json doc;
  doc["provenance"] = provenance(c.model_text, std::nullopt);
  doc["pi"] = pi;
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < pi.size(); ++i)
    rows.push_back({static_cast<double>(i), pi[i]});
  emit(c.out, doc, {"level", "probability"}, rows);
  return 0;
}

int run_busy_period(const Common& c, int r, double x, const std::string& s_list) {
  const batchq::QueueModel model = batchq::config::model_from_json_text(c.model_text);
  batchq::queueing::System sys(model);
  const batchq::queueing::SystemState state{r, x};
  const double mean = sys.busy_period_mean(state);
  json doc;
  doc["provenance"] = provenance(c.model_text, std::nullopt);
  doc["r"] = r;
  doc["x"] = x;
  doc["mean"] = mean;
  std::vector<std::vector<double>> rows;
  json grid = json::array();
  for (double s : parse_list(s_list)) {
    const double lt = sys.busy_period_lt(state, s);
    grid.push_back({{"s", s}, {"lt", lt}});
    rows.push_back({s, lt, mean});
  }
  doc["lt_grid"] = grid;
  emit(c.out, doc, {"s", "lt", "mean"}, rows);
  return 0;
}

int run_first_loss(const Common& c, int r, double x, const std::string& s_list,
                   int n_max) {
  const batchq::QueueModel model = batchq::config::model_from_json_text(c.model_text);
  batchq::queueing::System sys(model);
  const batchq::queueing::SystemState state{r, x};
  const double mean = sys.first_loss_mean(state);
  json doc;
  doc["provenance"] = provenance(c.model_text, std::nullopt);
  doc["r"] = r;
  doc["x"] = x;
  doc["mean"] = mean;
  std::vector<std::vector<double>> rows;
  json grid = json::array();
  for (double s : parse_list(s_list)) {
    const double lt = sys.first_loss_lt(state, s);
    grid.push_back({{"s", s}, {"lt", lt}});
    rows.push_back({s, lt, mean});
  }
  doc["lt_grid"] = grid;
  if (model.lambda() == 0.0 && n_max > 0) {
    doc["loss_count_pmf"] = sys.first_loss_count_pmf(state, n_max);
  }
  emit(c.out, doc, {"s", "lt", "mean"}, rows);
  return 0;
}

int run_transient(const Common& c, int r, double x, const std::string& times,
                  const std::string& levels_spec, int order) {
  const batchq::QueueModel model = batchq::config::model_from_json_text(c.model_text);
  batchq::queueing::System sys(model);
  const batchq::queueing::SystemState state{r, x};
  std::vector<int> levels;
  if (levels_spec.empty()) {
    for (int u = 0; u <= model.buffer() + 1; ++u) levels.push_back(u);
  } else {
    for (double v : parse_list(levels_spec)) levels.push_back(static_cast<int>(v));
  }
  json doc;
  doc["provenance"] = provenance(c.model_text, std::nullopt);
  doc["r"] = r;
  doc["x"] = x;
  json curves = json::array();
  std::vector<std::vector<double>> rows;
  for (double t : parse_list(times)) {
    for (int u : levels) {
      batchq::inversion::InversionRequest req;
      req.t = t;
      req.order = order;
      req.transform = [&](double s) { return sys.transient(state, u, s).cdf / s; };
      const batchq::inversion::InversionResult res = batchq::inversion::invert(req);
      curves.push_back({{"t", t},
                        {"level", u},
                        {"cdf", res.value},
                        {"error_estimate", res.error_estimate}});
      rows.push_back({t, static_cast<double>(u), res.value, res.error_estimate});
    }
  }
  doc["curves"] = curves;
  emit(c.out, doc, {"t", "level", "cdf", "error_estimate"}, rows);
  return 0;
}

int run_exit(const Common& c, double x, int r, int k, const std::string& s_list) {
  const batchq::QueueModel model = batchq::config::model_from_json_text(c.model_text);
  json doc;
  doc["provenance"] = provenance(c.model_text, std::nullopt);
  doc["r"] = r;
  doc["k"] = k;
  doc["x"] = x;
  std::vector<std::vector<double>> rows;
  json grid = json::array();
  for (double s : parse_list(s_list)) {
    const batchq::exit_problem::ExitLaw law =
        batchq::exit_problem::two_sided(model, x, r, k, s);
    grid.push_back({{"s", s},
                    {"lower_lt", law.lower_lt},
                    {"upper_lt", law.upper_lt},
                    {"lower_prob", law.lower_prob},
                    {"upper_prob", law.upper_prob}});
    rows.push_back({s, law.lower_lt, law.upper_lt, law.lower_prob, law.upper_prob});
  }
  doc["grid"] = grid;
  emit(c.out, doc, {"s", "lower_lt", "upper_lt", "lower_prob", "upper_prob"}, rows);
  return 0;
}

int run_simulate(const Common& c, int r, double x,
                 const std::vector<std::string>& which, int reps,
                 double horizon, std::uint64_t seed, double occ_t, int exit_r,
                 int exit_k, int threads) {
  batchq::simulate::SimConfig cfg{
      batchq::config::model_from_json_text(c.model_text), {r, x}};
  cfg.replications = reps;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.occupancy_time = occ_t;
  cfg.exit_r = exit_r;
  cfg.exit_k = exit_k;
  cfg.threads = threads;
  using batchq::simulate::Estimand;
  for (const std::string& w : which) {
    if (w == "busy-period") cfg.estimands.push_back(Estimand::kBusyPeriod);
    else if (w == "first-loss-time") cfg.estimands.push_back(Estimand::kFirstLossTime);
    else if (w == "first-loss-count") cfg.estimands.push_back(Estimand::kFirstLossCount);
    else if (w == "occupancy") cfg.estimands.push_back(Estimand::kOccupancyAtT);
    else if (w == "time-average") cfg.estimands.push_back(Estimand::kTimeAverageOccupancy);
    else if (w == "exit-side") cfg.estimands.push_back(Estimand::kExitSide);
    else throw std::invalid_argument("unknown estimand '" + w + "'");
  }
  const batchq::simulate::SimResult res = batchq::simulate::run(cfg);

  auto estimate_json = [](const batchq::simulate::SimEstimate& e) {
    return json{{"mean", e.mean},
                {"variance", e.variance},
                {"half_width_99", e.half_width_99},
                {"n", e.n}};
  };
  json doc;
  doc["provenance"] = provenance(c.model_text, seed);
  const char* names[] = {"busy_period",       "first_loss_time",
                         "first_loss_count",  "occupancy_at_t",
                         "time_average",      "exit_side_lower"};
  for (const auto& [est, val] : res.scalars)
    doc["estimates"][names[static_cast<int>(est)]] = estimate_json(val);
  std::vector<std::vector<double>> rows;
  if (!res.time_average_occupancy.empty()) {
    json per_level = json::array();
    for (size_t l = 0; l < res.time_average_occupancy.size(); ++l) {
      per_level.push_back(estimate_json(res.time_average_occupancy[l]));
      rows.push_back({static_cast<double>(l),
                      res.time_average_occupancy[l].mean,
                      res.time_average_occupancy[l].half_width_99});
    }
    doc["time_average_occupancy"] = per_level;
  }
  if (!res.occupancy_histogram.empty()) {
    doc["occupancy_histogram"] = res.occupancy_histogram;
    if (rows.empty())
      for (size_t l = 0; l < res.occupancy_histogram.size(); ++l)
        rows.push_back({static_cast<double>(l),
                        static_cast<double>(res.occupancy_histogram[l])});
  }
  if (!res.loss_count_histogram.empty())
    doc["loss_count_histogram"] = res.loss_count_histogram;
  emit(c.out, doc, {"level", "value", "half_width"}, rows);
  return 0;
}

int run_verify(const OutputSpec& out, int mc_paths, std::uint64_t seed,
               bool skip_sim, bool skip_diff) {
  batchq::verify::Options opts;
  opts.mc_paths = mc_paths;
  opts.seed = seed;
  opts.include_simulation = !skip_sim;
  opts.include_diffusion = !skip_diff;
  const std::vector<batchq::verify::CheckResult> results =
      batchq::verify::run_all(opts);
  bool all_pass = true;
  json doc = json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("[%s] %s: %s [%.2f s]\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
    doc.push_back({{"name", r.name},
                   {"pass", r.pass},
                   {"detail", r.detail},
                   {"seconds", r.seconds}});
  }
  if (!out.path.empty()) write_text(out, doc.dump(2) + "\n");
  std::printf("%s\n", all_pass ? "verify: all checks passed"
                               : "verify: FAILURES present");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-buffer batch queue analytics (busy periods, loss "
               "times, customer counts) and validating simulator"};
  app.require_subcommand(1);

  Common c_stationary, c_busy, c_loss, c_transient, c_exit, c_sim;
  int busy_r = 1, loss_r = 0, tr_r = 0, exit_r = 0, exit_k = 0;
  double busy_x = 0.0, loss_x = 0.0, tr_x = 0.0, exit_x = 0.0;
  std::string busy_s = "0.01,0.1,1,10", loss_s = "0.01,0.1,1,10";
  std::string exit_s = "0.01,0.1,1,10";
  std::string tr_times = "1", tr_levels;
  int loss_nmax = 8, tr_order = 14;

  CLI::App* stationary = app.add_subcommand("stationary", "stationary customer-count law");
  add_common(stationary, c_stationary);

  CLI::App* busy = app.add_subcommand("busy-period", "busy period transform grid and mean");
  add_common(busy, c_busy);
  busy->add_option("--r", busy_r, "initial occupied places (1..B+1)");
  busy->add_option("--x", busy_x, "initial service age");
  busy->add_option("--s", busy_s, "comma-separated transform arguments");

  CLI::App* loss = app.add_subcommand("first-loss", "first-loss transform grid, mean, count pmf");
  add_common(loss, c_loss);
  loss->add_option("--r", loss_r, "initial occupied places (0..B+1)");
  loss->add_option("--x", loss_x, "initial service age");
  loss->add_option("--s", loss_s, "comma-separated transform arguments");
  loss->add_option("--nmax", loss_nmax, "largest loss count in the pmf (lambda = 0)");

  CLI::App* transient = app.add_subcommand("transient", "inverted customer-count cdf curves");
  add_common(transient, c_transient);
  transient->add_option("--r", tr_r, "initial occupied places");
  transient->add_option("--x", tr_x, "initial service age");
  transient->add_option("--times", tr_times, "comma-separated times")->required();
  transient->add_option("--levels", tr_levels, "comma-separated levels (default all)");
  transient->add_option("--order", tr_order, "Gaver-Stehfest order (even, 6..24)");

  CLI::App* exit_cmd = app.add_subcommand("exit", "two-sided exit transforms and probabilities");
  add_common(exit_cmd, c_exit);
  exit_cmd->add_option("--x", exit_x, "initial service age");
  exit_cmd->add_option("--r", exit_r, "lower boundary depth")->required();
  exit_cmd->add_option("--k", exit_k, "upper boundary height")->required();
  exit_cmd->add_option("--s", exit_s, "comma-separated transform arguments");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_common(sim, c_sim);
  std::vector<std::string> sim_which{"time-average"};
  int sim_r = 0, sim_reps = 10000, sim_exit_r = 0, sim_exit_k = 0, sim_threads = 0;
  double sim_x = 0.0, sim_horizon = 1000.0, sim_occ_t = 0.0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--estimand", sim_which,
                  "busy-period|first-loss-time|first-loss-count|occupancy|"
                  "time-average|exit-side");
  sim->add_option("--r", sim_r, "initial occupied places");
  sim->add_option("--x", sim_x, "initial service age");
  sim->add_option("--replications", sim_reps, "independent replications");
  sim->add_option("--horizon", sim_horizon, "time horizon / safety cap");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--occupancy-time", sim_occ_t, "snapshot time for occupancy");
  sim->add_option("--exit-r", sim_exit_r, "exit interval lower depth");
  sim->add_option("--exit-k", sim_exit_k, "exit interval upper height");
  sim->add_option("--threads", sim_threads, "worker threads (0 = auto)");

  CLI::App* verify = app.add_subcommand("verify", "run the cross-validation suite");
  OutputSpec verify_out;
  int verify_paths = 100000;
  std::uint64_t verify_seed = 20260810;
  bool verify_skip_sim = false, verify_skip_diff = false;
  verify->add_option("--output", verify_out.path, "also write JSON results here");
  verify->add_option("--mc-paths", verify_paths, "Monte Carlo path count");
  verify->add_option("--seed", verify_seed, "Monte Carlo seed");
  verify->add_flag("--skip-simulation", verify_skip_sim, "skip Monte Carlo checks");
  verify->add_flag("--skip-diffusion", verify_skip_diff, "skip diffusion-trend checks");

  CLI11_PARSE(app, argc, argv);

  try {
    for (Common* c : {&c_stationary, &c_busy, &c_loss, &c_transient, &c_exit, &c_sim}) {
      if (c->model_path.empty()) continue;
      std::ifstream in(c->model_path);
      if (!in) throw std::invalid_argument("cannot open config file '" +
                                           c->model_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      c->model_text = text.str();
    }

    if (stationary->parsed()) return run_stationary(c_stationary);
    if (busy->parsed()) return run_busy_period(c_busy, busy_r, busy_x, busy_s);
    if (loss->parsed())
      return run_first_loss(c_loss, loss_r, loss_x, loss_s, loss_nmax);
    if (transient->parsed())
      return run_transient(c_transient, tr_r, tr_x, tr_times, tr_levels, tr_order);
    if (exit_cmd->parsed())
      return run_exit(c_exit, exit_x, exit_r, exit_k, exit_s);
    if (sim->parsed())
      return run_simulate(c_sim, sim_r, sim_x, sim_which, sim_reps, sim_horizon,
                          sim_seed, sim_occ_t, sim_exit_r, sim_exit_k, sim_threads);
    if (verify->parsed())
      return run_verify(verify_out, verify_paths, verify_seed, verify_skip_sim,
                        verify_skip_diff);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
