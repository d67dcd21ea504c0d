// Command-line front end: model loading, experiment configuration, batch
// simulation with parallel workers, reporting.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "mpsim/attractors.hpp"
#include "mpsim/bnet.hpp"
#include "mpsim/engine.hpp"
#include "mpsim/oracle.hpp"
#include "mpsim/params.hpp"
#include "mpsim/report.hpp"
#include "mpsim/sampler.hpp"
#include "mpsim/sha256.hpp"

namespace {

struct LoadedModel {
  std::string path;
  std::string text;
  mpsim::Network network;
};

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mpsim::UsageError("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  return {path, text, mpsim::parse_bnet(text)};
}

std::vector<mpsim::Mutation> parse_mutations(const std::vector<std::string>& specs,
                                             const mpsim::Network& net) {
  std::vector<mpsim::Mutation> out;
  for (const std::string& spec : specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw mpsim::UsageError("bad mutation (expected NAME=0|1): " + spec);
    std::string name = spec.substr(0, eq);
    std::string value = spec.substr(eq + 1);
    int idx = net.index_of(name);
    if (idx < 0) throw mpsim::UsageError("unknown component: " + name);
    if (value != "0" && value != "1")
      throw mpsim::UsageError("bad mutation value for " + name + ": " + value);
    out.push_back({idx, value == "1"});
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mpsim::UsageError("cannot write: " + path);
  out << content;
}

mpsim::LRowMode parse_l_row_mode(const std::string& s) {
  if (s == "listing") return mpsim::LRowMode::kListing;
  if (s == "count") return mpsim::LRowMode::kCount;
  throw mpsim::UsageError("bad l-row-mode: " + s + " (listing|count)");
}

mpsim::StopPolicy parse_stop_policy(const std::string& s) {
  if (s == "attractor") return mpsim::StopPolicy::kAttractor;
  if (s == "strong-basin") return mpsim::StopPolicy::kStrongBasin;
  if (s == "max-steps") return mpsim::StopPolicy::kMaxSteps;
  throw mpsim::UsageError("bad stop policy: " + s +
                          " (attractor|strong-basin|max-steps)");
}

int cmd_simulate(const std::string& model_path, const std::string& init,
                 const std::vector<std::string>& mutation_specs,
                 const std::string& depth_spec, const std::string& weight_spec,
                 std::uint64_t runs, std::uint64_t seed, int check_interval,
                 long max_steps, const std::string& stop_spec,
                 const std::string& l_row_spec, unsigned workers,
                 const std::string& format, const std::string& output,
                 const std::string& plot_data) {
  auto start = std::chrono::steady_clock::now();
  LoadedModel model = load_model(model_path);
  std::vector<mpsim::Mutation> mutations =
      parse_mutations(mutation_specs, model.network);
  mpsim::Network net = mpsim::apply_mutations(model.network, mutations);
  int n = net.size();

  mpsim::SimulationParams params{
      mpsim::parse_depth_spec(depth_spec, n),
      mpsim::parse_weight_spec(weight_spec, n),
      parse_l_row_mode(l_row_spec),
      parse_stop_policy(stop_spec),
      max_steps,
      check_interval};
  mpsim::Configuration x0 = mpsim::parse_configuration(init, net);

  mpsim::Engine engine(net);
  mpsim::AttractorSet attractors = mpsim::minimal_trap_spaces(engine);
  if (!mpsim::sampling_matches_attractors(attractors, params, n))
    std::cerr << "warning: sampled dynamics does not cover the full "
                 "transition relation and cyclic attractors exist; sampled "
                 "attractors may be finer than the reported trap spaces\n";

  if (format != "json" && format != "csv")
    throw mpsim::UsageError("bad format: " + format + " (json|csv)");
  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  mpsim::PropensityEstimate estimate = mpsim::estimate_propensities(
      engine, attractors, x0, params, runs, seed, workers);

  mpsim::PropensityReport report;
  report.model_path = model_path;
  report.model_sha256 = mpsim::Sha256::hash(model.text);
  report.init = x0.to_string();
  report.mutations = mutation_specs;
  report.depth_spec = params.depth.spec_string();
  report.weights_spec = params.weights.spec_string();
  report.l_row_mode = mpsim::to_string(params.l_row_mode);
  report.stop_policy = mpsim::to_string(params.stop);
  report.check_interval = params.resolved_check_interval(n);
  report.max_steps = params.max_steps;
  report.runs = estimate.runs;
  report.converged = estimate.converged();
  std::vector<double> fractions = estimate.fractions();
  for (std::size_t i = 0; i < attractors.size(); ++i) {
    if (estimate.counts[i] == 0) continue;
    report.rows.push_back({attractors.id(i), estimate.counts[i], fractions[i]});
  }
  report.sort_rows();
  report.seed = seed;
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  write_output(output, format == "csv" ? report.to_csv() : report.to_json());
  if (!plot_data.empty()) write_output(plot_data, report.to_plot_data());
  return 0;
}

int cmd_attractors(const std::string& model_path, const std::string& from) {
  LoadedModel model = load_model(model_path);
  mpsim::Engine engine(model.network);
  mpsim::AttractorSet attractors = mpsim::minimal_trap_spaces(engine);
  if (!from.empty()) {
    mpsim::Configuration x = mpsim::parse_configuration(from, model.network);
    attractors = mpsim::filter_reachable_attractors(attractors, engine, x);
  }
  for (std::size_t i = 0; i < attractors.size(); ++i)
    std::cout << attractors.id(i) << "\n";
  return 0;
}

int cmd_transitions(const std::string& model_path, const std::string& from,
                    int depth, const std::string& oracle_mode) {
  LoadedModel model = load_model(model_path);
  const mpsim::Network& net = model.network;
  int n = net.size();
  mpsim::Configuration x = mpsim::parse_configuration(from, net);

  if (!oracle_mode.empty()) {
    std::vector<mpsim::Configuration> successors;
    if (oracle_mode == "mp")
      successors = mpsim::oracle::mp_successors_bruteforce(net, x);
    else if (oracle_mode == "async")
      successors = mpsim::oracle::async_successors(net, x);
    else if (oracle_mode == "fully-async")
      successors = mpsim::oracle::fully_async_successors(net, x);
    else
      throw mpsim::UsageError("bad oracle mode: " + oracle_mode +
                              " (mp|async|fully-async)");
    for (const auto& y : successors)
      if (y.bits != x.bits) std::cout << x.to_string() << " -> " << y.to_string() << "\n";
    return 0;
  }

  if (depth == 0) depth = n;
  mpsim::Engine engine(net);
  mpsim::SpaceSet spaces = engine.reachable_spaces(x, depth);
  std::cout << "anchor " << x.to_string() << " depth " << depth << "\n";
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const mpsim::Space& sp = spaces[s];
    std::cout << "space " << s + 1 << ": K=" << mpsim::mask_to_bitstring(sp.key, n)
              << " H=" << mpsim::mask_to_bitstring(sp.flippable, n)
              << " L=" << mpsim::mask_to_bitstring(sp.forced, n) << " cube="
              << mpsim::Subhypercube::of(x, sp.flippable).to_string();
    int l = mpsim::popcount(sp.forced);
    int h = mpsim::popcount(sp.flippable);
    std::cout << " counts";
    bool any = false;
    for (int m = std::max(1, l); m <= h; ++m) {
      std::cout << " m=" << m << ":" << mpsim::transition_count(sp, m);
      any = true;
    }
    if (!any) std::cout << " none";
    std::cout << "\n";
    if (h > 0 && h <= 20) {
      mpsim::enumerate_transitions(x, sp, [&](const mpsim::Configuration& y) {
        std::cout << "  " << x.to_string() << " -> " << y.to_string() << "\n";
      });
    } else if (h > 20) {
      std::cout << "  (|H| = " << h << " above materialization cap, counts only)\n";
    }
  }
  return 0;
}

int cmd_exact(const std::string& model_path, const std::string& from,
              const std::string& depth_spec, const std::string& weight_spec,
              const std::string& l_row_spec) {
  LoadedModel model = load_model(model_path);
  const mpsim::Network& net = model.network;
  int n = net.size();
  mpsim::Configuration x = mpsim::parse_configuration(from, net);
  auto result = mpsim::oracle::exact_propensities(
      net, x, mpsim::parse_depth_spec(depth_spec, n),
      mpsim::parse_weight_spec(weight_spec, n), parse_l_row_mode(l_row_spec));
  for (std::size_t i = 0; i < result.attractors.size(); ++i)
    std::cout << result.attractors.id(i) << " "
              << nlohmann::json(result.probabilities[i]).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Boolean network simulation under most-permissive semantics with "
      "variable permissive depth"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Estimate attractor propensities by sampling trajectories");
  std::string model, init, depth = "exp", weights = "uniform";
  std::vector<std::string> mutations;
  std::uint64_t runs = 10000, seed = 0;
  int check_interval = 0;
  long max_steps = 100000;
  std::string stop = "strong-basin", l_row = "listing", format = "json";
  std::string output, plot_data;
  unsigned workers = 1;
  sim->add_option("--model", model, "Model file (.bnet)")->required();
  sim->add_option("--init", init,
                  "Initial configuration: bitstring in declaration order, or "
                  "NAME=0|1 assignments covering all components")
      ->required();
  sim->add_option("--mutation", mutations,
                  "Force a component to a constant (NAME=0|1); repeatable");
  sim->add_option("--depth", depth, "Depth spec: const:K, exp, custom:p1,...,pn");
  sim->add_option("--weights", weights,
                  "Weight spec: uniform, single, custom:w1,...,wn");
  sim->add_option("--runs", runs, "Number of trajectories");
  sim->add_option("--seed", seed, "Master seed");
  sim->add_option("--check-interval", check_interval,
                  "Steps between stop checks (0 = auto)");
  sim->add_option("--max-steps", max_steps, "Per-trajectory step bound");
  sim->add_option("--stop", stop, "Stop policy: attractor|strong-basin|max-steps");
  sim->add_option("--l-row-mode", l_row,
                  "Weighting of the all-forced flip row: listing|count");
  sim->add_option("--workers", workers, "Worker threads (0 = hardware)");
  sim->add_option("--format", format, "Report format: json|csv");
  sim->add_option("--output", output, "Report path (default stdout)");
  sim->add_option("--emit-plot-data", plot_data,
                  "Also write a tab-separated propensity table");

  // attractors
  auto* attr = app.add_subcommand("attractors", "List minimal trap spaces");
  std::string attr_model, attr_from;
  attr->add_option("--model", attr_model, "Model file (.bnet)")->required();
  attr->add_option("--from", attr_from,
                   "Only attractors reachable from this configuration");

  // transitions
  auto* trans = app.add_subcommand(
      "transitions", "Show reachable spaces and transitions from a configuration");
  std::string trans_model, trans_from, trans_oracle;
  int trans_depth = 0;
  trans->add_option("--model", trans_model, "Model file (.bnet)")->required();
  trans->add_option("--from", trans_from, "Anchor configuration")->required();
  trans->add_option("--depth", trans_depth, "Permissive depth (0 = dimension)");
  trans->add_option("--oracle", trans_oracle,
                    "Dump brute-force successors instead: mp|async|fully-async");

  // exact
  auto* exact = app.add_subcommand(
      "exact", "Exact absorption probabilities on small models");
  std::string exact_model, exact_from, exact_depth = "exp",
              exact_weights = "uniform", exact_l_row = "listing";
  exact->add_option("--model", exact_model, "Model file (.bnet)")->required();
  exact->add_option("--from", exact_from, "Initial configuration")->required();
  exact->add_option("--depth", exact_depth, "Depth spec");
  exact->add_option("--weights", exact_weights, "Weight spec");
  exact->add_option("--l-row-mode", exact_l_row, "listing|count");

  try {
    app.parse(argc, argv);
    if (sim->parsed())
      return cmd_simulate(model, init, mutations, depth, weights, runs, seed,
                          check_interval, max_steps, stop, l_row, workers,
                          format, output, plot_data);
    if (attr->parsed()) return cmd_attractors(attr_model, attr_from);
    if (trans->parsed())
      return cmd_transitions(trans_model, trans_from, trans_depth, trans_oracle);
    if (exact->parsed())
      return cmd_exact(exact_model, exact_from, exact_depth, exact_weights,
                       exact_l_row);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mpsim::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mpsim::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
