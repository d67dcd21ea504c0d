#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace mpsim {

// Propensity report emitted by the simulate command. The JSON schema is
// fixed: model, model_sha256, params, runs, converged, attractors (sorted by
// descending count, ties broken by id), elapsed_seconds, seed. JSON and CSV
// carry the same numbers; both are rendered through the same serializer so
// they agree digit for digit.
struct PropensityReport {
  struct Row {
    std::string id;
    std::uint64_t count = 0;
    double fraction = 0;
  };

  std::string model_path;
  std::string model_sha256;
  std::string init;
  std::vector<std::string> mutations;
  std::string depth_spec;
  std::string weights_spec;
  std::string l_row_mode;
  std::string stop_policy;
  int check_interval = 0;
  long max_steps = 0;
  std::uint64_t runs = 0;
  std::uint64_t converged = 0;
  std::vector<Row> rows;
  double elapsed_seconds = 0;
  std::uint64_t seed = 0;

  void sort_rows() {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.id < b.id;
    });
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["model"] = model_path;
    j["model_sha256"] = model_sha256;
    nlohmann::ordered_json params;
    params["init"] = init;
    params["mutations"] = mutations;
    params["depth"] = depth_spec;
    params["weights"] = weights_spec;
    params["l_row_mode"] = l_row_mode;
    params["stop"] = stop_policy;
    params["check_interval"] = check_interval;
    params["max_steps"] = max_steps;
    j["params"] = std::move(params);
    j["runs"] = runs;
    j["converged"] = converged;
    nlohmann::ordered_json attractors = nlohmann::ordered_json::array();
    for (const Row& r : rows) {
      nlohmann::ordered_json row;
      row["id"] = r.id;
      row["count"] = r.count;
      row["fraction"] = r.fraction;
      attractors.push_back(std::move(row));
    }
    j["attractors"] = std::move(attractors);
    j["elapsed_seconds"] = elapsed_seconds;
    j["seed"] = seed;
    return j.dump(2) + "\n";
  }

  std::string to_csv() const {
    std::string out = "attractor,count,fraction\n";
    for (const Row& r : rows) {
      out += r.id;
      out += ',';
      out += nlohmann::json(r.count).dump();
      out += ',';
      out += nlohmann::json(r.fraction).dump();
      out += '\n';
    }
    return out;
  }

  // Tab-separated table for external bar-chart tooling.
  std::string to_plot_data() const {
    std::string out = "attractor\tcount\tfraction\n";
    for (const Row& r : rows) {
      out += r.id;
      out += '\t';
      out += nlohmann::json(r.count).dump();
      out += '\t';
      out += nlohmann::json(r.fraction).dump();
      out += '\n';
    }
    return out;
  }
};

}  // namespace mpsim
