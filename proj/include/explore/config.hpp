#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "explore/catalog.hpp"
#include "explore/relevance.hpp"
#include "explore/strategies.hpp"

namespace explore {

struct StrategyEntry {
  std::string name;   // relevance, mmr, dum, dpp, explore_d, explore_c, random
  std::string label;  // report label, defaults to name
  double beta = 0.5;  // mmr
  double alpha = 0.5; // explore_*
  bool use_relevance = true;  // explore_*: false ranks by marginal diversity only
};

enum class RelevanceSource { Mf, Table };

/// Everything one `run` needs. Relative paths are resolved against the
/// directory of the config file.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path ratings_path;
  IngestionSchema schema;
  std::filesystem::path output_dir;

  double train_ratio = 0.8;

  RelevanceSource relevance = RelevanceSource::Mf;
  std::filesystem::path score_table;
  std::string score_delimiter = "\t";
  MfParams mf;
  bool mf_seed_set = false;

  std::string basis = "auto";  // auto, users, categories
  std::size_t hot_items = 500;
  std::size_t sample_pairs = 10000;
  bool rating_weighted = false;

  double gamma = 2.0;
  std::vector<double> expected_steps{5.0, 10.0, 20.0};
  std::size_t k = 10;
  bool sequential_consumption = false;

  std::vector<StrategyEntry> strategies;
  std::size_t trials = 20;
  std::size_t max_users = 0;  // 0: every user with a test rating
  std::size_t prune_top_n = 500;
  int workers = 0;
};

/// Validates the whole tree and throws ConfigError listing every problem,
/// one "key: message" per line.
RunConfig parse_run_config(const nlohmann::json& tree, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

std::shared_ptr<const Strategy> make_strategy(const StrategyEntry& entry);

}  // namespace explore
