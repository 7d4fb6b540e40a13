#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "explore/config.hpp"
#include "explore/simulator.hpp"

namespace explore {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> workers;
};

struct RunResult {
  std::vector<ExperimentReport> reports;
  std::vector<std::filesystem::path> files;  // everything written, manifest last
};

/// load -> split -> relevance -> distances -> one experiment per E[steps]
/// value -> report files. Throws on failure.
RunResult execute_run(const RunConfig& config, std::ostream& log);

/// Report table: one row per strategy and E[steps] value.
void write_report_tsv(const std::vector<ExperimentReport>& reports, std::ostream& out);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

// Subcommands; the return value is the process exit status.
int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides,
            std::ostream& out, std::ostream& err);
int cmd_calibrate(double gamma, const std::vector<double>& targets, std::ostream& out,
                  std::ostream& err);
int cmd_ingest_check(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

struct SynthOptions {
  std::string kind = "clustered";  // clustered or low-rank
  std::filesystem::path out_dir;
  std::size_t users = 0, items = 0;  // 0 keeps the generator default
  std::uint64_t seed = 1;
};
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

}  // namespace explore
