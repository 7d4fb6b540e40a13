#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "explore/app.hpp"
#include "explore/config.hpp"
#include "explore/error.hpp"
#include "helpers.hpp"

using namespace explore;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = EXPLORE_SOURCE_DIR;

json fixture_tree() {
  std::ifstream in(kSource / "configs" / "fixture.json");
  return json::parse(in, nullptr, true, true);
}

// A fast copy of the fixture config writing into a scratch directory.
fs::path small_config(const std::string& name, std::size_t trials = 2) {
  const auto dir = testing::scratch_dir(name);
  auto tree = fixture_tree();
  const fs::path data = kSource / "data" / "fixture";
  tree["dataset"]["ratings"] = (data / "ratings.tsv").string();
  tree["dataset"]["items"] = (data / "items.tsv").string();
  tree["dataset"]["categories"] = (data / "categories.txt").string();
  tree["output_dir"] = (dir / "out").string();
  tree["experiment"]["trials"] = trials;
  tree["mf"]["epochs"] = 10;
  testing::write_text(dir / "config.json", tree.dump(2));
  return dir / "config.json";
}

std::string errors_of(const json& tree) {
  try {
    parse_run_config(tree, kSource / "configs");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("the fixture config parses") {
  const auto c = parse_run_config(fixture_tree(), kSource / "configs");
  CHECK(c.seed == 20240501);
  CHECK(c.strategies.size() == 6);
  CHECK(c.expected_steps == std::vector<double>{5, 10, 20});
  CHECK(c.schema.items_define_catalog);
  CHECK(make_strategy(c.strategies[4])->name() == "explore_d");
}

TEST_CASE("config validation reports every problem with its key") {
  auto tree = fixture_tree();
  tree["dataset"]["ratings"] = "missing.tsv";
  tree["user_model"]["gamma"] = -1;
  tree["mf"]["lr"] = "fast";
  tree["experiment"]["trials"] = 0u;
  tree["strategies"][1]["params"]["beta"] = 2;
  tree["strategies"].push_back({{"name", "magic"}});
  tree["surprise"] = 1;
  const auto msg = errors_of(tree);
  CHECK(msg.find("7 problems") != std::string::npos);
  CHECK(msg.find("dataset.ratings: file not found") != std::string::npos);
  CHECK(msg.find("user_model.gamma: must be > 0") != std::string::npos);
  CHECK(msg.find("mf.lr: expected a number") != std::string::npos);
  CHECK(msg.find("experiment.trials: must be >= 1") != std::string::npos);
  CHECK(msg.find("strategies[1].params.beta") != std::string::npos);
  CHECK(msg.find("unknown strategy 'magic'") != std::string::npos);
  CHECK(msg.find("surprise: unknown key") != std::string::npos);
}

TEST_CASE("required keys") {
  CHECK(errors_of(json::object()).find("seed: missing") != std::string::npos);
  CHECK(errors_of(json::object()).find("dataset: missing") != std::string::npos);
  CHECK(errors_of(json::object()).find("strategies: missing") != std::string::npos);
  auto tree = fixture_tree();
  tree["strategies"].push_back({{"name", "relevance"}});
  CHECK(errors_of(tree).find("duplicate label") != std::string::npos);
  CHECK_THROWS_AS(parse_run_config(json::array(), "."), ConfigError);
}

TEST_CASE("run exits 2 on a config naming a missing dataset") {
  const auto dir = testing::scratch_dir("missing_dataset");
  auto tree = fixture_tree();
  tree["dataset"]["ratings"] = "nowhere.tsv";
  testing::write_text(dir / "config.json", tree.dump());
  std::ostringstream out, err;
  CHECK(cmd_run(dir / "config.json", {}, out, err) == kExitConfig);
  CHECK(err.str().find("dataset.ratings") != std::string::npos);
  CHECK(cmd_run(dir / "absent.json", {}, out, err) == kExitConfig);
}

TEST_CASE("calibrate") {
  std::ostringstream out, err;
  CHECK(cmd_calibrate(2.0, {10.0}, out, err) == kExitOk);
  CHECK(out.str().find("11.84798") != std::string::npos);
  CHECK(cmd_calibrate(2.0, {0.1}, out, err) == kExitConfig);
  CHECK(cmd_calibrate(0.0, {5.0}, out, err) == kExitConfig);
}

TEST_CASE("sha256 digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fixture run writes a full report and reruns bytewise identically") {
  const auto cfg = small_config("fixture_smoke");
  const auto out_dir = cfg.parent_path() / "out";
  std::ostringstream log, err;
  REQUIRE(cmd_run(cfg, {}, log, err) == kExitOk);
  const auto report = testing::read_text(out_dir / "report.tsv");
  std::size_t lines = 0;
  for (char ch : report) lines += ch == '\n';
  CHECK(lines == 1 + 6 * 3);
  const auto parsed = json::parse(testing::read_text(out_dir / "report.json"));
  CHECK(parsed["experiments"].size() == 3);

  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(out_dir)) first[e.path().filename().string()] = testing::read_text(e.path());
  CHECK(first.count("manifest.tsv"));
  CHECK(first.count("traces.tsv"));

  std::ostringstream log2;
  REQUIRE(cmd_run(cfg, {}, log2, err) == kExitOk);
  for (const auto& [name, body] : first) CHECK_MESSAGE(testing::read_text(out_dir / name) == body, name);

  // manifest hashes match the files on disk
  std::istringstream manifest(first["manifest.tsv"]);
  std::string line;
  std::getline(manifest, line);
  while (std::getline(manifest, line)) {
    std::istringstream row(line);
    std::string file, bytes, hash;
    row >> file >> bytes >> hash;
    CHECK(sha256_hex(first[file]) == hash);
  }

  RunOverrides o;
  o.seed = 99;
  o.out = cfg.parent_path() / "other";
  REQUIRE(cmd_run(cfg, o, log2, err) == kExitOk);
  CHECK(testing::read_text(cfg.parent_path() / "other" / "report.tsv") != report);
}

TEST_CASE("ingest check") {
  std::ostringstream out, err;
  CHECK(cmd_ingest_check(small_config("ingest"), out, err) == kExitOk);
  CHECK_FALSE(out.str().empty());
}

TEST_CASE("synth writes a loadable dataset") {
  const auto dir = testing::scratch_dir("synth");
  SynthOptions o;
  o.out_dir = dir;
  o.users = 20;
  o.items = 30;
  std::ostringstream out, err;
  REQUIRE(cmd_synth(o, out, err) == kExitOk);
  CHECK(fs::exists(dir / "ratings.tsv"));
  CHECK(fs::exists(dir / "relevance.tsv"));
  o.kind = "nope";
  CHECK(cmd_synth(o, out, err) == kExitConfig);
}
