#include "explore/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "explore/error.hpp"

namespace explore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Errors = std::vector<std::string>;

// One object of the tree. Reads record the keys they touch so that leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json* node, std::string prefix, Errors& errors)
      : node_(node), prefix_(std::move(prefix)), errors_(errors) {
    if (node_ && !node_->is_object()) {
      fail("expected an object");
      node_ = nullptr;
    }
  }

  bool present() const { return node_ != nullptr; }
  std::string key(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }
  void fail(const std::string& msg) { errors_.push_back((prefix_.empty() ? "<root>" : prefix_) + ": " + msg); }
  void fail(const std::string& k, const std::string& msg) { errors_.push_back(key(k) + ": " + msg); }

  const json* find(const std::string& k) {
    seen_.insert(k);
    if (!node_) return nullptr;
    auto it = node_->find(k);
    return it == node_->end() ? nullptr : &*it;
  }

  Section child(const std::string& k, bool required = false) {
    const json* v = find(k);
    if (!v && required) fail(k, "missing");
    return Section(v, key(k), errors_);
  }

  bool read(const std::string& k, double& out, bool required = false) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_number()) return type_error(k, "a number");
    out = v->get<double>();
    return true;
  }
  bool read(const std::string& k, std::size_t& out, bool required = false) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_number_unsigned()) return type_error(k, "a non-negative integer");
    out = v->get<std::size_t>();
    return true;
  }
  bool read(const std::string& k, std::uint64_t& out, bool required, int) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_number_unsigned()) return type_error(k, "a non-negative integer");
    out = v->get<std::uint64_t>();
    return true;
  }
  bool read(const std::string& k, int& out, bool required = false) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_number_integer()) return type_error(k, "an integer");
    out = v->get<int>();
    return true;
  }
  bool read(const std::string& k, bool& out, bool required = false) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_boolean()) return type_error(k, "a boolean");
    out = v->get<bool>();
    return true;
  }
  bool read(const std::string& k, std::string& out, bool required = false) {
    const json* v = lookup(k, required);
    if (!v) return false;
    if (!v->is_string()) return type_error(k, "a string");
    out = v->get<std::string>();
    return true;
  }

  // A path that must exist; relative paths are taken from base.
  bool read_file(const std::string& k, const fs::path& base, fs::path& out, bool required) {
    std::string s;
    if (!read(k, s, required)) return false;
    fs::path p = fs::path(s).is_absolute() ? fs::path(s) : base / s;
    if (!fs::is_regular_file(p)) {
      fail(k, "file not found: " + p.string());
      return false;
    }
    out = p;
    return true;
  }

  void finish() {
    if (!node_) return;
    for (const auto& [k, v] : node_->items())
      if (!seen_.count(k)) fail(k, "unknown key");
  }

 private:
  const json* lookup(const std::string& k, bool required) {
    const json* v = find(k);
    if (!v && required) fail(k, "missing");
    return v;
  }
  bool type_error(const std::string& k, const char* what) {
    fail(k, std::string("expected ") + what);
    return false;
  }

  const json* node_;
  std::string prefix_;
  Errors& errors_;
  std::set<std::string> seen_;
};

const std::set<std::string> kStrategyNames = {"relevance", "mmr",       "dum",   "dpp",
                                              "explore_d", "explore_c", "random"};

void parse_dataset(Section s, const fs::path& base, RunConfig& c) {
  if (!s.present()) return;
  auto& sc = c.schema;
  s.read_file("ratings", base, c.ratings_path, true);
  s.read("delimiter", sc.delimiter);
  if (sc.delimiter.empty()) s.fail("delimiter", "must not be empty");
  s.read("user_col", sc.user_col);
  s.read("item_col", sc.item_col);
  s.read("rating_col", sc.rating_col);
  s.read("category_col", sc.category_col);
  if (sc.user_col < 0) s.fail("user_col", "must be >= 0");
  if (sc.item_col < 0) s.fail("item_col", "must be >= 0");
  if (sc.rating_col < 0) s.fail("rating_col", "must be >= 0");
  s.read("category_delimiter", sc.category_delimiter);
  fs::path items, cats;
  if (s.read_file("items", base, items, false)) sc.items_path = items;
  s.read("items_delimiter", sc.items_delimiter);
  s.read("items_item_col", sc.items_item_col);
  s.read("items_category_col", sc.items_category_col);
  s.read("items_define_catalog", sc.items_define_catalog);
  if (s.read_file("categories", base, cats, false)) sc.categories_path = cats;
  if (const json* v = s.find("scale")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      s.fail("scale", "expected [lo, hi]");
    else {
      sc.scale = {(*v)[0].get<double>(), (*v)[1].get<double>()};
      if (!(sc.scale.lo < sc.scale.hi)) s.fail("scale", "lo must be below hi");
    }
  }
  s.read("min_interactions", sc.min_interactions);
  s.read("allow_uncategorized", sc.allow_uncategorized);
  s.read("skip_header", sc.skip_header);
  s.finish();
}

void parse_strategies(const json* v, Errors& errors, RunConfig& c) {
  if (!v) {
    errors.push_back("strategies: missing");
    return;
  }
  if (!v->is_array() || v->empty()) {
    errors.push_back("strategies: expected a non-empty list");
    return;
  }
  std::set<std::string> labels;
  for (std::size_t n = 0; n < v->size(); ++n) {
    Section s(&(*v)[n], "strategies[" + std::to_string(n) + "]", errors);
    if (!s.present()) continue;
    StrategyEntry e;
    if (s.read("name", e.name, true) && !kStrategyNames.count(e.name)) s.fail("name", "unknown strategy '" + e.name + "'");
    e.label = e.name;
    s.read("label", e.label);
    if (!e.label.empty() && !labels.insert(e.label).second) s.fail("label", "duplicate label '" + e.label + "'");
    Section p = s.child("params");
    if (p.present()) {
      if (e.name == "mmr") {
        if (p.read("beta", e.beta) && !(e.beta >= 0.0 && e.beta <= 1.0)) p.fail("beta", "must lie in [0, 1]");
      } else if (e.name == "explore_d" || e.name == "explore_c") {
        if (p.read("alpha", e.alpha) && !(e.alpha > 0.0)) p.fail("alpha", "must be > 0");
        p.read("use_relevance", e.use_relevance);
      }
      p.finish();
    }
    s.finish();
    c.strategies.push_back(e);
  }
}

}  // namespace

RunConfig parse_run_config(const json& tree, const fs::path& base_dir) {
  Errors errors;
  RunConfig c;
  Section root(&tree, "", errors);
  if (!root.present()) throw ConfigError("config: expected an object at the top level");

  root.read("seed", c.seed, true, 0);
  parse_dataset(root.child("dataset", true), base_dir, c);
  std::string out;
  if (root.read("output_dir", out, true)) {
    if (out.empty()) root.fail("output_dir", "must not be empty");
    c.output_dir = fs::path(out).is_absolute() ? fs::path(out) : base_dir / out;
  }

  if (Section s = root.child("split"); s.present()) {
    if (s.read("train_ratio", c.train_ratio) && !(c.train_ratio > 0.0 && c.train_ratio < 1.0))
      s.fail("train_ratio", "must lie in (0, 1)");
    s.finish();
  }

  if (Section s = root.child("relevance"); s.present()) {
    std::string source = "mf";
    s.read("source", source);
    if (source == "mf") {
      c.relevance = RelevanceSource::Mf;
    } else if (source == "table") {
      c.relevance = RelevanceSource::Table;
      s.read_file("table", base_dir, c.score_table, true);
    } else {
      s.fail("source", "expected 'mf' or 'table'");
    }
    if (source != "table" && s.find("table")) s.fail("table", "only used with source 'table'");
    s.read("delimiter", c.score_delimiter);
    s.finish();
  }

  if (Section s = root.child("mf"); s.present()) {
    if (s.read("factors", c.mf.factors) && c.mf.factors == 0) s.fail("factors", "must be >= 1");
    if (s.read("epochs", c.mf.epochs) && c.mf.epochs == 0) s.fail("epochs", "must be >= 1");
    if (s.read("lr", c.mf.lr) && !(c.mf.lr > 0.0)) s.fail("lr", "must be > 0");
    if (s.read("reg", c.mf.reg) && !(c.mf.reg >= 0.0)) s.fail("reg", "must be >= 0");
    if (s.read("init_std", c.mf.init_std) && !(c.mf.init_std > 0.0)) s.fail("init_std", "must be > 0");
    c.mf_seed_set = s.read("seed", c.mf.seed, false, 0);
    s.finish();
  }

  if (Section s = root.child("distance"); s.present()) {
    if (s.read("basis", c.basis) && c.basis != "auto" && c.basis != "users" && c.basis != "categories")
      s.fail("basis", "expected auto, users or categories");
    s.read("hot_items", c.hot_items);
    if (s.read("sample_pairs", c.sample_pairs) && c.sample_pairs == 0) s.fail("sample_pairs", "must be >= 1");
    s.read("rating_weighted", c.rating_weighted);
    s.finish();
  }

  if (Section s = root.child("user_model"); s.present()) {
    if (s.read("gamma", c.gamma) && !(c.gamma > 0.0)) s.fail("gamma", "must be > 0");
    if (const json* v = s.find("expected_steps")) {
      c.expected_steps.clear();
      if (!v->is_array() || v->empty()) {
        s.fail("expected_steps", "expected a non-empty list of numbers");
      } else {
        for (const auto& e : *v) {
          if (!e.is_number() || !(e.get<double>() >= 0.5)) {
            s.fail("expected_steps", "every entry must be a number >= 0.5");
            break;
          }
          c.expected_steps.push_back(e.get<double>());
        }
      }
    }
    if (s.read("k", c.k) && c.k == 0) s.fail("k", "must be >= 1");
    s.read("sequential_consumption", c.sequential_consumption);
    s.finish();
  }

  parse_strategies(root.find("strategies"), errors, c);

  if (Section s = root.child("experiment"); s.present()) {
    if (s.read("trials", c.trials) && c.trials == 0) s.fail("trials", "must be >= 1");
    s.read("max_users", c.max_users);
    s.read("prune_top_n", c.prune_top_n);
    s.finish();
  }
  if (root.read("workers", c.workers) && c.workers < 0) root.fail("workers", "must be >= 0");
  root.finish();

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid config (" << errors.size() << " problem" << (errors.size() > 1 ? "s" : "") << "):";
    for (const auto& e : errors) msg << "\n  " << e;
    throw ConfigError(msg.str());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json tree;
  try {
    tree = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(tree, path.parent_path());
}

std::shared_ptr<const Strategy> make_strategy(const StrategyEntry& e) {
  if (e.name == "relevance") return std::make_shared<RelevanceStrategy>();
  if (e.name == "mmr") return std::make_shared<MmrStrategy>(e.beta);
  if (e.name == "dum") return std::make_shared<DumStrategy>();
  if (e.name == "dpp") return std::make_shared<DppStrategy>();
  if (e.name == "random") return std::make_shared<RandomStrategy>();
  if (e.name == "explore_d" || e.name == "explore_c") {
    ExploreOptions o;
    o.kind = e.name == "explore_d" ? DiversityKind::Distance : DiversityKind::Coverage;
    o.alpha = e.alpha;
    o.use_relevance = e.use_relevance;
    return std::make_shared<ExploreStrategy>(o);
  }
  throw ConfigError("unknown strategy '" + e.name + "'");
}

}  // namespace explore
