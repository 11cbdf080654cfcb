#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <json.hpp>

#include "slroute/config.hpp"
#include "slroute/gateway.hpp"
#include "slroute/harness.hpp"
#include "slroute/router.hpp"

namespace slroute::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kFixtureTimestamp = "1970-01-01T00:00:00Z";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags as given; unset means "not on the command line".
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> strategy;
  std::optional<std::string> strategies;
  std::optional<std::string> seed;
  std::optional<std::string> replay;
  std::optional<std::string> record;
  std::optional<std::string> jobs;
  std::optional<std::string> output;
  std::optional<std::string> format;
};

// Effective settings after layering defaults, config, environment, flags.
struct Settings {
  std::map<std::string, std::string> values;
  KeyValues config;

  std::string get(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? std::string() : it->second;
  }
  bool has(const std::string& key) const { return values.count(key) && !values.at(key).empty(); }
};

const std::vector<std::string> kSettingKeys = {"strategy", "strategies", "seed", "replay",
                                               "record",   "jobs",       "output", "format"};

Settings resolve(const Flags& flags) {
  Settings s;
  s.values = {{"strategy", "adaptive"},
              {"strategies", "fixed-lp,fixed-fol,fixed-sat,random,adaptive"},
              {"seed", "0"},
              {"jobs", "1"},
              {"output", "."},
              {"format", "all"}};

  std::optional<std::string> config_path = flags.config;
  if (!config_path) {
    if (const char* env = std::getenv("SLROUTE_CONFIG"); env && *env) config_path = env;
  }
  if (config_path) {
    try {
      s.config = KeyValues::load(*config_path);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    for (const auto& key : kSettingKeys)
      if (auto v = s.config.get(key)) s.values[key] = *v;
  }
  for (const auto& key : kSettingKeys) {
    std::string env_name = "SLROUTE_";
    for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* env = std::getenv(env_name.c_str()); env && *env) s.values[key] = env;
  }
  const std::pair<const char*, const std::optional<std::string>*> given[] = {
      {"strategy", &flags.strategy}, {"strategies", &flags.strategies}, {"seed", &flags.seed},
      {"replay", &flags.replay},     {"record", &flags.record},         {"jobs", &flags.jobs},
      {"output", &flags.output},     {"format", &flags.format}};
  for (const auto& [key, value] : given)
    if (*value) s.values[key] = **value;
  return s;
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid seed: " + text);
  }
}

int parse_jobs(const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid job count: " + text);
  }
}

harness::Strategy parse_strategy(const std::string& name) {
  if (auto s = harness::strategy_from_string(name)) return *s;
  throw UsageError("unknown strategy: " + name);
}

std::vector<harness::Strategy> parse_strategies(const std::string& list) {
  std::vector<harness::Strategy> out;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_strategy(item));
  }
  if (out.empty()) throw UsageError("no strategies given");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Problem load_problem(const std::optional<std::string>& path, const std::optional<std::string>& inline_json) {
  if (path && inline_json) throw UsageError("give either a problem file or --inline, not both");
  if (!path && !inline_json) throw UsageError("missing problem file");
  const std::string text = inline_json ? *inline_json : read_file(*path);
  try {
    return harness::parse_problem(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid problem: ") + e.what());
  }
}

route::RouterConfig router_config(const Settings& s) {
  try {
    return route::RouterConfig::from(s.config);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

// Replay (never touches the network) or live, optionally recorded.
std::shared_ptr<gateway::LlmClient> make_client(const Settings& s) {
  std::shared_ptr<gateway::LlmClient> client;
  try {
    if (s.has("replay")) {
      client = std::make_shared<gateway::ReplayClient>(s.get("replay"));
    } else {
      client = std::make_shared<gateway::LiveClient>(gateway::GatewayConfig::from(s.config));
    }
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (s.has("record")) client = std::make_shared<gateway::RecordingClient>(client, s.get("record"));
  return client;
}

harness::Deps make_deps(const Settings& s, gateway::LlmClient* client) {
  harness::Deps deps;
  deps.client = client;
  deps.seed = parse_seed(s.get("seed"));
  deps.router = router_config(s);
  return deps;
}

std::string option_text(const Problem& p, int index) {
  return std::string(1, static_cast<char>('A' + index % 26)) + ") " +
         p.options[static_cast<std::size_t>(index)];
}

std::string scores_text(const route::RouteDecision& d) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : d.feature_scores) {
    out << (first ? "" : " ") << to_string(k) << '=' << v;
    first = false;
  }
  return out.str();
}

// -- commands ----------------------------------------------------------------

int cmd_solve(const Settings& s, const Problem& p, std::ostream& out) {
  const harness::Strategy strategy = parse_strategy(s.get("strategy"));
  harness::Deps deps = make_deps(s, nullptr);
  auto client = make_client(s);
  deps.client = client.get();
  const RunRecord rec = harness::run_sample(p, strategy, deps);

  out << "strategy: " << rec.strategy << '\n';
  out << "chosen: " << to_string(rec.chosen) << '\n';
  out << "rationale: " << rec.route_rationale << '\n';
  out << "translation:\n" << rec.translation;
  if (!rec.translation.empty() && rec.translation.back() != '\n') out << '\n';
  if (!rec.verdict.empty()) out << "verdict: " << rec.verdict << '\n';
  if (rec.executed) {
    out << "answer: " << option_text(p, *rec.predicted) << '\n';
  } else {
    out << "answer: none (" << to_string(rec.failure) << ": " << rec.failure_detail << ")\n";
  }
  out << "record: " << harness::run_record_to_json(rec) << '\n';
  return rec.executed ? kExitOk : kExitNotExecuted;
}

int cmd_route(const Settings& s, const Problem& p, bool heuristic, std::ostream& out,
              std::ostream& err) {
  const route::RouterConfig cfg = router_config(s);
  route::RouteDecision d;
  int code = kExitOk;
  const std::string name = heuristic ? "adaptive-heuristic" : s.get("strategy");
  switch (parse_strategy(name)) {
    case harness::Strategy::AdaptiveHeuristic:
      d = route::heuristic_select(route::extract_features(p, cfg), cfg);
      break;
    case harness::Strategy::Random:
      d = route::random_select(p.id, parse_seed(s.get("seed")));
      break;
    case harness::Strategy::Adaptive: {
      auto client = make_client(s);
      const auto reply = client->complete(gateway::build_selection_prompt(p));
      if (const auto* text = std::get_if<std::string>(&reply)) {
        d = route::adaptive_select(p, *text, "", cfg);
      } else {
        const auto& e = std::get<gateway::GatewayError>(reply);
        err << "gateway error: " << e.describe() << '\n';
        d = route::adaptive_select(p, std::nullopt, e.describe(), cfg);
        code = kExitNotExecuted;
      }
      break;
    }
    default:
      throw UsageError("route accepts --heuristic or --strategy adaptive|random|adaptive-heuristic");
  }
  out << "chosen: " << to_string(d.chosen) << '\n';
  out << "strategy: " << d.strategy << '\n';
  out << "rationale: " << d.rationale << '\n';
  if (!d.feature_scores.empty()) out << "scores: " << scores_text(d) << '\n';
  if (d.degraded) out << "degraded: yes\n";
  return code;
}

int cmd_translate(const Settings& s, const Problem& p, const std::string& sl, std::ostream& out,
                  std::ostream& err) {
  const auto kind = sl_kind_from_string(sl);
  if (!kind) throw UsageError("unknown symbolic language: " + sl);
  auto client = make_client(s);
  const auto reply = client->complete(gateway::build_translation_prompt(p, *kind));
  if (const auto* e = std::get_if<gateway::GatewayError>(&reply)) {
    err << "gateway error: " << e->describe() << '\n';
    return kExitNotExecuted;
  }
  const std::string& text = std::get<std::string>(reply);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (auto problem = harness::check_translation(p, *kind, text)) {
    out << "parse: error: " << *problem << '\n';
    return kExitNotExecuted;
  }
  out << "parse: ok\n";
  return kExitOk;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

int cmd_eval(const Settings& s, const std::vector<std::string>& datasets, std::ostream& out,
             std::ostream& err) {
  if (datasets.empty()) throw UsageError("missing dataset path");
  const auto strategies = parse_strategies(s.get("strategies"));
  const int jobs = parse_jobs(s.get("jobs"));
  const std::string format = s.get("format");
  if (format != "all" && format != "csv" && format != "md")
    throw UsageError("invalid format: " + format + " (csv, md)");

  std::vector<std::pair<std::string, std::vector<Problem>>> loaded;
  for (const auto& path : datasets) {
    harness::Dataset ds;
    try {
      ds = harness::load_dataset(path);
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
    for (const auto& e : ds.errors) err << path << ":" << e.line << ": " << e.message << '\n';
    if (!ds.errors.empty()) throw UsageError("dataset " + path + " has malformed lines");
    if (ds.problems.empty()) throw UsageError("dataset " + path + " is empty");
    loaded.emplace_back(fs::path(path).stem().string(), std::move(ds.problems));
  }

  harness::Deps deps = make_deps(s, nullptr);
  auto client = make_client(s);
  deps.client = client.get();

  std::vector<harness::ReportRow> rows;
  std::string run_log;
  for (auto st : strategies) {
    for (const auto& [name, problems] : loaded) {
      const auto records = harness::run_all(problems, st, deps, jobs);
      rows.push_back({std::string(harness::to_string(st)), name,
                      harness::compute_metrics(records, harness::chance_of(problems))});
      for (const auto& r : records) {
        const std::string json = harness::run_record_to_json(r);
        run_log += "{\"dataset\":" + nlohmann::json(name).dump() + "," + json.substr(1) + "\n";
      }
    }
  }

  const fs::path dir = s.get("output");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  if (format != "md") {
    harness::emit_report(rows, harness::ReportFormat::Csv, (dir / "report.csv").string());
    out << "wrote " << (dir / "report.csv").string() << '\n';
  }
  if (format != "csv") {
    harness::emit_report(rows, harness::ReportFormat::Markdown, (dir / "report.md").string());
    out << "wrote " << (dir / "report.md").string() << '\n';
  }
  write_text(dir / "runs.jsonl", run_log);
  out << "wrote " << (dir / "runs.jsonl").string() << '\n';
  out << harness::render_csv(rows);
  return kExitOk;
}

// Responses file: one JSON object per line with "id" and any of
// "selection", "fol", "lp", "sat".
int cmd_fixtures_build(const std::string& dataset, const std::string& responses,
                       const std::string& output, std::ostream& out) {
  harness::Dataset ds;
  try {
    ds = harness::load_dataset(dataset);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (!ds.errors.empty())
    throw UsageError(dataset + ":" + std::to_string(ds.errors.front().line) + ": " +
                     ds.errors.front().message);
  std::map<std::string, Problem> by_id;
  for (auto& p : ds.problems) by_id[p.id] = p;

  std::istringstream in(read_file(responses));
  std::string line;
  std::string text;
  int number = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    const std::string where = responses + ":" + std::to_string(number);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string())
      throw UsageError(where + ": expected an object with a string \"id\"");
    auto it = by_id.find(j["id"].get<std::string>());
    if (it == by_id.end()) throw UsageError(where + ": unknown problem id");
    const Problem& p = it->second;
    const std::pair<const char*, std::optional<SlKind>> kinds[] = {
        {"selection", std::nullopt}, {"fol", SlKind::FOL}, {"lp", SlKind::LP}, {"sat", SlKind::SAT}};
    for (const auto& [key, kind] : kinds) {
      if (!j.contains(key)) continue;
      if (!j[key].is_string()) throw UsageError(where + ": \"" + key + "\" must be a string");
      const std::string prompt =
          kind ? gateway::build_translation_prompt(p, *kind) : gateway::build_selection_prompt(p);
      gateway::Exchange e = gateway::Exchange::make(prompt, j[key].get<std::string>());
      e.timestamp = kFixtureTimestamp;
      text += e.to_json_line() + "\n";
      ++count;
    }
  }
  const fs::path target(output);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_text(target, text);
  out << "wrote " << count << " exchanges to " << output << '\n';
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Key-value config file");
  sub->add_option("--seed", f.seed, "Seed for random routing");
  sub->add_option("--replay", f.replay, "Replay store directory or file; no network use");
  sub->add_option("--record", f.record, "Directory to record live exchanges into");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive symbolic-language routing for logical QA"};
  app.name("slroute");
  app.require_subcommand(1);

  Flags flags;
  std::optional<std::string> problem_path;
  std::optional<std::string> inline_json;
  bool heuristic = false;
  std::string sl;
  std::vector<std::string> datasets;
  std::string fx_dataset, fx_responses, fx_output;

  auto* solve = app.add_subcommand("solve", "Route, translate and solve one problem");
  add_common(solve, flags);
  solve->add_option("--strategy", flags.strategy,
                    "fixed-fol|fixed-lp|fixed-sat|random|adaptive|adaptive-heuristic");
  solve->add_option("--inline", inline_json, "Problem JSON given inline");
  solve->add_option("problem", problem_path, "Problem JSON file");

  auto* route_cmd = app.add_subcommand("route", "Show the routing decision for one problem");
  add_common(route_cmd, flags);
  route_cmd->add_flag("--heuristic", heuristic, "Use the keyword heuristic");
  route_cmd->add_option("--strategy", flags.strategy, "adaptive|random|adaptive-heuristic");
  route_cmd->add_option("--inline", inline_json, "Problem JSON given inline");
  route_cmd->add_option("problem", problem_path, "Problem JSON file");

  auto* translate = app.add_subcommand("translate", "Print and validate one translation");
  add_common(translate, flags);
  translate->add_option("--sl", sl, "fol|lp|sat")->required();
  translate->add_option("--inline", inline_json, "Problem JSON given inline");
  translate->add_option("problem", problem_path, "Problem JSON file");

  auto* eval = app.add_subcommand("eval", "Evaluate strategies over datasets");
  add_common(eval, flags);
  eval->add_option("--strategies", flags.strategies, "Comma-separated strategy list");
  eval->add_option("--jobs", flags.jobs, "Worker count");
  eval->add_option("--output", flags.output, "Report directory");
  eval->add_option("--format", flags.format, "csv|md (default: both)");
  eval->add_option("datasets", datasets, "Dataset JSONL files");

  auto* fixtures = app.add_subcommand("fixtures", "Fixture maintenance");
  fixtures->require_subcommand(1);
  auto* build = fixtures->add_subcommand("build", "Build a replay store from raw responses");
  build->add_option("--dataset", fx_dataset, "Dataset JSONL")->required();
  build->add_option("--responses", fx_responses, "Responses JSONL")->required();
  build->add_option("--output", fx_output, "Replay JSONL to write")->required();

  std::vector<std::string> argv_store;
  argv_store.push_back("slroute");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_fixtures_build(fx_dataset, fx_responses, fx_output, out);
    const Settings settings = resolve(flags);
    if (solve->parsed()) return cmd_solve(settings, load_problem(problem_path, inline_json), out);
    if (route_cmd->parsed())
      return cmd_route(settings, load_problem(problem_path, inline_json), heuristic, out, err);
    if (translate->parsed())
      return cmd_translate(settings, load_problem(problem_path, inline_json), sl, out, err);
    if (eval->parsed()) return cmd_eval(settings, datasets, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace slroute::cli
