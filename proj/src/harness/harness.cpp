#include "slroute/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "slroute/csp_engine.hpp"
#include "slroute/parsers.hpp"

namespace slroute::harness {

using ojson = nlohmann::ordered_json;

namespace {

struct StrategyName {
  Strategy strategy;
  std::string_view key;
  std::string_view display;
};

constexpr StrategyName kStrategies[] = {
    {Strategy::FixedFol, "fixed-fol", "FOL"},
    {Strategy::FixedLp, "fixed-lp", "LP"},
    {Strategy::FixedSat, "fixed-sat", "SAT"},
    {Strategy::Random, "random", "Random selection"},
    {Strategy::Adaptive, "adaptive", "Adaptive selection"},
    {Strategy::AdaptiveHeuristic, "adaptive-heuristic", "Adaptive selection (heuristic)"},
};

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& n : kStrategies)
    if (n.strategy == s) return n.key;
  return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view text) {
  for (const auto& n : kStrategies)
    if (n.key == text) return n.strategy;
  return std::nullopt;
}

std::string_view display_name(Strategy s) {
  for (const auto& n : kStrategies)
    if (n.strategy == s) return n.display;
  return "?";
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

Problem problem_from(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  auto field = [&](const char* name) -> const nlohmann::json& {
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string("missing \"") + name + "\"");
    return *it;
  };
  auto strings = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_array()) throw std::invalid_argument(std::string("\"") + name + "\" must be an array");
    std::vector<std::string> out;
    for (const auto& s : v) {
      if (!s.is_string())
        throw std::invalid_argument(std::string("\"") + name + "\" must hold strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  };
  Problem p;
  const auto& id = field("id");
  if (!id.is_string() || id.get<std::string>().empty())
    throw std::invalid_argument("\"id\" must be a non-empty string");
  p.id = id.get<std::string>();
  p.context = strings("context");
  const auto& q = field("question");
  if (!q.is_string()) throw std::invalid_argument("\"question\" must be a string");
  p.question = q.get<std::string>();
  p.options = strings("options");
  if (p.options.empty()) throw std::invalid_argument("\"options\" must not be empty");
  const auto& a = field("answer_index");
  if (!a.is_number_integer()) throw std::invalid_argument("\"answer_index\" must be an integer");
  const auto gold = a.get<long long>();
  if (gold < 0 || gold >= static_cast<long long>(p.options.size()))
    throw std::invalid_argument("\"answer_index\" out of range");
  p.gold = static_cast<int>(gold);
  return p;
}

}  // namespace

Problem parse_problem(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("malformed JSON");
  return problem_from(j);
}

std::string problem_to_json(const Problem& p) {
  ojson j;
  j["id"] = p.id;
  j["context"] = p.context;
  j["question"] = p.question;
  j["options"] = p.options;
  j["answer_index"] = p.gold;
  return j.dump();
}

Dataset parse_dataset(std::string_view text) {
  Dataset ds;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Problem p = parse_problem(line);
      if (!seen.insert(p.id).second) throw std::invalid_argument("duplicate id \"" + p.id + "\"");
      ds.problems.push_back(std::move(p));
    } catch (const std::invalid_argument& e) {
      ds.errors.push_back({number, e.what()});
    }
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read dataset " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("error reading dataset " + path);
  return parse_dataset(buf.str());
}

std::vector<Problem> mix_datasets(
    const std::vector<std::pair<std::string, std::vector<Problem>>>& sources, std::size_t per_source) {
  std::vector<Problem> out;
  for (const auto& [name, problems] : sources) {
    const std::size_t take = std::min(per_source, problems.size());
    for (std::size_t i = 0; i < take; ++i) {
      Problem p = problems[i];
      p.id = name + "/" + p.id;
      out.push_back(std::move(p));
    }
  }
  return out;
}

double chance_of(const std::vector<Problem>& problems) {
  if (problems.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : problems) sum += 1.0 / static_cast<double>(p.options.size());
  return sum / static_cast<double>(problems.size());
}

// ---------------------------------------------------------------------------
// Solving

namespace {

std::string normalized(std::string_view s) {
  std::string t = to_lower(trim(s));
  while (!t.empty() && t.back() == '.') t.pop_back();
  return t;
}

std::optional<int> option_for(const Problem& p, TruthLabel label) {
  const std::string want = to_lower(to_string(label));
  for (std::size_t i = 0; i < p.options.size(); ++i)
    if (normalized(p.options[i]) == want) return static_cast<int>(i);
  return std::nullopt;
}

std::vector<std::string> split_documents(std::string_view text) {
  std::vector<std::string> docs(1);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line) == "---") {
      docs.emplace_back();
      continue;
    }
    docs.back() += line;
    docs.back() += '\n';
  }
  return docs;
}

Outcome fail(FailureKind kind, std::string detail) {
  Outcome o;
  o.failure = kind;
  o.detail = std::move(detail);
  return o;
}

std::string join_labels(const std::vector<TruthLabel>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ',';
    out += to_string(labels[i]);
  }
  return out;
}

// Three-valued verdict for one FOL or LP document, or a failure.
std::variant<TruthLabel, Outcome> decide_document(SlKind k, const std::string& doc,
                                                  const SolverLimits& limits) {
  if (k == SlKind::FOL) {
    auto parsed = parse::parse_fol(doc);
    if (const auto* d = parse::diagnostic(parsed)) return fail(FailureKind::Parse, d->message());
    const fol::Decision dec = fol::decide(*parse::ok(parsed), limits.fol);
    switch (dec.status) {
      case fol::DecideStatus::Ok: return dec.label;
      case fol::DecideStatus::InconsistentPremises:
        return fail(FailureKind::InconsistentPremises, dec.detail);
      case fol::DecideStatus::ResourceOut:
      case fol::DecideStatus::CnfError: return fail(FailureKind::ResourceOut, dec.detail);
    }
    return fail(FailureKind::ResourceOut, dec.detail);
  }
  auto parsed = parse::parse_lp(doc);
  if (const auto* d = parse::diagnostic(parsed)) return fail(FailureKind::Parse, d->message());
  const lp::Answer ans = lp::answer(*parse::ok(parsed), limits.lp);
  switch (ans.status) {
    case lp::Status::Ok: return ans.label;
    case lp::Status::Contradiction: return fail(FailureKind::Contradiction, ans.detail);
    case lp::Status::ResourceOut: return fail(FailureKind::ResourceOut, ans.detail);
  }
  return fail(FailureKind::ResourceOut, "unreachable");
}

Outcome from_label(const Problem& p, TruthLabel label) {
  Outcome o;
  o.verdict = std::string(to_string(label));
  const auto idx = option_for(p, label);
  if (!idx) {
    o.failure = FailureKind::NoOptionForVerdict;
    o.detail = "no option reads " + o.verdict;
    return o;
  }
  o.executed = true;
  o.predicted = *idx;
  return o;
}

Outcome from_labels(const std::vector<TruthLabel>& labels) {
  Outcome o;
  o.verdict = join_labels(labels);
  std::vector<int> entailed;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == TruthLabel::True) entailed.push_back(static_cast<int>(i));
  if (entailed.size() != 1) {
    o.failure = FailureKind::NoUniqueAnswer;
    o.detail = std::to_string(entailed.size()) + " options entailed";
    return o;
  }
  o.executed = true;
  o.predicted = entailed.front();
  return o;
}

Outcome solve_csp(const Problem& p, const std::string& text, bool verdict_style) {
  auto parsed = parse::parse_csp(text);
  if (const auto* d = parse::diagnostic(parsed)) return fail(FailureKind::Parse, d->message());
  const CspTask& task = *parse::ok(parsed);
  const std::size_t want = verdict_style ? 1 : p.options.size();
  if (task.option_statements.size() != want)
    return fail(FailureKind::OptionMismatch, "expected " + std::to_string(want) +
                                                 " option statements, got " +
                                                 std::to_string(task.option_statements.size()));
  if (verdict_style) {
    const csp::Classification c = csp::classify(task, task.option_statements.front());
    if (c.status == csp::Status::InconsistentModel)
      return fail(FailureKind::InconsistentModel, "constraints admit no arrangement");
    return from_label(p, c.label);
  }
  const csp::MultichoiceAnswer a = csp::answer_multichoice(task);
  if (a.status == csp::Status::InconsistentModel)
    return fail(FailureKind::InconsistentModel, "constraints admit no arrangement");
  return from_labels(a.labels);
}

}  // namespace

bool is_verdict_style(const Problem& p) {
  if (p.options.empty()) return false;
  for (const auto& o : p.options) {
    const std::string t = normalized(o);
    if (t != "true" && t != "false" && t != "unknown") return false;
  }
  return true;
}

std::string strip_fences(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).rfind("```", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

Outcome solve_translation(const Problem& p, SlKind k, std::string_view translation,
                          const SolverLimits& limits) {
  const std::string text = strip_fences(translation);
  const bool verdict_style = is_verdict_style(p);
  if (k == SlKind::SAT) return solve_csp(p, text, verdict_style);

  const std::vector<std::string> docs = split_documents(text);
  const std::size_t want = verdict_style ? 1 : p.options.size();
  if (docs.size() != want)
    return fail(FailureKind::OptionMismatch, "expected " + std::to_string(want) +
                                                 " documents, got " + std::to_string(docs.size()));
  std::vector<TruthLabel> labels;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto r = decide_document(k, docs[i], limits);
    if (auto* o = std::get_if<Outcome>(&r)) {
      if (docs.size() > 1) o->detail = "document " + std::to_string(i + 1) + ": " + o->detail;
      return *o;
    }
    labels.push_back(std::get<TruthLabel>(r));
  }
  return verdict_style ? from_label(p, labels.front()) : from_labels(labels);
}

std::optional<std::string> check_translation(const Problem& p, SlKind k,
                                             std::string_view translation) {
  const std::string text = strip_fences(translation);
  const bool verdict_style = is_verdict_style(p);
  const std::size_t want = verdict_style ? 1 : p.options.size();
  if (k == SlKind::SAT) {
    auto parsed = parse::parse_csp(text, static_cast<int>(want));
    if (const auto* d = parse::diagnostic(parsed)) return d->message();
    return std::nullopt;
  }
  const std::vector<std::string> docs = split_documents(text);
  if (docs.size() != want)
    return "expected " + std::to_string(want) + " documents, got " + std::to_string(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::optional<std::string> message;
    if (k == SlKind::FOL) {
      auto r = parse::parse_fol(docs[i]);
      if (const auto* d = parse::diagnostic(r)) message = d->message();
    } else {
      auto r = parse::parse_lp(docs[i]);
      if (const auto* d = parse::diagnostic(r)) message = d->message();
    }
    if (message) return (docs.size() > 1 ? "document " + std::to_string(i + 1) + ": " : "") + *message;
  }
  return std::nullopt;
}

RunRecord run_sample(const Problem& p, Strategy s, const Deps& deps) {
  RunRecord rec;
  rec.problem_id = p.id;
  rec.strategy = std::string(to_string(s));
  auto complete = [&](const std::string& prompt) -> gateway::CompletionResult {
    if (deps.client == nullptr)
      return gateway::GatewayError{gateway::ErrorKind::Transport, 0, "no client configured"};
    return deps.client->complete(prompt);
  };
  try {
    route::RouteDecision decision;
    switch (s) {
      case Strategy::FixedFol: decision.chosen = SlKind::FOL; break;
      case Strategy::FixedLp: decision.chosen = SlKind::LP; break;
      case Strategy::FixedSat: decision.chosen = SlKind::SAT; break;
      case Strategy::Random: decision = route::random_select(p.id, deps.seed); break;
      case Strategy::AdaptiveHeuristic:
        decision = route::heuristic_select(route::extract_features(p, deps.router), deps.router);
        break;
      case Strategy::Adaptive: {
        const auto reply = complete(gateway::build_selection_prompt(p));
        if (const auto* text = std::get_if<std::string>(&reply)) {
          decision = route::adaptive_select(p, *text, "", deps.router);
        } else {
          decision = route::adaptive_select(p, std::nullopt,
                                            std::get<gateway::GatewayError>(reply).describe(),
                                            deps.router);
        }
        break;
      }
    }
    if (decision.rationale.empty()) decision.rationale = "fixed";
    rec.chosen = decision.chosen;
    rec.route_rationale = decision.rationale;
    rec.route_degraded = decision.degraded;

    const auto reply = complete(gateway::build_translation_prompt(p, rec.chosen));
    if (const auto* err = std::get_if<gateway::GatewayError>(&reply)) {
      rec.failure = FailureKind::Gateway;
      rec.failure_detail = err->describe();
    } else {
      rec.translation = std::get<std::string>(reply);
      Outcome o = solve_translation(p, rec.chosen, rec.translation, deps.limits);
      rec.executed = o.executed;
      rec.predicted = o.predicted;
      rec.verdict = std::move(o.verdict);
      rec.failure = o.failure;
      rec.failure_detail = std::move(o.detail);
    }
  } catch (const std::exception& e) {
    rec.executed = false;
    rec.predicted.reset();
    rec.failure = FailureKind::ResourceOut;
    rec.failure_detail = std::string("internal: ") + e.what();
  }
  rec.correct = rec.executed && rec.predicted == p.gold;
  rec.fallback_applied = !rec.executed;
  return rec;
}

std::vector<RunRecord> run_all(const std::vector<Problem>& problems, Strategy s, const Deps& deps,
                               int jobs) {
  std::vector<RunRecord> out(problems.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < problems.size(); i = next++) out[i] = run_sample(problems[i], s, deps);
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(problems.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RunRecord& a, const RunRecord& b) { return a.problem_id < b.problem_id; });
  return out;
}

// ---------------------------------------------------------------------------
// Metrics and reports

Metrics compute_metrics(const std::vector<RunRecord>& records, double chance) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::size_t executed = 0;
  std::size_t correct = 0;
  for (const auto& r : records) {
    if (!r.executed) continue;
    ++executed;
    if (r.correct) ++correct;
  }
  Metrics m;
  m.n = records.size();
  m.chance = chance;
  const double n = static_cast<double>(m.n);
  m.exec_rate = static_cast<double>(executed) / n;
  m.exec_acc_undefined = executed == 0;
  m.exec_acc = executed ? static_cast<double>(correct) / static_cast<double>(executed) : 0.0;
  m.overall_acc = (static_cast<double>(correct) + chance * static_cast<double>(m.n - executed)) / n;
  return m;
}

namespace {

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out = "strategy,dataset,overall_acc,exec_rate,exec_acc,n\n";
  for (const auto& r : rows) {
    out += r.strategy + "," + r.dataset + "," + percent(r.metrics.overall_acc) + "," +
           percent(r.metrics.exec_rate) + "," + percent(r.metrics.exec_acc) + "," +
           std::to_string(r.metrics.n) + "\n";
  }
  return out;
}

std::string render_markdown(const std::vector<ReportRow>& rows) {
  std::vector<std::string> strategies;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, Metrics> cell;
  std::map<std::string, double> chance;
  for (const auto& r : rows) {
    push_unique(strategies, r.strategy);
    push_unique(datasets, r.dataset);
    cell[{r.strategy, r.dataset}] = r.metrics;
    chance.emplace(r.dataset, r.metrics.chance);
  }

  // Column values as formatted percentages; bold ties at the maximum.
  const std::size_t cols = datasets.size() * 3;
  std::vector<std::vector<std::string>> table(strategies.size(), std::vector<std::string>(cols, "/"));
  std::vector<double> best(cols, -1.0);
  for (std::size_t si = 0; si < strategies.size(); ++si) {
    for (std::size_t di = 0; di < datasets.size(); ++di) {
      auto it = cell.find({strategies[si], datasets[di]});
      if (it == cell.end()) continue;
      const double v[3] = {it->second.overall_acc, it->second.exec_rate, it->second.exec_acc};
      for (int k = 0; k < 3; ++k) {
        table[si][di * 3 + k] = percent(v[k]);
        best[di * 3 + k] = std::max(best[di * 3 + k], std::stod(percent(v[k])));
      }
    }
  }

  std::ostringstream out;
  out << "| Strategy |";
  for (const auto& d : datasets) out << ' ' << d << " Overall-Acc | " << d << " Exec-Rate | " << d << " Exec-Acc |";
  out << "\n|---|";
  for (std::size_t c = 0; c < cols; ++c) out << "---:|";
  out << "\n| Chance |";
  for (const auto& d : datasets) out << ' ' << percent(chance[d]) << "% | / | / |";
  out << '\n';
  for (std::size_t si = 0; si < strategies.size(); ++si) {
    const auto parsed = strategy_from_string(strategies[si]);
    out << "| " << (parsed ? std::string(display_name(*parsed)) : strategies[si]) << " |";
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string& v = table[si][c];
      if (v == "/") out << " / |";
      else if (std::stod(v) == best[c]) out << " **" << v << "%** |";
      else out << ' ' << v << "% |";
    }
    out << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no strategies evaluated");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << (format == ReportFormat::Csv ? render_csv(rows) : render_markdown(rows));
  out.flush();
  if (!out) throw std::runtime_error("error writing report " + path);
}

std::string run_record_to_json(const RunRecord& r) {
  ojson j;
  j["problem_id"] = r.problem_id;
  j["strategy"] = r.strategy;
  j["chosen"] = std::string(to_string(r.chosen));
  j["route_rationale"] = r.route_rationale;
  j["route_degraded"] = r.route_degraded;
  j["translation"] = r.translation;
  j["executed"] = r.executed;
  j["predicted"] = r.predicted ? ojson(*r.predicted) : ojson(nullptr);
  j["verdict"] = r.verdict;
  j["correct"] = r.correct;
  j["fallback_applied"] = r.fallback_applied;
  j["failure"] = std::string(to_string(r.failure));
  j["failure_detail"] = r.failure_detail;
  return j.dump();
}

}  // namespace slroute::harness
