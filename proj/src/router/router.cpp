#include "slroute/router.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace slroute::route {

namespace {

using Words = std::vector<std::string>;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'';
}

Words words_of(std::string_view text) {
  Words out;
  std::string cur;
  for (char c : text) {
    if (is_word_char(c)) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<Words> sentences_of(std::string_view text) {
  std::vector<Words> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == '!' || text[i] == '?' ||
        text[i] == ';' || text[i] == '\n') {
      Words w = words_of(text.substr(start, i - start));
      if (!w.empty()) out.push_back(std::move(w));
      start = i + 1;
    }
  }
  return out;
}

// Pattern segments separated by `...` gaps.
std::vector<Words> segments_of(std::string_view pattern) {
  std::vector<Words> segs(1);
  std::istringstream in{std::string(pattern)};
  std::string tok;
  while (in >> tok) {
    if (tok == "...") {
      segs.emplace_back();
      continue;
    }
    for (auto& w : words_of(tok)) segs.back().push_back(std::move(w));
  }
  std::erase_if(segs, [](const Words& w) { return w.empty(); });
  return segs;
}

// First index >= from where `seg` occurs in `words`, or npos.
std::size_t find_seg(const Words& words, const Words& seg, std::size_t from) {
  if (seg.size() > words.size()) return std::string::npos;
  for (std::size_t i = from; i + seg.size() <= words.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < seg.size() && hit; ++k) hit = words[i + k] == seg[k];
    if (hit) return i;
  }
  return std::string::npos;
}

int count_in_sentence(const Words& words, const std::vector<Words>& segs) {
  if (segs.empty()) return 0;
  if (segs.size() == 1) {
    int n = 0;
    for (std::size_t at = find_seg(words, segs[0], 0); at != std::string::npos;
         at = find_seg(words, segs[0], at + 1))
      ++n;
    return n;
  }
  int n = 0;
  std::size_t pos = 0;
  while (true) {
    for (const auto& seg : segs) {
      const std::size_t at = find_seg(words, seg, pos);
      if (at == std::string::npos) return n;
      pos = at + seg.size();
    }
    ++n;
  }
}

int count_family(const std::vector<Words>& sentences, const std::vector<std::string>& patterns) {
  int n = 0;
  for (const auto& p : patterns) {
    const auto segs = segments_of(p);
    for (const auto& s : sentences) n += count_in_sentence(s, segs);
  }
  return n;
}

std::string format_score(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

RouterConfig RouterConfig::defaults() {
  RouterConfig c;
  c.quantifier_patterns = {"all", "every", "each", "some", "no", "none", "any", "for all",
                           "there exists"};
  c.conditional_patterns = {"if ... then"};
  c.ordering_patterns = {"left of",       "right of",       "leftmost",        "rightmost",
                         "between",       "newer than",     "older than",      "finished above",
                         "finished below", "is above",      "is below",        "cheaper than",
                         "more expensive than", "from the left", "from the right", "first",
                         "last"};
  c.syllogism_patterns = {"is a", "is an", "is not a", "is not an", "are not"};
  return c;
}

RouterConfig RouterConfig::from(const KeyValues& kv) {
  RouterConfig c = defaults();
  if (auto v = kv.get_list("router.patterns.quantifier")) c.quantifier_patterns = *v;
  if (auto v = kv.get_list("router.patterns.conditional")) c.conditional_patterns = *v;
  if (auto v = kv.get_list("router.patterns.ordering")) c.ordering_patterns = *v;
  if (auto v = kv.get_list("router.patterns.syllogism")) c.syllogism_patterns = *v;
  auto weight = [&](const char* key, double& slot) {
    if (auto w = kv.get_number(key)) {
      if (*w < 0) throw ConfigError(std::string(key) + ": weight must be >= 0");
      slot = *w;
    }
  };
  weight("router.weight.quantifier", c.quantifier_weight);
  weight("router.weight.conditional", c.conditional_weight);
  weight("router.weight.ordering", c.ordering_weight);
  weight("router.weight.syllogism", c.syllogism_weight);
  return c;
}

int count_pattern(std::string_view text, std::string_view pattern) {
  return count_family(sentences_of(text), {std::string(pattern)});
}

FeatureVector extract_features(const Problem& p, const RouterConfig& cfg) {
  std::string text;
  for (const auto& s : p.context) text += s + "\n";
  text += p.question;
  const auto sentences = sentences_of(text);
  FeatureVector fv;
  fv.quantifier = count_family(sentences, cfg.quantifier_patterns);
  fv.conditional = count_family(sentences, cfg.conditional_patterns);
  fv.ordering = count_family(sentences, cfg.ordering_patterns);
  fv.syllogism = count_family(sentences, cfg.syllogism_patterns);
  fv.option_arity = static_cast<int>(p.options.size());
  return fv;
}

RouteDecision heuristic_select(const FeatureVector& fv, const RouterConfig& cfg) {
  RouteDecision d;
  d.strategy = "heuristic";
  d.feature_scores[SlKind::FOL] =
      cfg.quantifier_weight * fv.quantifier + cfg.syllogism_weight * fv.syllogism;
  d.feature_scores[SlKind::LP] = cfg.conditional_weight * fv.conditional;
  d.feature_scores[SlKind::SAT] = cfg.ordering_weight * fv.ordering;
  // Priority order doubles as the tie-break.
  constexpr std::array<SlKind, 3> priority{SlKind::LP, SlKind::FOL, SlKind::SAT};
  d.chosen = priority[0];
  for (SlKind k : priority)
    if (d.feature_scores[k] > d.feature_scores[d.chosen]) d.chosen = k;
  d.rationale = "heuristic scores FOL=" + format_score(d.feature_scores[SlKind::FOL]) +
                " LP=" + format_score(d.feature_scores[SlKind::LP]) +
                " SAT=" + format_score(d.feature_scores[SlKind::SAT]);
  return d;
}

std::optional<SlKind> parse_llm_choice(std::string_view response) {
  static constexpr std::array<std::string_view, 5> kMarkers{"answer", "final", "therefore",
                                                            "selected", "choice"};
  auto choice_in = [](const Words& words, std::size_t from) -> std::optional<SlKind> {
    for (std::size_t i = from; i < words.size(); ++i) {
      if (words[i] == "fol") return SlKind::FOL;
      if (words[i] == "lp") return SlKind::LP;
      if (words[i] == "sat") return SlKind::SAT;
    }
    return std::nullopt;
  };

  std::vector<Words> lines;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) lines.push_back(words_of(line));

  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const Words& words = *it;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const bool marker = std::find(kMarkers.begin(), kMarkers.end(), words[i]) != kMarkers.end();
      if (!marker) continue;
      if (auto k = choice_in(words, i + 1)) return k;
    }
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it)
    if (!it->empty()) return choice_in(*it, 0);
  return std::nullopt;
}

std::uint64_t route_hash(std::string_view id, std::uint64_t seed) {
  const std::string key = std::to_string(seed) + ":" + std::string(id);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

RouteDecision random_select(std::string_view id, std::uint64_t seed) {
  RouteDecision d;
  d.strategy = "random";
  d.chosen = kAllSlKinds[route_hash(id, seed) % 3];
  d.rationale = "random seed=" + std::to_string(seed);
  return d;
}

RouteDecision adaptive_select(const Problem& p, const std::optional<std::string>& response,
                              const std::string& failure_note, const RouterConfig& cfg) {
  if (response) {
    if (auto k = parse_llm_choice(*response)) {
      RouteDecision d;
      d.strategy = "adaptive";
      d.chosen = *k;
      d.rationale = "llm chose " + std::string(to_string(*k));
      return d;
    }
  }
  RouteDecision d = heuristic_select(extract_features(p, cfg), cfg);
  d.strategy = "adaptive";
  d.degraded = true;
  const std::string why = response ? "unparseable llm choice" : failure_note;
  d.rationale = why + "; " + d.rationale;
  return d;
}

}  // namespace slroute::route
