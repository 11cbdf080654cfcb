#include "prompt_assets.hpp"
#include "slroute/gateway.hpp"

namespace slroute::gateway {

namespace {

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

std::map<std::string, std::string> problem_fields(const Problem& p) {
  std::string context;
  for (const auto& s : p.context) {
    if (!context.empty()) context += ' ';
    context += s;
  }
  return {{"context", context}, {"question", p.question}, {"options", render_options(p.options)}};
}

}  // namespace

std::string render_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += ' ';
    out += static_cast<char>('A' + i % 26);
    out += ") ";
    out += options[i];
  }
  return out;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string_view grammar_summary(SlKind k) {
  switch (k) {
    case SlKind::FOL: return rstrip(prompts::assets::kGrammarFol);
    case SlKind::LP: return rstrip(prompts::assets::kGrammarLp);
    case SlKind::SAT: return rstrip(prompts::assets::kGrammarSat);
  }
  return {};
}

std::string build_selection_prompt(const Problem& p) {
  return substitute(prompts::assets::kSelection, problem_fields(p));
}

std::string build_translation_prompt(const Problem& p, SlKind k) {
  std::string_view tmpl;
  switch (k) {
    case SlKind::FOL: tmpl = prompts::assets::kTranslateFol; break;
    case SlKind::LP: tmpl = prompts::assets::kTranslateLp; break;
    case SlKind::SAT: tmpl = prompts::assets::kTranslateSat; break;
  }
  // Grammar first so that problem text is never rescanned for placeholders.
  const std::string with_grammar = substitute(tmpl, {{"grammar", std::string(grammar_summary(k))}});
  return substitute(with_grammar, problem_fields(p));
}

}  // namespace slroute::gateway
