#ifndef DLWSD_CONFIG_HPP
#define DLWSD_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "dlist.hpp"
#include "error.hpp"
#include "features.hpp"
#include "selection.hpp"

namespace dlwsd {

inline constexpr int kConfigVersion = 1;

/// Template set used for extraction. AUTO follows the corpus morphology.
enum class TemplateChoice { Auto, English, Agglutinative };

struct RunConfig {
  std::optional<Morphology> morphology;  // when set, corpora must declare it
  TemplateChoice templates = TemplateChoice::Auto;
  TemplateConfig template_config;
  SmoothingSpace log_space = SmoothingSpace::Probability;
  bool prune_nonpositive = true;
  Backoff backoff = Backoff::Abstain;
  double threshold = 0.85;
  int folds = 10;
  std::uint64_t seed = 0;
  std::int64_t min_fires = 2;
  Attribution attribution = Attribution::FiringOnly;
  std::vector<std::string> excluded_senses = {"P", "U"};
  int jobs = 1;

  void validate() const {
    template_config.validate();
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("config: selection.threshold must lie in [0, 1]");
    if (folds < 2) throw Error("config: selection.k must be >= 2");
    if (min_fires < 1) throw Error("config: selection.min_fires must be >= 1");
    if (jobs < 1) throw Error("config: jobs must be >= 1");
  }

  TrainConfig train_config() const { return {log_space, prune_nonpositive}; }

  SelectionOptions selection_options() const {
    return {threshold, folds, seed, min_fires, attribution, train_config()};
  }

  std::set<std::string> excluded() const { return {excluded_senses.begin(), excluded_senses.end()}; }

  FeatureExtractor extractor(Morphology corpus_morphology) const {
    TemplateSet set = corpus_morphology == Morphology::Agglutinative ? TemplateSet::Agglutinative : TemplateSet::English;
    if (templates == TemplateChoice::English) set = TemplateSet::English;
    if (templates == TemplateChoice::Agglutinative) set = TemplateSet::Agglutinative;
    return {set, template_config};
  }
};

namespace detail {

template <class T>
T parse_number_value(std::string_view key, std::string_view v) {
  T out{};
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error("config: invalid value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

inline bool parse_bool_value(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw Error("config: " + std::string(key) + " must be true or false");
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is{std::string(v)};
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

/// Applies one `key = value` setting. Unknown keys are rejected.
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  using namespace detail;
  if (key == "config_version") {
    if (parse_number_value<int>(key, value) != kConfigVersion) throw Error("config: unsupported config_version");
  } else if (key == "morphology") {
    if (value == "FROM_CORPUS") {
      c.morphology.reset();
      return;
    }
    c.morphology = parse_morphology(value);
    if (!c.morphology) throw Error("config: unknown morphology '" + std::string(value) + "'");
  } else if (key == "templates") {
    if (value == "AUTO") c.templates = TemplateChoice::Auto;
    else if (value == "ENGLISH") c.templates = TemplateChoice::English;
    else if (value == "AGGLUTINATIVE") c.templates = TemplateChoice::Agglutinative;
    else throw Error("config: unknown templates '" + std::string(value) + "'");
  } else if (key == "window_radius") {
    c.template_config.window_radius = parse_number_value<int>(key, value);
  } else if (key == "global_sentence_radius") {
    c.template_config.global_sentence_radius = parse_number_value<int>(key, value);
  } else if (key == "english_global_sentence_radius") {
    if (value == "ALL") c.template_config.english_global_sentence_radius.reset();
    else c.template_config.english_global_sentence_radius = parse_number_value<int>(key, value);
  } else if (key == "content_pos") {
    c.template_config.content_pos.clear();
    for (const auto& p : split_list(value)) {
      auto pos = parse_pos(p);
      if (!pos) throw Error("config: unknown POS tag '" + p + "'");
      c.template_config.content_pos.insert(*pos);
    }
  } else if (key == "log_space") {
    if (value == "PROB") c.log_space = SmoothingSpace::Probability;
    else if (value == "COUNT") c.log_space = SmoothingSpace::Count;
    else throw Error("config: log_space must be PROB or COUNT");
  } else if (key == "prune_nonpositive") {
    c.prune_nonpositive = parse_bool_value(key, value);
  } else if (key == "backoff") {
    if (value == "ABSTAIN") c.backoff = Backoff::Abstain;
    else if (value == "MFS") c.backoff = Backoff::Mfs;
    else throw Error("config: backoff must be ABSTAIN or MFS");
  } else if (key == "selection.threshold") {
    c.threshold = parse_number_value<double>(key, value);
  } else if (key == "selection.k") {
    c.folds = parse_number_value<int>(key, value);
  } else if (key == "selection.seed") {
    c.seed = parse_number_value<std::uint64_t>(key, value);
  } else if (key == "selection.min_fires") {
    c.min_fires = parse_number_value<std::int64_t>(key, value);
  } else if (key == "selection.attribution") {
    auto a = parse_attribution(value);
    if (!a) throw Error("config: selection.attribution must be FIRING_ONLY or ALL_MATCHING");
    c.attribution = *a;
  } else if (key == "excluded_senses") {
    c.excluded_senses = split_list(value);
  } else if (key == "jobs") {
    c.jobs = parse_number_value<int>(key, value);
  } else {
    throw Error("config: unknown key '" + std::string(key) + "'");
  }
}

/// Flat `key = value` file; `#` starts a comment line. `config_version` is required.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const auto key = detail::trim(std::string_view(text).substr(0, eq));
    const auto value = detail::trim(std::string_view(text).substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    versioned = versioned || key == "config_version";
  }
  if (!versioned) throw ParseError(0, "config: missing config_version");
  base.validate();
  return base;
}

/// Effective configuration as `key=value` lines, in a fixed order.
inline std::vector<std::string> describe_config(const RunConfig& c) {
  auto join = [](const auto& items, auto render) {
    std::string out;
    for (const auto& i : items) out += (out.empty() ? "" : ",") + std::string(render(i));
    return out;
  };
  const auto& t = c.template_config;
  std::string templates = c.templates == TemplateChoice::Auto      ? "AUTO"
                          : c.templates == TemplateChoice::English ? "ENGLISH"
                                                                   : "AGGLUTINATIVE";
  return {
      "config_version=" + std::to_string(kConfigVersion),
      "morphology=" + (c.morphology ? std::string(to_string(*c.morphology)) : std::string("FROM_CORPUS")),
      "templates=" + templates,
      "window_radius=" + std::to_string(t.window_radius),
      "global_sentence_radius=" + std::to_string(t.global_sentence_radius),
      "english_global_sentence_radius=" +
          (t.english_global_sentence_radius ? std::to_string(*t.english_global_sentence_radius) : std::string("ALL")),
      "content_pos=" + join(t.content_pos, [](Pos p) { return to_string(p); }),
      std::string("log_space=") + (c.log_space == SmoothingSpace::Probability ? "PROB" : "COUNT"),
      std::string("prune_nonpositive=") + (c.prune_nonpositive ? "true" : "false"),
      std::string("backoff=") + (c.backoff == Backoff::Abstain ? "ABSTAIN" : "MFS"),
      "selection.threshold=" + format_real(c.threshold),
      "selection.k=" + std::to_string(c.folds),
      "selection.seed=" + std::to_string(c.seed),
      "selection.min_fires=" + std::to_string(c.min_fires),
      "selection.attribution=" + std::string(to_string(c.attribution)),
      "excluded_senses=" + join(c.excluded_senses, [](const std::string& s) { return s; }),
  };
}

} // namespace dlwsd

#endif
