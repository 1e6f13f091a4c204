#ifndef DLWSD_CORPUS_HPP
#define DLWSD_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace dlwsd {

enum class Morphology { Plain, Agglutinative };

inline constexpr std::string_view to_string(Morphology m) {
  return m == Morphology::Plain ? "PLAIN" : "AGGLUTINATIVE";
}

inline std::optional<Morphology> parse_morphology(std::string_view s) {
  if (s == "PLAIN") return Morphology::Plain;
  if (s == "AGGLUTINATIVE") return Morphology::Agglutinative;
  return std::nullopt;
}

enum class Pos { Noun, Verb, Adj, Adv, Det, Pron, Adp, Conj, Num, Part, Punct, Other };

inline constexpr std::array<std::string_view, 12> kPosNames = {
    "NOUN", "VERB", "ADJ", "ADV", "DET", "PRON", "ADP", "CONJ", "NUM", "PART", "PUNCT", "OTHER"};

inline constexpr std::string_view to_string(Pos p) { return kPosNames[static_cast<std::size_t>(p)]; }

inline std::optional<Pos> parse_pos(std::string_view s) {
  for (std::size_t i = 0; i < kPosNames.size(); ++i)
    if (kPosNames[i] == s) return static_cast<Pos>(i);
  return std::nullopt;
}

enum class Number { Sing, Plur };

inline constexpr std::string_view to_string(Number n) { return n == Number::Sing ? "SING" : "PLUR"; }

inline std::optional<Number> parse_number(std::string_view s) {
  if (s == "SING") return Number::Sing;
  if (s == "PLUR") return Number::Plur;
  return std::nullopt;
}

/// Reserved payload tokens. Never valid as corpus lemmas.
inline constexpr std::string_view kBoundaryToken = "⟨B⟩";
inline constexpr std::string_view kEllipsisHead = "⟨ELLIP⟩";

/// One analyzed token. The optional fields carry agglutinative morphology and
/// are only legal in AGGLUTINATIVE corpora.
struct MorphToken {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::Other;
  std::optional<std::string> case_tag;
  std::optional<Number> number;
  std::optional<bool> det;
  std::optional<bool> ellipsis;

  bool has_agglutinative_fields() const {
    return case_tag || number || det || ellipsis;
  }

  friend bool operator==(const MorphToken&, const MorphToken&) = default;
};

/// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return begin <= i && i < end; }

  friend bool operator==(const Span&, const Span&) = default;
};

struct Instance {
  std::string id;
  std::string target_word;
  std::vector<MorphToken> tokens;
  std::size_t target_index = 0;
  std::vector<Span> sentence_spans;
  std::size_t target_sentence = 0;
  std::vector<std::string> gold_senses;

  const MorphToken& target() const { return tokens.at(target_index); }

  bool has_gold(std::string_view sense) const {
    return std::find(gold_senses.begin(), gold_senses.end(), sense) != gold_senses.end();
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

namespace detail {

inline bool has_control_space(std::string_view s) {
  return s.find_first_of("\t\n\r\v\f") != std::string_view::npos;
}

inline bool has_any_space(std::string_view s) {
  return s.find_first_of(" \t\n\r\v\f") != std::string_view::npos;
}

} // namespace detail

/// Labels (sense ids, target words, instance ids) are written into
/// whitespace-delimited files, so they must be non-empty and space-free.
inline void validate_label(std::string_view what, std::string_view s) {
  if (s.empty()) throw Error(std::string(what) + " is empty");
  if (detail::has_any_space(s)) throw Error(std::string(what) + " '" + std::string(s) + "' contains whitespace");
}

inline void validate_sense(std::string_view s) {
  validate_label("sense label", s);
  if (s == "-") throw Error("sense label '-' is reserved for abstentions");
}

inline void validate_token(const MorphToken& t, Morphology morphology) {
  auto text_field = [](std::string_view name, std::string_view v) {
    if (v.empty()) throw Error("token " + std::string(name) + " is empty");
    if (detail::has_control_space(v) || v.find('|') != std::string_view::npos)
      throw Error("token " + std::string(name) + " '" + std::string(v) + "' contains a tab, newline or '|'");
    if (v == kBoundaryToken || v == kEllipsisHead)
      throw Error("token " + std::string(name) + " uses reserved symbol '" + std::string(v) + "'");
  };
  text_field("surface", t.surface);
  text_field("lemma", t.lemma);
  if (t.has_agglutinative_fields() && morphology != Morphology::Agglutinative)
    throw Error("token '" + t.surface + "' carries agglutinative fields in a PLAIN corpus");
  if (t.case_tag) {
    text_field("case", *t.case_tag);
    if (detail::has_any_space(*t.case_tag)) throw Error("token case '" + *t.case_tag + "' contains whitespace");
  }
}

/// Throws Error describing the first violated invariant.
inline void validate_instance(const Instance& in, Morphology morphology) {
  auto fail = [&](const std::string& msg) { throw Error("instance '" + in.id + "': " + msg); };
  try {
    validate_label("instance id", in.id);
    validate_label("target word", in.target_word);
    for (const auto& g : in.gold_senses) validate_sense(g);
    for (const auto& t : in.tokens) validate_token(t, morphology);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (in.target_index >= in.tokens.size())
    fail("target_index " + std::to_string(in.target_index) + " out of range for " +
         std::to_string(in.tokens.size()) + " tokens");
  std::size_t expect = 0;
  for (const auto& s : in.sentence_spans) {
    if (s.begin != expect || s.end <= s.begin) fail("sentence spans do not partition the tokens");
    expect = s.end;
  }
  if (expect != in.tokens.size()) fail("sentence spans do not cover all tokens");
  if (in.target_sentence >= in.sentence_spans.size()) fail("target_sentence out of range");
  if (!in.sentence_spans[in.target_sentence].contains(in.target_index))
    fail("target_index is outside target_sentence");
}

using SenseInventory = std::map<std::string, std::set<std::string>>;

struct Corpus {
  Morphology morphology = Morphology::Plain;
  std::vector<Instance> instances;
  SenseInventory sense_inventory;

  /// Validates every instance, rejects duplicate ids and builds the inventory.
  static Corpus make(Morphology morphology, std::vector<Instance> instances) {
    Corpus c{morphology, std::move(instances), {}};
    std::set<std::string_view> ids;
    for (const auto& in : c.instances) {
      validate_instance(in, morphology);
      if (!ids.insert(in.id).second) throw Error("duplicate instance id '" + in.id + "'");
    }
    c.rebuild_inventory();
    return c;
  }

  void rebuild_inventory() {
    sense_inventory.clear();
    for (const auto& in : instances) {
      auto& senses = sense_inventory[in.target_word];
      senses.insert(in.gold_senses.begin(), in.gold_senses.end());
    }
  }

  /// Target words in first-seen order.
  std::vector<std::string> target_words() const {
    std::vector<std::string> out;
    std::set<std::string_view> seen;
    for (const auto& in : instances)
      if (seen.insert(in.target_word).second) out.push_back(in.target_word);
    return out;
  }

  std::vector<const Instance*> instances_of(std::string_view target_word) const {
    std::vector<const Instance*> out;
    for (const auto& in : instances)
      if (in.target_word == target_word) out.push_back(&in);
    return out;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// ---------------------------------------------------------------------------
// Sense inventory remapping

struct SenseMap {
  std::map<std::string, std::string> entries;

  /// Every label that appears as a map value.
  std::set<std::string> image() const {
    std::set<std::string> out;
    for (const auto& [k, v] : entries) out.insert(v);
    return out;
  }
};

struct MapReport {
  std::size_t mapped_labels = 0;     // labels rewritten through an entry
  std::size_t kept_labels = 0;       // labels already in the target inventory
  std::size_t dropped_labels = 0;    // labels with no entry
  std::size_t collapsed_labels = 0;  // duplicates removed after many-to-one mapping
  std::size_t dropped_instances = 0;

  friend bool operator==(const MapReport&, const MapReport&) = default;
};

/// Rewrites gold senses through `map`. A label that is a key is replaced by its
/// image; a label that is already an image value (and not a key) passes through;
/// anything else is dropped. Instances left without gold senses are dropped.
/// Instances that had no gold senses to begin with are kept.
inline std::pair<Corpus, MapReport> apply_sense_map(const Corpus& corpus, const SenseMap& map) {
  const auto image = map.image();
  MapReport report;
  Corpus out{corpus.morphology, {}, {}};
  out.instances.reserve(corpus.instances.size());
  for (const auto& in : corpus.instances) {
    Instance mapped = in;
    mapped.gold_senses.clear();
    for (const auto& g : in.gold_senses) {
      std::string label;
      if (auto it = map.entries.find(g); it != map.entries.end()) {
        ++report.mapped_labels;
        label = it->second;
      } else if (image.contains(g)) {
        ++report.kept_labels;
        label = g;
      } else {
        ++report.dropped_labels;
        continue;
      }
      if (mapped.has_gold(label))
        ++report.collapsed_labels;
      else
        mapped.gold_senses.push_back(std::move(label));
    }
    if (!in.gold_senses.empty() && mapped.gold_senses.empty()) {
      ++report.dropped_instances;
      continue;
    }
    out.instances.push_back(std::move(mapped));
  }
  out.rebuild_inventory();
  return {std::move(out), report};
}

// ---------------------------------------------------------------------------
// Excluded sense tags

struct FilterReport {
  std::size_t removed_labels = 0;
  std::size_t removed_instances = 0;
  std::set<std::string> emptied_words;  // target words that lost every instance
};

/// Removes `excluded` labels from every gold list. Instances whose gold list
/// becomes empty are removed; tokens are never touched.
inline Corpus filter_excluded_senses(const Corpus& corpus, const std::set<std::string>& excluded,
                                     FilterReport* report = nullptr) {
  FilterReport local;
  Corpus out{corpus.morphology, {}, {}};
  std::map<std::string, std::size_t> kept_per_word;
  for (const auto& in : corpus.instances) {
    kept_per_word.try_emplace(in.target_word, 0);
    Instance copy = in;
    const auto before = copy.gold_senses.size();
    std::erase_if(copy.gold_senses, [&](const std::string& g) { return excluded.contains(g); });
    local.removed_labels += before - copy.gold_senses.size();
    if (before > 0 && copy.gold_senses.empty()) {
      ++local.removed_instances;
      continue;
    }
    ++kept_per_word[in.target_word];
    out.instances.push_back(std::move(copy));
  }
  for (const auto& [w, n] : kept_per_word)
    if (n == 0) local.emptied_words.insert(w);
  out.rebuild_inventory();
  if (report) *report = std::move(local);
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldAssignment {
  int k = 0;
  std::map<std::string, int> fold_of;

  /// Instance ids per fold, each list in ascending id order.
  std::vector<std::vector<std::string>> folds() const {
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(k));
    for (const auto& [id, f] : fold_of) out[static_cast<std::size_t>(f)].push_back(id);
    return out;
  }

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

namespace detail {

/// Uniform integer in [0, n). Built on raw mt19937_64 output so the sequence is
/// identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

} // namespace detail

/// Sorts the word's instance ids, applies a seeded permutation and deals the
/// result round-robin into `k` folds.
inline FoldAssignment split_folds(const Corpus& corpus, std::string_view target_word, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw Error("split_folds: k must be >= 2, got " + std::to_string(k));
  std::vector<std::string> ids;
  for (const auto* in : corpus.instances_of(target_word)) ids.push_back(in->id);
  if (ids.size() < static_cast<std::size_t>(k))
    throw Error("split_folds: target word '" + std::string(target_word) + "' has " +
                std::to_string(ids.size()) + " instances, fewer than " + std::to_string(k) + " folds");
  std::sort(ids.begin(), ids.end());
  detail::seeded_shuffle(ids, seed);
  FoldAssignment fa{k, {}};
  for (std::size_t i = 0; i < ids.size(); ++i) fa.fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return fa;
}

} // namespace dlwsd

#endif
