#ifndef DLWSD_FEATURES_HPP
#define DLWSD_FEATURES_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"

namespace dlwsd {

// Enumerators are declared in byte-wise order of their names so that the
// enum's ordering and the name ordering agree.
enum class FeatureKind {
  BigLem,
  BigLem0,
  BigLem1,
  BigLem2,
  BigPos,
  BigWf,
  BigWf0,
  BigWf1,
  GlobLem,
  TriLem,
  TriLem0,
  TriLem1,
  TriLem2,
  TriPos,
  TriWf,
  TriWf0,
  TriWf1,
  UniWf0,
  UniWf1,
  UniWf2,
  UniWf3,
  WinLem,
};

inline constexpr std::array<std::string_view, 22> kFeatureKindNames = {
    "big_lem",  "big_lem0", "big_lem1", "big_lem2", "big_pos", "big_wf",  "big_wf0", "big_wf1",
    "glob_lem", "tri_lem",  "tri_lem0", "tri_lem1", "tri_lem2", "tri_pos", "tri_wf",  "tri_wf0",
    "tri_wf1",  "uni_wf0",  "uni_wf1",  "uni_wf2",  "uni_wf3",  "win_lem"};

inline constexpr std::string_view to_string(FeatureKind k) {
  return kFeatureKindNames[static_cast<std::size_t>(k)];
}

inline std::optional<FeatureKind> parse_feature_kind(std::string_view s) {
  for (std::size_t i = 0; i < kFeatureKindNames.size(); ++i)
    if (kFeatureKindNames[i] == s) return static_cast<FeatureKind>(i);
  return std::nullopt;
}

/// Feature identity: template kind plus canonical payload. Ordering is by kind
/// name, then payload, both byte-wise.
struct FeatureKey {
  FeatureKind kind{};
  std::string payload;

  friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
  friend std::strong_ordering operator<=>(const FeatureKey&, const FeatureKey&) = default;
};

struct FeatureKeyHash {
  std::size_t operator()(const FeatureKey& f) const noexcept {
    return std::hash<std::string>{}(f.payload) * 31u + static_cast<std::size_t>(f.kind);
  }
};

/// `kind \t payload`. Payloads never contain tabs or newlines, so this is injective.
inline std::string encode_feature(const FeatureKey& f) {
  std::string out(to_string(f.kind));
  out += '\t';
  out += f.payload;
  return out;
}

inline FeatureKey decode_feature(std::string_view s) {
  const auto tab = s.find('\t');
  if (tab == std::string_view::npos) throw Error("feature '" + std::string(s) + "' has no tab separator");
  const auto kind = parse_feature_kind(s.substr(0, tab));
  if (!kind) throw Error("unknown feature kind '" + std::string(s.substr(0, tab)) + "'");
  const auto payload = s.substr(tab + 1);
  if (payload.find_first_of("\t\n\r") != std::string_view::npos)
    throw Error("feature payload contains a tab or newline");
  return {*kind, std::string(payload)};
}

/// Deduplicated, sorted set of features.
class FeatureSet {
public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<FeatureKey> keys) : keys_(std::move(keys)) {
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  }
  FeatureSet(std::initializer_list<FeatureKey> keys) : FeatureSet(std::vector<FeatureKey>(keys)) {}

  bool contains(const FeatureKey& f) const { return std::binary_search(keys_.begin(), keys_.end(), f); }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  auto begin() const { return keys_.begin(); }
  auto end() const { return keys_.end(); }

  /// Payloads of every feature of `kind`, sorted.
  std::set<std::string> payloads(FeatureKind kind) const {
    std::set<std::string> out;
    for (const auto& f : keys_)
      if (f.kind == kind) out.insert(f.payload);
    return out;
  }

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

private:
  std::vector<FeatureKey> keys_;
};

struct TemplateConfig {
  int window_radius = 4;
  /// Sentences on each side of the target sentence for agglutinative `glob_lem`.
  int global_sentence_radius = 2;
  /// Same for the English set; unset means the whole instance context.
  std::optional<int> english_global_sentence_radius;
  std::set<Pos> content_pos = {Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv};

  void validate() const {
    if (window_radius < 0) throw Error("window_radius must be >= 0");
    if (global_sentence_radius < 0) throw Error("global_sentence_radius must be >= 0");
    if (english_global_sentence_radius && *english_global_sentence_radius < 0)
      throw Error("english_global_sentence_radius must be >= 0");
  }
};

namespace detail {

inline std::string offset_label(int offset) {
  if (offset > 0) return "+" + std::to_string(offset);
  return std::to_string(offset);
}

template <class... Parts>
std::string join_bar(const Parts&... parts) {
  std::string out;
  ((out += (out.empty() ? "" : "|"), out += parts), ...);
  return out;
}

inline std::string join_bar(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '|';
    out += parts[i];
  }
  return out;
}

/// Read-only window over an instance with boundary padding.
class Context {
public:
  explicit Context(const Instance& in) : in_(in) {}

  std::ptrdiff_t target() const { return static_cast<std::ptrdiff_t>(in_.target_index); }
  bool inside(std::ptrdiff_t i) const { return i >= 0 && i < static_cast<std::ptrdiff_t>(in_.tokens.size()); }
  const MorphToken& at(std::ptrdiff_t i) const { return in_.tokens[static_cast<std::size_t>(i)]; }

  std::string surface(std::ptrdiff_t i) const { return inside(i) ? at(i).surface : std::string(kBoundaryToken); }
  std::string lemma(std::ptrdiff_t i) const { return inside(i) ? at(i).lemma : std::string(kBoundaryToken); }
  std::string pos(std::ptrdiff_t i) const {
    return inside(i) ? std::string(to_string(at(i).pos)) : std::string(kBoundaryToken);
  }

  /// Token range covered by `radius` sentences on either side of the target sentence.
  Span sentence_window(std::optional<int> radius) const {
    if (!radius) return {0, in_.tokens.size()};
    const auto r = static_cast<std::size_t>(*radius);
    const auto first = in_.target_sentence >= r ? in_.target_sentence - r : 0;
    const auto last = std::min(in_.target_sentence + r, in_.sentence_spans.size() - 1);
    return {in_.sentence_spans[first].begin, in_.sentence_spans[last].end};
  }

private:
  const Instance& in_;
};

inline void add_bags(const Context& ctx, const TemplateConfig& config, std::optional<int> sentence_radius,
                     std::vector<FeatureKey>& out) {
  const auto t = ctx.target();
  const auto content = [&](std::ptrdiff_t i) { return ctx.inside(i) && config.content_pos.contains(ctx.at(i).pos); };
  for (auto i = t - config.window_radius; i <= t + config.window_radius; ++i)
    if (i != t && content(i)) out.push_back({FeatureKind::WinLem, ctx.at(i).lemma});
  const auto span = ctx.sentence_window(sentence_radius);
  for (auto i = static_cast<std::ptrdiff_t>(span.begin); i < static_cast<std::ptrdiff_t>(span.end); ++i)
    if (i != t && content(i)) out.push_back({FeatureKind::GlobLem, ctx.at(i).lemma});
}

} // namespace detail

/// English template set: position-stamped word-form, lemma and POS bigrams and
/// trigrams around the target, plus windowed and global bags of content lemmas.
inline FeatureSet extract_english(const Instance& instance, const TemplateConfig& config = {}) {
  using detail::join_bar;
  using detail::offset_label;
  const detail::Context ctx(instance);
  const auto t = ctx.target();
  std::vector<FeatureKey> out;

  for (int off : {-1, +1}) {
    const auto a = off < 0 ? t - 1 : t;
    const auto b = a + 1;
    const auto label = offset_label(off);
    out.push_back({FeatureKind::BigWf, join_bar(label, ctx.surface(a), ctx.surface(b))});
    out.push_back({FeatureKind::BigLem, join_bar(label, ctx.lemma(a), ctx.lemma(b))});
    out.push_back({FeatureKind::BigPos, join_bar(label, ctx.pos(a), ctx.pos(b))});
  }
  for (int start : {-2, -1, 0}) {
    const auto a = t + start;
    const auto label = offset_label(start);
    out.push_back({FeatureKind::TriWf, join_bar(label, ctx.surface(a), ctx.surface(a + 1), ctx.surface(a + 2))});
    out.push_back({FeatureKind::TriLem, join_bar(label, ctx.lemma(a), ctx.lemma(a + 1), ctx.lemma(a + 2))});
    out.push_back({FeatureKind::TriPos, join_bar(label, ctx.pos(a), ctx.pos(a + 1), ctx.pos(a + 2))});
  }
  detail::add_bags(ctx, config, config.english_global_sentence_radius, out);
  return FeatureSet(std::move(out));
}

namespace detail {

/// Renderings used by the agglutinative templates. Absent tags print as "∅";
/// an elliptic token's lemma is followed by the elliptic head in the next slot.
class MorphView {
public:
  static constexpr std::string_view kAbsent = "∅";

  explicit MorphView(const Context& ctx) : ctx_(ctx) {}

  bool elliptic(std::ptrdiff_t i) const { return ctx_.inside(i) && ctx_.at(i).ellipsis.value_or(false); }

  std::string lemma(std::ptrdiff_t i) const {
    auto l = ctx_.lemma(i);
    if (elliptic(i)) l += "|" + std::string(kEllipsisHead);
    return l;
  }

  std::string numdet(std::ptrdiff_t i) const {
    const auto& tok = ctx_.at(i);
    std::string out;
    if (tok.number) out += to_string(*tok.number);
    if (tok.det.value_or(false)) out += out.empty() ? "DET" : "+DET";
    return out.empty() ? std::string(kAbsent) : out;
  }

  std::optional<std::string> case_tag(std::ptrdiff_t i) const { return ctx_.at(i).case_tag; }
  std::string case_or_absent(std::ptrdiff_t i) const { return case_tag(i).value_or(std::string(kAbsent)); }

  /// Item chain for tokens [first, last]: per token its head item(s), then its
  /// case when present. `head` renders the lemma-like item of token i.
  template <class Head>
  std::vector<std::string> chain(std::ptrdiff_t first, std::ptrdiff_t last, Head head, bool lemma_like) const {
    std::vector<std::string> items;
    for (auto i = first; i <= last; ++i) {
      items.push_back(head(i));
      if (lemma_like && elliptic(i)) items.emplace_back(kEllipsisHead);
      if (auto c = case_tag(i)) items.push_back(*c);
    }
    return items;
  }

private:
  const Context& ctx_;
};

inline void add_adjacent_pairs(FeatureKind kind, const std::vector<std::string>& items, std::vector<FeatureKey>& out) {
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out.push_back({kind, join_bar(items[i], items[i + 1])});
}

/// Split-representation features over the consecutive tokens [first, last].
inline void add_split_ngrams(const Context& ctx, const MorphView& mv, std::ptrdiff_t first, std::ptrdiff_t last,
                             FeatureKind wf1, FeatureKind lem1, FeatureKind lem2, FeatureKind pos,
                             std::vector<FeatureKey>& out) {
  const auto plain_lemma = [&](std::ptrdiff_t i) { return ctx.lemma(i); };
  const auto tagged_lemma = [&](std::ptrdiff_t i) {
    return i == first ? ctx.lemma(i) : ctx.lemma(i) + "_" + mv.numdet(i);
  };
  add_adjacent_pairs(wf1, mv.chain(first, last, tagged_lemma, true), out);
  add_adjacent_pairs(lem1, mv.chain(first, last, plain_lemma, true), out);
  add_adjacent_pairs(pos, mv.chain(first, last, [&](std::ptrdiff_t i) { return ctx.pos(i); }, false), out);
  for (auto i = first; i <= last; ++i) out.push_back({lem2, mv.lemma(i) + "_" + mv.case_or_absent(i)});
}

} // namespace detail

/// Agglutinative template set: unigrams over the target built from lemma,
/// number/determiner and case; fused and split bigrams and trigrams; windowed
/// and sentence-window bags of content lemmas.
inline FeatureSet extract_agglutinative(const Instance& instance, const TemplateConfig& config = {}) {
  using detail::join_bar;
  using detail::offset_label;
  const detail::Context ctx(instance);
  const detail::MorphView mv(ctx);
  const auto t = ctx.target();
  std::vector<FeatureKey> out;

  out.push_back({FeatureKind::UniWf0, ctx.surface(t)});
  out.push_back({FeatureKind::UniWf1, join_bar(mv.lemma(t), mv.numdet(t))});
  out.push_back({FeatureKind::UniWf2, join_bar(mv.lemma(t), mv.case_or_absent(t))});
  out.push_back({FeatureKind::UniWf3, join_bar(mv.lemma(t), mv.numdet(t), mv.case_or_absent(t))});

  for (int off : {-1, +1}) {
    const auto a = off < 0 ? t - 1 : t;
    const auto b = a + 1;
    const auto label = offset_label(off);
    out.push_back({FeatureKind::BigWf0, join_bar(label, ctx.surface(a), ctx.surface(b))});
    out.push_back({FeatureKind::BigLem0, join_bar(label, mv.lemma(a), mv.lemma(b))});
    if (ctx.inside(a) && ctx.inside(b))
      detail::add_split_ngrams(ctx, mv, a, b, FeatureKind::BigWf1, FeatureKind::BigLem1, FeatureKind::BigLem2,
                               FeatureKind::BigPos, out);
  }
  for (int start : {-2, -1, 0}) {
    const auto a = t + start;
    const auto c = a + 2;
    const auto label = offset_label(start);
    out.push_back({FeatureKind::TriWf0, join_bar(label, ctx.surface(a), ctx.surface(a + 1), ctx.surface(c))});
    out.push_back({FeatureKind::TriLem0, join_bar(label, mv.lemma(a), mv.lemma(a + 1), mv.lemma(c))});
    if (ctx.inside(a) && ctx.inside(c))
      detail::add_split_ngrams(ctx, mv, a, c, FeatureKind::TriWf1, FeatureKind::TriLem1, FeatureKind::TriLem2,
                               FeatureKind::TriPos, out);
  }
  detail::add_bags(ctx, config, config.global_sentence_radius, out);
  return FeatureSet(std::move(out));
}

enum class TemplateSet { English, Agglutinative };

inline constexpr std::string_view to_string(TemplateSet s) {
  return s == TemplateSet::English ? "ENGLISH" : "AGGLUTINATIVE";
}

/// Binds a template set to its configuration; callable on an Instance.
struct FeatureExtractor {
  TemplateSet templates = TemplateSet::English;
  TemplateConfig config;

  FeatureSet operator()(const Instance& in) const {
    return templates == TemplateSet::English ? extract_english(in, config) : extract_agglutinative(in, config);
  }
};

} // namespace dlwsd

#endif
