#ifndef DLWSD_SELECTION_HPP
#define DLWSD_SELECTION_HPP

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "dlist.hpp"
#include "error.hpp"
#include "features.hpp"
#include "ratio.hpp"

namespace dlwsd {

/// Which held-out outcomes a feature is credited with: only the entry that
/// decided the prediction, or the top entry of every feature present.
enum class Attribution { FiringOnly, AllMatching };

inline constexpr std::string_view to_string(Attribution a) {
  return a == Attribution::FiringOnly ? "FIRING_ONLY" : "ALL_MATCHING";
}

inline std::optional<Attribution> parse_attribution(std::string_view s) {
  if (s == "FIRING_ONLY") return Attribution::FiringOnly;
  if (s == "ALL_MATCHING") return Attribution::AllMatching;
  return std::nullopt;
}

struct FeatureStat {
  FeatureKey feature;
  std::int64_t fires = 0;
  std::int64_t correct = 0;

  std::optional<Ratio> precision() const {
    if (fires == 0) return std::nullopt;
    return Ratio(correct, fires);
  }

  friend bool operator==(const FeatureStat&, const FeatureStat&) = default;
};

using FeatureStats = std::map<FeatureKey, FeatureStat>;

struct SelectionOptions {
  double threshold = 0.85;
  int k = 10;
  std::uint64_t seed = 0;
  std::int64_t min_fires = 2;
  Attribution attribution = Attribution::FiringOnly;
  TrainConfig train;
};

namespace detail {

inline void credit(FeatureStats& stats, const ListEntry& entry, const Instance& held_out) {
  auto& st = stats[entry.feature];
  st.feature = entry.feature;
  ++st.fires;
  if (held_out.has_gold(entry.sense)) ++st.correct;
}

} // namespace detail

/// Cross-validated per-feature precision on the training data of one word.
template <class Extractor>
FeatureStats cv_feature_stats(const Corpus& corpus, const std::string& target_word, const Extractor& extractor,
                              int k, std::uint64_t seed, Attribution attribution = Attribution::FiringOnly,
                              const TrainConfig& train_config = {}) {
  const auto folds = split_folds(corpus, target_word, k, seed);
  const auto instances = corpus.instances_of(target_word);
  std::vector<Example> examples;
  std::vector<int> fold;
  examples.reserve(instances.size());
  for (const auto* in : instances) {
    examples.push_back({extractor(*in), in->gold_senses});
    fold.push_back(folds.fold_of.at(in->id));
  }

  FeatureStats stats;
  for (int f = 0; f < k; ++f) {
    std::vector<std::reference_wrapper<const Example>> training;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (fold[i] != f) training.emplace_back(examples[i]);
    const auto model = train_examples(target_word, training, train_config);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (fold[i] != f) continue;
      if (attribution == Attribution::FiringOnly) {
        const auto result = classify(model, examples[i].features, Backoff::Abstain);
        if (result.fired) detail::credit(stats, *result.fired, *instances[i]);
      } else {
        for (const auto& feat : examples[i].features)
          if (auto pos = model.position_of(feat)) detail::credit(stats, model.entries()[*pos], *instances[i]);
      }
    }
  }
  return stats;
}

struct SelectionReport {
  FeatureStats stats;
  double threshold = 0.85;
  std::int64_t min_fires = 2;
  int k = 10;
  std::uint64_t seed = 0;
  Attribution attribution = Attribution::FiringOnly;
  std::set<FeatureKey> selected;
};

inline bool meets_threshold(const FeatureStat& st, double threshold, std::int64_t min_fires) {
  if (st.fires == 0 || st.fires < min_fires) return false;
  return static_cast<double>(st.correct) / static_cast<double>(st.fires) >= threshold;
}

/// Keeps features with at least `min_fires` firings and precision >= threshold.
inline SelectionReport select_features(FeatureStats stats, double threshold, std::int64_t min_fires) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("select_features: threshold must lie in [0, 1]");
  if (min_fires < 1) throw Error("select_features: min_fires must be >= 1");
  SelectionReport report;
  report.threshold = threshold;
  report.min_fires = min_fires;
  for (const auto& [f, st] : stats)
    if (meets_threshold(st, threshold, min_fires)) report.selected.insert(f);
  report.stats = std::move(stats);
  return report;
}

/// Trains on every instance of the word, then drops entries whose feature was
/// not selected. A zero threshold disables the restriction.
template <class Extractor>
std::pair<DecisionListModel, SelectionReport> train_best(const Corpus& corpus, const std::string& target_word,
                                                         const Extractor& extractor,
                                                         const SelectionOptions& options = {}) {
  auto stats =
      cv_feature_stats(corpus, target_word, extractor, options.k, options.seed, options.attribution, options.train);
  auto report = select_features(std::move(stats), options.threshold, options.min_fires);
  report.k = options.k;
  report.seed = options.seed;
  report.attribution = options.attribution;

  std::vector<Example> examples;
  for (const auto* in : corpus.instances_of(target_word)) examples.push_back({extractor(*in), in->gold_senses});
  auto full = train_examples(target_word, examples, options.train);
  if (options.threshold <= 0.0) return {std::move(full), std::move(report)};
  return {full.restricted_to(report.selected), std::move(report)};
}

inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Header line with the run parameters, then one line per measured feature
/// sorted by precision (descending) and feature identity.
inline void render_selection_report(const SelectionReport& report, std::ostream& out) {
  out << "SELECTION 1 threshold=" << format_real(report.threshold) << " k=" << report.k << " seed=" << report.seed
      << " min_fires=" << report.min_fires << " attribution=" << to_string(report.attribution) << '\n';
  std::vector<const FeatureStat*> rows;
  for (const auto& [_, st] : report.stats) rows.push_back(&st);
  std::stable_sort(rows.begin(), rows.end(), [](const FeatureStat* a, const FeatureStat* b) {
    const auto pa = a->precision().value_or(Ratio(0, 1));
    const auto pb = b->precision().value_or(Ratio(0, 1));
    if (pa != pb) return pa > pb;
    return a->feature < b->feature;
  });
  for (const auto* st : rows) {
    const auto p = st->precision();
    out << encode_feature(st->feature) << '\t' << st->fires << '\t' << st->correct << '\t'
        << (p ? p->to_fixed(6) : std::string("-")) << '\t'
        << (report.selected.contains(st->feature) ? "SELECTED" : "REJECTED") << '\n';
  }
}

} // namespace dlwsd

#endif
