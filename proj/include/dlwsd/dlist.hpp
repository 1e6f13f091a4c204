#ifndef DLWSD_DLIST_HPP
#define DLWSD_DLIST_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"

namespace dlwsd {

/// Where the 0.1 substitution for an empty denominator is applied.
/// Probability: ln(p_i / 0.1), so every training-monosemous feature scores ln 10.
/// Count: ln(c_i / 0.1), which grows with the feature's frequency.
enum class SmoothingSpace { Probability, Count };

enum class Backoff { Abstain, Mfs };

inline constexpr double kEmptyDenominator = 0.1;

/// A training example: the extracted features and the gold senses.
struct Example {
  FeatureSet features;
  std::vector<std::string> gold;
};

struct ContingencyTable {
  std::map<FeatureKey, std::map<std::string, std::int64_t>> counts;
  std::map<std::string, std::int64_t> sense_totals;
  std::int64_t n_instances = 0;
};

namespace detail {
inline const Example& unwrap(const Example& e) { return e; }
inline const Example& unwrap(std::reference_wrapper<const Example> e) { return e.get(); }
} // namespace detail

/// Each feature of an example counts once for each of its gold senses.
template <class Range>
ContingencyTable count_evidence(const Range& examples) {
  ContingencyTable table;
  for (const auto& item : examples) {
    const Example& ex = detail::unwrap(item);
    if (ex.gold.empty()) throw Error("count_evidence: training example without gold senses");
    ++table.n_instances;
    for (const auto& s : ex.gold) ++table.sense_totals[s];
    for (const auto& f : ex.features) {
      auto& row = table.counts[f];
      for (const auto& s : ex.gold) ++row[s];
    }
  }
  return table;
}

struct ListEntry {
  FeatureKey feature;
  std::string sense;
  double weight = 0.0;

  friend bool operator==(const ListEntry&, const ListEntry&) = default;
};

/// Decision-list order: weight descending, then feature (kind, payload) and
/// sense ascending.
inline bool entry_before(const ListEntry& a, const ListEntry& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.sense < b.sense;
}

/// Log-likelihood weight of sense i for one feature, given the sense's count
/// and the feature's total count.
inline double sense_weight(std::int64_t count, std::int64_t total, SmoothingSpace space) {
  const std::int64_t rest = total - count;
  if (space == SmoothingSpace::Count) {
    const double denom = rest == 0 ? kEmptyDenominator : static_cast<double>(rest);
    return std::log(static_cast<double>(count) / denom);
  }
  const double p = static_cast<double>(count) / static_cast<double>(total);
  const double denom = rest == 0 ? kEmptyDenominator : static_cast<double>(rest) / static_cast<double>(total);
  return std::log(p / denom);
}

/// One entry per (feature, sense) with a positive count. Nothing is pruned.
inline std::vector<ListEntry> weigh(const ContingencyTable& table,
                                    SmoothingSpace space = SmoothingSpace::Probability) {
  std::vector<ListEntry> out;
  for (const auto& [feature, row] : table.counts) {
    std::int64_t total = 0;
    for (const auto& [_, c] : row) total += c;
    for (const auto& [sense, c] : row)
      if (c > 0) out.push_back({feature, sense, sense_weight(c, total, space)});
  }
  return out;
}

struct TrainingMeta {
  std::int64_t n_instances = 0;
  std::int64_t n_features = 0;
};

class DecisionListModel {
public:
  DecisionListModel() = default;

  /// `entries` must already be in decision-list order with no repeated
  /// (feature, sense) and no negative weights.
  DecisionListModel(std::string target_word, std::vector<ListEntry> entries, std::optional<std::string> default_sense,
                    TrainingMeta meta = {})
      : target_word_(std::move(target_word)), entries_(std::move(entries)), default_sense_(std::move(default_sense)),
        meta_(meta) {
    validate_label("target word", target_word_);
    if (default_sense_) validate_sense(*default_sense_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (!std::isfinite(e.weight) || e.weight < 0) throw Error("entry weight must be finite and non-negative");
      if (i > 0 && !entry_before(entries_[i - 1], e)) throw Error("entries not sorted");
      first_.try_emplace(e.feature, i);
    }
  }

  const std::string& target_word() const { return target_word_; }
  const std::vector<ListEntry>& entries() const { return entries_; }
  const std::optional<std::string>& default_sense() const { return default_sense_; }
  const TrainingMeta& meta() const { return meta_; }

  /// Position of the first entry for `f`, if any.
  std::optional<std::size_t> position_of(const FeatureKey& f) const {
    auto it = first_.find(f);
    if (it == first_.end()) return std::nullopt;
    return it->second;
  }

  /// Keeps only the entries whose feature is in `keep`; order and weights unchanged.
  DecisionListModel restricted_to(const std::set<FeatureKey>& keep) const {
    std::vector<ListEntry> kept;
    for (const auto& e : entries_)
      if (keep.contains(e.feature)) kept.push_back(e);
    return DecisionListModel(target_word_, std::move(kept), default_sense_, meta_);
  }

  /// Training metadata is not part of the model's identity.
  friend bool operator==(const DecisionListModel& a, const DecisionListModel& b) {
    return a.target_word_ == b.target_word_ && a.entries_ == b.entries_ && a.default_sense_ == b.default_sense_;
  }

private:
  std::string target_word_;
  std::vector<ListEntry> entries_;
  std::optional<std::string> default_sense_;
  TrainingMeta meta_;
  std::unordered_map<FeatureKey, std::size_t, FeatureKeyHash> first_;
};

/// Pruning predicate. Strict mode deletes zero-weight entries too.
inline bool keep_entry(const ListEntry& e, bool prune_nonpositive) {
  return prune_nonpositive ? e.weight > 0 : e.weight >= 0;
}

inline DecisionListModel build_list(std::string target_word, std::vector<ListEntry> entries,
                                    std::optional<std::string> default_sense, bool prune_nonpositive = true,
                                    TrainingMeta meta = {}) {
  std::erase_if(entries, [&](const ListEntry& e) { return !keep_entry(e, prune_nonpositive); });
  std::sort(entries.begin(), entries.end(), entry_before);
  return DecisionListModel(std::move(target_word), std::move(entries), std::move(default_sense), meta);
}

/// Most frequent sense; ties go to the smallest label.
inline std::optional<std::string> most_frequent_sense(const std::map<std::string, std::int64_t>& totals) {
  std::optional<std::string> best;
  std::int64_t best_count = 0;
  for (const auto& [sense, c] : totals) {
    if (c > best_count) {
      best = sense;
      best_count = c;
    }
  }
  return best;
}

struct TrainConfig {
  SmoothingSpace smoothing = SmoothingSpace::Probability;
  bool prune_nonpositive = true;
};

template <class Range>
DecisionListModel train_examples(std::string target_word, const Range& examples, const TrainConfig& config = {}) {
  const auto table = count_evidence(examples);
  if (table.n_instances == 0) throw Error("train: no training instances for '" + target_word + "'");
  TrainingMeta meta{table.n_instances, static_cast<std::int64_t>(table.counts.size())};
  return build_list(std::move(target_word), weigh(table, config.smoothing), most_frequent_sense(table.sense_totals),
                    config.prune_nonpositive, meta);
}

/// Trains one list from instances of a single target word.
template <class Extractor>
DecisionListModel train(std::span<const Instance> instances, const Extractor& extractor,
                        const TrainConfig& config = {}) {
  if (instances.empty()) throw Error("train: no training instances");
  std::vector<Example> examples;
  examples.reserve(instances.size());
  for (const auto& in : instances) {
    if (in.target_word != instances.front().target_word)
      throw Error("train: instances mix target words '" + instances.front().target_word + "' and '" +
                  in.target_word + "'");
    examples.push_back({extractor(in), in.gold_senses});
  }
  return train_examples(instances.front().target_word, examples, config);
}

struct Classification {
  std::optional<std::string> sense;
  std::optional<ListEntry> fired;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// The first entry, in list order, whose feature is present decides the sense.
inline Classification classify(const DecisionListModel& model, const FeatureSet& features,
                               Backoff backoff = Backoff::Abstain) {
  if (backoff == Backoff::Mfs && !model.default_sense())
    throw Error("classify: MFS backoff requested but model '" + model.target_word() + "' has no default sense");
  std::optional<std::size_t> winner;
  const auto& entries = model.entries();
  if (features.size() < entries.size()) {
    for (const auto& f : features) {
      auto pos = model.position_of(f);
      if (pos && (!winner || *pos < *winner)) winner = pos;
    }
  } else {
    for (std::size_t i = 0; i < entries.size() && !winner; ++i)
      if (features.contains(entries[i].feature)) winner = i;
  }
  if (winner) return {entries[*winner].sense, entries[*winner]};
  if (backoff == Backoff::Mfs) return {model.default_sense(), std::nullopt};
  return {};
}

// ---------------------------------------------------------------------------
// Model file: `DLIST 1 <target_word> <default_sense|-> <n_entries>` then one
// `kind \t payload \t sense \t weight` line per entry.

inline constexpr int kModelFormatVersion = 1;

inline std::string format_weight(double w) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, w, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void serialize_model(const DecisionListModel& model, std::ostream& out) {
  out << "DLIST " << kModelFormatVersion << ' ' << model.target_word() << ' '
      << model.default_sense().value_or("-") << ' ' << model.entries().size() << '\n';
  for (const auto& e : model.entries())
    out << encode_feature(e.feature) << '\t' << e.sense << '\t' << format_weight(e.weight) << '\n';
}

inline std::string serialize_model(const DecisionListModel& model) {
  std::ostringstream os;
  serialize_model(model, os);
  return os.str();
}

inline DecisionListModel parse_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty model file");
  std::istringstream header(line);
  std::string magic, target, def, extra;
  int version = 0;
  long long n = -1;
  if (!(header >> magic >> version >> target >> def >> n) || (header >> extra) || magic != "DLIST" || n < 0)
    throw ParseError(1, "malformed model header");
  if (version != kModelFormatVersion) throw ParseError(1, "unsupported model version " + std::to_string(version));

  std::vector<ListEntry> entries;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find('\t')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      cols.push_back(rest.substr(0, pos));
    cols.push_back(rest);
    if (cols.size() != 4) throw ParseError(lineno, "expected 4 tab-separated columns");
    ListEntry e;
    try {
      e.feature = decode_feature(std::string(cols[0]) + "\t" + std::string(cols[1]));
      e.sense = std::string(cols[2]);
      validate_sense(e.sense);
    } catch (const Error& err) {
      throw ParseError(lineno, err.what());
    }
    const auto w = cols[3];
    auto res = std::from_chars(w.data(), w.data() + w.size(), e.weight);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size())
      throw ParseError(lineno, "malformed weight '" + std::string(w) + "'");
    if (!std::isfinite(e.weight) || e.weight < 0) throw ParseError(lineno, "weight must be finite and non-negative");
    if (!entries.empty() && !entry_before(entries.back(), e)) throw ParseError(lineno, "entries not sorted");
    entries.push_back(std::move(e));
  }
  if (entries.size() != static_cast<std::size_t>(n))
    throw ParseError(lineno, "header declares " + std::to_string(n) + " entries, found " +
                                 std::to_string(entries.size()));
  try {
    return DecisionListModel(target, std::move(entries), def == "-" ? std::nullopt : std::optional(def));
  } catch (const Error& err) {
    throw ParseError(1, err.what());
  }
}

} // namespace dlwsd

#endif
