#ifndef DLWSD_EVAL_HPP
#define DLWSD_EVAL_HPP

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "corpus.hpp"
#include "dlist.hpp"
#include "error.hpp"
#include "features.hpp"
#include "ratio.hpp"

namespace dlwsd {

struct Prediction {
  std::string instance_id;
  std::optional<std::string> sense;  // absent: abstained
  std::optional<FeatureKey> fired_feature;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct Counts {
  std::int64_t total = 0;
  std::int64_t attempted = 0;
  std::int64_t correct = 0;

  std::optional<Ratio> precision() const {
    if (attempted == 0) return std::nullopt;
    return Ratio(correct, attempted);
  }
  std::optional<Ratio> recall() const {
    if (total == 0) return std::nullopt;
    return Ratio(correct, total);
  }
  std::optional<Ratio> coverage() const {
    if (total == 0) return std::nullopt;
    return Ratio(attempted, total);
  }

  Counts& operator+=(const Counts& o) {
    total += o.total;
    attempted += o.attempted;
    correct += o.correct;
    return *this;
  }

  friend bool operator==(const Counts&, const Counts&) = default;
};

struct EvalReport {
  std::map<std::string, Counts> per_word;

  Counts aggregate() const {
    Counts sum;
    for (const auto& [_, c] : per_word) sum += c;
    return sum;
  }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline constexpr std::string_view kAggregateWord = "*ALL*";

/// Fine-grained scoring: a prediction is correct when it equals any gold label.
/// Gold instances without a prediction count towards the total only.
inline EvalReport score(const Corpus& gold, const std::vector<Prediction>& predictions) {
  std::unordered_map<std::string_view, const Instance*> by_id;
  EvalReport report;
  for (const auto& in : gold.instances) {
    by_id.emplace(in.id, &in);
    ++report.per_word[in.target_word].total;
  }
  std::set<std::string_view> seen;
  for (const auto& p : predictions) {
    auto it = by_id.find(p.instance_id);
    if (it == by_id.end()) throw Error("prediction for unknown instance id '" + p.instance_id + "'");
    if (!seen.insert(p.instance_id).second) throw Error("duplicate prediction for instance id '" + p.instance_id + "'");
    if (!p.sense) continue;
    auto& c = report.per_word[it->second->target_word];
    ++c.attempted;
    if (it->second->has_gold(*p.sense)) ++c.correct;
  }
  return report;
}

/// Predicts each word's most frequent training sense; ties go to the smallest label.
inline std::vector<Prediction> mfs_baseline(const Corpus& train, const Corpus& test) {
  std::map<std::string, std::map<std::string, std::int64_t>> totals;
  for (const auto& in : train.instances)
    for (const auto& g : in.gold_senses) ++totals[in.target_word][g];
  std::vector<Prediction> out;
  out.reserve(test.instances.size());
  for (const auto& in : test.instances) {
    auto it = totals.find(in.target_word);
    if (it == totals.end()) throw Error("mfs_baseline: target word '" + in.target_word + "' unseen in training");
    out.push_back({in.id, most_frequent_sense(it->second), std::nullopt});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prediction file: `instance_id \t sense|- \t fired_kind|- \t fired_payload|-`

inline void write_predictions(const std::vector<Prediction>& predictions, std::ostream& out) {
  for (const auto& p : predictions) {
    out << p.instance_id << '\t' << p.sense.value_or("-") << '\t';
    if (p.fired_feature)
      out << encode_feature(*p.fired_feature);
    else
      out << "-\t-";
    out << '\n';
  }
}

inline std::vector<Prediction> parse_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find('\t', start)) != std::string::npos; start = pos + 1)
      cols.push_back(line.substr(start, pos - start));
    cols.push_back(line.substr(start));
    if (cols.size() != 4) throw ParseError(lineno, "expected 4 tab-separated columns");
    Prediction p;
    p.instance_id = cols[0];
    if (p.instance_id.empty()) throw ParseError(lineno, "empty instance id");
    if (cols[1] != "-") p.sense = cols[1];
    if (cols[2] != "-") {
      try {
        p.fired_feature = decode_feature(cols[2] + "\t" + cols[3]);
      } catch (const Error& e) {
        throw ParseError(lineno, e.what());
      }
    } else if (cols[3] != "-") {
      throw ParseError(lineno, "fired payload given without a fired kind");
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report rendering

enum class ReportFormat { Text, Machine };

inline constexpr int kReportDecimals = 4;

namespace detail {

inline std::string ratio_or_dash(const std::optional<Ratio>& r) {
  return r ? r->to_fixed(kReportDecimals) : std::string("—");
}

inline std::string ratio_or_null(const std::optional<Ratio>& r) {
  return r ? r->to_fixed(kReportDecimals) : std::string("null");
}

inline void machine_record(std::ostream& out, std::string_view word, const Counts& c) {
  out << "{\"word\":" << nlohmann::json(std::string(word)).dump() << ",\"total\":" << c.total
      << ",\"attempted\":" << c.attempted << ",\"correct\":" << c.correct
      << ",\"precision\":" << ratio_or_null(c.precision()) << ",\"recall\":" << ratio_or_null(c.recall())
      << ",\"coverage\":" << ratio_or_null(c.coverage()) << "}\n";
}

/// Right-aligns `s` in `width` columns, counting UTF-8 code points.
inline std::string pad_left(const std::string& s, std::size_t width) {
  const auto cols = static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) {
    return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
  }));
  return cols >= width ? s : std::string(width - cols, ' ') + s;
}

inline void text_row(std::ostream& out, std::size_t width, std::string_view word, const Counts& c) {
  out << std::left << std::setw(static_cast<int>(width)) << word << std::right << std::setw(8) << c.total
      << std::setw(11) << c.attempted << std::setw(9) << c.correct << pad_left(ratio_or_dash(c.precision()), 11)
      << pad_left(ratio_or_dash(c.recall()), 9) << pad_left(ratio_or_dash(c.coverage()), 10) << '\n';
}

} // namespace detail

inline constexpr std::string_view kMachineReportHeader = R"({"report":"dlwsd-eval","format_version":1})";

/// TEXT is a fixed-width table; MACHINE is a header line followed by one JSON
/// record per word and a final `*ALL*` record. Empty reports print the header only.
inline void render_report(const EvalReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Machine) {
    out << kMachineReportHeader << '\n';
    if (report.per_word.empty()) return;
    for (const auto& [word, c] : report.per_word) detail::machine_record(out, word, c);
    detail::machine_record(out, kAggregateWord, report.aggregate());
    return;
  }
  std::size_t width = 12;
  for (const auto& [word, _] : report.per_word) width = std::max(width, word.size() + 2);
  out << std::left << std::setw(static_cast<int>(width)) << "word" << std::right << std::setw(8) << "total"
      << std::setw(11) << "attempted" << std::setw(9) << "correct" << std::setw(11) << "precision" << std::setw(9)
      << "recall" << std::setw(10) << "coverage" << '\n';
  if (report.per_word.empty()) return;
  for (const auto& [word, c] : report.per_word) detail::text_row(out, width, word, c);
  detail::text_row(out, width, kAggregateWord, report.aggregate());
}

/// Reads MACHINE output back. The aggregate record must match the per-word sum.
inline EvalReport parse_machine_report(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  EvalReport report;
  std::optional<Counts> aggregate;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    if (!header) {
      if (j != nlohmann::json::parse(kMachineReportHeader)) throw ParseError(lineno, "missing report header");
      header = true;
      continue;
    }
    Counts c;
    std::string word;
    try {
      word = j.at("word").get<std::string>();
      c.total = j.at("total").get<std::int64_t>();
      c.attempted = j.at("attempted").get<std::int64_t>();
      c.correct = j.at("correct").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    }
    if (!(0 <= c.correct && c.correct <= c.attempted && c.attempted <= c.total))
      throw ParseError(lineno, "inconsistent counts");
    if (word == kAggregateWord) {
      aggregate = c;
    } else if (!report.per_word.emplace(word, c).second) {
      throw ParseError(lineno, "duplicate record for '" + word + "'");
    }
  }
  if (!header) throw ParseError(0, "empty report");
  if (!report.per_word.empty() && (!aggregate || *aggregate != report.aggregate()))
    throw ParseError(0, "aggregate record missing or inconsistent");
  return report;
}

} // namespace dlwsd

#endif
