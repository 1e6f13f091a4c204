#ifndef DLWSD_CORPUS_IO_HPP
#define DLWSD_CORPUS_IO_HPP

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

#include "corpus.hpp"

namespace dlwsd {

inline constexpr int kCorpusFormatVersion = 1;

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline void require_only(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view what) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error("unknown " + std::string(what) + " field '" + key + "'");
  }
}

template <class T>
T required(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("field '") + key + "' has the wrong type");
  }
}

inline MorphToken token_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("token is not an object");
  require_only(j, {"w", "l", "p", "case", "num", "det", "ell"}, "token");
  MorphToken t;
  t.surface = required<std::string>(j, "w");
  t.lemma = required<std::string>(j, "l");
  const auto pos = required<std::string>(j, "p");
  auto p = parse_pos(pos);
  if (!p) throw Error("unknown POS tag '" + pos + "'");
  t.pos = *p;
  if (j.contains("case")) t.case_tag = required<std::string>(j, "case");
  if (j.contains("num")) {
    const auto n = required<std::string>(j, "num");
    t.number = parse_number(n);
    if (!t.number) throw Error("unknown number tag '" + n + "'");
  }
  if (j.contains("det")) t.det = required<bool>(j, "det");
  if (j.contains("ell")) t.ellipsis = required<bool>(j, "ell");
  return t;
}

inline ordered_json token_to_json(const MorphToken& t) {
  ordered_json j;
  j["w"] = t.surface;
  j["l"] = t.lemma;
  j["p"] = std::string(to_string(t.pos));
  if (t.case_tag) j["case"] = *t.case_tag;
  if (t.number) j["num"] = std::string(to_string(*t.number));
  if (t.det) j["det"] = *t.det;
  if (t.ellipsis) j["ell"] = *t.ellipsis;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("record is not an object");
  require_only(j, {"id", "target_word", "target_index", "target_sentence", "sentences", "gold"}, "record");
  Instance in;
  in.id = required<std::string>(j, "id");
  in.target_word = required<std::string>(j, "target_word");
  const auto ti = required<std::int64_t>(j, "target_index");
  const auto ts = required<std::int64_t>(j, "target_sentence");
  if (ti < 0) throw Error("instance '" + in.id + "': negative target_index");
  if (ts < 0) throw Error("instance '" + in.id + "': negative target_sentence");
  in.target_index = static_cast<std::size_t>(ti);
  in.target_sentence = static_cast<std::size_t>(ts);
  if (!j.contains("sentences")) throw Error("missing field 'sentences'");
  const auto& sentences = j["sentences"];
  if (!sentences.is_array()) throw Error("field 'sentences' is not a list");
  for (const auto& s : sentences) {
    if (!s.is_array()) throw Error("sentence is not a list of tokens");
    Span span{in.tokens.size(), in.tokens.size()};
    for (const auto& tok : s) in.tokens.push_back(token_from_json(tok));
    span.end = in.tokens.size();
    in.sentence_spans.push_back(span);
  }
  in.gold_senses = required<std::vector<std::string>>(j, "gold");
  return in;
}

inline ordered_json instance_to_json(const Instance& in) {
  ordered_json j;
  j["id"] = in.id;
  j["target_word"] = in.target_word;
  j["target_index"] = in.target_index;
  j["target_sentence"] = in.target_sentence;
  auto sentences = ordered_json::array();
  for (const auto& span : in.sentence_spans) {
    auto s = ordered_json::array();
    for (std::size_t i = span.begin; i < span.end; ++i) s.push_back(token_to_json(in.tokens[i]));
    sentences.push_back(std::move(s));
  }
  j["sentences"] = std::move(sentences);
  j["gold"] = in.gold_senses;
  return j;
}

inline bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

} // namespace detail

/// Reads the line-delimited corpus format: a header record followed by one
/// instance record per line. Empty input yields an empty corpus. When
/// `expected` is given, the header must declare the same morphology.
inline Corpus parse_corpus(std::istream& input, std::optional<Morphology> expected = std::nullopt) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Morphology> morphology;
  std::vector<Instance> instances;
  std::set<std::string> ids;
  while (std::getline(input, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, std::string("malformed record: ") + e.what());
    }
    try {
      if (!morphology) {
        if (!j.is_object() || !j.contains("morphology"))
          throw Error("missing header line declaring morphology");
        detail::require_only(j, {"morphology", "format_version"}, "header");
        const auto m = detail::required<std::string>(j, "morphology");
        morphology = parse_morphology(m);
        if (!morphology) throw Error("unknown morphology '" + m + "'");
        if (detail::required<int>(j, "format_version") != kCorpusFormatVersion)
          throw Error("unsupported format_version");
        if (expected && *expected != *morphology)
          throw Error("corpus declares " + std::string(to_string(*morphology)) + " but " +
                      std::string(to_string(*expected)) + " was requested");
        continue;
      }
      Instance in = detail::instance_from_json(j);
      validate_instance(in, *morphology);
      if (!ids.insert(in.id).second) throw Error("duplicate instance id '" + in.id + "'");
      instances.push_back(std::move(in));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  Corpus c{morphology.value_or(expected.value_or(Morphology::Plain)), std::move(instances), {}};
  c.rebuild_inventory();
  return c;
}

inline void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  detail::ordered_json header;
  header["morphology"] = std::string(to_string(corpus.morphology));
  header["format_version"] = kCorpusFormatVersion;
  out << header.dump() << '\n';
  for (const auto& in : corpus.instances) out << detail::instance_to_json(in).dump() << '\n';
}

/// Two tab-separated columns `old<TAB>new` per line; `#` lines and blank lines
/// are ignored.
inline SenseMap parse_sense_map(std::istream& input) {
  SenseMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(input, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(lineno, "expected exactly two tab-separated columns");
    std::string from = line.substr(0, tab);
    std::string to = line.substr(tab + 1);
    try {
      validate_sense(from);
      validate_sense(to);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    if (!map.entries.emplace(std::move(from), std::move(to)).second)
      throw ParseError(lineno, "duplicate key '" + line.substr(0, tab) + "'");
  }
  return map;
}

} // namespace dlwsd

#endif
