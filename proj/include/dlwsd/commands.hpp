#ifndef DLWSD_COMMANDS_HPP
#define DLWSD_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "corpus_io.hpp"
#include "dlist.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "selection.hpp"

namespace dlwsd {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitFatal = 2 };

/// Fatal input problem; the message is printed and the command exits with 2.
class CommandError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CommandError("cannot open '" + path.string() + "' for reading");
  return in;
}

/// Writes through a sibling temp file and renames it into place.
inline void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError("cannot open '" + tmp.string() + "' for writing");
    body(out);
    out.flush();
    if (!out) throw CommandError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw CommandError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw CommandError("cannot create directory '" + dir.string() + "'");
}

/// File-name-safe rendering of a target word.
inline std::string file_stem(std::string_view word) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const auto ch = static_cast<unsigned char>(word[i]);
    const bool safe = std::isalnum(ch) || ch == '_' || ch == '-' || (ch == '.' && i > 0);
    if (safe) {
      out += static_cast<char>(ch);
    } else {
      out += '%';
      out += hex[ch >> 4];
      out += hex[ch & 15];
    }
  }
  return out;
}

inline Corpus read_corpus(const fs::path& path, const RunConfig& config) {
  auto in = open_input(path);
  try {
    return parse_corpus(in, config.morphology);
  } catch (const Error& e) {
    throw CommandError("'" + path.string() + "': " + e.what());
  }
}

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads. The first exception
/// (by index) is rethrown.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct WordData {
  std::string word;
  std::vector<Instance> instances;
  std::size_t dropped_without_gold = 0;
};

/// Filters excluded senses and groups training instances by word. Words that
/// lost every instance to the exclusion list are returned in `excluded_words`.
inline std::vector<WordData> training_words(const Corpus& corpus, const RunConfig& config,
                                            std::vector<std::string>& excluded_words, std::ostream& err) {
  FilterReport fr;
  const auto filtered = filter_excluded_senses(corpus, config.excluded(), &fr);
  if (fr.removed_labels > 0)
    err << "dlwsd: excluded " << fr.removed_labels << " gold labels, removed " << fr.removed_instances
        << " instances\n";
  std::vector<WordData> out;
  for (const auto& word : corpus.target_words()) {
    if (fr.emptied_words.contains(word)) {
      excluded_words.push_back(word);
      continue;
    }
    WordData wd{word, {}, 0};
    for (const auto* in : filtered.instances_of(word)) {
      if (in->gold_senses.empty())
        ++wd.dropped_without_gold;
      else
        wd.instances.push_back(*in);
    }
    out.push_back(std::move(wd));
  }
  return out;
}

inline Corpus word_corpus(Morphology morphology, const std::vector<Instance>& instances) {
  Corpus c{morphology, instances, {}};
  c.rebuild_inventory();
  return c;
}

inline void write_manifest_header(std::ostream& out, std::string_view command, const RunConfig& config) {
  out << "DLWSD-MANIFEST 1 " << command << '\n';
  for (const auto& line : describe_config(config)) out << "config\t" << line << '\n';
}

template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const CommandError& e) {
    err << "dlwsd: error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "dlwsd: error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "dlwsd: error: " << e.what() << '\n';
  }
  return kExitFatal;
}

struct WordOutcome {
  std::optional<DecisionListModel> model;
  std::optional<SelectionReport> report;
  std::string note;  // manifest flag for unrestricted or skipped words
  bool skipped = false;
};

} // namespace detail

/// Trains one decision list per target word and writes `<word>.dlist` files plus
/// `manifest.tsv` into `out_dir`.
inline int cmd_train(const fs::path& corpus_path, const fs::path& out_dir, const RunConfig& config,
                     std::ostream& err) {
  return detail::guarded(err, [&] {
    config.validate();
    const auto corpus = detail::read_corpus(corpus_path, config);
    const auto extractor = config.extractor(corpus.morphology);
    std::vector<std::string> excluded_words;
    const auto words = detail::training_words(corpus, config, excluded_words, err);
    detail::ensure_directory(out_dir);

    std::vector<detail::WordOutcome> outcomes(words.size());
    detail::parallel_for(words.size(), config.jobs, [&](std::size_t i) {
      const auto& wd = words[i];
      if (wd.instances.empty()) {
        outcomes[i].skipped = true;
        outcomes[i].note = "no instances with gold senses";
        return;
      }
      outcomes[i].model = train(std::span<const Instance>(wd.instances), extractor, config.train_config());
    });

    int status = kExitOk;
    detail::write_atomically(out_dir / "manifest.tsv", [&](std::ostream& out) {
      detail::write_manifest_header(out, "train", config);
      for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& wd = words[i];
        if (wd.dropped_without_gold)
          err << "dlwsd: warning: '" << wd.word << "': ignored " << wd.dropped_without_gold
              << " instances without gold senses\n";
        if (outcomes[i].skipped) {
          err << "dlwsd: warning: '" << wd.word << "' skipped: " << outcomes[i].note << '\n';
          out << "skipped\t" << wd.word << '\t' << outcomes[i].note << '\n';
          status = kExitPartial;
          continue;
        }
        const auto& model = *outcomes[i].model;
        const auto file = detail::file_stem(wd.word) + ".dlist";
        detail::write_atomically(out_dir / file, [&](std::ostream& m) { serialize_model(model, m); });
        out << "word\t" << wd.word << "\tinstances=" << model.meta().n_instances
            << "\tfeatures=" << model.meta().n_features << "\tentries=" << model.entries().size()
            << "\tfile=" << file << '\n';
      }
      for (const auto& w : excluded_words) out << "skipped\t" << w << "\tall instances excluded\n";
    });
    return status;
  });
}

/// Cross-validated feature selection per word: restricted `<word>.dlist`,
/// `<word>.selection.tsv` and `manifest.tsv`. Words with fewer instances than
/// folds are trained unrestricted and flagged.
inline int cmd_select(const fs::path& corpus_path, const fs::path& out_dir, const RunConfig& config,
                      std::ostream& err) {
  return detail::guarded(err, [&] {
    config.validate();
    const auto corpus = detail::read_corpus(corpus_path, config);
    const auto extractor = config.extractor(corpus.morphology);
    std::vector<std::string> excluded_words;
    const auto words = detail::training_words(corpus, config, excluded_words, err);
    detail::ensure_directory(out_dir);

    std::vector<detail::WordOutcome> outcomes(words.size());
    detail::parallel_for(words.size(), config.jobs, [&](std::size_t i) {
      const auto& wd = words[i];
      auto& outcome = outcomes[i];
      if (wd.instances.empty()) {
        outcome.skipped = true;
        outcome.note = "no instances with gold senses";
        return;
      }
      if (wd.instances.size() < static_cast<std::size_t>(config.folds)) {
        outcome.note = "unrestricted: " + std::to_string(wd.instances.size()) + " instances < k=" +
                       std::to_string(config.folds);
        outcome.model = train(std::span<const Instance>(wd.instances), extractor, config.train_config());
        return;
      }
      const auto sub = detail::word_corpus(corpus.morphology, wd.instances);
      auto [model, report] = train_best(sub, wd.word, extractor, config.selection_options());
      outcome.model = std::move(model);
      outcome.report = std::move(report);
    });

    int status = kExitOk;
    detail::write_atomically(out_dir / "manifest.tsv", [&](std::ostream& out) {
      detail::write_manifest_header(out, "select", config);
      for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& wd = words[i];
        const auto& outcome = outcomes[i];
        if (outcome.skipped) {
          err << "dlwsd: warning: '" << wd.word << "' skipped: " << outcome.note << '\n';
          out << "skipped\t" << wd.word << '\t' << outcome.note << '\n';
          status = kExitPartial;
          continue;
        }
        const auto stem = detail::file_stem(wd.word);
        const auto& model = *outcome.model;
        detail::write_atomically(out_dir / (stem + ".dlist"), [&](std::ostream& m) { serialize_model(model, m); });
        out << "word\t" << wd.word << "\tinstances=" << model.meta().n_instances
            << "\tentries=" << model.entries().size() << "\tfile=" << stem << ".dlist";
        if (outcome.report) {
          const auto report_file = stem + ".selection.tsv";
          detail::write_atomically(out_dir / report_file,
                                   [&](std::ostream& r) { render_selection_report(*outcome.report, r); });
          out << "\tselected=" << outcome.report->selected.size() << "\treport=" << report_file;
        } else {
          err << "dlwsd: warning: '" << wd.word << "' " << outcome.note << '\n';
          out << '\t' << outcome.note;
        }
        out << '\n';
      }
      for (const auto& w : excluded_words) out << "skipped\t" << w << "\tall instances excluded\n";
    });
    return status;
  });
}

/// Loads every `*.dlist` file in `dir`, keyed by target word.
inline std::map<std::string, DecisionListModel> load_models(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CommandError("model directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".dlist") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, DecisionListModel> models;
  for (const auto& f : files) {
    auto in = detail::open_input(f);
    try {
      auto model = parse_model(in);
      auto word = model.target_word();
      if (!models.emplace(word, std::move(model)).second)
        throw CommandError("two model files for target word '" + word + "'");
    } catch (const ParseError& e) {
      throw CommandError("'" + f.string() + "': " + e.what());
    }
  }
  return models;
}

/// Writes one prediction per instance; words without a model abstain.
inline int cmd_classify(const fs::path& model_dir, const fs::path& corpus_path, const fs::path& out_predictions,
                        const RunConfig& config, std::ostream& err) {
  return detail::guarded(err, [&] {
    config.validate();
    const auto models = load_models(model_dir);
    const auto corpus = detail::read_corpus(corpus_path, config);
    const auto extractor = config.extractor(corpus.morphology);
    std::vector<Prediction> predictions(corpus.instances.size());
    detail::parallel_for(corpus.instances.size(), config.jobs, [&](std::size_t i) {
      const auto& in = corpus.instances[i];
      predictions[i].instance_id = in.id;
      auto it = models.find(in.target_word);
      if (it == models.end()) return;
      const auto backoff = it->second.default_sense() ? config.backoff : Backoff::Abstain;
      const auto result = classify(it->second, extractor(in), backoff);
      predictions[i].sense = result.sense;
      if (result.fired) predictions[i].fired_feature = result.fired->feature;
    });
    std::set<std::string> missing;
    for (const auto& in : corpus.instances)
      if (!models.contains(in.target_word)) missing.insert(in.target_word);
    for (const auto& w : missing) err << "dlwsd: note: no model for '" << w << "', instances abstain\n";
    detail::write_atomically(out_predictions, [&](std::ostream& out) { write_predictions(predictions, out); });
    return kExitOk;
  });
}

/// Most-frequent-sense predictions for `test_path` from the gold labels of
/// `train_path`. Words unseen in training abstain.
inline int cmd_baseline(const fs::path& train_path, const fs::path& test_path, const fs::path& out_predictions,
                        const RunConfig& config, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto train_corpus = filter_excluded_senses(detail::read_corpus(train_path, config), config.excluded());
    const auto test = detail::read_corpus(test_path, config);
    Corpus covered{test.morphology, {}, {}};
    for (const auto& in : test.instances)
      if (train_corpus.sense_inventory.contains(in.target_word)) covered.instances.push_back(in);
    const auto mfs = mfs_baseline(train_corpus, covered);
    std::map<std::string, const Prediction*> by_id;
    for (const auto& p : mfs) by_id.emplace(p.instance_id, &p);
    std::vector<Prediction> out;
    int status = kExitOk;
    for (const auto& in : test.instances) {
      auto it = by_id.find(in.id);
      if (it != by_id.end()) {
        out.push_back(*it->second);
      } else {
        out.push_back({in.id, std::nullopt, std::nullopt});
        status = kExitPartial;
      }
    }
    if (status == kExitPartial) err << "dlwsd: warning: some test words are unseen in training and abstain\n";
    detail::write_atomically(out_predictions, [&](std::ostream& o) { write_predictions(out, o); });
    return status;
  });
}

/// Scores predictions against gold and prints the report to `out`.
inline int cmd_evaluate(const fs::path& gold_path, const fs::path& predictions_path, ReportFormat format,
                        const RunConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto gold = detail::read_corpus(gold_path, config);
    auto pin = detail::open_input(predictions_path);
    std::vector<Prediction> predictions;
    try {
      predictions = parse_predictions(pin);
    } catch (const ParseError& e) {
      throw CommandError("'" + predictions_path.string() + "': " + e.what());
    }
    const auto report = score(gold, predictions);
    render_report(report, format, out);
    return kExitOk;
  });
}

/// Rewrites gold senses through a sense map; the MapReport goes to `err`. An
/// empty map copies the corpus unchanged.
inline int cmd_map_senses(const fs::path& corpus_path, const fs::path& map_path, const fs::path& out_path,
                          const RunConfig& config, std::ostream& err) {
  return detail::guarded(err, [&] {
    auto min = detail::open_input(map_path);
    SenseMap map;
    try {
      map = parse_sense_map(min);
    } catch (const ParseError& e) {
      throw CommandError("'" + map_path.string() + "': " + e.what());
    }
    const auto corpus = detail::read_corpus(corpus_path, config);
    if (map.entries.empty()) {
      err << "dlwsd: map-senses: empty map, corpus copied unchanged\n";
      detail::write_atomically(out_path, [&](std::ostream& out) { serialize_corpus(corpus, out); });
      return kExitOk;
    }
    const auto [mapped, report] = apply_sense_map(corpus, map);
    detail::write_atomically(out_path, [&](std::ostream& out) { serialize_corpus(mapped, out); });
    err << "dlwsd: map-senses: mapped_labels=" << report.mapped_labels << " kept_labels=" << report.kept_labels
        << " dropped_labels=" << report.dropped_labels << " collapsed_labels=" << report.collapsed_labels
        << " dropped_instances=" << report.dropped_instances << '\n';
    return kExitOk;
  });
}

} // namespace dlwsd

#endif
