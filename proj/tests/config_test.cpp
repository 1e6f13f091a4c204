#include <gtest/gtest.h>

#include <sstream>

#include "dlwsd/config.hpp"

using namespace dlwsd;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

} // namespace

TEST(Config, DefaultsDescribeThemselves) {
  const auto lines = describe_config(RunConfig{});
  const std::vector<std::string> expected = {
      "config_version=1",
      "morphology=FROM_CORPUS",
      "templates=AUTO",
      "window_radius=4",
      "global_sentence_radius=2",
      "english_global_sentence_radius=ALL",
      "content_pos=NOUN,VERB,ADJ,ADV",
      "log_space=PROB",
      "prune_nonpositive=true",
      "backoff=ABSTAIN",
      "selection.threshold=0.85",
      "selection.k=10",
      "selection.seed=0",
      "selection.min_fires=2",
      "selection.attribution=FIRING_ONLY",
      "excluded_senses=P,U",
  };
  EXPECT_EQ(lines, expected);
}

TEST(Config, ParsesEveryKey) {
  const auto c = parse(R"(# sample
config_version = 1
morphology = AGGLUTINATIVE
templates = ENGLISH
window_radius = 3
global_sentence_radius = 1
english_global_sentence_radius = 0
content_pos = NOUN, VERB
log_space = COUNT
prune_nonpositive = false
backoff = MFS
selection.threshold = 0.9
selection.k = 5
selection.seed = 42
selection.min_fires = 3
selection.attribution = ALL_MATCHING
excluded_senses = U
jobs = 4
)");
  EXPECT_EQ(c.morphology, Morphology::Agglutinative);
  EXPECT_EQ(c.templates, TemplateChoice::English);
  EXPECT_EQ(c.template_config.window_radius, 3);
  EXPECT_EQ(c.template_config.global_sentence_radius, 1);
  EXPECT_EQ(c.template_config.english_global_sentence_radius, 0);
  EXPECT_EQ(c.template_config.content_pos, (std::set<Pos>{Pos::Noun, Pos::Verb}));
  EXPECT_EQ(c.log_space, SmoothingSpace::Count);
  EXPECT_FALSE(c.prune_nonpositive);
  EXPECT_EQ(c.backoff, Backoff::Mfs);
  EXPECT_DOUBLE_EQ(c.threshold, 0.9);
  EXPECT_EQ(c.folds, 5);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.min_fires, 3);
  EXPECT_EQ(c.attribution, Attribution::AllMatching);
  EXPECT_EQ(c.excluded_senses, std::vector<std::string>{"U"});
  EXPECT_EQ(c.jobs, 4);
}

TEST(Config, DescribeRoundTrips) {
  const auto c = parse("config_version=1\nlog_space=COUNT\nselection.threshold=0.5\nbackoff=MFS\n");
  std::string text;
  for (const auto& l : describe_config(c)) text += l + "\n";
  EXPECT_EQ(describe_config(parse(text)), describe_config(c));
}

TEST(Config, RejectsUnknownKeysWithLineNumber) {
  try {
    parse("config_version=1\n\nthreshhold=0.5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("threshhold"), std::string::npos);
  }
}

TEST(Config, RequiresVersion) {
  EXPECT_THROW(parse("selection.k=5\n"), ParseError);
  EXPECT_THROW(parse("config_version=2\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(Config, RejectsBadValues) {
  for (const char* bad : {"selection.threshold=1.5", "selection.threshold=-0.1", "selection.k=1",
                          "selection.min_fires=0", "jobs=0", "window_radius=-1", "log_space=LOG",
                          "prune_nonpositive=yes", "backoff=RANDOM", "content_pos=NOUN,WIDGET",
                          "morphology=FUSIONAL", "selection.attribution=SOME", "selection.k=ten",
                          "no equals sign"}) {
    EXPECT_THROW(parse(std::string("config_version=1\n") + bad + "\n"), Error) << bad;
  }
}

TEST(Config, BoundaryThresholdsAccepted) {
  EXPECT_DOUBLE_EQ(parse("config_version=1\nselection.threshold=0\n").threshold, 0.0);
  EXPECT_DOUBLE_EQ(parse("config_version=1\nselection.threshold=1\n").threshold, 1.0);
}

TEST(Config, ExtractorFollowsMorphologyUnlessOverridden) {
  RunConfig c;
  EXPECT_EQ(c.extractor(Morphology::Plain).templates, TemplateSet::English);
  EXPECT_EQ(c.extractor(Morphology::Agglutinative).templates, TemplateSet::Agglutinative);
  c.templates = TemplateChoice::English;
  EXPECT_EQ(c.extractor(Morphology::Agglutinative).templates, TemplateSet::English);
}
