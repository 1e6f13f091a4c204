#include <gtest/gtest.h>

#include <set>
#include <string>

#include "dlwsd/features.hpp"
#include "support/builders.hpp"
#include "support/synthetic.hpp"

using namespace dlwsd;
using namespace dlwsd::testing;

namespace {

using Strings = std::set<std::string>;

std::set<std::pair<FeatureKind, std::string>> as_pairs(const FeatureSet& fs) {
  std::set<std::pair<FeatureKind, std::string>> out;
  for (const auto& f : fs) out.insert({f.kind, f.payload});
  return out;
}

Instance the_church_burned() {
  return make_instance("e1", "church.n",
                       {tok("the", "the", Pos::Det), tok("church", "church", Pos::Noun),
                        tok("burned", "burn", Pos::Verb)},
                       1);
}

Instance elizaren_arduradunei() {
  return make_instance("b1", "eliza.n",
                       {agg("elizaren", "eliza", Pos::Noun, "GENITIVE", Number::Sing, true),
                        agg("arduradunei", "arduradun", Pos::Noun, "DATIVE", Number::Plur, true)},
                       0);
}

} // namespace

TEST(FeatureKind, EnumOrderMatchesNameOrder) {
  for (std::size_t i = 1; i < kFeatureKindNames.size(); ++i) EXPECT_LT(kFeatureKindNames[i - 1], kFeatureKindNames[i]);
  for (std::size_t i = 0; i < kFeatureKindNames.size(); ++i)
    EXPECT_EQ(parse_feature_kind(kFeatureKindNames[i]), static_cast<FeatureKind>(i));
  EXPECT_FALSE(parse_feature_kind("bogus"));
}

TEST(ExtractEnglish, ThreeTokenSentenceFullExpansion) {
  const auto fs = extract_english(the_church_burned());
  const std::set<std::pair<FeatureKind, std::string>> expected = {
      {FeatureKind::BigWf, "-1|the|church"},
      {FeatureKind::BigWf, "+1|church|burned"},
      {FeatureKind::BigLem, "-1|the|church"},
      {FeatureKind::BigLem, "+1|church|burn"},
      {FeatureKind::BigPos, "-1|DET|NOUN"},
      {FeatureKind::BigPos, "+1|NOUN|VERB"},
      {FeatureKind::TriWf, "-2|⟨B⟩|the|church"},
      {FeatureKind::TriWf, "-1|the|church|burned"},
      {FeatureKind::TriWf, "0|church|burned|⟨B⟩"},
      {FeatureKind::TriLem, "-2|⟨B⟩|the|church"},
      {FeatureKind::TriLem, "-1|the|church|burn"},
      {FeatureKind::TriLem, "0|church|burn|⟨B⟩"},
      {FeatureKind::TriPos, "-2|⟨B⟩|DET|NOUN"},
      {FeatureKind::TriPos, "-1|DET|NOUN|VERB"},
      {FeatureKind::TriPos, "0|NOUN|VERB|⟨B⟩"},
      {FeatureKind::WinLem, "burn"},
      {FeatureKind::GlobLem, "burn"},
  };
  EXPECT_EQ(as_pairs(fs), expected);
}

TEST(ExtractEnglish, SingleTokenHasOnlyPaddedNgrams) {
  const auto fs = extract_english(make_instance("e", "x.n", {tok("x", "x", Pos::Noun)}, 0));
  EXPECT_EQ(fs.size(), 15u);
  EXPECT_TRUE(fs.payloads(FeatureKind::WinLem).empty());
  EXPECT_TRUE(fs.payloads(FeatureKind::GlobLem).empty());
  EXPECT_TRUE(fs.contains({FeatureKind::BigWf, "-1|⟨B⟩|x"}));
  EXPECT_TRUE(fs.contains({FeatureKind::TriPos, "-2|⟨B⟩|⟨B⟩|NOUN"}));
}

TEST(ExtractEnglish, RepeatedLemmaInWindowEmittedOnce) {
  const auto fs = extract_english(make_instance(
      "e", "x.n", {tok("dogs", "dog", Pos::Noun), tok("x", "x", Pos::Noun), tok("dog", "dog", Pos::Noun)}, 1));
  EXPECT_EQ(fs.payloads(FeatureKind::WinLem), Strings{"dog"});
}

TEST(ExtractEnglish, WindowIsMeasuredInTokens) {
  std::vector<MorphToken> tokens;
  for (int i = 0; i < 6; ++i) tokens.push_back(tok("w" + std::to_string(i), "w" + std::to_string(i), Pos::Noun));
  tokens.push_back(tok("the", "the", Pos::Det));
  tokens.push_back(tok("x", "x", Pos::Noun));
  // target at 7: window covers tokens 3..6, token 6 is a determiner
  const auto fs = extract_english(make_instance("e", "x.n", tokens, 7));
  EXPECT_EQ(fs.payloads(FeatureKind::WinLem), (Strings{"w3", "w4", "w5"}));
  EXPECT_EQ(fs.payloads(FeatureKind::GlobLem), (Strings{"w0", "w1", "w2", "w3", "w4", "w5"}));

  TemplateConfig narrow;
  narrow.window_radius = 2;
  EXPECT_EQ(extract_english(make_instance("e", "x.n", tokens, 7), narrow).payloads(FeatureKind::WinLem),
            Strings{"w5"});
}

TEST(ExtractEnglish, GlobalContextSpansAllSentencesUnlessLimited) {
  auto in = make_instance("e", "x.n",
                          {tok("a", "a", Pos::Noun), tok("x", "x", Pos::Noun), tok("b", "b", Pos::Verb),
                           tok("c", "c", Pos::Adj)},
                          1);
  in.sentence_spans = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  in.target_sentence = 1;
  EXPECT_EQ(extract_english(in).payloads(FeatureKind::GlobLem), (Strings{"a", "b", "c"}));
  TemplateConfig cfg;
  cfg.english_global_sentence_radius = 1;
  EXPECT_EQ(extract_english(in, cfg).payloads(FeatureKind::GlobLem), (Strings{"a", "b"}));
}

TEST(ExtractEnglish, PropertiesOnGeneratedInstances) {
  SyntheticParams params;
  params.n_instances = 200;
  params.n_words = 4;
  const auto c = make_synthetic(params);
  for (const auto& in : c.instances) {
    const auto fs = extract_english(in);
    EXPECT_EQ(fs, extract_english(in));
    const auto win = fs.payloads(FeatureKind::WinLem);
    const auto glob = fs.payloads(FeatureKind::GlobLem);
    EXPECT_FALSE(win.contains(in.target().lemma));
    EXPECT_FALSE(glob.contains(in.target().lemma));
    for (const auto& w : win) EXPECT_TRUE(glob.contains(w));
    if (in.target_index == 0) {
      for (const auto& p : fs.payloads(FeatureKind::BigLem))
        if (p.starts_with("-1|")) {
          EXPECT_EQ(p, "-1|⟨B⟩|" + in.target().lemma);
        }
    }
  }
}

TEST(ExtractAgglutinative, WorkedExampleElizarenArduradunei) {
  const auto fs = extract_agglutinative(elizaren_arduradunei());
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf0), Strings{"elizaren"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf1), Strings{"eliza|SING+DET"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf2), Strings{"eliza|GENITIVE"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf3), Strings{"eliza|SING+DET|GENITIVE"});
  EXPECT_EQ(fs.payloads(FeatureKind::BigWf0), (Strings{"-1|⟨B⟩|elizaren", "+1|elizaren|arduradunei"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigWf1),
            (Strings{"eliza|GENITIVE", "GENITIVE|arduradun_PLUR+DET", "arduradun_PLUR+DET|DATIVE"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem0), (Strings{"-1|⟨B⟩|eliza", "+1|eliza|arduradun"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem1), (Strings{"eliza|GENITIVE", "GENITIVE|arduradun", "arduradun|DATIVE"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem2), (Strings{"eliza_GENITIVE", "arduradun_DATIVE"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigPos), (Strings{"NOUN|GENITIVE", "GENITIVE|NOUN", "NOUN|DATIVE"}));
  // two tokens cannot fill a trigram, so only the fused padded forms exist
  EXPECT_TRUE(fs.payloads(FeatureKind::TriWf1).empty());
  EXPECT_EQ(fs.payloads(FeatureKind::TriLem0),
            (Strings{"-2|⟨B⟩|⟨B⟩|eliza", "-1|⟨B⟩|eliza|arduradun", "0|eliza|arduradun|⟨B⟩"}));
  EXPECT_EQ(fs.payloads(FeatureKind::WinLem), Strings{"arduradun"});
}

TEST(ExtractAgglutinative, TrigramsChainThreeTokens) {
  auto in = make_instance("b", "x.n",
                          {agg("a1", "a", Pos::Noun, "ERG", {}, {}), agg("x1", "x", Pos::Noun, "GEN", Number::Sing, true),
                           agg("b1", "b", Pos::Verb, {}, Number::Plur, {})},
                          1);
  const auto fs = extract_agglutinative(in);
  EXPECT_EQ(fs.payloads(FeatureKind::TriWf0), (Strings{"-2|⟨B⟩|a1|x1", "-1|a1|x1|b1", "0|x1|b1|⟨B⟩"}));
  // chain [a, ERG, x_SING+DET, GEN, b_PLUR]; b has no case
  EXPECT_EQ(fs.payloads(FeatureKind::TriWf1), (Strings{"a|ERG", "ERG|x_SING+DET", "x_SING+DET|GEN", "GEN|b_PLUR"}));
  EXPECT_EQ(fs.payloads(FeatureKind::TriLem1), (Strings{"a|ERG", "ERG|x", "x|GEN", "GEN|b"}));
  EXPECT_EQ(fs.payloads(FeatureKind::TriLem2), (Strings{"a_ERG", "x_GEN", "b_∅"}));
  EXPECT_EQ(fs.payloads(FeatureKind::TriPos), (Strings{"NOUN|ERG", "ERG|NOUN", "NOUN|GEN", "GEN|VERB"}));
}

TEST(ExtractAgglutinative, AbsentTagsRenderAsEmptySlot) {
  auto in = make_instance("b", "x.n", {tok("xs", "x", Pos::Noun), tok("ys", "y", Pos::Verb)}, 0);
  const auto fs = extract_agglutinative(in);
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf1), Strings{"x|∅"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf2), Strings{"x|∅"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf3), Strings{"x|∅|∅"});
  EXPECT_EQ(fs.payloads(FeatureKind::BigWf1), Strings{"x|y_∅"});
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem1), Strings{"x|y"});
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem2), (Strings{"x_∅", "y_∅"}));
}

TEST(ExtractAgglutinative, EllipticTokenCarriesHeadInAdjacentSlot) {
  auto in = make_instance("b", "eliza.n",
                          {agg("elizakoa", "eliza", Pos::Noun, "GENITIVE", Number::Sing, true, true),
                           agg("etorri", "etorri", Pos::Verb, {}, {}, {})},
                          0);
  const auto fs = extract_agglutinative(in);
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf0), Strings{"elizakoa"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf1), Strings{"eliza|⟨ELLIP⟩|SING+DET"});
  EXPECT_EQ(fs.payloads(FeatureKind::UniWf2), Strings{"eliza|⟨ELLIP⟩|GENITIVE"});
  EXPECT_TRUE(fs.contains({FeatureKind::BigLem0, "+1|eliza|⟨ELLIP⟩|etorri"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigLem1), (Strings{"eliza|⟨ELLIP⟩", "⟨ELLIP⟩|GENITIVE", "GENITIVE|etorri"}));
  // word-form and POS templates are unaffected
  EXPECT_TRUE(fs.contains({FeatureKind::BigWf0, "+1|elizakoa|etorri"}));
  EXPECT_EQ(fs.payloads(FeatureKind::BigPos), (Strings{"NOUN|GENITIVE", "GENITIVE|VERB"}));
}

TEST(ExtractAgglutinative, GlobalContextIsTargetSentencePlusRadius) {
  std::vector<MorphToken> tokens;
  Instance in;
  for (int s = 0; s < 7; ++s) {
    const auto begin = tokens.size();
    tokens.push_back(tok("n" + std::to_string(s), "n" + std::to_string(s), Pos::Noun));
    if (s == 3) tokens.push_back(tok("x", "x", Pos::Noun));
    in.sentence_spans.push_back({begin, tokens.size()});
  }
  in.id = "g";
  in.target_word = "x.n";
  in.tokens = tokens;
  in.target_index = 4;
  in.target_sentence = 3;
  const auto fs = extract_agglutinative(in);
  EXPECT_EQ(fs.payloads(FeatureKind::GlobLem), (Strings{"n1", "n2", "n3", "n4", "n5"}));
  TemplateConfig cfg;
  cfg.global_sentence_radius = 0;
  EXPECT_EQ(extract_agglutinative(in, cfg).payloads(FeatureKind::GlobLem), Strings{"n3"});
}

TEST(EncodeFeature, Format) {
  EXPECT_EQ(encode_feature({FeatureKind::GlobLem, "burn"}), "glob_lem\tburn");
  EXPECT_EQ(decode_feature("big_lem\t-1|the|church"), (FeatureKey{FeatureKind::BigLem, "-1|the|church"}));
  EXPECT_THROW(decode_feature("nokind\tx"), Error);
  EXPECT_THROW(decode_feature("glob_lem"), Error);
}

TEST(EncodeFeature, InjectiveAndRoundTrips) {
  Rng rng(11);
  const std::string alphabet[] = {"a", "b", "|", " ", "_", "∅", "⟨B⟩", "+1", "glob_lem"};
  std::map<std::string, FeatureKey> seen;
  for (int i = 0; i < 3000; ++i) {
    FeatureKey f{static_cast<FeatureKind>(rng.below(static_cast<int>(kFeatureKindNames.size()))), ""};
    for (int j = rng.below(5); j >= 0; --j) f.payload += alphabet[rng.below(9)];
    const auto enc = encode_feature(f);
    EXPECT_EQ(decode_feature(enc), f);
    auto [it, inserted] = seen.emplace(enc, f);
    if (!inserted) {
      EXPECT_EQ(it->second, f);
    }
  }
}
