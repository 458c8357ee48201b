#include <gtest/gtest.h>

#include <random>

#include "cdengine/error.hpp"
#include "cdengine/text.hpp"
#include "fixtures.hpp"

using namespace cdengine;
using fixtures::titled;

namespace {

using Tokens = std::vector<std::string>;

std::string join_tokens(const Tokens& t) {
  std::string s;
  for (const auto& x : t) s += (s.empty() ? "" : " ") + x;
  return s;
}

Corpus six_titles() {
  return build_corpus({titled("t1", 2000, "F", "Graph model"), titled("t2", 2000, "F", "graph network"),
                       titled("t3", 2001, "F", "graph MODEL"), titled("t4", 2001, "F", "network theory"),
                       titled("t5", 2002, "F", "graph, network: theory"), titled("t6", 2002, "F", "model model model")},
                      {});
}

std::optional<double> value_at(const std::vector<FieldYearValue>& v, int year) {
  for (const auto& x : v)
    if (x.year == year) return x.value;
  ADD_FAILURE() << "no row for " << year;
  return std::nullopt;
}

}  // namespace

TEST(Preprocess, Examples) {
  auto cfg = TokenPipelineConfig::defaults();
  EXPECT_EQ(preprocess("The Structure of DNA", cfg), (Tokens{"structure", "dna"}));
  EXPECT_TRUE(preprocess("A1 7 !!", cfg).empty());
  std::string long_token(251, 'x');
  EXPECT_TRUE(preprocess(long_token, cfg).empty());
  EXPECT_EQ(preprocess(std::string(250, 'x'), cfg).size(), 1u);
  EXPECT_EQ(preprocess("1984 and 2001: x-ray", cfg), (Tokens{"ray"}));
  EXPECT_EQ(preprocess("caf\xC3\xA9 \xC3\xA9t\xC3\xA9", cfg), (Tokens{"caf\xC3\xA9", "\xC3\xA9t\xC3\xA9"}));
}

TEST(Preprocess, CaseInsensitiveStopwordsAndLemmatizer) {
  auto cfg = TokenPipelineConfig::defaults();
  EXPECT_EQ(preprocess("THE Between WITHIN cells", cfg), (Tokens{"cells"}));
  cfg.lemmatizer = [](std::string_view w) {
    std::string s(w);
    if (s.size() > 3 && (s.back() == 's' || s.back() == 'S')) s.pop_back();
    return s;
  };
  EXPECT_EQ(preprocess("Measures of CELLS", cfg), (Tokens{"measure", "cell"}));
}

TEST(Preprocess, StopwordFile) {
  fixtures::TempDir dir;
  auto p = dir.write("stop.txt", "Graph\n# comment\nmodel\n");
  auto cfg = TokenPipelineConfig::defaults();
  cfg.load_stopwords(p);
  EXPECT_EQ(preprocess("graph model of theory", cfg), (Tokens{"theory"}));
}

TEST(Preprocess, IdempotentOnRandomStrings) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> pieces = {"the", "and", "Of", "a", "x", "ab", "abc", "Graph", "NETWORKS", "42",
                                           "1999", "!!", "...", "-", "'", "\xC3\xA9t\xC3\xA9", "na\xC3\xAFve", "q7",
                                           "dna", " ", "  ", "\t", ",", "(", ")", "under", "model-based"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 25);
  std::uniform_int_distribution<int> sep(0, 3);
  auto cfg = TokenPipelineConfig::defaults();
  for (int t = 0; t < 1000; ++t) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) {
      s += pieces[pick(rng)];
      if (sep(rng) == 0) s += ' ';
    }
    auto once = preprocess(s, cfg);
    ASSERT_EQ(preprocess(join_tokens(once), cfg), once) << s;
  }
}

TEST(TypeToken, HandCounts) {
  auto c = six_titles();
  auto cfg = TokenPipelineConfig::defaults();
  auto ttr = type_token_ratio(c, cfg, TextOptions{});
  EXPECT_EQ(value_at(ttr, 2000), 3.0 / 4.0);
  EXPECT_EQ(value_at(ttr, 2001), 1.0);
  EXPECT_EQ(value_at(ttr, 2002), 4.0 / 6.0);
}

TEST(TypeToken, SmallCasesAndMissing) {
  auto cfg = TokenPipelineConfig::defaults();
  auto c = build_corpus({titled("a", 2000, "F", "cat cat dog"), titled("b", 2001, "F", "cat dog eel"),
                         titled("c", 2002, "F", "of an")},
                        {});
  auto ttr = type_token_ratio(c, cfg, TextOptions{});
  EXPECT_EQ(value_at(ttr, 2000), 2.0 / 3.0);
  EXPECT_EQ(value_at(ttr, 2001), 1.0);
  EXPECT_FALSE(value_at(ttr, 2002).has_value());
}

TEST(TypeToken, AbstractRules) {
  auto cfg = TokenPipelineConfig::defaults();
  std::vector<DocumentRecord> docs;
  auto add = [&](const char* id, int year, const char* abs) {
    auto d = fixtures::doc(id, year, "F");
    if (abs) d.abstract = abs;
    docs.push_back(d);
  };
  add("old", 1991, "early abstract text");
  add("n1", 1995, "alpha beta");
  add("n2", 1995, nullptr);
  add("m1", 1996, "alpha beta");
  add("m2", 1996, nullptr);
  add("m3", 1996, nullptr);
  auto pat = fixtures::doc("pat", 1980, "F");
  pat.kind = DocKind::patent;
  pat.abstract = "gamma delta";
  docs.push_back(pat);
  TextOptions opts;
  opts.scope = TextScope::abstract;
  auto ttr = type_token_ratio(build_corpus(docs, {}), cfg, opts);
  ASSERT_EQ(ttr.size(), 3u);  // 1980 (patent), 1995, 1996; 1991 paper excluded
  EXPECT_EQ(value_at(ttr, 1980), 1.0);
  EXPECT_EQ(value_at(ttr, 1995), 1.0);
  EXPECT_FALSE(value_at(ttr, 1996).has_value());  // 1 of 3 with abstracts
}

TEST(PairNovelty, HandSets) {
  auto c = six_titles();
  auto cfg = TokenPipelineConfig::defaults();
  auto nov = word_pair_novelty(c, cfg, FieldLevel::area);
  EXPECT_EQ(value_at(nov, 2000), 1.0);
  EXPECT_EQ(value_at(nov, 2001), 0.5);
  EXPECT_EQ(value_at(nov, 2002), 0.5);
  auto inst = word_pair_novelty(c, cfg, FieldLevel::area, PairCountMode::instances);
  EXPECT_EQ(value_at(inst, 2002), 4.0 / 6.0);
}

TEST(PairNovelty, SpecCasesAndMissing) {
  auto cfg = TokenPipelineConfig::defaults();
  auto c = build_corpus({titled("a", 1, "F", "aaa bbb"), titled("b", 1, "F", "aaa ccc"),
                         titled("c", 2, "F", "aaa bbb"), titled("d", 2, "F", "bbb ccc"),
                         titled("e", 3, "F", "aaa ccc bbb"), titled("f", 4, "F", "single"),
                         titled("g", 3, "G", "aaa bbb")},
                        {});
  auto nov = word_pair_novelty(c, cfg, FieldLevel::area);
  std::vector<FieldYearValue> f;
  for (auto& v : nov)
    if (v.field == "F") f.push_back(v);
  EXPECT_EQ(value_at(f, 1), 1.0);
  EXPECT_EQ(value_at(f, 2), 0.5);
  EXPECT_EQ(value_at(f, 3), 0.0);
  EXPECT_FALSE(value_at(f, 4).has_value());
  for (auto& v : nov)
    if (v.field == "G") EXPECT_EQ(v.value, 1.0);
}

TEST(PairNovelty, BoundedAndDeterministic) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa"};
  std::uniform_int_distribution<std::size_t> w(0, words.size() - 1), len(1, 5);
  std::uniform_int_distribution<int> yr(1990, 1999);
  std::vector<DocumentRecord> docs;
  for (int i = 0; i < 200; ++i) {
    std::string t;
    for (std::size_t k = len(rng); k > 0; --k) t += words[w(rng)] + " ";
    docs.push_back(titled("d" + std::to_string(i), yr(rng), i % 2 ? "F" : "G", t));
  }
  auto c = build_corpus(docs, {});
  auto cfg = TokenPipelineConfig::defaults();
  auto a = word_pair_novelty(c, cfg, FieldLevel::area, PairCountMode::distinct, 1);
  auto b = word_pair_novelty(c, cfg, FieldLevel::area, PairCountMode::distinct, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    if (a[i].value) {
      EXPECT_GE(*a[i].value, 0.0);
      EXPECT_LE(*a[i].value, 1.0);
    }
  }
  for (const auto& v : type_token_ratio(c, cfg, TextOptions{})) {
    ASSERT_TRUE(v.value);
    EXPECT_GT(*v.value, 0.0);
    EXPECT_LE(*v.value, 1.0);
  }
}

TEST(Verbs, RankingTiesAndLexicon) {
  auto cfg = TokenPipelineConfig::defaults();
  cfg.pos_lexicon = {{"measure", "VERB"}, {"improve", "verb"}, {"form", "VB"}, {"make", "v"}, {"cell", "NOUN"}};
  auto c = build_corpus({titled("a", 1995, "F", "measure cell measure"), titled("b", 1996, "F", "measure improve"),
                         titled("c", 2005, "F", "make form cell"), titled("d", 2006, "F", "form make unknown")},
                        {});
  auto tables = verb_frequency(c, cfg, decades(1995, 2006));
  ASSERT_EQ(tables.size(), 2u);
  EXPECT_EQ(tables[0].period.first, 1990);
  ASSERT_EQ(tables[0].top.size(), 2u);
  EXPECT_EQ(tables[0].top[0].lemma, "measure");
  EXPECT_EQ(tables[0].top[0].count, 3u);
  EXPECT_EQ(tables[0].top[1].lemma, "improve");
  EXPECT_EQ(tables[0].top[1].rank, 2u);
  ASSERT_EQ(tables[1].top.size(), 2u);
  EXPECT_EQ(tables[1].top[0].lemma, "form");
  EXPECT_EQ(tables[1].top[1].lemma, "make");
  EXPECT_EQ(verb_frequency(c, cfg, decades(1995, 2006), 1)[1].top.size(), 1u);
}

TEST(Verbs, EmptyLexiconIsConfigError) {
  auto cfg = TokenPipelineConfig::defaults();
  auto c = build_corpus({titled("a", 1995, "F", "measure")}, {});
  EXPECT_THROW(verb_frequency(c, cfg, decades(1990, 1999)), ConfigError);
}

TEST(Verbs, LexiconFile) {
  fixtures::TempDir dir;
  auto p = dir.write("lex.tsv", "lemma\tpos\nMeasure\tVERB\ncell\tNOUN\n");
  auto cfg = TokenPipelineConfig::defaults();
  cfg.load_pos_lexicon(p);
  EXPECT_EQ(cfg.pos_lexicon.at("measure"), "VERB");
  EXPECT_EQ(cfg.pos_lexicon.size(), 2u);
}
