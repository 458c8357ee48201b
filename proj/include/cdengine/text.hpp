#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdengine/corpus.hpp"
#include "cdengine/knowledge.hpp"

namespace cdengine {

using Lemmatizer = std::function<std::string(std::string_view)>;

struct TokenPipelineConfig {
  std::set<std::string, std::less<>> stopwords;  // lowercase
  std::size_t min_len = 3;
  std::size_t max_len = 250;
  Lemmatizer lemmatizer;  // identity when empty
  std::map<std::string, std::string, std::less<>> pos_lexicon;  // lemma -> part of speech

  // Built-in English stopword list, identity lemmatizer, empty lexicon.
  static TokenPipelineConfig defaults();

  // One token per line; replaces the current list.
  void load_stopwords(const std::filesystem::path& path);
  // Tab-separated lemma, pos.
  void load_pos_lexicon(const std::filesystem::path& path);
  void validate() const;
};

const std::vector<std::string_view>& default_stopwords();

// Splits on whitespace and ASCII punctuation; drops stopwords, digit-only and
// punctuation-only tokens, and tokens outside [min_len, max_len] code points;
// then lemmatizes and lowercases.
std::vector<std::string> preprocess(std::string_view text, const TokenPipelineConfig& config);

enum class TextScope { title, abstract };

std::optional<TextScope> parse_scope(std::string_view s);

struct TextOptions {
  TextScope scope = TextScope::title;
  FieldLevel level = FieldLevel::area;
  // Paper abstracts before this year are not reliably recorded.
  int paper_abstract_min_year = 1992;
  // Abstract rows need at least this share of documents with an abstract.
  double abstract_coverage = 0.5;
};

// Token statistics of one (field, year) group.
struct FieldYearLexicon {
  std::string field;
  int year = 0;
  std::size_t documents = 0;
  std::size_t documents_with_text = 0;
  std::size_t total_tokens = 0;
  std::unordered_set<std::uint32_t> distinct_tokens;
  // Unordered within-text pairs over distinct positions, keyed (min << 32) | max,
  // with their instance counts; titles only.
  std::unordered_map<std::uint64_t, std::size_t> pair_counts;
  std::size_t pair_instances = 0;
  // Excluded by the abstract year / coverage rules.
  bool suppressed = false;
};

struct LexiconSet {
  std::vector<std::string> vocabulary;  // token id -> token
  std::vector<FieldYearLexicon> groups;  // sorted by field, year
};

LexiconSet build_lexicon(const Corpus& corpus, const TokenPipelineConfig& config, const TextOptions& options,
                         unsigned threads = 1);

// Distinct over total tokens per (field, year).
std::vector<FieldYearValue> type_token_ratio(const Corpus& corpus, const TokenPipelineConfig& config,
                                             const TextOptions& options, unsigned threads = 1);

enum class PairCountMode { distinct, instances };

// Share of a year's within-title word pairs never seen in the field's earlier years.
std::vector<FieldYearValue> word_pair_novelty(const LexiconSet& lexicon,
                                              PairCountMode mode = PairCountMode::distinct);
std::vector<FieldYearValue> word_pair_novelty(const Corpus& corpus, const TokenPipelineConfig& config,
                                              FieldLevel level, PairCountMode mode = PairCountMode::distinct,
                                              unsigned threads = 1);

struct YearRange {
  int first = 0;
  int last = 0;  // inclusive
};

std::vector<YearRange> decades(int min_year, int max_year);

struct VerbCount {
  std::string lemma;
  std::size_t count = 0;
  std::size_t rank = 0;  // 1-based
};

struct VerbTable {
  YearRange period;
  std::vector<VerbCount> top;
};

bool is_verb_tag(std::string_view pos);

// Most frequent lexicon-tagged verbs per period; ties ranked lexicographically.
std::vector<VerbTable> verb_frequency(const Corpus& corpus, const TokenPipelineConfig& config,
                                      const std::vector<YearRange>& periods, std::size_t top_n = 10,
                                      TextScope scope = TextScope::title);

}  // namespace cdengine
