#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdengine/corpus.hpp"

namespace cdengine {

using FieldYearKey = std::pair<std::string, int>;

struct FieldYearValue {
  std::string field;
  int year = 0;
  std::optional<double> value;
  std::size_t events = 0;  // citation events (or members) behind the value
};

// -sum p ln p / ln K over the positive counts; 0 when K = 1, nullopt when empty.
std::optional<double> normalized_entropy(std::span<const std::size_t> counts);

// Normalized entropy of the cited-target distribution of each (field, year) group.
std::vector<FieldYearValue> diversity_of_work_cited(const Corpus& corpus, FieldLevel level);

// Share of references sharing at least one author with the focal document.
std::optional<double> self_citation_ratio(const Corpus& corpus, NodeId focal);

struct AgeStats {
  double mean = 0.0;
  double dispersion = 0.0;  // population standard deviation
};

// Ages are citing year minus cited year and may be negative.
std::optional<AgeStats> age_of_work_cited(const Corpus& corpus, NodeId focal);

struct TopCitedOptions {
  double fraction = 0.01;
  // Count only citations made up to this year; whole horizon when unset.
  std::optional<int> as_of_year;
};

struct TopCitedSet {
  FieldLevel level = FieldLevel::area;
  std::map<std::string, std::vector<NodeId>> members_by_field;  // ranked, most cited first
  std::vector<bool> is_member;                                   // by dense index
};

// Per field of the cited document: the top ceil(fraction * n) of its n cited
// documents by citations received, ties to the lower dense index.
TopCitedSet top_cited_set(const Corpus& corpus, FieldLevel level, const TopCitedOptions& options = {});

// Fraction of each (field, year) group's citation events that land in `set`.
std::vector<FieldYearValue> top1pct_share(const Corpus& corpus, FieldLevel level, const TopCitedSet& set);
std::vector<FieldYearValue> top1pct_share(const Corpus& corpus, FieldLevel level,
                                          const TopCitedOptions& options = {});

// Most-cited documents of each (field, publication year) group, used for the
// title-similarity diversity measure.
std::map<FieldYearKey, std::vector<NodeId>> top_cited_by_field_year(const Corpus& corpus, FieldLevel level,
                                                                    const TopCitedOptions& options = {});

class TitleVectorizer {
 public:
  virtual ~TitleVectorizer() = default;
  // Empty result means the title has no usable tokens.
  virtual std::vector<double> embed(std::string_view title) const = 0;
};

// Deterministic hashed bag of lowercase alphanumeric tokens (FNV-1a buckets).
class HashedBagVectorizer final : public TitleVectorizer {
 public:
  explicit HashedBagVectorizer(std::size_t dimension = 256) : dimension_(dimension) {}
  std::vector<double> embed(std::string_view title) const override;

 private:
  std::size_t dimension_;
};

// Word -> vector table; a title embeds as the mean of its known tokens.
class EmbeddingTableVectorizer final : public TitleVectorizer {
 public:
  // Text format: token followed by whitespace-separated floats, one per line.
  static EmbeddingTableVectorizer load(const std::filesystem::path& path);
  EmbeddingTableVectorizer(std::unordered_map<std::string, std::vector<double>> table, std::size_t dimension);

  std::vector<double> embed(std::string_view title) const override;
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::unordered_map<std::string, std::vector<double>> table_;
  std::size_t dimension_ = 0;
};

std::vector<std::string> title_tokens(std::string_view title);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Population sd over mean of all pairwise cosine similarities.
// nullopt with fewer than 3 vectors or a zero mean.
std::optional<double> pairwise_cosine_cv(const std::vector<std::vector<double>>& vectors);

std::vector<FieldYearValue> semantic_diversity(const Corpus& corpus,
                                               const std::map<FieldYearKey, std::vector<NodeId>>& membership,
                                               const TitleVectorizer& vectorizer);

struct KnowledgeUseRow {
  NodeId node = 0;
  std::size_t n_refs = 0;
  std::optional<double> self_cite_ratio;
  std::optional<double> mean_age_cited;
  std::optional<double> sd_age_cited;
};

std::vector<KnowledgeUseRow> knowledge_use(const Corpus& corpus, unsigned threads = 1);

struct KnowledgeFieldYearRow {
  std::string field;
  int year = 0;
  std::optional<double> diversity_entropy;
  std::optional<double> top1pct_share;
  std::optional<double> semantic_diversity;
};

std::vector<KnowledgeFieldYearRow> knowledge_field_year(const Corpus& corpus, FieldLevel level,
                                                        const TitleVectorizer& vectorizer,
                                                        const TopCitedOptions& options = {});

}  // namespace cdengine
