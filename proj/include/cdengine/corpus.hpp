#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdengine/graph.hpp"

namespace cdengine {

enum class DocKind : std::uint8_t { paper, patent };

std::optional<DocKind> parse_kind(std::string_view s);
std::string_view to_string(DocKind k);

struct DocumentRecord {
  std::string doc_id;
  DocKind kind = DocKind::paper;
  int year = 0;
  std::string field_area;
  std::string field_sub;
  std::optional<std::string> venue;
  std::optional<std::string> title;
  std::optional<std::string> abstract;
  std::vector<std::string> author_ids;
};

enum class FieldLevel { area, sub };

std::optional<FieldLevel> parse_field_level(std::string_view s);

inline const std::string& field_of(const DocumentRecord& d, FieldLevel level) {
  return level == FieldLevel::area ? d.field_area : d.field_sub;
}

struct ValidationReport {
  std::size_t documents = 0;
  std::size_t edges = 0;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
  std::size_t dangling_skipped = 0;
  // Edges whose cited document is newer than the citing one; retained.
  std::size_t chronology_violations = 0;
  std::size_t missing_venue = 0;
  std::size_t missing_title = 0;
  std::size_t missing_abstract = 0;
};

// field_sub -> field_area
using Taxonomy = std::map<std::string, std::string, std::less<>>;

Taxonomy load_taxonomy(const std::filesystem::path& path);

struct IngestOptions {
  bool skip_dangling = false;
  int min_year = 1900;
  int max_year = 2030;
  // When absent, field_area defaults to the record's own field_area (or field_sub).
  std::optional<Taxonomy> taxonomy;
};

// Immutable document metadata plus the citation graph over the same dense indices.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<DocumentRecord> docs, CitationGraph graph, ValidationReport report);

  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const std::vector<DocumentRecord>& docs() const noexcept { return docs_; }
  const DocumentRecord& doc(NodeId i) const { return docs_[i]; }
  const CitationGraph& graph() const noexcept { return graph_; }
  const ValidationReport& report() const noexcept { return report_; }
  std::optional<NodeId> find(std::string_view doc_id) const { return graph_.ids().find(doc_id); }

  int min_year() const { return graph_.min_year(); }
  int max_year() const { return graph_.max_year(); }

 private:
  std::vector<DocumentRecord> docs_;
  CitationGraph graph_;
  ValidationReport report_;
};

using IdEdge = std::pair<std::string, std::string>;

// Parses a nodes file (TSV, or JSON lines when the file ends in .jsonl/.json or
// its first record starts with '{').
std::vector<DocumentRecord> read_nodes(const std::filesystem::path& nodes_file,
                                       const IngestOptions& options = {});
std::vector<IdEdge> read_edges(const std::filesystem::path& edges_file);

Corpus build_corpus(std::vector<DocumentRecord> docs, const std::vector<IdEdge>& edges,
                    const IngestOptions& options = {});

Corpus ingest(const std::filesystem::path& nodes_file, const std::filesystem::path& edges_file,
              const IngestOptions& options = {});

struct FilterSpec {
  std::optional<std::set<std::string>> venues;
  std::optional<std::pair<int, int>> years;  // inclusive
  // Matched against either field_area or field_sub.
  std::optional<std::set<std::string>> fields;
  std::optional<DocKind> kind;
};

// Matching documents plus the edges whose endpoints both survive.
Corpus filter(const Corpus& corpus, const FilterSpec& spec);

// Binary cache: "CDC1" magic followed by a format version.
inline constexpr std::uint32_t kCacheVersion = 1;
std::string serialize(const Corpus& corpus);
Corpus deserialize(std::string_view bytes);
void save_cache(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_cache(const std::filesystem::path& path);

struct FieldYearRow {
  std::string field;
  int year = 0;
  std::size_t n_new_works = 0;
  double mean_refs_out = 0.0;
  double mean_authors = 0.0;
};

// One row per observed (field, year), sorted by field then year. Other modules
// append named metric columns aligned with rows; nullopt marks missing.
struct FieldYearTable {
  FieldLevel level = FieldLevel::sub;
  std::vector<FieldYearRow> rows;
  std::vector<std::string> column_order;
  std::map<std::string, std::vector<std::optional<double>>> columns;

  std::optional<std::size_t> find(std::string_view field, int year) const;
  void add_column(const std::string& name, std::vector<std::optional<double>> values);
};

FieldYearTable field_year_aggregates(const Corpus& corpus, FieldLevel level = FieldLevel::sub);

// Appends ln_new_focal, ln_new_past5, ln_new_past10: the log of new works in the
// focal year, and summed over the focal plus previous 4 and 9 years.
FieldYearTable growth_regressors(FieldYearTable table);

struct AuthorCareer {
  std::string author_id;
  int first_year = 0;
  std::vector<int> work_years;  // sorted

  // Number of the author's works published strictly before `year`.
  std::size_t works_before(int year) const;
};

struct TeamStats {
  std::optional<double> mean_career_age;
  std::optional<double> mean_prior_works;
  bool excluded = false;
};

struct CareerTable {
  std::map<std::string, AuthorCareer, std::less<>> authors;
  std::vector<TeamStats> team;  // per document, by dense index
};

CareerTable author_careers(const Corpus& corpus, int cap_years = 80);

}  // namespace cdengine
