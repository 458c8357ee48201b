#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdengine/corpus.hpp"

namespace cdengine {

inline constexpr const char* kVersion = "0.1.0";

// Options shared by every subcommand; unset paths stay empty.
struct RunConfig {
  std::string command;
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path taxonomy;
  std::filesystem::path out = ".";
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0: all cores
  std::string window = "5";
  bool include_same_year = true;
  std::string j_rule = "at_least:1";
  bool no_k = false;
  std::string normalize;  // "", "paper", "fy"
  std::string field_level = "area";
  int replicas = 10;
  int swap_multiplier = 100;
  double subsample = 1.0;
  std::string scope = "title";
  std::filesystem::path stopwords;
  std::filesystem::path pos_lexicon;
  std::filesystem::path embeddings;
  std::filesystem::path spec;

  // Canonical JSON of everything that can change outputs (threads excluded).
  std::string canonical_json() const;
  std::string config_hash() const;
};

// Exit codes: 0 success, 1 usage error, 2 data error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

struct ReportRow {
  std::string field_area;
  int year = 0;
  std::string metric;
  std::optional<double> mean;  // undefined inputs excluded
  std::size_t n = 0;
};

struct CrossFieldRow {
  int year = 0;
  std::string metric;
  double mean_of_field_means = 0.0;
  std::size_t fields = 0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<CrossFieldRow> overall;
  std::vector<std::string> sources;
};

// Per-(field_area, year) means of every metric column found in prior outputs.
// `corpus` resolves doc ids; without it, files must carry year and field_sub.
Report build_report(const std::filesystem::path& output_dir, const Corpus* corpus,
                    const std::optional<Taxonomy>& taxonomy);

}  // namespace cdengine
