#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cdengine/corpus.hpp"
#include "cdengine/graph.hpp"

namespace fixtures {

using namespace cdengine;

inline CitationGraph graph(std::vector<int> years, std::vector<Edge> edges) {
  auto ids = make_sequential_ids(years.size());
  return CitationGraph::from_edges(std::move(years), std::move(edges), ids);
}

inline DocumentRecord doc(std::string id, int year, std::string field_sub = "F",
                          std::vector<std::string> authors = {}) {
  DocumentRecord d;
  d.doc_id = std::move(id);
  d.year = year;
  d.field_sub = field_sub;
  d.field_area = field_sub;
  d.author_ids = std::move(authors);
  return d;
}

inline DocumentRecord titled(std::string id, int year, std::string field, std::string title) {
  auto d = doc(std::move(id), year, std::move(field));
  d.title = std::move(title);
  return d;
}

inline Corpus corpus(std::vector<DocumentRecord> docs, const std::vector<IdEdge>& edges) {
  return build_corpus(std::move(docs), edges);
}

struct RandomGraph {
  std::vector<int> years;
  std::vector<Edge> edges;
  CitationGraph g;
};

// n <= 30 nodes, edge probability in [0.1, 0.4], years in [2000, 2010].
// Edges go in either direction so chronology violations appear too.
inline RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_n = 30) {
  RandomGraph r;
  std::uniform_int_distribution<std::size_t> nd(2, max_n);
  std::uniform_real_distribution<double> pd(0.1, 0.4);
  std::uniform_int_distribution<int> yd(2000, 2010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = nd(rng);
  const double p = pd(rng);
  for (std::size_t i = 0; i < n; ++i) r.years.push_back(yd(rng));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && u(rng) < p) r.edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
  }
  r.g = graph(r.years, r.edges);
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cdengine_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline const char* kNodesHeader = "doc_id\tkind\tyear\tfield_sub\tvenue\ttitle\tabstract\tauthor_ids\n";

}  // namespace fixtures
