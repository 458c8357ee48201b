#include "cdengine/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "cdengine/error.hpp"
#include "cdengine/parallel.hpp"
#include "cdengine/tsv.hpp"

namespace cdengine {

namespace {

std::map<FieldYearKey, std::vector<NodeId>> group_documents(const Corpus& corpus, FieldLevel level) {
  std::map<FieldYearKey, std::vector<NodeId>> groups;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    groups[{field_of(d, level), d.year}].push_back(static_cast<NodeId>(i));
  }
  return groups;
}

std::vector<std::size_t> citations_received(const Corpus& corpus, const TopCitedOptions& options) {
  const auto& g = corpus.graph();
  std::vector<std::size_t> counts(g.node_count(), 0);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    for (NodeId w : g.citers(static_cast<NodeId>(v))) {
      if (!options.as_of_year || g.year(w) <= *options.as_of_year) ++counts[v];
    }
  }
  return counts;
}

std::size_t top_size(std::size_t n, double fraction) {
  if (n == 0) return 0;
  auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

// Ranks nodes by citations received (descending), ties to the lower index, and keeps the top share.
std::vector<NodeId> top_of(std::vector<NodeId> nodes, const std::vector<std::size_t>& counts, double fraction) {
  std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  nodes.resize(top_size(nodes.size(), fraction));
  return nodes;
}

}  // namespace

std::optional<double> normalized_entropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  std::size_t k = 0;
  for (auto c : counts) {
    total += c;
    k += c > 0 ? 1 : 0;
  }
  if (total == 0) return std::nullopt;
  if (k == 1) return 0.0;
  // Equal positive counts: the maximum, exactly.
  const std::size_t first = *std::find_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == 0 || c == first; })) return 1.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(k));
}

std::vector<FieldYearValue> diversity_of_work_cited(const Corpus& corpus, FieldLevel level) {
  const auto& g = corpus.graph();
  std::vector<FieldYearValue> out;
  std::vector<NodeId> targets;
  std::vector<std::size_t> counts;
  for (const auto& [key, docs] : group_documents(corpus, level)) {
    targets.clear();
    for (NodeId d : docs) {
      auto refs = g.references(d);
      targets.insert(targets.end(), refs.begin(), refs.end());
    }
    std::sort(targets.begin(), targets.end());
    counts.clear();
    for (std::size_t i = 0; i < targets.size();) {
      std::size_t j = i;
      while (j < targets.size() && targets[j] == targets[i]) ++j;
      counts.push_back(j - i);
      i = j;
    }
    out.push_back({key.first, key.second, normalized_entropy(counts), targets.size()});
  }
  return out;
}

std::optional<double> self_citation_ratio(const Corpus& corpus, NodeId focal) {
  const auto& d = corpus.doc(focal);
  auto refs = corpus.graph().references(focal);
  if (refs.empty() || d.author_ids.empty()) return std::nullopt;
  const std::set<std::string_view> authors(d.author_ids.begin(), d.author_ids.end());
  std::size_t shared = 0;
  for (NodeId r : refs) {
    const auto& ra = corpus.doc(r).author_ids;
    if (std::any_of(ra.begin(), ra.end(), [&](const std::string& a) { return authors.count(a) > 0; })) {
      ++shared;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(refs.size());
}

std::optional<AgeStats> age_of_work_cited(const Corpus& corpus, NodeId focal) {
  const auto& g = corpus.graph();
  auto refs = g.references(focal);
  if (refs.empty()) return std::nullopt;
  const double n = static_cast<double>(refs.size());
  double mean = 0.0;
  for (NodeId r : refs) mean += g.year(focal) - g.year(r);
  mean /= n;
  double ss = 0.0;
  for (NodeId r : refs) {
    const double dev = (g.year(focal) - g.year(r)) - mean;
    ss += dev * dev;
  }
  return AgeStats{mean, std::sqrt(ss / n)};
}

TopCitedSet top_cited_set(const Corpus& corpus, FieldLevel level, const TopCitedOptions& options) {
  const auto counts = citations_received(corpus, options);
  std::map<std::string, std::vector<NodeId>> cited_by_field;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (counts[v] == 0) continue;
    cited_by_field[field_of(corpus.doc(static_cast<NodeId>(v)), level)].push_back(static_cast<NodeId>(v));
  }
  TopCitedSet set;
  set.level = level;
  set.is_member.assign(corpus.size(), false);
  for (auto& [field, nodes] : cited_by_field) {
    auto top = top_of(std::move(nodes), counts, options.fraction);
    for (NodeId v : top) set.is_member[v] = true;
    set.members_by_field.emplace(field, std::move(top));
  }
  return set;
}

std::vector<FieldYearValue> top1pct_share(const Corpus& corpus, FieldLevel level, const TopCitedSet& set) {
  const auto& g = corpus.graph();
  std::vector<FieldYearValue> out;
  for (const auto& [key, docs] : group_documents(corpus, level)) {
    std::size_t total = 0;
    std::size_t hits = 0;
    for (NodeId d : docs) {
      for (NodeId r : g.references(d)) {
        ++total;
        hits += set.is_member[r] ? 1 : 0;
      }
    }
    std::optional<double> share;
    if (total) share = static_cast<double>(hits) / static_cast<double>(total);
    out.push_back({key.first, key.second, share, total});
  }
  return out;
}

std::vector<FieldYearValue> top1pct_share(const Corpus& corpus, FieldLevel level,
                                          const TopCitedOptions& options) {
  return top1pct_share(corpus, level, top_cited_set(corpus, level, options));
}

std::map<FieldYearKey, std::vector<NodeId>> top_cited_by_field_year(const Corpus& corpus, FieldLevel level,
                                                                    const TopCitedOptions& options) {
  const auto counts = citations_received(corpus, options);
  std::map<FieldYearKey, std::vector<NodeId>> cited;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (counts[v] == 0) continue;
    const auto& d = corpus.doc(static_cast<NodeId>(v));
    cited[{field_of(d, level), d.year}].push_back(static_cast<NodeId>(v));
  }
  for (auto& [key, nodes] : cited) nodes = top_of(std::move(nodes), counts, options.fraction);
  return cited;
}

std::vector<std::string> title_tokens(std::string_view title) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : title) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<double> HashedBagVectorizer::embed(std::string_view title) const {
  auto tokens = title_tokens(title);
  if (tokens.empty() || dimension_ == 0) return {};
  std::vector<double> v(dimension_, 0.0);
  for (const auto& t : tokens) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    v[h % dimension_] += 1.0;
  }
  return v;
}

EmbeddingTableVectorizer::EmbeddingTableVectorizer(std::unordered_map<std::string, std::vector<double>> table,
                                                   std::size_t dimension)
    : table_(std::move(table)), dimension_(dimension) {}

EmbeddingTableVectorizer EmbeddingTableVectorizer::load(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::unordered_map<std::string, std::vector<double>> table;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<double> v;
    std::string cell;
    while (ls >> cell) {
      auto x = parse_double(cell);
      if (!x) throw ParseError(path.string(), line_no, "bad float '" + cell + "'");
      v.push_back(*x);
    }
    if (v.empty()) continue;
    // word2vec text header: "<count> <dim>"
    if (line_no == 1 && v.size() == 1 && parse_int(token) && parse_int(cell)) continue;
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw ParseError(path.string(), line_no, "inconsistent embedding dimension");
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    table.emplace(std::move(token), std::move(v));
  }
  if (table.empty()) throw ConfigError("embedding table " + path.string() + " is empty");
  return EmbeddingTableVectorizer(std::move(table), dim);
}

std::vector<double> EmbeddingTableVectorizer::embed(std::string_view title) const {
  std::vector<double> v(dimension_, 0.0);
  std::size_t used = 0;
  for (const auto& t : title_tokens(title)) {
    auto it = table_.find(t);
    if (it == table_.end()) continue;
    for (std::size_t k = 0; k < dimension_; ++k) v[k] += it->second[k];
    ++used;
  }
  if (used == 0) return {};
  for (auto& x : v) x /= static_cast<double>(used);
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::optional<double> pairwise_cosine_cv(const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() < 3) return std::nullopt;
  std::vector<double> sims;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) sims.push_back(cosine_similarity(vectors[i], vectors[j]));
  }
  double mean = 0;
  for (double s : sims) mean += s;
  mean /= static_cast<double>(sims.size());
  if (mean == 0.0) return std::nullopt;
  double ss = 0;
  for (double s : sims) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(sims.size())) / mean;
}

std::vector<FieldYearValue> semantic_diversity(const Corpus& corpus,
                                               const std::map<FieldYearKey, std::vector<NodeId>>& membership,
                                               const TitleVectorizer& vectorizer) {
  std::vector<FieldYearValue> out;
  for (const auto& [key, members] : membership) {
    std::vector<std::vector<double>> vectors;
    for (NodeId m : members) {
      const auto& title = corpus.doc(m).title;
      if (!title) continue;
      auto v = vectorizer.embed(*title);
      if (v.empty() || std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) continue;
      vectors.push_back(std::move(v));
    }
    out.push_back({key.first, key.second, pairwise_cosine_cv(vectors), vectors.size()});
  }
  return out;
}

std::vector<KnowledgeUseRow> knowledge_use(const Corpus& corpus, unsigned threads) {
  std::vector<KnowledgeUseRow> rows(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    auto node = static_cast<NodeId>(i);
    auto& r = rows[i];
    r.node = node;
    r.n_refs = corpus.graph().out_degree(node);
    r.self_cite_ratio = self_citation_ratio(corpus, node);
    if (auto age = age_of_work_cited(corpus, node)) {
      r.mean_age_cited = age->mean;
      r.sd_age_cited = age->dispersion;
    }
  });
  return rows;
}

std::vector<KnowledgeFieldYearRow> knowledge_field_year(const Corpus& corpus, FieldLevel level,
                                                        const TitleVectorizer& vectorizer,
                                                        const TopCitedOptions& options) {
  auto diversity = diversity_of_work_cited(corpus, level);
  auto share = top1pct_share(corpus, level, options);
  auto semantic = semantic_diversity(corpus, top_cited_by_field_year(corpus, level, options), vectorizer);
  std::map<FieldYearKey, std::optional<double>> sem;
  for (auto& s : semantic) sem[{s.field, s.year}] = s.value;

  std::vector<KnowledgeFieldYearRow> out;
  for (std::size_t i = 0; i < diversity.size(); ++i) {
    KnowledgeFieldYearRow r;
    r.field = diversity[i].field;
    r.year = diversity[i].year;
    r.diversity_entropy = diversity[i].value;
    r.top1pct_share = share[i].value;
    if (auto it = sem.find({r.field, r.year}); it != sem.end()) r.semantic_diversity = it->second;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cdengine
