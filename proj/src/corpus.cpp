#include "cdengine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "json.hpp"

#include "cdengine/error.hpp"
#include "cdengine/tsv.hpp"

namespace cdengine {

namespace {

const std::vector<std::string> kNodeHeader = {"doc_id", "kind",  "year",     "field_sub",
                                              "venue",  "title", "abstract", "author_ids"};

std::optional<std::string> optional_cell(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

std::vector<std::string> split_authors(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  for (auto part : split(s, ';')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

bool looks_like_jsonl(const std::filesystem::path& path, std::string_view text) {
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return true;
  auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && text[first] == '{';
}

void finish_record(DocumentRecord& d, const std::string& file, std::size_t line,
                   const IngestOptions& options) {
  if (d.doc_id.empty()) throw ParseError(file, line, "empty doc_id");
  if (d.year < options.min_year || d.year > options.max_year) {
    throw ParseError(file, line,
                     "year " + std::to_string(d.year) + " outside [" + std::to_string(options.min_year) +
                         ", " + std::to_string(options.max_year) + "]");
  }
  if (d.field_sub.empty()) throw ParseError(file, line, "empty field_sub");
  if (options.taxonomy) {
    auto it = options.taxonomy->find(d.field_sub);
    if (it == options.taxonomy->end()) {
      throw ParseError(file, line, "field_sub '" + d.field_sub + "' not in taxonomy");
    }
    d.field_area = it->second;
  } else if (d.field_area.empty()) {
    d.field_area = d.field_sub;
  }
}

std::vector<DocumentRecord> read_nodes_tsv(const std::filesystem::path& path, std::string_view text,
                                           const IngestOptions& options) {
  auto table = parse_tsv(text, path);
  if (table.header != kNodeHeader) {
    throw ParseError(path.string(), 1,
                     "nodes header must be: " + join(kNodeHeader, "\\t"));
  }
  std::vector<DocumentRecord> docs;
  docs.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    DocumentRecord d;
    d.doc_id = row[0];
    auto kind = parse_kind(row[1]);
    if (!kind) throw ParseError(path.string(), line, "bad kind '" + row[1] + "'");
    d.kind = *kind;
    auto year = parse_int(row[2]);
    if (!year) throw ParseError(path.string(), line, "bad year '" + row[2] + "'");
    d.year = static_cast<int>(*year);
    d.field_sub = row[3];
    d.venue = optional_cell(row[4]);
    d.title = optional_cell(row[5]);
    d.abstract = optional_cell(row[6]);
    d.author_ids = split_authors(row[7]);
    finish_record(d, path.string(), line, options);
    docs.push_back(std::move(d));
  }
  return docs;
}

std::optional<std::string> json_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) return it->dump();
  if (it->get_ref<const std::string&>().empty()) return std::nullopt;
  return it->get<std::string>();
}

std::vector<DocumentRecord> read_nodes_jsonl(const std::filesystem::path& path, std::string_view text,
                                             const IngestOptions& options) {
  std::vector<DocumentRecord> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(path.string(), line_no, "record is not an object");
    DocumentRecord d;
    try {
      d.doc_id = json_string(j, "doc_id").value_or("");
      auto kind = parse_kind(json_string(j, "kind").value_or("paper"));
      if (!kind) throw ParseError(path.string(), line_no, "bad kind");
      d.kind = *kind;
      auto y = j.find("year");
      if (y == j.end()) throw ParseError(path.string(), line_no, "missing year");
      if (y->is_number_integer()) {
        d.year = y->get<int>();
      } else {
        auto parsed = y->is_string() ? parse_int(y->get<std::string>()) : std::nullopt;
        if (!parsed) throw ParseError(path.string(), line_no, "bad year");
        d.year = static_cast<int>(*parsed);
      }
      d.field_sub = json_string(j, "field_sub").value_or("");
      d.field_area = json_string(j, "field_area").value_or("");
      d.venue = json_string(j, "venue");
      d.title = json_string(j, "title");
      d.abstract = json_string(j, "abstract");
      if (auto a = j.find("author_ids"); a != j.end() && !a->is_null()) {
        if (a->is_array()) {
          for (const auto& v : *a) d.author_ids.push_back(v.get<std::string>());
        } else if (a->is_string()) {
          d.author_ids = split_authors(a->get<std::string>());
        } else {
          throw ParseError(path.string(), line_no, "bad author_ids");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    finish_record(d, path.string(), line_no, options);
    docs.push_back(std::move(d));
  }
  return docs;
}

// Little-endian byte stream for the corpus cache.
class ByteWriter {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(std::string_view s) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void opt(const std::optional<std::string>& s) {
    pod<std::uint8_t>(s ? 1 : 0);
    if (s) str(*s);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    auto n = pod<std::uint32_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::optional<std::string> opt() {
    if (pod<std::uint8_t>() == 0) return std::nullopt;
    return str();
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw DataError("corpus cache truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::optional<DocKind> parse_kind(std::string_view s) {
  if (s == "paper") return DocKind::paper;
  if (s == "patent") return DocKind::patent;
  return std::nullopt;
}

std::string_view to_string(DocKind k) { return k == DocKind::paper ? "paper" : "patent"; }

std::optional<FieldLevel> parse_field_level(std::string_view s) {
  if (s == "area") return FieldLevel::area;
  if (s == "sub") return FieldLevel::sub;
  return std::nullopt;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  Taxonomy tax;
  auto text = read_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, '\t');
    if (cells.size() != 2) throw ParseError(path.string(), line_no, "taxonomy rows need 2 columns");
    if (!header_seen) {
      header_seen = true;
      if (cells[0] == "field_sub") continue;
    }
    auto [it, inserted] = tax.emplace(std::string(cells[0]), std::string(cells[1]));
    if (!inserted && it->second != cells[1]) {
      throw ParseError(path.string(), line_no, "field_sub '" + std::string(cells[0]) + "' maps to two areas");
    }
  }
  return tax;
}

Corpus::Corpus(std::vector<DocumentRecord> docs, CitationGraph graph, ValidationReport report)
    : docs_(std::move(docs)), graph_(std::move(graph)), report_(report) {}

std::vector<DocumentRecord> read_nodes(const std::filesystem::path& nodes_file,
                                       const IngestOptions& options) {
  if (!std::filesystem::exists(nodes_file)) throw DataError("nodes file not found: " + nodes_file.string());
  auto text = read_file(nodes_file);
  if (looks_like_jsonl(nodes_file, text)) return read_nodes_jsonl(nodes_file, text, options);
  return read_nodes_tsv(nodes_file, text, options);
}

std::vector<IdEdge> read_edges(const std::filesystem::path& edges_file) {
  if (!std::filesystem::exists(edges_file)) throw DataError("edges file not found: " + edges_file.string());
  auto table = read_tsv(edges_file);
  if (table.header != std::vector<std::string>{"citing_id", "cited_id"}) {
    throw ParseError(edges_file.string(), 1, "edges header must be: citing_id\\tcited_id");
  }
  std::vector<IdEdge> edges;
  edges.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    if (row[0].empty() || row[1].empty()) {
      throw ParseError(edges_file.string(), table.line_numbers[r], "empty doc_id in edge");
    }
    edges.emplace_back(std::move(row[0]), std::move(row[1]));
  }
  return edges;
}

Corpus build_corpus(std::vector<DocumentRecord> docs, const std::vector<IdEdge>& edges,
                    const IngestOptions& options) {
  auto ids = std::make_shared<IdMap>();
  std::vector<int> years;
  years.reserve(docs.size());
  ValidationReport report;
  for (auto& d : docs) {
    if (!ids->add(d.doc_id)) throw IntegrityError("duplicate doc_id '" + d.doc_id + "'");
    if (options.taxonomy) {
      auto it = options.taxonomy->find(d.field_sub);
      if (it == options.taxonomy->end()) throw IntegrityError("field_sub '" + d.field_sub + "' not in taxonomy");
      d.field_area = it->second;
    } else if (d.field_area.empty()) {
      d.field_area = d.field_sub;
    }
    years.push_back(d.year);
    report.missing_venue += d.venue ? 0 : 1;
    report.missing_title += d.title ? 0 : 1;
    report.missing_abstract += d.abstract ? 0 : 1;
  }

  std::vector<Edge> dense;
  dense.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto u = ids->find(edges[i].first);
    auto v = ids->find(edges[i].second);
    if (!u || !v) {
      if (options.skip_dangling) {
        ++report.dangling_skipped;
        continue;
      }
      throw IntegrityError("edge " + std::to_string(i + 1) + " (" + edges[i].first + " -> " +
                           edges[i].second + ") references undeclared doc_id '" +
                           (u ? edges[i].second : edges[i].first) + "'");
    }
    dense.emplace_back(*u, *v);
  }

  EdgeBuildStats stats;
  auto graph = CitationGraph::from_edges(std::move(years), std::move(dense), ids, &stats);
  report.documents = docs.size();
  report.edges = graph.edge_count();
  report.duplicate_edges = stats.duplicates;
  report.self_loops = stats.self_loops;
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    for (NodeId v : graph.references(static_cast<NodeId>(u))) {
      if (graph.year(v) > graph.year(static_cast<NodeId>(u))) ++report.chronology_violations;
    }
  }
  return Corpus(std::move(docs), std::move(graph), report);
}

Corpus ingest(const std::filesystem::path& nodes_file, const std::filesystem::path& edges_file,
              const IngestOptions& options) {
  auto docs = read_nodes(nodes_file, options);
  auto edges = read_edges(edges_file);
  return build_corpus(std::move(docs), edges, options);
}

Corpus filter(const Corpus& corpus, const FilterSpec& spec) {
  std::vector<DocumentRecord> kept;
  std::vector<std::int64_t> remap(corpus.size(), -1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    if (spec.venues && (!d.venue || !spec.venues->count(*d.venue))) continue;
    if (spec.years && (d.year < spec.years->first || d.year > spec.years->second)) continue;
    if (spec.fields && !spec.fields->count(d.field_area) && !spec.fields->count(d.field_sub)) continue;
    if (spec.kind && d.kind != *spec.kind) continue;
    remap[i] = static_cast<std::int64_t>(kept.size());
    kept.push_back(d);
  }
  if (kept.empty()) throw EmptyCorpusError("filter matched no documents");

  std::vector<IdEdge> edges;
  const auto& g = corpus.graph();
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (remap[u] < 0) continue;
    for (NodeId v : g.references(static_cast<NodeId>(u))) {
      if (remap[v] < 0) continue;
      edges.emplace_back(g.ids().name(static_cast<NodeId>(u)), g.ids().name(v));
    }
  }
  IngestOptions opts;
  opts.min_year = std::numeric_limits<int>::min();
  opts.max_year = std::numeric_limits<int>::max();
  return build_corpus(std::move(kept), edges, opts);
}

std::string serialize(const Corpus& corpus) {
  ByteWriter w;
  w.pod<char>('C');
  w.pod<char>('D');
  w.pod<char>('C');
  w.pod<char>('1');
  w.pod<std::uint32_t>(kCacheVersion);
  w.pod<std::uint64_t>(corpus.size());
  for (const auto& d : corpus.docs()) {
    w.str(d.doc_id);
    w.pod<std::uint8_t>(static_cast<std::uint8_t>(d.kind));
    w.pod<std::int32_t>(d.year);
    w.str(d.field_area);
    w.str(d.field_sub);
    w.opt(d.venue);
    w.opt(d.title);
    w.opt(d.abstract);
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(d.author_ids.size()));
    for (const auto& a : d.author_ids) w.str(a);
  }
  const auto& g = corpus.graph();
  w.pod<std::uint64_t>(g.edge_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.references(static_cast<NodeId>(u))) {
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(u));
      w.pod<std::uint32_t>(v);
    }
  }
  const auto& r = corpus.report();
  for (auto v : {r.duplicate_edges, r.self_loops, r.dangling_skipped, r.chronology_violations}) {
    w.pod<std::uint64_t>(v);
  }
  return w.take();
}

Corpus deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.raw(4) != "CDC1") throw DataError("not a corpus cache (bad magic)");
  auto version = r.pod<std::uint32_t>();
  if (version != kCacheVersion) {
    throw DataError("corpus cache version " + std::to_string(version) + " != supported " +
                    std::to_string(kCacheVersion));
  }
  auto n = r.pod<std::uint64_t>();
  std::vector<DocumentRecord> docs(n);
  for (auto& d : docs) {
    d.doc_id = r.str();
    d.kind = static_cast<DocKind>(r.pod<std::uint8_t>());
    d.year = r.pod<std::int32_t>();
    d.field_area = r.str();
    d.field_sub = r.str();
    d.venue = r.opt();
    d.title = r.opt();
    d.abstract = r.opt();
    auto na = r.pod<std::uint32_t>();
    d.author_ids.resize(na);
    for (auto& a : d.author_ids) a = r.str();
  }
  auto m = r.pod<std::uint64_t>();
  std::vector<IdEdge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    auto u = r.pod<std::uint32_t>();
    auto v = r.pod<std::uint32_t>();
    if (u >= n || v >= n) throw DataError("corpus cache edge out of range");
    edges.emplace_back(docs[u].doc_id, docs[v].doc_id);
  }
  ValidationReport saved;
  saved.duplicate_edges = r.pod<std::uint64_t>();
  saved.self_loops = r.pod<std::uint64_t>();
  saved.dangling_skipped = r.pod<std::uint64_t>();
  saved.chronology_violations = r.pod<std::uint64_t>();
  if (!r.done()) throw DataError("corpus cache has trailing bytes");

  IngestOptions opts;
  opts.min_year = std::numeric_limits<int>::min();
  opts.max_year = std::numeric_limits<int>::max();
  auto corpus = build_corpus(std::move(docs), edges, opts);
  auto report = corpus.report();
  report.duplicate_edges = saved.duplicate_edges;
  report.self_loops = saved.self_loops;
  report.dangling_skipped = saved.dangling_skipped;
  return Corpus(corpus.docs(), corpus.graph(), report);
}

void save_cache(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  auto bytes = serialize(corpus);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Corpus load_cache(const std::filesystem::path& path) { return deserialize(read_file(path)); }

std::optional<std::size_t> FieldYearTable::find(std::string_view field, int year) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), std::pair(field, year),
                             [](const FieldYearRow& r, const auto& key) {
                               int c = r.field.compare(key.first);
                               return c < 0 || (c == 0 && r.year < key.second);
                             });
  if (it == rows.end() || it->field != field || it->year != year) return std::nullopt;
  return static_cast<std::size_t>(it - rows.begin());
}

void FieldYearTable::add_column(const std::string& name, std::vector<std::optional<double>> values) {
  if (values.size() != rows.size()) throw std::invalid_argument("column length mismatch: " + name);
  if (!columns.count(name)) column_order.push_back(name);
  columns[name] = std::move(values);
}

FieldYearTable field_year_aggregates(const Corpus& corpus, FieldLevel level) {
  struct Acc {
    std::size_t n = 0;
    std::size_t refs = 0;
    std::size_t authors = 0;
  };
  std::map<std::pair<std::string, int>, Acc> acc;
  const auto& g = corpus.graph();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    auto& a = acc[{field_of(d, level), d.year}];
    ++a.n;
    a.refs += g.out_degree(static_cast<NodeId>(i));
    a.authors += d.author_ids.size();
  }
  FieldYearTable t;
  t.level = level;
  t.rows.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    t.rows.push_back({key.first, key.second, a.n, static_cast<double>(a.refs) / static_cast<double>(a.n),
                      static_cast<double>(a.authors) / static_cast<double>(a.n)});
  }
  return t;
}

FieldYearTable growth_regressors(FieldYearTable table) {
  std::map<std::pair<std::string, int>, std::size_t> counts;
  for (const auto& r : table.rows) counts[{r.field, r.year}] += r.n_new_works;
  auto window_sum = [&](const std::string& field, int year, int span) {
    std::size_t s = 0;
    for (auto it = counts.lower_bound({field, year - span + 1});
         it != counts.end() && it->first.first == field && it->first.second <= year; ++it) {
      s += it->second;
    }
    return s;
  };
  auto logged = [](std::size_t s) -> std::optional<double> {
    if (s == 0) return std::nullopt;
    return std::log(static_cast<double>(s));
  };
  std::vector<std::optional<double>> focal, past5, past10;
  for (const auto& r : table.rows) {
    focal.push_back(logged(window_sum(r.field, r.year, 1)));
    past5.push_back(logged(window_sum(r.field, r.year, 5)));
    past10.push_back(logged(window_sum(r.field, r.year, 10)));
  }
  table.add_column("ln_new_focal", std::move(focal));
  table.add_column("ln_new_past5", std::move(past5));
  table.add_column("ln_new_past10", std::move(past10));
  return table;
}

std::size_t AuthorCareer::works_before(int year) const {
  return static_cast<std::size_t>(std::lower_bound(work_years.begin(), work_years.end(), year) -
                                  work_years.begin());
}

CareerTable author_careers(const Corpus& corpus, int cap_years) {
  CareerTable out;
  for (const auto& d : corpus.docs()) {
    std::set<std::string_view> seen;
    for (const auto& a : d.author_ids) {
      if (!seen.insert(a).second) continue;
      auto it = out.authors.find(a);
      if (it == out.authors.end()) it = out.authors.emplace(a, AuthorCareer{a, d.year, {}}).first;
      it->second.work_years.push_back(d.year);
    }
  }
  for (auto& [id, c] : out.authors) {
    std::sort(c.work_years.begin(), c.work_years.end());
    c.first_year = c.work_years.front();
  }
  out.team.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    std::set<std::string_view> team(d.author_ids.begin(), d.author_ids.end());
    if (team.empty()) continue;
    double age = 0;
    double prior = 0;
    for (auto a : team) {
      const auto& c = out.authors.find(a)->second;
      age += d.year - c.first_year;
      prior += static_cast<double>(c.works_before(d.year));
    }
    auto& ts = out.team[i];
    ts.mean_career_age = age / static_cast<double>(team.size());
    ts.mean_prior_works = prior / static_cast<double>(team.size());
    ts.excluded = *ts.mean_career_age > cap_years;
  }
  return out;
}

}  // namespace cdengine
