#include "cdengine/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdengine/disruption.hpp"
#include "cdengine/error.hpp"
#include "cdengine/knowledge.hpp"
#include "cdengine/normalize.hpp"
#include "cdengine/nullmodel.hpp"
#include "cdengine/parallel.hpp"
#include "cdengine/stats.hpp"
#include "cdengine/text.hpp"
#include "cdengine/tsv.hpp"

namespace cdengine {

namespace fs = std::filesystem;
using nlohmann::json;

std::string RunConfig::canonical_json() const {
  json j;
  j["command"] = command;
  j["nodes"] = nodes.string();
  j["edges"] = edges.string();
  j["taxonomy"] = taxonomy.string();
  j["seed"] = seed;
  j["window"] = window;
  j["include_same_year"] = include_same_year;
  j["j_rule"] = j_rule;
  j["no_k"] = no_k;
  j["normalize"] = normalize;
  j["field_level"] = field_level;
  j["replicas"] = replicas;
  j["swap_multiplier"] = swap_multiplier;
  j["subsample"] = subsample;
  j["scope"] = scope;
  j["stopwords"] = stopwords.string();
  j["pos_lexicon"] = pos_lexicon.string();
  j["embeddings"] = embeddings.string();
  j["spec"] = spec.string();
  return j.dump();
}

std::string RunConfig::config_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects written files for the manifest.
class OutputSet {
 public:
  explicit OutputSet(const RunConfig& cfg) : cfg_(cfg) { fs::create_directories(cfg.out); }

  void write(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows, std::vector<std::string> extra_comments = {}) {
    std::vector<std::string> comments = {" cdengine " + std::string(kVersion) + " command=" + cfg_.command,
                                         " config_hash=" + cfg_.config_hash(),
                                         " seed=" + std::to_string(cfg_.seed)};
    for (auto& c : extra_comments) comments.push_back(" " + c);
    write_tsv(cfg_.out / name, comments, header, rows);
    files_[name] = rows.size();
  }

  void note(const std::string& key, json value) { notes_[key] = std::move(value); }
  void record_binary(const std::string& name, std::size_t records) { files_[name] = records; }

  void finish() const {
    json m;
    m["command"] = cfg_.command;
    m["version"] = kVersion;
    m["seed"] = cfg_.seed;
    m["config"] = json::parse(cfg_.canonical_json());
    m["config_hash"] = cfg_.config_hash();
    m["outputs"] = json::object();
    for (const auto& [name, rows] : files_) m["outputs"][name] = rows;
    if (!notes_.empty()) m["notes"] = notes_;
    std::ofstream out(cfg_.out / ("manifest_" + cfg_.command + ".json"), std::ios::trunc);
    out << m.dump(2) << '\n';
  }

 private:
  const RunConfig& cfg_;
  std::map<std::string, std::size_t> files_;
  json notes_ = json::object();
};

unsigned threads_of(const RunConfig& cfg) { return cfg.threads ? cfg.threads : default_threads(); }

std::optional<Taxonomy> taxonomy_of(const RunConfig& cfg) {
  if (cfg.taxonomy.empty()) return std::nullopt;
  if (!fs::exists(cfg.taxonomy)) throw DataError("taxonomy file not found: " + cfg.taxonomy.string());
  return load_taxonomy(cfg.taxonomy);
}

Corpus load_corpus(const RunConfig& cfg) {
  if (cfg.nodes.empty()) throw UsageError("--nodes is required");
  if (cfg.nodes.extension() == ".cdc") {
    if (!fs::exists(cfg.nodes)) throw DataError("corpus cache not found: " + cfg.nodes.string());
    return load_cache(cfg.nodes);
  }
  if (cfg.edges.empty()) throw UsageError("--edges is required with a nodes file");
  IngestOptions opts;
  opts.taxonomy = taxonomy_of(cfg);
  return ingest(cfg.nodes, cfg.edges, opts);
}

FieldLevel field_level_of(const RunConfig& cfg) {
  auto l = parse_field_level(cfg.field_level);
  if (!l) throw UsageError("--field-level must be area or sub");
  return *l;
}

DisruptionConfig disruption_of(const RunConfig& cfg) {
  DisruptionConfig c;
  if (cfg.window == "all" || cfg.window == "ALL") {
    c.window.reset();
  } else {
    auto w = parse_int(cfg.window);
    if (!w || *w < 0) throw UsageError("--window must be a nonnegative integer or 'all'");
    c.window = static_cast<int>(*w);
  }
  c.include_same_year = cfg.include_same_year;
  auto rule = JRule::parse(cfg.j_rule);
  if (!rule) throw UsageError("--j-rule must be at_least:<l> (l >= 1) or all");
  c.j_rule = *rule;
  c.include_k_in_denominator = !cfg.no_k;
  return c;
}

RewireConfig rewire_of(const RunConfig& cfg) {
  RewireConfig r;
  r.replicas = cfg.replicas;
  r.swap_multiplier = cfg.swap_multiplier;
  r.seed = cfg.seed;
  r.subsample_fraction = cfg.subsample;
  r.validate();
  return r;
}

std::string count_str(std::size_t v) { return std::to_string(v); }

std::vector<std::string> score_cells(const Corpus& corpus, const DisruptionScore& s) {
  const auto& d = corpus.doc(s.node);
  return {d.doc_id,
          std::to_string(d.year),
          d.field_sub,
          count_str(s.counts.n_i),
          count_str(s.counts.n_j),
          count_str(s.counts.n_k),
          count_str(s.counts.n_b),
          format_optional(s.value)};
}

const std::vector<std::string> kScoreHeader = {"doc_id", "year", "field_sub", "N_i", "N_j", "N_k", "N_b", "cd_value"};

void write_validation(const Corpus& corpus, OutputSet& out, std::ostream& os) {
  const auto& r = corpus.report();
  const std::vector<std::pair<std::string, std::size_t>> items = {
      {"documents", r.documents},
      {"edges", r.edges},
      {"duplicates", r.duplicate_edges},
      {"self_loops", r.self_loops},
      {"dangling_skipped", r.dangling_skipped},
      {"chronology_violations", r.chronology_violations},
      {"missing_venue", r.missing_venue},
      {"missing_title", r.missing_title},
      {"missing_abstract", r.missing_abstract}};
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : items) {
    rows.push_back({k, count_str(v)});
    os << k << "=" << v << '\n';
  }
  out.write("validation.tsv", {"metric", "value"}, rows);
}

int cmd_ingest(const RunConfig& cfg, std::ostream& os) {
  auto corpus = load_corpus(cfg);
  OutputSet out(cfg);
  save_cache(corpus, cfg.out / "corpus.cdc");
  out.record_binary("corpus.cdc", corpus.size());
  write_validation(corpus, out, os);
  auto table = growth_regressors(field_year_aggregates(corpus, field_level_of(cfg)));
  std::vector<std::string> header = {"field", "year", "n_new_works", "mean_refs_out", "mean_authors"};
  for (const auto& c : table.column_order) header.push_back(c);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    std::vector<std::string> cells = {r.field, std::to_string(r.year), count_str(r.n_new_works),
                                      format_double(r.mean_refs_out), format_double(r.mean_authors)};
    for (const auto& c : table.column_order) cells.push_back(format_optional(table.columns.at(c)[i]));
    rows.push_back(std::move(cells));
  }
  out.write("field_year.tsv", header, rows);
  out.finish();
  return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& os) {
  auto corpus = load_corpus(cfg);
  OutputSet out(cfg);
  write_validation(corpus, out, os);
  out.finish();
  return 0;
}

int cmd_cd(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  const auto dcfg = disruption_of(cfg);
  const auto threads = threads_of(cfg);
  const auto scores = batch_cd(corpus, dcfg, threads);
  auto variants = di_variants(corpus, dcfg, threads);

  std::optional<std::vector<DisruptionScore>> normalized;
  std::string norm_column;
  if (cfg.normalize == "paper") {
    normalized = normalize_scores(scores, corpus, NormalizationContext::paper());
    norm_column = "cd_paper_norm";
  } else if (cfg.normalize == "fy") {
    normalized = normalize_scores(scores, corpus, NormalizationContext::field_year(corpus, field_level_of(cfg)));
    norm_column = "cd_fy_norm";
  } else if (!cfg.normalize.empty()) {
    throw UsageError("--normalize must be paper or fy");
  }

  auto header = kScoreHeader;
  header.insert(header.end(), {"di1_no_k", "di_star", "no_references"});
  if (normalized) header.push_back(norm_column);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto cells = score_cells(corpus, scores[i]);
    cells.push_back(format_optional(variants.di1_no_k[i].value));
    cells.push_back(format_optional(variants.di_star[i].value));
    cells.push_back(scores[i].counts.n_b == 0 ? "1" : "0");
    if (normalized) cells.push_back(format_optional((*normalized)[i].value));
    rows.push_back(std::move(cells));
  }
  OutputSet out(cfg);
  out.write("cd.tsv", header, rows,
            {"window=" + cfg.window + " j_rule=" + dcfg.j_rule.to_string() +
             " include_k=" + (dcfg.include_k_in_denominator ? "1" : "0") +
             " include_same_year=" + (dcfg.include_same_year ? "1" : "0")});
  out.finish();
  return 0;
}

int cmd_normalize(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  const auto scores = batch_cd(corpus, disruption_of(cfg), threads_of(cfg));
  const bool paper = cfg.normalize.empty() || cfg.normalize == "paper";
  const bool fy = cfg.normalize.empty() || cfg.normalize == "fy";
  if (!paper && !fy) throw UsageError("--normalize must be paper or fy");
  auto header = kScoreHeader;
  std::vector<DisruptionScore> by_paper, by_fy;
  if (paper) {
    by_paper = normalize_scores(scores, corpus, NormalizationContext::paper());
    header.push_back("cd_paper_norm");
  }
  if (fy) {
    by_fy = normalize_scores(scores, corpus, NormalizationContext::field_year(corpus, field_level_of(cfg)));
    header.push_back("cd_fy_norm");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto cells = score_cells(corpus, scores[i]);
    if (paper) cells.push_back(format_optional(by_paper[i].value));
    if (fy) cells.push_back(format_optional(by_fy[i].value));
    rows.push_back(std::move(cells));
  }
  OutputSet out(cfg);
  out.write("cd_norm.tsv", header, rows, {"field_level=" + cfg.field_level});
  out.finish();
  return 0;
}

int cmd_null(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  auto table = cd_zscores(corpus, disruption_of(cfg), rewire_of(cfg), threads_of(cfg));
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    rows.push_back({corpus.doc(r.node).doc_id, format_optional(r.observed), format_optional(r.stats.null_mean),
                    format_optional(r.stats.null_sd), format_optional(r.stats.z)});
  }
  std::vector<std::vector<std::string>> yearly;
  for (const auto& y : table.yearly) yearly.push_back({std::to_string(y.year), format_optional(y.mean_z), count_str(y.n)});
  OutputSet out(cfg);
  out.write("zscores.tsv", {"doc_id", "observed", "null_mean", "null_sd", "z"}, rows);
  out.write("yearly_z.tsv", {"year", "mean_z", "n"}, yearly);
  json rates = json::array();
  for (double a : table.acceptance_rates) rates.push_back(a);
  out.note("swap_acceptance_rates", rates);
  out.finish();
  return 0;
}

int cmd_atypical(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  AtypicalConfig acfg;
  const bool patents = std::all_of(corpus.docs().begin(), corpus.docs().end(),
                                   [](const DocumentRecord& d) { return d.kind == DocKind::patent; });
  acfg.key = patents ? PairKey::class_code : PairKey::venue;
  auto result = atypical_combinations(corpus, rewire_of(cfg), acfg, threads_of(cfg));
  std::vector<std::vector<std::string>> docs;
  for (const auto& d : result.docs) {
    const auto& rec = corpus.doc(d.node);
    docs.push_back({rec.doc_id, std::to_string(rec.year), count_str(d.n_pairs), count_str(d.n_scored),
                    format_optional(d.conventionality), format_optional(d.novelty)});
  }
  std::vector<std::vector<std::string>> cdf;
  for (const auto& p : result.cdf) cdf.push_back({std::to_string(p.decade), format_double(p.grid_value), format_double(p.cdf)});
  OutputSet out(cfg);
  out.write("atypical_docs.tsv", {"doc_id", "year", "n_pairs", "n_scored", "conventionality", "novelty"}, docs,
            {std::string("pair_key=") + (patents ? "class_code" : "venue")});
  out.write("atypical_cdf.tsv", {"decade", "grid_value", "cdf"}, cdf);
  out.note("skipped_documents", result.skipped_documents);
  out.note("references_without_key", result.references_without_key);
  out.note("distinct_pairs", result.distinct_pairs);
  out.note("undefined_pairs", result.undefined_pairs);
  out.finish();
  return 0;
}

int cmd_knowledge(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  const auto level = field_level_of(cfg);
  auto rows = knowledge_use(corpus, threads_of(cfg));
  auto careers = author_careers(corpus);
  std::vector<std::vector<std::string>> doc_rows;
  for (const auto& r : rows) {
    const auto& d = corpus.doc(r.node);
    const auto& team = careers.team[r.node];
    doc_rows.push_back({d.doc_id, std::to_string(d.year), d.field_sub, count_str(r.n_refs),
                        format_optional(r.self_cite_ratio), format_optional(r.mean_age_cited),
                        format_optional(r.sd_age_cited), format_optional(team.mean_career_age),
                        format_optional(team.mean_prior_works), team.excluded ? "1" : "0"});
  }
  std::unique_ptr<TitleVectorizer> vectorizer;
  if (!cfg.embeddings.empty()) {
    vectorizer = std::make_unique<EmbeddingTableVectorizer>(EmbeddingTableVectorizer::load(cfg.embeddings));
  } else {
    vectorizer = std::make_unique<HashedBagVectorizer>();
  }
  auto fy = knowledge_field_year(corpus, level, *vectorizer);
  std::vector<std::vector<std::string>> fy_rows;
  for (const auto& r : fy) {
    fy_rows.push_back({r.field, std::to_string(r.year), format_optional(r.diversity_entropy),
                       format_optional(r.top1pct_share), format_optional(r.semantic_diversity)});
  }
  OutputSet out(cfg);
  out.write("knowledge.tsv",
            {"doc_id", "year", "field_sub", "n_refs", "self_cite_ratio", "mean_age_cited", "sd_age_cited",
             "team_mean_career_age", "team_mean_prior_works", "excluded"},
            doc_rows);
  out.write("knowledge_fy.tsv", {"field", "year", "diversity_entropy", "top1pct_share", "semantic_diversity"}, fy_rows,
            {"field_level=" + cfg.field_level + " vectorizer=" + (cfg.embeddings.empty() ? "hashed_bag" : "embedding_table")});
  out.finish();
  return 0;
}

int cmd_text(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  auto pipeline = TokenPipelineConfig::defaults();
  if (!cfg.stopwords.empty()) pipeline.load_stopwords(cfg.stopwords);
  if (!cfg.pos_lexicon.empty()) pipeline.load_pos_lexicon(cfg.pos_lexicon);
  TextOptions opts;
  auto scope = parse_scope(cfg.scope);
  if (!scope) throw UsageError("--scope must be title or abstract");
  opts.scope = *scope;
  opts.level = field_level_of(cfg);
  const auto threads = threads_of(cfg);

  OutputSet out(cfg);
  std::vector<std::vector<std::string>> ttr_rows;
  for (const auto& v : type_token_ratio(corpus, pipeline, opts, threads)) {
    ttr_rows.push_back({v.field, std::to_string(v.year), format_optional(v.value), count_str(v.events)});
  }
  out.write("ttr.tsv", {"field", "year", "ttr", "tokens"}, ttr_rows, {"scope=" + cfg.scope});

  std::vector<std::vector<std::string>> pair_rows;
  for (const auto& v : word_pair_novelty(corpus, pipeline, opts.level, PairCountMode::distinct, threads)) {
    pair_rows.push_back({v.field, std::to_string(v.year), format_optional(v.value), count_str(v.events)});
  }
  out.write("pair_novelty.tsv", {"field", "year", "pair_novelty", "pairs"}, pair_rows);

  if (!pipeline.pos_lexicon.empty()) {
    std::vector<std::vector<std::string>> verb_rows;
    for (const auto& t : verb_frequency(corpus, pipeline, decades(corpus.min_year(), corpus.max_year()), 10,
                                        opts.scope)) {
      for (const auto& v : t.top) {
        verb_rows.push_back({std::to_string(t.period.first), std::to_string(t.period.last), count_str(v.rank),
                             v.lemma, count_str(v.count)});
      }
    }
    out.write("verbs.tsv", {"period_start", "period_end", "rank", "lemma", "count"}, verb_rows);
  } else {
    out.note("verbs", "skipped: no --pos-lexicon");
  }
  out.finish();
  return 0;
}

int cmd_buckets(const RunConfig& cfg) {
  auto corpus = load_corpus(cfg);
  auto summary = bucket_conservation(batch_cd(corpus, disruption_of(cfg), threads_of(cfg)), corpus);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : summary.rows) {
    rows.push_back({std::to_string(r.year), count_str(r.counts[0]), count_str(r.counts[1]), count_str(r.counts[2]),
                    count_str(r.counts[3])});
  }
  std::vector<std::vector<std::string>> comp;
  for (const auto& c : summary.composition) {
    comp.push_back({std::to_string(c.year), c.field_area, count_str(c.count), format_double(c.share)});
  }
  OutputSet out(cfg);
  out.write("buckets.tsv", {"year", "(0,0.25]", "(0.25,0.5]", "(0.5,0.75]", "(0.75,1]"}, rows);
  out.write("bucket_composition.tsv", {"year", "field_area", "count", "share"}, comp);
  out.finish();
  return 0;
}

json load_spec(const RunConfig& cfg) {
  if (cfg.spec.empty()) throw UsageError("--spec is required");
  if (!fs::exists(cfg.spec)) throw DataError("spec file not found: " + cfg.spec.string());
  try {
    return json::parse(read_file(cfg.spec));
  } catch (const json::exception& e) {
    throw DataError("bad spec file " + cfg.spec.string() + ": " + e.what());
  }
}

DataTable spec_input(const json& spec, const RunConfig& cfg) {
  if (!spec.contains("input")) throw DataError("spec needs an \"input\" table path");
  fs::path input = spec.at("input").get<std::string>();
  if (input.is_relative() && !fs::exists(input)) input = cfg.spec.parent_path() / input;
  if (!fs::exists(input)) throw DataError("regression input not found: " + input.string());
  return DataTable::read(input);
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  }
  return out;
}

int cmd_regress(const RunConfig& cfg) {
  auto spec_json = load_spec(cfg);
  auto data = spec_input(spec_json, cfg);
  RegressionSpec spec;
  try {
    spec.outcome = spec_json.at("outcome").get<std::string>();
    spec.covariates = string_list(spec_json, "covariates");
    spec.fixed_effects = string_list(spec_json, "fixed_effects");
    if (spec_json.contains("interactions")) {
      for (const auto& p : spec_json.at("interactions")) {
        spec.interactions.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
      }
    }
    spec.intercept = spec_json.value("intercept", true);
    spec.robust_se = spec_json.value("robust_se", true);
    spec.absorb_cap = spec_json.value("absorb_cap", spec.absorb_cap);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad regression spec: ") + e.what());
  }
  auto fit = ols_fit(data, spec);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < fit.terms.size(); ++i) {
    rows.push_back({fit.terms[i], format_double(fit.coefficients[i]), format_double(fit.std_errors[i]),
                    format_double(fit.p_values[i])});
  }
  OutputSet out(cfg);
  out.write("fit.tsv", {"term", "coefficient", "se", "p"}, rows,
            {"n=" + std::to_string(fit.n) + " k=" + std::to_string(fit.k) + " r2=" + format_double(fit.r2) +
             " adj_r2=" + format_double(fit.adj_r2) + " dropped=" + std::to_string(fit.dropped_rows) +
             " se=" + (fit.robust ? "HC1" : "classical")});
  if (spec_json.contains("profile_group")) {
    const auto group = spec_json.at("profile_group").get<std::string>();
    auto profiles = level_profiles(fit, group);
    std::vector<Profile> ps;
    for (const auto& [level, p] : profiles) ps.push_back(p);
    auto pred = predict(fit, ps);
    std::vector<std::vector<std::string>> prow;
    for (std::size_t i = 0; i < profiles.size(); ++i) prow.push_back({profiles[i].first, format_double(pred[i])});
    out.write("predictions.tsv", {group, "predicted"}, prow);
  }
  out.note("r2", fit.r2);
  out.note("adj_r2", fit.adj_r2);
  out.finish();
  return 0;
}

int cmd_shapley(const RunConfig& cfg) {
  auto spec_json = load_spec(cfg);
  auto data = spec_input(spec_json, cfg);
  std::vector<PredictorGroup> groups;
  std::string outcome;
  try {
    outcome = spec_json.at("outcome").get<std::string>();
    for (const auto& g : spec_json.at("groups")) {
      groups.push_back({g.at("name").get<std::string>(), string_list(g, "covariates"), string_list(g, "fixed_effects")});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad shapley spec: ") + e.what());
  }
  auto result = shapley_owen(data, outcome, groups, ShapleyMeasure::adjusted_r2, threads_of(cfg));
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, share] : result.shares) rows.push_back({name, format_double(share)});
  OutputSet out(cfg);
  out.write("shapley.tsv", {"group", "share"}, rows,
            {"full_adj_r2=" + format_double(result.full_value) + " n=" + std::to_string(result.n)});
  out.finish();
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  std::optional<Corpus> corpus;
  if (!cfg.nodes.empty()) corpus = load_corpus(cfg);
  auto report = build_report(cfg.out, corpus ? &*corpus : nullptr, taxonomy_of(cfg));
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({r.field_area, std::to_string(r.year), r.metric, format_optional(r.mean), count_str(r.n)});
  }
  std::vector<std::vector<std::string>> overall;
  for (const auto& r : report.overall) {
    overall.push_back({std::to_string(r.year), r.metric, format_double(r.mean_of_field_means), count_str(r.fields)});
  }
  OutputSet out(cfg);
  out.write("report_field_year.tsv", {"field_area", "year", "metric", "mean", "n"}, rows);
  out.write("report_yearly.tsv", {"year", "metric", "mean_of_field_means", "n_fields"}, overall);
  json sources = json::array();
  for (const auto& s : report.sources) sources.push_back(s);
  out.note("sources", sources);
  out.finish();
  return 0;
}

struct PerDocSource {
  const char* file;
  std::vector<const char*> metrics;
};

struct FieldYearSource {
  const char* file;
  std::vector<const char*> metrics;
};

}  // namespace

Report build_report(const fs::path& output_dir, const Corpus* corpus, const std::optional<Taxonomy>& taxonomy) {
  const std::vector<PerDocSource> per_doc = {
      {"cd.tsv", {"cd_value", "di1_no_k", "di_star", "cd_paper_norm", "cd_fy_norm"}},
      {"cd_norm.tsv", {"cd_paper_norm", "cd_fy_norm"}},
      {"knowledge.tsv", {"self_cite_ratio", "mean_age_cited", "sd_age_cited"}},
      {"zscores.tsv", {"z"}}};
  const std::vector<FieldYearSource> per_fy = {
      {"knowledge_fy.tsv", {"diversity_entropy", "top1pct_share", "semantic_diversity"}},
      {"ttr.tsv", {"ttr"}},
      {"pair_novelty.tsv", {"pair_novelty"}}};

  struct Acc {
    double sum = 0;
    std::size_t n = 0;
  };
  std::map<std::tuple<std::string, int, std::string>, Acc> acc;
  Report report;

  auto area_of_sub = [&](const std::string& sub) {
    if (!taxonomy) return sub;
    auto it = taxonomy->find(sub);
    return it == taxonomy->end() ? sub : it->second;
  };

  for (const auto& src : per_doc) {
    const auto path = output_dir / src.file;
    if (!fs::exists(path)) continue;
    auto t = read_tsv(path);
    const auto id_col = t.require_column("doc_id");
    const auto year_col = t.column("year");
    const auto sub_col = t.column("field_sub");
    if (!corpus && (!year_col || !sub_col)) continue;
    std::vector<std::pair<std::string, std::size_t>> metrics;
    for (const char* m : src.metrics) {
      if (auto c = t.column(m)) metrics.emplace_back(std::string(fs::path(src.file).stem().string()) + "." + m, *c);
    }
    if (metrics.empty()) continue;
    report.sources.push_back(src.file);
    for (const auto& row : t.rows) {
      std::string area;
      int year = 0;
      std::optional<NodeId> node = corpus ? corpus->find(row[id_col]) : std::nullopt;
      if (node) {
        area = corpus->doc(*node).field_area;
        year = corpus->doc(*node).year;
      } else if (year_col && sub_col) {
        area = area_of_sub(row[*sub_col]);
        year = static_cast<int>(parse_int(row[*year_col]).value_or(0));
      } else {
        continue;
      }
      for (const auto& [name, col] : metrics) {
        auto& a = acc[{area, year, name}];
        if (auto v = parse_double(row[col])) {
          a.sum += *v;
          ++a.n;
        }
      }
    }
  }
  for (const auto& src : per_fy) {
    const auto path = output_dir / src.file;
    if (!fs::exists(path)) continue;
    auto t = read_tsv(path);
    const auto field_col = t.require_column("field");
    const auto year_col = t.require_column("year");
    report.sources.push_back(src.file);
    for (const auto& row : t.rows) {
      const int year = static_cast<int>(parse_int(row[year_col]).value_or(0));
      for (const char* m : src.metrics) {
        auto c = t.column(m);
        if (!c) continue;
        auto& a = acc[{row[field_col], year, fs::path(src.file).stem().string() + "." + m}];
        if (auto v = parse_double(row[*c])) {
          a.sum += *v;
          ++a.n;
        }
      }
    }
  }
  if (report.sources.empty()) throw DataError("no metric outputs found in " + output_dir.string());

  std::map<std::pair<int, std::string>, Acc> cross;
  for (const auto& [key, a] : acc) {
    if (a.n == 0) continue;
    const auto& [area, year, metric] = key;
    const double mean = a.sum / static_cast<double>(a.n);
    report.rows.push_back({area, year, metric, mean, a.n});
    auto& c = cross[{year, metric}];
    c.sum += mean;
    ++c.n;
  }
  for (const auto& [key, c] : cross) {
    report.overall.push_back({key.first, key.second, c.sum / static_cast<double>(c.n), c.n});
  }
  return report;
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& os, std::ostream& err) {
  CLI::App app{"cdengine: citation disruption and knowledge-use analytics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--nodes", cfg.nodes, "nodes TSV/JSONL, or a .cdc corpus cache");
    sub->add_option("--edges", cfg.edges, "edges TSV (citing_id, cited_id)");
    sub->add_option("--taxonomy", cfg.taxonomy, "field_sub -> field_area TSV");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "random seed (CDENGINE_SEED overrides)");
    sub->add_option("--threads", cfg.threads, "worker threads (default: all cores)");
    sub->add_option("--window", cfg.window, "forward window in years, or 'all'");
    sub->add_option("--include-same-year", cfg.include_same_year, "count citers from the focal year");
    sub->add_option("--j-rule", cfg.j_rule, "at_least:<l> or all");
    sub->add_flag("--no-k", cfg.no_k, "drop N_k from the denominator");
    sub->add_option("--normalize", cfg.normalize, "paper or fy");
    sub->add_option("--field-level", cfg.field_level, "area or sub");
    sub->add_option("--replicas", cfg.replicas, "rewired replicas");
    sub->add_option("--swap-multiplier", cfg.swap_multiplier, "swap attempts per edge");
    sub->add_option("--subsample", cfg.subsample, "focal subsample fraction in (0, 1]");
    sub->add_option("--scope", cfg.scope, "title or abstract");
    sub->add_option("--stopwords", cfg.stopwords, "stopword list, one per line");
    sub->add_option("--pos-lexicon", cfg.pos_lexicon, "lemma<TAB>pos lexicon");
    sub->add_option("--embeddings", cfg.embeddings, "word embedding table");
    sub->add_option("--spec", cfg.spec, "regression spec (JSON)");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "parse inputs, write corpus cache, validation and field-year tables"},
      {"validate", "report data validation counts"},
      {"cd", "CD index with DI variants"},
      {"normalize", "paper- and field-year-normalized CD"},
      {"null", "z-scores against rewired null networks"},
      {"atypical", "atypical reference-combination z-scores"},
      {"knowledge", "knowledge-use metrics"},
      {"text", "type-token ratio, word-pair novelty, verb tables"},
      {"buckets", "yearly counts of positive CD by interval"},
      {"regress", "OLS with fixed effects and robust SEs"},
      {"shapley", "Shapley-Owen adjusted R2 decomposition"},
      {"report", "per-field-year summaries of prior outputs"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    os << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 1;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (const char* env = std::getenv("CDENGINE_SEED")) {
    auto v = parse_int(env);
    if (!v || *v < 0) {
      err << "usage error: CDENGINE_SEED must be a nonnegative integer\n";
      return 1;
    }
    cfg.seed = static_cast<std::uint64_t>(*v);
  }

  try {
    const auto& c = cfg.command;
    if (c == "ingest") return cmd_ingest(cfg, os);
    if (c == "validate") return cmd_validate(cfg, os);
    if (c == "cd") return cmd_cd(cfg);
    if (c == "normalize") return cmd_normalize(cfg);
    if (c == "null") return cmd_null(cfg);
    if (c == "atypical") return cmd_atypical(cfg);
    if (c == "knowledge") return cmd_knowledge(cfg);
    if (c == "text") return cmd_text(cfg);
    if (c == "buckets") return cmd_buckets(cfg);
    if (c == "regress") return cmd_regress(cfg);
    if (c == "shapley") return cmd_shapley(cfg);
    if (c == "report") return cmd_report(cfg);
    err << "usage error: unknown subcommand " << c << '\n';
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace cdengine
