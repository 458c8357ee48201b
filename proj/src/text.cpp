#include "cdengine/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include "cdengine/error.hpp"
#include "cdengine/parallel.hpp"
#include "cdengine/tsv.hpp"

namespace cdengine {

namespace {

bool is_separator(unsigned char c) { return c < 0x80 && (std::isspace(c) || std::ispunct(c)); }

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

bool all_of_class(std::string_view s, int (*pred)(int)) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return c < 0x80 && pred(c);
  });
}

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

const std::vector<std::string_view>& default_stopwords() {
  static const std::vector<std::string_view> words = {
      "a", "about", "above", "across", "after", "afterwards", "again", "against", "all", "almost",
      "alone", "along", "already", "also", "although", "always", "am", "among", "amongst", "an",
      "and", "another", "any", "anyhow", "anyone", "anything", "anyway", "anywhere", "are", "around",
      "as", "at", "be", "became", "because", "become", "becomes", "becoming", "been", "before",
      "beforehand", "behind", "being", "below", "beside", "besides", "between", "beyond", "both",
      "but", "by", "can", "cannot", "could", "did", "do", "does", "doing", "done", "down", "due",
      "during", "each", "either", "else", "elsewhere", "enough", "even", "ever", "every", "everyone",
      "everything", "everywhere", "except", "few", "for", "former", "formerly", "from", "further",
      "had", "has", "have", "having", "he", "hence", "her", "here", "hereafter", "hereby", "herein",
      "hers", "herself", "him", "himself", "his", "how", "however", "i", "if", "in", "indeed", "into",
      "is", "it", "its", "itself", "just", "last", "latter", "least", "less", "many", "may", "me",
      "meanwhile", "might", "mine", "more", "moreover", "most", "mostly", "much", "must", "my",
      "myself", "namely", "neither", "never", "nevertheless", "next", "no", "nobody", "none", "nor",
      "not", "nothing", "now", "nowhere", "of", "off", "often", "on", "once", "one", "only", "onto",
      "or", "other", "others", "otherwise", "our", "ours", "ourselves", "out", "over", "own", "per",
      "perhaps", "please", "quite", "rather", "really", "same", "several", "she", "should", "since",
      "so", "some", "somehow", "someone", "something", "sometime", "sometimes", "somewhere", "still",
      "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "thence",
      "there", "thereafter", "thereby", "therefore", "therein", "thereupon", "these", "they", "this",
      "those", "though", "through", "throughout", "thru", "thus", "to", "together", "too", "toward",
      "towards", "under", "until", "up", "upon", "us", "very", "via", "was", "we", "well", "were",
      "what", "whatever", "when", "whence", "whenever", "where", "whereafter", "whereas", "whereby",
      "wherein", "whereupon", "wherever", "whether", "which", "while", "whither", "who", "whoever",
      "whole", "whom", "whose", "why", "will", "with", "within", "without", "would", "yet", "you",
      "your", "yours", "yourself", "yourselves"};
  return words;
}

TokenPipelineConfig TokenPipelineConfig::defaults() {
  TokenPipelineConfig c;
  for (auto w : default_stopwords()) c.stopwords.emplace(w);
  return c;
}

void TokenPipelineConfig::load_stopwords(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  stopwords.clear();
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    stopwords.insert(ascii_lower(std::string_view(line).substr(start)));
  }
}

void TokenPipelineConfig::load_pos_lexicon(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, '\t');
    if (cells.size() != 2) throw ParseError(path.string(), line_no, "lexicon rows need lemma<TAB>pos");
    if (line_no == 1 && cells[0] == "lemma") continue;
    pos_lexicon[ascii_lower(cells[0])] = std::string(cells[1]);
  }
}

void TokenPipelineConfig::validate() const {
  if (min_len >= max_len) throw ConfigError("token min_len must be below max_len");
}

std::vector<std::string> preprocess(std::string_view text, const TokenPipelineConfig& config) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_separator(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_separator(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string_view raw = text.substr(i, j - i);
    i = j;
    if (config.stopwords.count(ascii_lower(raw))) continue;
    if (all_of_class(raw, std::isdigit) || all_of_class(raw, std::ispunct)) continue;
    const auto len = code_points(raw);
    if (len < config.min_len || len > config.max_len) continue;
    out.push_back(ascii_lower(config.lemmatizer ? config.lemmatizer(raw) : std::string(raw)));
  }
  return out;
}

std::optional<TextScope> parse_scope(std::string_view s) {
  if (s == "title") return TextScope::title;
  if (s == "abstract") return TextScope::abstract;
  return std::nullopt;
}

LexiconSet build_lexicon(const Corpus& corpus, const TokenPipelineConfig& config, const TextOptions& options,
                         unsigned threads) {
  config.validate();
  const bool abstracts = options.scope == TextScope::abstract;
  std::vector<std::vector<std::string>> tokens(corpus.size());
  std::vector<char> eligible(corpus.size(), 1);
  std::vector<char> has_text(corpus.size(), 0);
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    if (abstracts && d.kind == DocKind::paper && d.year < options.paper_abstract_min_year) {
      eligible[i] = 0;
      return;
    }
    const auto& text = abstracts ? d.abstract : d.title;
    if (!text) return;
    has_text[i] = 1;
    tokens[i] = preprocess(*text, config);
  });

  std::map<FieldYearKey, std::vector<NodeId>> groups;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!eligible[i]) continue;
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    groups[{field_of(d, options.level), d.year}].push_back(static_cast<NodeId>(i));
  }

  LexiconSet out;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::uint32_t> seq;
  for (const auto& [key, docs] : groups) {
    FieldYearLexicon g;
    g.field = key.first;
    g.year = key.second;
    g.documents = docs.size();
    for (NodeId d : docs) {
      if (!has_text[d]) continue;
      ++g.documents_with_text;
      seq.clear();
      for (const auto& t : tokens[d]) {
        auto [it, inserted] = ids.emplace(t, static_cast<std::uint32_t>(out.vocabulary.size()));
        if (inserted) out.vocabulary.push_back(t);
        seq.push_back(it->second);
        g.distinct_tokens.insert(it->second);
      }
      g.total_tokens += seq.size();
      if (!abstracts) {
        for (std::size_t a = 0; a < seq.size(); ++a) {
          for (std::size_t b = a + 1; b < seq.size(); ++b) {
            ++g.pair_counts[pair_key(seq[a], seq[b])];
            ++g.pair_instances;
          }
        }
      }
    }
    if (abstracts && static_cast<double>(g.documents_with_text) <
                         options.abstract_coverage * static_cast<double>(g.documents)) {
      g.suppressed = true;
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

std::vector<FieldYearValue> type_token_ratio(const Corpus& corpus, const TokenPipelineConfig& config,
                                             const TextOptions& options, unsigned threads) {
  auto lex = build_lexicon(corpus, config, options, threads);
  std::vector<FieldYearValue> out;
  for (const auto& g : lex.groups) {
    FieldYearValue v{g.field, g.year, std::nullopt, g.total_tokens};
    if (!g.suppressed && g.total_tokens > 0) {
      v.value = static_cast<double>(g.distinct_tokens.size()) / static_cast<double>(g.total_tokens);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<FieldYearValue> word_pair_novelty(const LexiconSet& lexicon, PairCountMode mode) {
  std::vector<FieldYearValue> out;
  std::unordered_set<std::uint64_t> history;
  const std::string* field = nullptr;
  for (const auto& g : lexicon.groups) {
    if (!field || *field != g.field) {
      history.clear();
      field = &g.field;
    }
    FieldYearValue v{g.field, g.year, std::nullopt,
                     mode == PairCountMode::distinct ? g.pair_counts.size() : g.pair_instances};
    if (!g.pair_counts.empty()) {
      std::size_t fresh = 0;
      std::size_t fresh_instances = 0;
      for (const auto& [p, n] : g.pair_counts) {
        if (history.count(p)) continue;
        ++fresh;
        fresh_instances += n;
      }
      v.value = mode == PairCountMode::distinct
                    ? static_cast<double>(fresh) / static_cast<double>(g.pair_counts.size())
                    : static_cast<double>(fresh_instances) / static_cast<double>(g.pair_instances);
      for (const auto& [p, n] : g.pair_counts) history.insert(p);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<FieldYearValue> word_pair_novelty(const Corpus& corpus, const TokenPipelineConfig& config,
                                              FieldLevel level, PairCountMode mode, unsigned threads) {
  TextOptions opts;
  opts.scope = TextScope::title;
  opts.level = level;
  return word_pair_novelty(build_lexicon(corpus, config, opts, threads), mode);
}

std::vector<YearRange> decades(int min_year, int max_year) {
  std::vector<YearRange> out;
  if (max_year < min_year) return out;
  for (int start = min_year - ((min_year % 10) + 10) % 10; start <= max_year; start += 10) {
    out.push_back({start, start + 9});
  }
  return out;
}

bool is_verb_tag(std::string_view pos) {
  const auto p = ascii_lower(pos);
  return p == "verb" || p == "v" || p.rfind("vb", 0) == 0;
}

std::vector<VerbTable> verb_frequency(const Corpus& corpus, const TokenPipelineConfig& config,
                                      const std::vector<YearRange>& periods, std::size_t top_n,
                                      TextScope scope) {
  if (config.pos_lexicon.empty()) throw ConfigError("verb tables need a non-empty part-of-speech lexicon");
  std::vector<std::map<std::string, std::size_t, std::less<>>> counts(periods.size());
  for (const auto& d : corpus.docs()) {
    const auto& text = scope == TextScope::abstract ? d.abstract : d.title;
    if (!text) continue;
    std::vector<std::size_t> hit;
    for (std::size_t p = 0; p < periods.size(); ++p) {
      if (d.year >= periods[p].first && d.year <= periods[p].last) hit.push_back(p);
    }
    if (hit.empty()) continue;
    for (const auto& t : preprocess(*text, config)) {
      auto it = config.pos_lexicon.find(t);
      if (it == config.pos_lexicon.end() || !is_verb_tag(it->second)) continue;
      for (auto p : hit) ++counts[p][t];
    }
  }
  std::vector<VerbTable> out;
  for (std::size_t p = 0; p < periods.size(); ++p) {
    VerbTable t;
    t.period = periods[p];
    for (const auto& [lemma, n] : counts[p]) t.top.push_back({lemma, n, 0});
    std::stable_sort(t.top.begin(), t.top.end(), [](const VerbCount& a, const VerbCount& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.lemma < b.lemma;
    });
    if (t.top.size() > top_n) t.top.resize(top_n);
    for (std::size_t r = 0; r < t.top.size(); ++r) t.top[r].rank = r + 1;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace cdengine
