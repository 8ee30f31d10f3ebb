#include "mtaudit/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"
#include "mtaudit/kernels.hpp"
#include "mtaudit/tokenize.hpp"
#include "mtaudit/unicode.hpp"

namespace mtaudit::adversary {

namespace {

constexpr std::string_view kBundledStopwords =
#include "stopwords_english.inc"
    ;

std::vector<std::string> parse_word_lines(std::string_view content) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string line = unicode::trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line[0] == '#') continue;
    out.push_back(std::move(line));
  }
  return out;
}

// A source token split into its lexical core and the punctuation around it.
struct SourceToken {
  std::string core;
  bool closes_run = false;     // trailing punctuation or possessive
  bool ends_sentence = false;  // trailing . ! ?
};

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

SourceToken split_token(std::string_view raw) {
  SourceToken tok;
  auto decoded = unicode::decode_utf8(raw);
  if (!decoded) {
    tok.core = std::string(raw);
    return tok;
  }
  std::u32string s = std::move(*decoded);
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && unicode::is_punct(s[b])) ++b;
  while (e > b && unicode::is_punct(s[e - 1])) {
    const char32_t c = s[e - 1];
    if (c == U'.' || c == U'!' || c == U'?') tok.ends_sentence = true;
    tok.closes_run = true;
    --e;
  }
  // Possessive 's / ’s
  if (e - b > 2 && (s[e - 1] == U's' || s[e - 1] == U'S') && is_apostrophe(s[e - 2])) {
    e -= 2;
    tok.closes_run = true;
  }
  tok.core = unicode::encode_utf8(std::u32string_view(s).substr(b, e - b));
  return tok;
}

bool starts_upper(std::string_view core) {
  const auto d = unicode::decode_utf8(core);
  return d && !d->empty() && unicode::is_upper((*d)[0]);
}

bool starts_lower(std::string_view core) {
  const auto d = unicode::decode_utf8(core);
  return d && !d->empty() && unicode::is_alpha((*d)[0]) && !unicode::is_upper((*d)[0]);
}

// Digits with optional : . / - separators: "4", "11:20", "2024", "26/04".
bool is_numeric(std::string_view core) {
  if (core.empty() || core[0] < '0' || core[0] > '9') return false;
  bool digit_last = false;
  for (char c : core) {
    if (c >= '0' && c <= '9') {
      digit_last = true;
    } else if (c == ':' || c == '.' || c == '/' || c == '-') {
      if (!digit_last) return false;
      digit_last = false;
    } else {
      return false;
    }
  }
  return digit_last;
}

std::vector<std::string> extract_heuristic(std::string_view text, const StopwordList& stop) {
  const auto raw = tokenize_whitespace(text);
  std::vector<SourceToken> toks;
  toks.reserve(raw.size());
  for (const auto& r : raw) toks.push_back(split_token(r));
  const std::size_t n = toks.size();

  std::vector<bool> sentence_initial(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    sentence_initial[i] = i == 0 || toks[i - 1].ends_sentence;
  }
  const auto is_cap = [&](std::size_t i) {
    return !toks[i].core.empty() && starts_upper(toks[i].core) && !stop.contains(toks[i].core);
  };

  std::vector<std::string> entities;
  std::size_t i = 0;
  while (i < n) {
    if (!is_cap(i)) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    std::size_t end = i + 1;  // exclusive
    while (!toks[end - 1].closes_run && end < n && is_cap(end) && !sentence_initial[end]) ++end;
    const std::size_t cap_run = end - begin;

    // Adjoining numeric tokens ("May 4", "2024 Olympics").
    if (!toks[end - 1].closes_run && end < n && is_numeric(toks[end].core)) ++end;
    if (begin > 0 && !sentence_initial[begin] && !toks[begin - 1].closes_run &&
        is_numeric(toks[begin - 1].core)) {
      --begin;
    }

    bool keep = true;
    if (sentence_initial[i] && cap_run == 1 && end - begin == 1) {
      const std::string& word = toks[i].core;
      const std::string folded = unicode::to_lower(word);
      bool recurs_capitalized = false;
      bool occurs_lowercase = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        if (toks[k].core == word && !sentence_initial[k]) recurs_capitalized = true;
        if (starts_lower(toks[k].core) && unicode::to_lower(toks[k].core) == folded) {
          occurs_lowercase = true;
        }
      }
      keep = recurs_capitalized || !occurs_lowercase;
    }
    if (keep) {
      std::string entity = toks[begin].core;
      for (std::size_t k = begin + 1; k < end; ++k) entity += " " + toks[k].core;
      entities.push_back(std::move(entity));
    }
    i = std::max(end, i + 1);
  }
  return entities;
}

std::vector<std::string> extract_gazetteer(std::string_view text, const Gazetteer& gaz) {
  const auto raw = tokenize_whitespace(text);
  std::vector<std::string> cores;
  cores.reserve(raw.size());
  for (const auto& r : raw) cores.push_back(split_token(r).core);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < cores.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(gaz.max_tokens(), cores.size() - i); len >= 1; --len) {
      std::vector<std::string> span(cores.begin() + static_cast<std::ptrdiff_t>(i),
                                    cores.begin() + static_cast<std::ptrdiff_t>(i + len));
      if (gaz.contains(span)) {
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    std::string entity = cores[i];
    for (std::size_t k = 1; k < matched; ++k) entity += " " + cores[i + k];
    out.push_back(std::move(entity));
    i += matched;
  }
  return out;
}

constexpr std::string_view kPromptTemplate =
    "Please output the extract named entities concatenated by whitespace.\n"
    "\n"
    "For example,\n"
    "**Input:** On Sunday, May 4, in Peru's Pataz province in the northern Department of La "
    "Libertad region, near one of Peru's largest gold mines, police has found bodies of thirteen "
    "security guards who were kidnapped on Saturday, April 26, allegedly by individuals involved "
    "in illegal mining.\n"
    "**Output:** Sunday May 4 Peru Pataz province Department of La Libertad region Peru Saturday "
    "April 26\n"
    "\n"
    "{other_in_context_examples}\n"
    "\n"
    "Now, it's your turn.\n"
    "**Input:** {text}\n"
    "**Output:**";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string_view to_string(ExtractorMode m) {
  switch (m) {
    case ExtractorMode::Heuristic:
      return "heuristic";
    case ExtractorMode::Gazetteer:
      return "gazetteer";
    case ExtractorMode::ExternalLLM:
      return "llm";
  }
  return "heuristic";
}

ExtractorMode parse_extractor_mode(std::string_view s) {
  if (s == "heuristic") return ExtractorMode::Heuristic;
  if (s == "gazetteer") return ExtractorMode::Gazetteer;
  if (s == "llm" || s == "external-llm") return ExtractorMode::ExternalLLM;
  throw ValidationError("unknown extractor mode '" + std::string(s) + "'");
}

std::string_view to_string(Scenario s) { return s == Scenario::Empty ? "empty" : "non_empty"; }

// ---- word lists ----------------------------------------------------------------

StopwordList::StopwordList(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(unicode::to_lower(w));
}

const StopwordList& StopwordList::english() {
  static const StopwordList list(parse_word_lines(kBundledStopwords));
  return list;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  return StopwordList(parse_word_lines(io::read_file(path)));
}

bool StopwordList::contains(std::string_view word) const {
  return words_.count(unicode::to_lower(word)) > 0;
}

Gazetteer::Gazetteer(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    auto toks = tokenize_whitespace(e);
    if (toks.empty()) continue;
    max_tokens_ = std::max(max_tokens_, toks.size());
    entries_.insert(std::move(toks));
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  return Gazetteer(parse_word_lines(io::read_file(path)));
}

bool Gazetteer::contains(const std::vector<std::string>& tokens) const {
  return entries_.count(tokens) > 0;
}

// ---- extraction ----------------------------------------------------------------

std::string build_ne_prompt(std::string_view text, std::string_view other_examples) {
  std::string prompt(kPromptTemplate);
  replace_all(prompt, "{other_in_context_examples}", other_examples);
  replace_all(prompt, "{text}", text);
  return prompt;
}

std::vector<std::string> parse_llm_entities(std::string_view reply) {
  std::string body = unicode::trim(reply);
  constexpr std::string_view kLabel = "**Output:**";
  if (body.rfind(kLabel, 0) == 0) body = unicode::trim(std::string_view(body).substr(kLabel.size()));
  // Only the first line is the answer.
  if (const auto nl = body.find('\n'); nl != std::string::npos) body.resize(nl);
  return tokenize_whitespace(body);
}

EntityExtraction extract_entities(std::string_view text, const ExtractorSettings& settings,
                                  std::size_t pair_id) {
  EntityExtraction out;
  out.pair_id = pair_id;
  out.extractor = settings.mode;
  switch (settings.mode) {
    case ExtractorMode::Heuristic:
      out.entities = extract_heuristic(
          text, settings.stopwords ? *settings.stopwords : StopwordList::english());
      break;
    case ExtractorMode::Gazetteer:
      if (!settings.gazetteer) throw ValidationError("gazetteer mode needs a gazetteer");
      out.entities = extract_gazetteer(text, *settings.gazetteer);
      break;
    case ExtractorMode::ExternalLLM:
      if (!settings.llm) throw LlmUnavailable("no LLM client configured");
      out.entities = parse_llm_entities(settings.llm->complete(build_ne_prompt(text, settings.llm_examples)));
      break;
  }
  return out;
}

AdversarialHypothesis build_adversarial(const EntityExtraction& extraction,
                                        const PaddingConfig& padding) {
  AdversarialHypothesis h;
  h.pair_id = extraction.pair_id;
  std::vector<std::string> parts;
  for (const auto& e : extraction.entities) {
    if (!unicode::trim(e).empty()) parts.push_back(e);
  }
  if (parts.empty()) {
    h.scenario = Scenario::Empty;
    return h;
  }
  h.scenario = Scenario::NonEmpty;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) h.text += ' ';
    h.text += parts[i];
  }
  for (std::size_t k = 0; k < padding.count; ++k) {
    h.text += ' ';
    h.text += padding.token;
  }
  return h;
}

// ---- audit ---------------------------------------------------------------------

AuditReport run_audit(std::span<const Corpus> corpora, const AuditConfig& cfg) {
  cfg.bleu.validate();
  cfg.chrf.validate();
  AuditReport report;
  for (const auto& corpus : corpora) {
    if (corpus.empty()) continue;
    const auto& first = corpus.pairs.front();
    if (first.target_lang.script_class() != ScriptClass::Latin) {
      throw ValidationError("audit target " + first.target_lang.code() +
                            " is not written in Latin script");
    }
    if (cfg.require_english_source && first.source_lang.language() != "eng") {
      throw ValidationError("audit source must be English, got " + first.source_lang.code());
    }

    LanguageAudit lang;
    lang.corpus_name = corpus.name;
    lang.language = first.target_lang.code();
    lang.pairs = corpus.size();
    lang.sentences.resize(corpus.size());

    for_each_index(corpus.size(), cfg.exec, [&](std::size_t i) {
      const auto& pair = corpus.pairs[i];
      auto& s = lang.sentences[i];
      s.pair_id = pair.id;
      try {
        auto extraction = extract_entities(pair.source_text, cfg.extractor, pair.id);
        const auto hyp = build_adversarial(extraction, cfg.padding);
        s.entities = std::move(extraction.entities);
        s.scenario = hyp.scenario;
        s.hypothesis = hyp.text;
        const std::string refs[] = {pair.reference_text};
        const auto b = metrics::bleu(hyp.text, refs, cfg.bleu);
        s.bleu = b.score;
        s.bp = b.bp;
        s.unigram_matches = b.matches.empty() ? 0 : b.matches[0];
        s.chrfpp = metrics::chrfpp(hyp.text, pair.reference_text, cfg.chrf).score;
      } catch (const std::exception& e) {
        s.error = e.what();
      }
    });

    std::vector<double> bleus, chrfs;
    std::vector<std::string> hyps, refs;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < lang.sentences.size(); ++i) {
      const auto& s = lang.sentences[i];
      if (s.error) continue;
      bleus.push_back(s.bleu);
      chrfs.push_back(s.chrfpp);
      if (s.bleu > 0.0) ++nonzero;
      hyps.push_back(s.hypothesis);
      refs.push_back(corpus.pairs[i].reference_text);
    }
    lang.scored = bleus.size();
    lang.mean_bleu = mean(bleus);
    lang.mean_chrfpp = mean(chrfs);
    lang.fraction_nonzero =
        lang.scored ? static_cast<double>(nonzero) / static_cast<double>(lang.scored) : 0.0;
    if (!hyps.empty()) {
      lang.corpus_bleu = kernels::corpus_bleu(hyps, refs, cfg.bleu, cfg.exec).score;
      lang.corpus_chrfpp = kernels::corpus_chrf(hyps, refs, cfg.chrf, cfg.exec).score;
    }
    report.languages.push_back(std::move(lang));
  }
  return report;
}

void to_json(nlohmann::json& j, const SentenceAudit& s) {
  j = nlohmann::json{{"pair_id", s.pair_id},
                     {"scenario", std::string(to_string(s.scenario))},
                     {"entities", s.entities},
                     {"hypothesis", s.hypothesis},
                     {"bleu", s.bleu},
                     {"chrfpp", s.chrfpp},
                     {"bp", s.bp},
                     {"unigram_matches", s.unigram_matches},
                     {"error", s.error ? nlohmann::json(*s.error) : nlohmann::json(nullptr)}};
}

void to_json(nlohmann::json& j, const LanguageAudit& l) {
  std::vector<double> bleu, chrf;
  for (const auto& s : l.sentences) {
    bleu.push_back(s.bleu);
    chrf.push_back(s.chrfpp);
  }
  j = nlohmann::json{{"corpus", l.corpus_name},
                     {"language", l.language},
                     {"pairs", l.pairs},
                     {"scored", l.scored},
                     {"mean_bleu", l.mean_bleu},
                     {"mean_chrfpp", l.mean_chrfpp},
                     {"corpus_bleu", l.corpus_bleu},
                     {"corpus_chrfpp", l.corpus_chrfpp},
                     {"fraction_nonzero", l.fraction_nonzero},
                     {"bleu_scores", bleu},
                     {"chrfpp_scores", chrf},
                     {"sentences", l.sentences}};
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  j = nlohmann::json{{"languages", r.languages}};
}

void from_json(const nlohmann::json& j, AuditReport& r) {
  try {
    r.languages.clear();
    for (const auto& lj : j.at("languages")) {
      LanguageAudit l;
      l.corpus_name = lj.at("corpus").get<std::string>();
      l.language = lj.at("language").get<std::string>();
      l.pairs = lj.at("pairs").get<std::size_t>();
      l.scored = lj.at("scored").get<std::size_t>();
      l.mean_bleu = lj.at("mean_bleu").get<double>();
      l.mean_chrfpp = lj.at("mean_chrfpp").get<double>();
      l.corpus_bleu = lj.at("corpus_bleu").get<double>();
      l.corpus_chrfpp = lj.at("corpus_chrfpp").get<double>();
      l.fraction_nonzero = lj.at("fraction_nonzero").get<double>();
      for (const auto& sj : lj.at("sentences")) {
        SentenceAudit s;
        s.pair_id = sj.at("pair_id").get<std::size_t>();
        s.scenario = sj.at("scenario").get<std::string>() == "empty" ? Scenario::Empty
                                                                     : Scenario::NonEmpty;
        s.entities = sj.at("entities").get<std::vector<std::string>>();
        s.hypothesis = sj.at("hypothesis").get<std::string>();
        s.bleu = sj.at("bleu").get<double>();
        s.chrfpp = sj.at("chrfpp").get<double>();
        s.bp = sj.at("bp").get<double>();
        s.unigram_matches = sj.at("unigram_matches").get<std::size_t>();
        if (!sj.at("error").is_null()) s.error = sj.at("error").get<std::string>();
        l.sentences.push_back(std::move(s));
      }
      r.languages.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed audit report: ") + e.what());
  }
}

std::string summary_csv(const AuditReport& report) {
  std::string out = io::csv_row({"language", "corpus", "pairs", "scored", "mean_bleu", "mean_chrfpp",
                                 "corpus_bleu", "corpus_chrfpp", "fraction_nonzero"});
  for (const auto& l : report.languages) {
    out += io::csv_row({l.language, l.corpus_name, std::to_string(l.pairs), std::to_string(l.scored),
                        fmt(l.mean_bleu), fmt(l.mean_chrfpp), fmt(l.corpus_bleu),
                        fmt(l.corpus_chrfpp), fmt(l.fraction_nonzero)});
  }
  return out;
}

std::string sentences_csv(const AuditReport& report) {
  std::string out = io::csv_row({"language", "pair_id", "scenario", "bleu", "chrfpp", "bp",
                                 "unigram_matches", "hypothesis_entities", "error"});
  for (const auto& l : report.languages) {
    for (const auto& s : l.sentences) {
      std::string ents;
      for (std::size_t i = 0; i < s.entities.size(); ++i) {
        if (i) ents += " | ";
        ents += s.entities[i];
      }
      out += io::csv_row({l.language, std::to_string(s.pair_id), std::string(to_string(s.scenario)),
                          fmt(s.bleu), fmt(s.chrfpp), fmt(s.bp), std::to_string(s.unigram_matches),
                          ents, s.error.value_or("")});
    }
  }
  return out;
}

}  // namespace mtaudit::adversary
