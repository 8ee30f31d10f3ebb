#include "mtaudit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtaudit/adversary.hpp"
#include "mtaudit/annotation.hpp"
#include "mtaudit/errors.hpp"
#include "mtaudit/harness.hpp"
#include "mtaudit/io.hpp"
#include "mtaudit/journal.hpp"
#include "mtaudit/kernels.hpp"
#include "mtaudit/llm_client.hpp"
#include "mtaudit/service.hpp"
#include "mtaudit/unicode.hpp"

namespace mtaudit::cli {

using nlohmann::json;

namespace {

std::vector<std::string> name_components(const std::filesystem::path& file) {
  std::vector<std::string> parts;
  std::stringstream ss(file.filename().string());
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Writes to `path` atomically, or to `out` when path is empty.
void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty()) {
    out << content;
  } else {
    io::write_file_atomic(path, content);
  }
}

Exec exec_of(bool serial) { return serial ? Exec::Serial : Exec::Parallel; }

// ---- subcommand option bundles ----------------------------------------------------

struct Common {
  bool csv = false;
  bool serial = false;
  bool no_nfc = false;
  LoadOptions load() const { return {.normalize_nfc = !no_nfc}; }
};

struct IngestOpts {
  std::string src, ref, tsv, store, name, split;
  std::optional<std::string> src_lang, tgt_lang;
};

struct ScoreOpts {
  std::string metric, hyp, tokenizer = "whitespace", smoothing = "exp", out;
  std::vector<std::string> refs;
  bool sentence = false, shifts = false, keep_whitespace = false;
  int max_order = 4, word_order = 2, char_order = 6;
  double beta = 2.0;
};

struct FilterOpts {
  std::string src, ref, out_src, out_ref, report;
  double max_ratio = 2.0;
  std::size_t min_tokens = 1;
  bool no_dedup = false;
};

struct AuditOpts {
  std::string src, out, sentences_csv, extractor = "heuristic", gazetteer, stopwords;
  std::vector<std::string> refs;
  std::optional<std::string> src_lang;
  std::string llm_endpoint, llm_model = "gpt-4o", llm_key_env = "MTAUDIT_LLM_API_KEY", llm_transcript,
                            llm_examples;
  int llm_max_in_flight = 4;
  std::string padding_token = "dummy";
  std::size_t padding_count = 50;
  bool allow_non_english = false;
};

struct TqsOpts {
  std::string journal, corpus, annotator, tokenizer = "whitespace", out, label;
  std::optional<std::string> tgt_lang;
  bool json = false;
};

struct MatrixOpts {
  std::string manifest, from_csv, format = "json", out;
};

struct ServeOpts {
  std::string store, journals, static_dir, host = "127.0.0.1";
  int port = 8080;
};

// ---- ingest ------------------------------------------------------------------------

int do_ingest(const IngestOpts& o, const Common& c, std::ostream& out) {
  Corpus corpus;
  if (!o.tsv.empty()) {
    if (!o.src.empty() || !o.ref.empty()) throw ValidationError("use either --tsv or --src/--ref");
    if (!o.src_lang || !o.tgt_lang) throw ValidationError("--tsv needs --src-lang and --tgt-lang");
    const Split split = o.split.empty() ? infer_split(o.tsv) : parse_split(o.split);
    corpus = load_corpus_tsv(o.tsv, {LanguageTag::parse(*o.src_lang), LanguageTag::parse(*o.tgt_lang)}, split,
                             c.load());
  } else {
    if (o.src.empty() || o.ref.empty()) throw ValidationError("ingest needs --src and --ref (or --tsv)");
    const LanguagePair tags{infer_tag(o.src, o.src_lang), infer_tag(o.ref, o.tgt_lang)};
    const Split split = o.split.empty() ? infer_split(o.ref) : parse_split(o.split);
    corpus = load_corpus(o.src, o.ref, tags, split, c.load());
  }
  if (corpus.empty()) throw ValidationError("corpus is empty");
  corpus.name = o.name.empty() ? corpus.pairs.front().target_lang.code() : o.name;
  service::save_to_store(corpus, o.store);
  const auto& first = corpus.pairs.front();
  json summary{{"name", corpus.name},
               {"pairs", corpus.size()},
               {"source_lang", first.source_lang.code()},
               {"target_lang", first.target_lang.code()},
               {"split", std::string(to_string(corpus.split))},
               {"path", (std::filesystem::path(o.store) / (corpus.name + ".tsv")).string()}};
  if (c.csv) {
    out << io::csv_row({"name", "pairs", "source_lang", "target_lang", "split", "path"})
        << io::csv_row({corpus.name, std::to_string(corpus.size()), first.source_lang.code(),
                        first.target_lang.code(), std::string(to_string(corpus.split)),
                        summary["path"].get<std::string>()});
  } else {
    out << summary.dump(2) << "\n";
  }
  return 0;
}

// ---- score -------------------------------------------------------------------------

int do_score(const ScoreOpts& o, const Common& c, std::ostream& out) {
  if (o.refs.empty()) throw ValidationError("score needs at least one --ref");
  if (o.refs.size() > 1 && o.metric != "bleu") throw ValidationError("only bleu accepts several --ref files");
  const TokenScheme scheme = o.tokenizer == "whitespace" ? TokenScheme::whitespace() : TokenScheme::named(o.tokenizer);
  if (!scheme.is_whitespace() && !has_tokenizer(scheme.plugin)) throw UnknownPlugin(scheme.plugin);

  std::vector<std::vector<std::string>> refs;
  for (const auto& r : o.refs) {
    auto lines = read_lines(r);
    if (c.load().normalize_nfc) {
      for (auto& l : lines) l = unicode::to_nfc(l);
    }
    refs.push_back(std::move(lines));
  }
  const auto hyps = load_hypotheses(o.hyp, refs.front().size(), c.load());
  for (const auto& r : refs) {
    if (r.size() != hyps.size()) throw LineCountMismatch(hyps.size(), r.size());
  }
  const Exec exec = exec_of(c.serial);

  json result;
  std::vector<json> sentences;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  if (o.metric == "bleu") {
    metrics::BleuConfig cfg;
    cfg.max_order = o.max_order;
    cfg.tokenizer = scheme;
    if (o.smoothing == "exp") {
      cfg.smoothing = metrics::Smoothing::ExponentialDecay;
    } else if (o.smoothing == "none") {
      cfg.smoothing = metrics::Smoothing::None;
    } else {
      throw ValidationError("--smoothing must be exp or none");
    }
    cfg.validate();
    metrics::BleuBreakdown corpus;
    std::vector<metrics::BleuBreakdown> per;
    if (refs.size() == 1) {
      corpus = kernels::corpus_bleu(hyps, refs[0], cfg, exec);
      if (o.sentence) per = kernels::sentence_bleu(hyps, refs[0], cfg, exec);
    } else {
      metrics::BleuStats total;
      for (std::size_t i = 0; i < hyps.size(); ++i) {
        const auto h = tokenize(hyps[i], scheme);
        std::vector<TokenList> rs;
        for (const auto& r : refs) rs.push_back(tokenize(r[i], scheme));
        const auto st = metrics::bleu_stats(h, rs, cfg.max_order);
        total += st;
        if (o.sentence) per.push_back(metrics::bleu_from_stats(st, cfg));
      }
      corpus = metrics::bleu_from_stats(total, cfg);
    }
    result = corpus;
    for (const auto& b : per) sentences.push_back(b);
    csv_header = {"id", "score", "bp", "hyp_len", "ref_len"};
    for (int n = 1; n <= cfg.max_order; ++n) csv_header.push_back("p" + std::to_string(n));
    const auto row = [](const std::string& id, const metrics::BleuBreakdown& b) {
      std::vector<std::string> r = {id, fmt6(b.score), fmt6(b.bp), std::to_string(b.hyp_len),
                                    std::to_string(b.ref_len)};
      for (double p : b.precisions) r.push_back(fmt6(p));
      return r;
    };
    for (std::size_t i = 0; i < per.size(); ++i) csv_rows.push_back(row(std::to_string(i), per[i]));
    csv_rows.push_back(row("corpus", corpus));
    for (auto& r : csv_rows) r.resize(csv_header.size());
  } else if (o.metric == "chrfpp" || o.metric == "chrf++") {
    metrics::ChrfConfig cfg{o.beta, o.word_order, o.char_order, !o.keep_whitespace};
    cfg.validate();
    const auto corpus = kernels::corpus_chrf(hyps, refs[0], cfg, exec);
    result = corpus;
    csv_header = {"id", "score", "precision", "recall"};
    if (o.sentence) {
      const auto per = kernels::sentence_chrf(hyps, refs[0], cfg, exec);
      for (std::size_t i = 0; i < per.size(); ++i) {
        sentences.push_back(per[i]);
        csv_rows.push_back({std::to_string(i), fmt6(per[i].score), fmt6(per[i].precision), fmt6(per[i].recall)});
      }
    }
    csv_rows.push_back({"corpus", fmt6(corpus.score), fmt6(corpus.precision), fmt6(corpus.recall)});
  } else if (o.metric == "cer" || o.metric == "ter") {
    metrics::TerConfig tcfg;
    tcfg.tokenizer = scheme;
    tcfg.shifts = o.shifts;
    const bool is_cer = o.metric == "cer";
    const auto corpus = is_cer ? kernels::corpus_cer(hyps, refs[0], exec)
                               : kernels::corpus_ter(hyps, refs[0], tcfg, exec);
    result = corpus;
    csv_header = {"id", "distance", "ref_units", "rate"};
    if (o.sentence) {
      const auto per = is_cer ? kernels::sentence_cer(hyps, refs[0], exec)
                              : kernels::sentence_ter(hyps, refs[0], tcfg, exec);
      for (std::size_t i = 0; i < per.size(); ++i) {
        sentences.push_back(per[i]);
        csv_rows.push_back(
            {std::to_string(i), std::to_string(per[i].distance), std::to_string(per[i].ref_units), fmt6(per[i].rate)});
      }
    }
    csv_rows.push_back({"corpus", std::to_string(corpus.distance), std::to_string(corpus.ref_units), fmt6(corpus.rate)});
  } else {
    throw ValidationError("unknown metric '" + o.metric + "' (bleu, chrfpp, cer, ter)");
  }

  std::string text;
  if (c.csv) {
    text = io::csv_row(csv_header);
    for (const auto& r : csv_rows) text += io::csv_row(r);
  } else {
    json doc{{"metric", o.metric}, {"sentences_scored", hyps.size()}, {"corpus", result}};
    if (o.sentence) doc["sentences"] = sentences;
    text = doc.dump(2) + "\n";
  }
  emit(out, o.out, text);
  return 0;
}

// ---- filter ------------------------------------------------------------------------

int do_filter(const FilterOpts& o, const Common& c, std::ostream& out) {
  const FilterConfig cfg{o.max_ratio, o.min_tokens, !o.no_dedup};
  cfg.validate();
  auto src = read_lines(o.src);
  auto ref = read_lines(o.ref);
  if (src.size() != ref.size()) throw LineCountMismatch(src.size(), ref.size());
  std::vector<TextPair> pairs;
  pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (c.load().normalize_nfc) {
      src[i] = unicode::to_nfc(src[i]);
      ref[i] = unicode::to_nfc(ref[i]);
    }
    pairs.emplace_back(std::move(src[i]), std::move(ref[i]));
  }
  const auto result = filter_corpus(pairs, cfg);
  if (!o.out_src.empty() || !o.out_ref.empty()) {
    if (o.out_src.empty() || o.out_ref.empty()) throw ValidationError("--out-src and --out-ref go together");
    std::string s, r;
    for (const auto& [a, b] : result.kept) {
      s += a + "\n";
      r += b + "\n";
    }
    io::write_file_atomic(o.out_src, s);
    io::write_file_atomic(o.out_ref, r);
  }
  const auto& rep = result.report;
  std::string text;
  if (c.csv) {
    text = io::csv_row({"input", "kept", "dropped_dup", "dropped_short", "dropped_ratio"}) +
           io::csv_row({std::to_string(rep.total()), std::to_string(rep.kept), std::to_string(rep.dropped_dup),
                        std::to_string(rep.dropped_short), std::to_string(rep.dropped_ratio)});
  } else {
    json j = rep;
    j["input"] = rep.total();
    j["config"] = {{"max_length_ratio", cfg.max_length_ratio}, {"min_tokens", cfg.min_tokens}, {"dedup", cfg.dedup}};
    text = j.dump(2) + "\n";
  }
  if (!o.report.empty()) io::write_file_atomic(o.report, text);
  out << text;
  return 0;
}

// ---- audit-ne ----------------------------------------------------------------------

int do_audit(const AuditOpts& o, const Common& c, std::ostream& out) {
  if (o.refs.empty()) throw ValidationError("audit-ne needs at least one --ref");
  const auto src_tag = infer_tag(o.src, o.src_lang);

  adversary::AuditConfig cfg;
  cfg.exec = exec_of(c.serial);
  cfg.padding = {o.padding_token, o.padding_count};
  cfg.require_english_source = !o.allow_non_english;
  cfg.extractor.mode = adversary::parse_extractor_mode(o.extractor);

  std::optional<adversary::StopwordList> stop;
  if (!o.stopwords.empty()) {
    stop = adversary::StopwordList::load(o.stopwords);
    cfg.extractor.stopwords = &*stop;
  }
  std::optional<adversary::Gazetteer> gaz;
  if (cfg.extractor.mode == adversary::ExtractorMode::Gazetteer) {
    if (o.gazetteer.empty()) throw ValidationError("--extractor gazetteer needs --gazetteer");
    gaz = adversary::Gazetteer::load(o.gazetteer);
    cfg.extractor.gazetteer = &*gaz;
  }
  std::unique_ptr<adversary::HttpLlmClient> llm;
  if (cfg.extractor.mode == adversary::ExtractorMode::ExternalLLM) {
    if (o.llm_endpoint.empty()) throw ValidationError("--extractor llm needs --llm-endpoint");
    adversary::LlmSettings s;
    s.endpoint = o.llm_endpoint;
    s.model = o.llm_model;
    s.api_key_env = o.llm_key_env;
    s.max_in_flight = o.llm_max_in_flight;
    s.transcript_path = o.llm_transcript;
    llm = std::make_unique<adversary::HttpLlmClient>(s);
    cfg.extractor.llm = llm.get();
    if (!o.llm_examples.empty()) cfg.extractor.llm_examples = io::read_file(o.llm_examples);
  }

  std::vector<Corpus> corpora;
  for (const auto& r : o.refs) {
    const auto tgt = infer_tag(r, std::nullopt);
    Corpus corpus = load_corpus(o.src, r, {src_tag, tgt}, infer_split(r), c.load());
    corpus.name = std::filesystem::path(r).filename().string();
    corpora.push_back(std::move(corpus));
  }
  const auto report = adversary::run_audit(corpora, cfg);
  const std::string report_json = json(report).dump(2) + "\n";
  if (!o.out.empty()) io::write_file_atomic(o.out, report_json);
  if (!o.sentences_csv.empty()) io::write_file_atomic(o.sentences_csv, adversary::sentences_csv(report));
  if (c.csv) {
    out << adversary::summary_csv(report);
  } else if (o.out.empty()) {
    out << report_json;
  } else {
    json summary = json::array();
    for (const auto& l : report.languages) {
      summary.push_back({{"language", l.language},
                         {"pairs", l.pairs},
                         {"scored", l.scored},
                         {"mean_bleu", l.mean_bleu},
                         {"mean_chrfpp", l.mean_chrfpp},
                         {"corpus_bleu", l.corpus_bleu},
                         {"corpus_chrfpp", l.corpus_chrfpp},
                         {"fraction_nonzero", l.fraction_nonzero}});
    }
    out << json{{"report", o.out}, {"languages", summary}}.dump(2) << "\n";
  }
  return 0;
}

// ---- tqs ---------------------------------------------------------------------------

int do_tqs(const TqsOpts& o, const Common& c, std::ostream& out) {
  std::vector<std::string> refs;
  std::string language = o.label;
  const std::filesystem::path corpus_path(o.corpus);
  if (corpus_path.extension() == ".tsv") {
    CorpusMeta meta;
    std::string src = "eng_Latn";
    std::string tgt = o.tgt_lang.value_or("");
    Split split = Split::Custom;
    if (load_corpus_meta(corpus_path, meta)) {
      src = meta.source_lang;
      if (tgt.empty()) tgt = meta.target_lang;
      split = meta.split;
    }
    if (tgt.empty()) tgt = infer_tag(corpus_path, std::nullopt).code();
    refs = load_corpus_tsv(corpus_path, {LanguageTag::parse(src), LanguageTag::parse(tgt)}, split, c.load())
               .references();
    if (language.empty()) language = tgt;
  } else {
    refs = read_lines(corpus_path);
    if (c.load().normalize_nfc) {
      for (auto& r : refs) r = unicode::to_nfc(r);
    }
    if (language.empty()) {
      try {
        language = infer_tag(corpus_path, o.tgt_lang).code();
      } catch (const ValidationError&) {
        language = corpus_path.filename().string();
      }
    }
  }

  auto records = annotation::AnnotationJournal::replay(o.journal);
  if (!o.annotator.empty()) {
    std::erase_if(records, [&](const auto& r) { return r.annotator_id != o.annotator; });
  }
  annotation::AggregateOptions opts;
  opts.tokenizer = o.tokenizer == "whitespace" ? TokenScheme::whitespace() : TokenScheme::named(o.tokenizer);
  const auto st = annotation::aggregate(records, refs, opts);

  const auto opt2 = [](const std::optional<double>& v) { return v ? fmt2(*v) : std::string("-"); };
  std::string text;
  if (o.json) {
    json j = st;
    j["language"] = language;
    text = j.dump(2) + "\n";
  } else if (c.csv) {
    text = io::csv_row({"language", "records", "correct", "minor", "major", "critical", "tqs", "tqs_mqm", "cer",
                        "ter"}) +
           io::csv_row({language, std::to_string(st.records), std::to_string(st.severity_counts.correct),
                        std::to_string(st.severity_counts.minor), std::to_string(st.severity_counts.major),
                        std::to_string(st.severity_counts.critical), opt2(st.tqs), opt2(st.tqs_mqm), opt2(st.cer),
                        opt2(st.ter)});
  } else {
    std::ostringstream s;
    s << "Language   " << language << "\n"
      << "Records    " << st.records << "\n"
      << "Severity   Correct " << st.severity_counts.correct << " | Minor " << st.severity_counts.minor
      << " | Major " << st.severity_counts.major << " | Critical " << st.severity_counts.critical << "\n"
      << "TQS        " << opt2(st.tqs) << "\n"
      << "TQS_MQM    " << opt2(st.tqs_mqm) << "  (W = " << st.error_counts.words << ")\n"
      << "CER        " << opt2(st.cer) << "\n"
      << "TER        " << opt2(st.ter) << "  (" << st.corrected << " corrected)\n";
    text = s.str();
  }
  emit(out, o.out, text);
  return 0;
}

// ---- matrix ------------------------------------------------------------------------

int do_matrix(const MatrixOpts& o, const Common& c, std::ostream& out) {
  const auto format = c.csv ? harness::MatrixFormat::Csv : harness::parse_matrix_format(o.format);
  harness::ScoreMatrix m;
  if (!o.from_csv.empty()) {
    if (!o.manifest.empty()) throw ValidationError("use either --manifest or --from-csv");
    m = harness::parse_matrix_csv(io::read_file(o.from_csv));
  } else {
    if (o.manifest.empty()) throw ValidationError("matrix needs --manifest or --from-csv");
    harness::ScoreConfig cfg;
    cfg.exec = exec_of(c.serial);
    m = harness::score_manifest(harness::load_manifest(o.manifest, c.load()), cfg);
  }
  emit(out, o.out, harness::emit_matrix(m, format));
  return 0;
}

// ---- serve -------------------------------------------------------------------------

int do_serve(const ServeOpts& o, const Common& c, std::ostream& err) {
  service::SessionState state(o.journals.empty() ? std::filesystem::path(o.store) / "journals"
                                                 : std::filesystem::path(o.journals));
  for (auto& corpus : service::load_corpus_store(o.store, c.load())) state.add_corpus(std::move(corpus));
  if (state.corpus_names().empty()) throw ValidationError("no corpora found in " + o.store);
  service::ServiceConfig cfg;
  cfg.host = o.host;
  cfg.port = o.port;
  cfg.static_dir = o.static_dir;
  service::Service svc(state, cfg);
  const int port = svc.bind();
  err << "serving " << state.corpus_names().size() << " corpora on http://" << o.host << ":" << port << std::endl;
  svc.listen();
  return 0;
}

}  // namespace

LanguageTag infer_tag(const std::filesystem::path& file, const std::optional<std::string>& explicit_tag) {
  if (explicit_tag) return LanguageTag::parse(*explicit_tag);
  const auto parts = name_components(file);
  for (const auto& p : parts) {
    if (LanguageTag::is_valid(p)) return LanguageTag::parse(p);
  }
  for (const auto& p : parts) {
    if (p.size() == 3 && std::all_of(p.begin(), p.end(), [](char ch) { return ch >= 'a' && ch <= 'z'; }) &&
        p != "dev" && p != "txt" && p != "tsv") {
      return LanguageTag::parse(p + "_Latn");
    }
  }
  throw ValidationError("cannot infer a language tag from '" + file.filename().string() +
                        "'; pass it explicitly");
}

Split infer_split(const std::filesystem::path& file) {
  for (const auto& p : name_components(file)) {
    if (p == "dev") return Split::Dev;
    if (p == "devtest") return Split::Devtest;
  }
  return Split::Custom;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit toolkit for low-resource machine translation evaluation", "mtaudit"};
  app.set_config("--config", "", "Read options from a TOML or INI file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub, bool csv) {
    if (csv) sub->add_flag("--csv", common.csv, "CSV instead of JSON output");
    sub->add_flag("--serial", common.serial, "Use the single-threaded reference path");
    sub->add_flag("--no-nfc", common.no_nfc, "Keep text exactly as read (no NFC normalization)");
  };

  IngestOpts ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a corpus store entry from paired files or a TSV");
  ingest_cmd->add_option("--src", ingest.src, "Source sentences, one per line");
  ingest_cmd->add_option("--ref", ingest.ref, "Reference translations, one per line");
  ingest_cmd->add_option("--tsv", ingest.tsv, "TSV with header id, source, reference");
  ingest_cmd->add_option("--src-lang", ingest.src_lang, "Source tag, e.g. eng_Latn");
  ingest_cmd->add_option("--tgt-lang", ingest.tgt_lang, "Target tag, e.g. kac_Latn");
  ingest_cmd->add_option("--split", ingest.split, "dev, devtest or custom");
  ingest_cmd->add_option("--name", ingest.name, "Corpus name (default: target tag)");
  ingest_cmd->add_option("--store", ingest.store, "Corpus store directory")->required();
  add_common(ingest_cmd, true);

  ScoreOpts score;
  auto* score_cmd = app.add_subcommand("score", "Score a hypothesis file against references");
  score_cmd->add_option("--metric", score.metric, "bleu, chrfpp, cer or ter")->required();
  score_cmd->add_option("--hyp", score.hyp, "Hypotheses, one per line")->required();
  score_cmd->add_option("--ref", score.refs, "Reference file (repeatable for bleu)")->required();
  score_cmd->add_flag("--sentence", score.sentence, "Include per-sentence breakdowns");
  score_cmd->add_option("--tokenizer", score.tokenizer, "Tokenizer plugin")->capture_default_str();
  score_cmd->add_option("--smoothing", score.smoothing, "BLEU smoothing: exp or none")->capture_default_str();
  score_cmd->add_option("--max-order", score.max_order, "BLEU n-gram order")->capture_default_str();
  score_cmd->add_option("--beta", score.beta, "ChrF++ beta")->capture_default_str();
  score_cmd->add_option("--word-order", score.word_order, "ChrF++ word n-gram order")->capture_default_str();
  score_cmd->add_option("--char-order", score.char_order, "ChrF++ character n-gram order")->capture_default_str();
  score_cmd->add_flag("--keep-whitespace", score.keep_whitespace, "Keep spaces in character n-grams");
  score_cmd->add_flag("--shifts", score.shifts, "TER with greedy block shifts");
  score_cmd->add_option("--out", score.out, "Write here instead of stdout");
  add_common(score_cmd, true);

  FilterOpts filter;
  auto* filter_cmd = app.add_subcommand("filter", "Drop duplicate and length-mismatched pairs");
  filter_cmd->add_option("--src", filter.src, "Source side")->required();
  filter_cmd->add_option("--ref", filter.ref, "Target side")->required();
  filter_cmd->add_option("--out-src", filter.out_src, "Filtered source output");
  filter_cmd->add_option("--out-ref", filter.out_ref, "Filtered target output");
  filter_cmd->add_option("--max-ratio", filter.max_ratio, "Maximum token-length ratio")->capture_default_str();
  filter_cmd->add_option("--min-tokens", filter.min_tokens, "Minimum tokens per side")->capture_default_str();
  filter_cmd->add_flag("--no-dedup", filter.no_dedup, "Keep duplicate pairs");
  filter_cmd->add_option("--report", filter.report, "Also write the report here");
  add_common(filter_cmd, true);

  AuditOpts audit;
  auto* audit_cmd = app.add_subcommand("audit-ne", "Score named-entity copying dummy translations");
  audit_cmd->add_option("--src", audit.src, "English source file")->required();
  audit_cmd->add_option("--ref", audit.refs, "Reference file per target language (repeatable)")->required();
  audit_cmd->add_option("--src-lang", audit.src_lang, "Source tag (default: from file name)");
  audit_cmd->add_option("--extractor", audit.extractor, "heuristic, gazetteer or llm")->capture_default_str();
  audit_cmd->add_option("--gazetteer", audit.gazetteer, "Entity list, one per line");
  audit_cmd->add_option("--stopwords", audit.stopwords, "Replacement stopword list");
  audit_cmd->add_option("--llm-endpoint", audit.llm_endpoint, "Chat-completions URL");
  audit_cmd->add_option("--llm-model", audit.llm_model, "Model name")->capture_default_str();
  audit_cmd->add_option("--llm-key-env", audit.llm_key_env, "Environment variable with the API key")
      ->capture_default_str();
  audit_cmd->add_option("--llm-transcript", audit.llm_transcript, "JSON Lines request log");
  audit_cmd->add_option("--llm-examples", audit.llm_examples, "Extra in-context examples file");
  audit_cmd->add_option("--llm-max-in-flight", audit.llm_max_in_flight, "Concurrent LLM requests")
      ->capture_default_str();
  audit_cmd->add_option("--padding-token", audit.padding_token, "Padding token")->capture_default_str();
  audit_cmd->add_option("--padding-count", audit.padding_count, "Padding repetitions")->capture_default_str();
  audit_cmd->add_flag("--allow-non-english", audit.allow_non_english, "Accept non-English sources");
  audit_cmd->add_option("--out", audit.out, "Write the full report JSON here");
  audit_cmd->add_option("--sentences-csv", audit.sentences_csv, "Write per-sentence CSV here");
  add_common(audit_cmd, true);

  TqsOpts tqs;
  auto* tqs_cmd = app.add_subcommand("tqs", "Summarize an annotation journal (TQS, TQS_MQM, CER, TER)");
  tqs_cmd->add_option("--journal", tqs.journal, "Annotation journal (JSON Lines)")->required();
  tqs_cmd->add_option("--corpus", tqs.corpus, "Reference file or corpus TSV")->required();
  tqs_cmd->add_option("--tgt-lang", tqs.tgt_lang, "Target tag when it cannot be inferred");
  tqs_cmd->add_option("--annotator", tqs.annotator, "Only this annotator's records");
  tqs_cmd->add_option("--tokenizer", tqs.tokenizer, "Tokenizer for W and TER")->capture_default_str();
  tqs_cmd->add_option("--label", tqs.label, "Language label in the summary");
  tqs_cmd->add_option("--out", tqs.out, "Write here instead of stdout");
  auto* tqs_json = tqs_cmd->add_flag("--json", tqs.json, "JSON output");
  add_common(tqs_cmd, false);
  tqs_cmd->add_flag("--csv", common.csv, "CSV output")->excludes(tqs_json);

  MatrixOpts matrix;
  auto* matrix_cmd = app.add_subcommand("matrix", "Score system runs into a test-set matrix");
  matrix_cmd->add_option("--manifest", matrix.manifest, "Run manifest JSON");
  matrix_cmd->add_option("--from-csv", matrix.from_csv, "Re-render a stored matrix CSV");
  matrix_cmd->add_option("--format", matrix.format, "json, csv or markdown")->capture_default_str();
  matrix_cmd->add_option("--out", matrix.out, "Write here instead of stdout");
  add_common(matrix_cmd, true);

  ServeOpts serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
  serve_cmd->add_option("--store", serve.store, "Corpus store directory")->required();
  serve_cmd->add_option("--journals", serve.journals, "Journal directory (default: <store>/journals)");
  serve_cmd->add_option("--static", serve.static_dir, "Static files for the workbench UI");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port (0 picks one)")->capture_default_str();
  add_common(serve_cmd, false);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest_cmd) return do_ingest(ingest, common, out);
    if (*score_cmd) return do_score(score, common, out);
    if (*filter_cmd) return do_filter(filter, common, out);
    if (*audit_cmd) return do_audit(audit, common, out);
    if (*tqs_cmd) return do_tqs(tqs, common, out);
    if (*matrix_cmd) return do_matrix(matrix, common, out);
    if (*serve_cmd) return do_serve(serve, common, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mtaudit::cli
