#include "mtaudit/service.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include "httplib.h"
#include "mtaudit/errors.hpp"

namespace mtaudit::service {

using annotation::AnnotationRecord;
using nlohmann::json;

namespace {

constexpr const char* kAnnotatorHeader = "X-Annotator-Id";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string annotator_of(const httplib::Request& req) {
  return req.get_header_value(kAnnotatorHeader);
}

json revision_json(const std::optional<std::uint64_t>& r) { return r ? json(*r) : json(nullptr); }

// Runs a handler, mapping library exceptions to HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const ValidationError& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

bool is_valid_corpus_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.';
  });
}

std::vector<Corpus> load_corpus_store(const std::filesystem::path& dir, const LoadOptions& opts) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("corpus store is not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> tsvs;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".tsv") tsvs.push_back(e.path());
  }
  std::sort(tsvs.begin(), tsvs.end());
  std::vector<Corpus> out;
  for (const auto& p : tsvs) {
    CorpusMeta meta;
    if (!load_corpus_meta(p, meta)) continue;
    const LanguagePair tags{LanguageTag::parse(meta.source_lang), LanguageTag::parse(meta.target_lang)};
    Corpus c = load_corpus_tsv(p, tags, meta.split, opts);
    c.name = meta.name.empty() ? p.stem().string() : meta.name;
    out.push_back(std::move(c));
  }
  return out;
}

void save_to_store(const Corpus& corpus, const std::filesystem::path& dir) {
  if (!is_valid_corpus_name(corpus.name)) {
    throw ValidationError("invalid corpus name '" + corpus.name + "'");
  }
  if (corpus.empty()) throw ValidationError("refusing to store an empty corpus");
  std::filesystem::create_directories(dir);
  const auto tsv = dir / (corpus.name + ".tsv");
  save_corpus_tsv(corpus, tsv);
  const auto& first = corpus.pairs.front();
  save_corpus_meta({corpus.name, first.source_lang.code(), first.target_lang.code(), corpus.split}, tsv);
}

// ---- SessionState ----------------------------------------------------------------

SessionState::SessionState(std::filesystem::path journal_dir, annotation::AggregateOptions opts)
    : journal_dir_(std::move(journal_dir)), opts_(std::move(opts)) {
  std::error_code ec;
  std::filesystem::create_directories(journal_dir_, ec);
  if (ec) throw IoError("cannot create journal directory " + journal_dir_.string() + ": " + ec.message());
}

void SessionState::add_corpus(Corpus corpus) {
  if (!is_valid_corpus_name(corpus.name)) {
    throw ValidationError("invalid corpus name '" + corpus.name + "'");
  }
  std::unique_lock lock(corpora_mutex_);
  if (corpora_.count(corpus.name)) throw ValidationError("duplicate corpus '" + corpus.name + "'");
  auto journal = std::make_unique<annotation::AnnotationJournal>(journal_dir_ / (corpus.name + ".jsonl"));
  const std::string name = corpus.name;
  corpora_.emplace(name, Entry{std::move(corpus), std::move(journal)});
}

std::vector<std::string> SessionState::corpus_names() const {
  std::shared_lock lock(corpora_mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : corpora_) out.push_back(name);
  return out;
}

const SessionState::Entry& SessionState::entry(const std::string& name) const {
  std::shared_lock lock(corpora_mutex_);
  const auto it = corpora_.find(name);
  if (it == corpora_.end()) throw NotFound("unknown corpus '" + name + "'");
  return it->second;
}

const Corpus& SessionState::corpus(const std::string& name) const { return entry(name).corpus; }

annotation::AnnotationJournal& SessionState::journal(const std::string& name) {
  return *entry(name).journal;
}

const annotation::AnnotationJournal& SessionState::journal(const std::string& name) const {
  return *entry(name).journal;
}

std::shared_ptr<const annotation::AggregateStats> SessionState::stats(const std::string& name,
                                                                      const std::string& annotator) {
  const auto& e = entry(name);
  const auto version = e.journal->version();
  const auto key = std::make_pair(name, annotator);
  {
    std::lock_guard lock(cache_mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end() && it->second.version == version) return it->second.stats;
  }
  // The snapshot may be newer than `version`; caching it under the older
  // version only costs one extra recompute.
  const auto records = annotator.empty() ? e.journal->snapshot() : e.journal->snapshot_for(annotator);
  auto computed = std::make_shared<const annotation::AggregateStats>(
      annotation::aggregate(records, e.corpus, opts_));
  std::lock_guard lock(cache_mutex_);
  ++computations_;
  cache_[key] = {version, computed};
  return computed;
}

std::uint64_t SessionState::stats_computations() const {
  std::lock_guard lock(cache_mutex_);
  return computations_;
}

void SessionState::set_audit(const std::string& name, adversary::LanguageAudit audit) {
  entry(name);
  std::lock_guard lock(audit_mutex_);
  audits_[name] = std::move(audit);
}

std::optional<adversary::LanguageAudit> SessionState::audit(const std::string& name) const {
  entry(name);
  std::lock_guard lock(audit_mutex_);
  const auto it = audits_.find(name);
  if (it == audits_.end()) return std::nullopt;
  return it->second;
}

// ---- HTTP ----------------------------------------------------------------------

struct Service::Impl {
  SessionState& state;
  httplib::Server server;
  std::thread thread;
  std::size_t max_page;

  Impl(SessionState& s, std::size_t page) : state(s), max_page(page) {}

  void routes();
  void list_corpora(httplib::Response& res);
  void list_pairs(const httplib::Request& req, httplib::Response& res);
  void post_annotation(const httplib::Request& req, httplib::Response& res);
  void get_stats(const httplib::Request& req, httplib::Response& res);
  void get_audit(const httplib::Request& req, httplib::Response& res);
  void run_audit(const httplib::Request& req, httplib::Response& res);
};

void Service::Impl::routes() {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });
  server.Get("/api/corpora", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { list_corpora(res); });
  });
  server.Get("/api/corpora/:name/pairs", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { list_pairs(req, res); });
  });
  server.Post("/api/corpora/:name/pairs/:id/annotation",
              [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] { post_annotation(req, res); });
              });
  server.Get("/api/corpora/:name/stats", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { get_stats(req, res); });
  });
  server.Get("/api/corpora/:name/audit", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { get_audit(req, res); });
  });
  server.Post("/api/corpora/:name/audit", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { run_audit(req, res); });
  });
}

void Service::Impl::list_corpora(httplib::Response& res) {
  json out = json::array();
  for (const auto& name : state.corpus_names()) {
    const auto& c = state.corpus(name);
    json item{{"name", name}, {"size", c.size()}, {"split", std::string(to_string(c.split))},
              {"journal_version", state.journal(name).version()}};
    if (!c.empty()) {
      item["source_lang"] = c.pairs.front().source_lang.code();
      item["target_lang"] = c.pairs.front().target_lang.code();
    }
    out.push_back(std::move(item));
  }
  send_json(res, 200, {{"corpora", out}});
}

void Service::Impl::list_pairs(const httplib::Request& req, httplib::Response& res) {
  const auto name = req.path_params.at("name");
  const auto& corpus = state.corpus(name);
  std::size_t offset = 0;
  std::size_t limit = 50;
  if (req.has_param("offset")) {
    const auto v = parse_index(req.get_param_value("offset"));
    if (!v) return send_error(res, 400, "offset must be a non-negative integer");
    offset = *v;
  }
  if (req.has_param("limit")) {
    const auto v = parse_index(req.get_param_value("limit"));
    if (!v || *v == 0 || *v > max_page) {
      return send_error(res, 400, "limit must be between 1 and " + std::to_string(max_page));
    }
    limit = *v;
  }
  const auto annotator = annotator_of(req);
  const auto& journal = state.journal(name);
  json pairs = json::array();
  for (std::size_t i = offset; i < corpus.size() && i < offset + limit; ++i) {
    const auto& p = corpus.pairs[i];
    json item{{"id", p.id}, {"source", p.source_text}, {"reference", p.reference_text},
              {"annotation", nullptr}, {"revision", nullptr}};
    if (!annotator.empty()) {
      if (const auto found = journal.find(p.id, annotator)) {
        item["annotation"] = found->record;
        item["revision"] = found->revision;
      }
    }
    pairs.push_back(std::move(item));
  }
  send_json(res, 200,
            {{"corpus", name}, {"offset", offset}, {"limit", limit}, {"total", corpus.size()}, {"pairs", pairs}});
}

void Service::Impl::post_annotation(const httplib::Request& req, httplib::Response& res) {
  const auto name = req.path_params.at("name");
  const auto& corpus = state.corpus(name);
  const auto id = parse_index(req.path_params.at("id"));
  if (!id || *id >= corpus.size()) {
    return send_error(res, 404, "unknown pair '" + req.path_params.at("id") + "' in corpus '" + name + "'");
  }
  const auto annotator = annotator_of(req);
  if (annotator.empty()) return send_error(res, 400, std::string("missing ") + kAnnotatorHeader + " header");

  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception& e) {
    return send_error(res, 400, std::string("body is not JSON: ") + e.what());
  }
  if (!body.is_object()) return send_error(res, 400, "body must be a JSON object");

  std::optional<std::uint64_t> base_revision;
  if (const auto it = body.find("base_revision"); it != body.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) return send_error(res, 400, "base_revision must be a non-negative integer");
    base_revision = it->get<std::uint64_t>();
  }
  body.erase("base_revision");
  body["pair_id"] = *id;
  body["annotator_id"] = annotator;
  body["timestamp"] = annotation::format_timestamp(annotation::now());
  if (!body.contains("categories")) body["categories"] = json::array();

  AnnotationRecord record;
  try {
    record = body.get<AnnotationRecord>();
  } catch (const ValidationError& e) {
    return send_json(res, 422, {{"error", e.what()}, {"violations", json::array()}});
  }
  if (const auto violations = annotation::validate(record); !violations.empty()) {
    return send_json(res, 422, {{"error", "annotation violates the guidelines"}, {"violations", violations}});
  }

  auto& journal = state.journal(name);
  const auto current = journal.find(*id, annotator);
  const auto result = journal.append(record);
  json out{{"record", record}, {"revision", result.revision},
           {"replaced_revision", revision_json(result.replaced_revision)}};

  const std::uint64_t current_rev = current ? current->revision : 0;
  if (base_revision && *base_revision != current_rev) {
    res.set_header("Warning", "299 mtaudit \"stale base_revision " + std::to_string(*base_revision) +
                                  "; revision " + std::to_string(current_rev) +
                                  " was overwritten (last write wins)\"");
    out["conflict"] = {{"base_revision", *base_revision}, {"current_revision", current_rev}};
    return send_json(res, 409, out);
  }
  if (result.replaced_revision) {
    res.set_header("Warning", "299 mtaudit \"replaced revision " + std::to_string(*result.replaced_revision) +
                                  " (last write wins)\"");
    return send_json(res, 200, out);
  }
  send_json(res, 201, out);
}

void Service::Impl::get_stats(const httplib::Request& req, httplib::Response& res) {
  const auto name = req.path_params.at("name");
  std::string annotator = req.has_param("annotator") ? req.get_param_value("annotator") : annotator_of(req);
  if (req.has_param("scope") && req.get_param_value("scope") == "all") annotator.clear();
  const auto version = state.journal(name).version();
  const auto stats = state.stats(name, annotator);
  json out = *stats;
  out["corpus"] = name;
  out["annotator"] = annotator.empty() ? json(nullptr) : json(annotator);
  out["journal_version"] = version;
  send_json(res, 200, out);
}

void Service::Impl::get_audit(const httplib::Request& req, httplib::Response& res) {
  const auto name = req.path_params.at("name");
  const auto audit = state.audit(name);
  if (!audit) return send_error(res, 404, "no audit has been computed for '" + name + "'");
  send_json(res, 200, *audit);
}

void Service::Impl::run_audit(const httplib::Request& req, httplib::Response& res) {
  const auto name = req.path_params.at("name");
  const auto& corpus = state.corpus(name);
  adversary::AuditConfig cfg;
  if (!req.body.empty()) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return send_error(res, 400, std::string("body is not JSON: ") + e.what());
    }
    const auto mode = adversary::parse_extractor_mode(body.value("extractor", std::string("heuristic")));
    if (mode != adversary::ExtractorMode::Heuristic) {
      return send_error(res, 422, "the service only runs the heuristic extractor");
    }
    cfg.padding.token = body.value("padding_token", cfg.padding.token);
    cfg.padding.count = body.value("padding_count", cfg.padding.count);
  }
  auto report = adversary::run_audit(std::span<const Corpus>(&corpus, 1), cfg);
  if (report.languages.empty()) return send_error(res, 422, "corpus is empty");
  state.set_audit(name, report.languages.front());
  send_json(res, 200, report.languages.front());
}

Service::Service(SessionState& state, ServiceConfig cfg)
    : impl_(std::make_unique<Impl>(state, cfg.max_page)), cfg_(std::move(cfg)) {
  impl_->routes();
  if (!cfg_.static_dir.empty() && !impl_->server.set_mount_point("/", cfg_.static_dir.string())) {
    throw IoError("static directory not found: " + cfg_.static_dir.string());
  }
}

Service::~Service() { stop(); }

int Service::bind() {
  if (cfg_.port == 0) {
    port_ = impl_->server.bind_to_any_port(cfg_.host);
  } else {
    port_ = impl_->server.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
  }
  if (port_ < 0) throw IoError("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  return port_;
}

void Service::listen() {
  if (!impl_->server.listen_after_bind()) throw IoError("server stopped unexpectedly");
}

int Service::start() {
  bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace mtaudit::service
