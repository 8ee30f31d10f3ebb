#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtaudit/adversary.hpp"
#include "mtaudit/annotation.hpp"
#include "mtaudit/corpus.hpp"
#include "mtaudit/journal.hpp"

namespace mtaudit::service {

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Corpus names double as journal file stems: [A-Za-z0-9_.-]+, not "." or "..".
bool is_valid_corpus_name(std::string_view name);

// Loads every <stem>.tsv in `dir` that has a .meta.json sidecar.
std::vector<Corpus> load_corpus_store(const std::filesystem::path& dir, const LoadOptions& opts = {});

// Writes <dir>/<name>.tsv and its sidecar.
void save_to_store(const Corpus& corpus, const std::filesystem::path& dir);

// Corpora, one journal per corpus (<journal_dir>/<name>.jsonl), a stats
// cache keyed by (corpus, annotator) and validated against the journal
// version, and the latest adversarial audit per corpus.
class SessionState {
 public:
  explicit SessionState(std::filesystem::path journal_dir, annotation::AggregateOptions opts = {});

  // Throws ValidationError on a bad or duplicate name.
  void add_corpus(Corpus corpus);

  std::vector<std::string> corpus_names() const;
  // Throw NotFound.
  const Corpus& corpus(const std::string& name) const;
  annotation::AnnotationJournal& journal(const std::string& name);
  const annotation::AnnotationJournal& journal(const std::string& name) const;

  // Empty annotator aggregates every annotator's latest records.
  std::shared_ptr<const annotation::AggregateStats> stats(const std::string& name,
                                                          const std::string& annotator = {});
  std::uint64_t stats_computations() const;

  void set_audit(const std::string& name, adversary::LanguageAudit audit);
  std::optional<adversary::LanguageAudit> audit(const std::string& name) const;

 private:
  struct Entry {
    Corpus corpus;
    std::unique_ptr<annotation::AnnotationJournal> journal;
  };
  struct CachedStats {
    std::uint64_t version = 0;
    std::shared_ptr<const annotation::AggregateStats> stats;
  };

  const Entry& entry(const std::string& name) const;

  std::filesystem::path journal_dir_;
  annotation::AggregateOptions opts_;
  mutable std::shared_mutex corpora_mutex_;
  std::map<std::string, Entry> corpora_;

  mutable std::mutex cache_mutex_;
  std::map<std::pair<std::string, std::string>, CachedStats> cache_;
  std::uint64_t computations_ = 0;

  mutable std::mutex audit_mutex_;
  std::map<std::string, adversary::LanguageAudit> audits_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;  // empty disables static files
  std::size_t max_page = 500;
};

// HTTP/JSON front end. Annotator identity comes from the X-Annotator-Id
// request header.
class Service {
 public:
  Service(SessionState& state, ServiceConfig cfg = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the port. Throws IoError.
  int bind();
  // Serves until stop(); bind() first.
  void listen();
  // bind() plus listen() on a background thread.
  int start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServiceConfig cfg_;
  int port_ = -1;
};

}  // namespace mtaudit::service
