#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtaudit/annotation.hpp"

namespace mtaudit::annotation {

// Append-only JSON Lines store. Replay keeps the last record written for
// each (pair_id, annotator_id). All appends go through one mutex-guarded
// writer and are fsynced before append() returns.
class AnnotationJournal {
 public:
  struct Entry {
    AnnotationRecord record;
    std::uint64_t revision = 0;  // 1-based journal line of the record
  };

  struct AppendResult {
    std::uint64_t revision = 0;
    // Revision of the record this one superseded, if any.
    std::optional<std::uint64_t> replaced_revision;
  };

  // Creates the file if missing, then replays it.
  explicit AnnotationJournal(std::filesystem::path path);
  ~AnnotationJournal();

  AnnotationJournal(const AnnotationJournal&) = delete;
  AnnotationJournal& operator=(const AnnotationJournal&) = delete;

  AppendResult append(const AnnotationRecord& record);

  // Latest record per key, ordered by (pair_id, annotator_id).
  std::vector<AnnotationRecord> snapshot() const;
  std::vector<AnnotationRecord> snapshot_for(const std::string& annotator_id) const;
  std::optional<Entry> find(std::size_t pair_id, const std::string& annotator_id) const;

  // Number of records ever appended (journal lines).
  std::uint64_t version() const;
  const std::filesystem::path& path() const { return path_; }

  // Reads a journal without opening it for writing. A torn final line
  // (no trailing newline, unparsable) is ignored; any other malformed line
  // throws ValidationError.
  static std::vector<AnnotationRecord> replay(const std::filesystem::path& path);

 private:
  using Key = std::pair<std::size_t, std::string>;
  static std::uint64_t load(const std::filesystem::path& path, std::map<Key, Entry>& latest,
                            std::size_t* valid_bytes);

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<Key, Entry> latest_;
  std::uint64_t version_ = 0;
  int fd_ = -1;
};

}  // namespace mtaudit::annotation
