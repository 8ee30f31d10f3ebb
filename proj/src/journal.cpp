#include "mtaudit/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"

namespace mtaudit::annotation {

std::uint64_t AnnotationJournal::load(const std::filesystem::path& path,
                                      std::map<Key, Entry>& latest, std::size_t* valid_bytes) {
  if (valid_bytes) *valid_bytes = 0;
  if (!std::filesystem::exists(path)) return 0;
  const std::string content = io::read_file(path);
  std::uint64_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = content.size();
    const std::string_view line(content.data() + start, end - start);
    start = end + 1;
    if (line.empty()) {
      if (terminated && valid_bytes) *valid_bytes = start;
      continue;
    }
    AnnotationRecord rec;
    try {
      from_json(nlohmann::json::parse(line), rec);
    } catch (const std::exception& e) {
      if (!terminated) break;  // torn tail from an interrupted append
      throw ValidationError(path.string() + ":" + std::to_string(line_no + 1) + ": " + e.what());
    }
    ++line_no;
    // A complete record missing only its newline still counts.
    if (valid_bytes) *valid_bytes = std::min(start, content.size());
    Key key{rec.pair_id, rec.annotator_id};
    latest[key] = Entry{std::move(rec), line_no};
  }
  return line_no;
}

std::vector<AnnotationRecord> AnnotationJournal::replay(const std::filesystem::path& path) {
  std::map<Key, Entry> latest;
  load(path, latest, nullptr);
  std::vector<AnnotationRecord> out;
  out.reserve(latest.size());
  for (auto& [k, e] : latest) out.push_back(std::move(e.record));
  return out;
}

AnnotationJournal::AnnotationJournal(std::filesystem::path path) : path_(std::move(path)) {
  std::size_t valid = 0;
  version_ = load(path_, latest_, &valid);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open journal " + path_.string() + ": " + std::strerror(errno));
  const auto size = std::filesystem::file_size(path_);
  if (size > valid) {
    // Drop a torn tail left by an interrupted append.
    if (::ftruncate(fd_, static_cast<off_t>(valid)) != 0) {
      throw IoError("cannot repair journal " + path_.string());
    }
  }
  if (valid > 0) {
    const std::string content = io::read_file(path_);
    if (content.back() != '\n' && ::write(fd_, "\n", 1) != 1) {
      throw IoError("cannot repair journal " + path_.string());
    }
  }
}

AnnotationJournal::~AnnotationJournal() {
  if (fd_ >= 0) ::close(fd_);
}

AnnotationJournal::AppendResult AnnotationJournal::append(const AnnotationRecord& record) {
  nlohmann::json j = record;
  const std::string line = j.dump() + "\n";

  std::lock_guard lock(mutex_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("journal append failed: " + std::string(std::strerror(errno)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw IoError("journal fsync failed: " + std::string(std::strerror(errno)));

  AppendResult result;
  result.revision = ++version_;
  Key key{record.pair_id, record.annotator_id};
  if (const auto it = latest_.find(key); it != latest_.end()) {
    result.replaced_revision = it->second.revision;
  }
  latest_[key] = Entry{record, result.revision};
  return result;
}

std::vector<AnnotationRecord> AnnotationJournal::snapshot() const {
  std::lock_guard lock(mutex_);
  std::vector<AnnotationRecord> out;
  out.reserve(latest_.size());
  for (const auto& [k, e] : latest_) out.push_back(e.record);
  return out;
}

std::vector<AnnotationRecord> AnnotationJournal::snapshot_for(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  std::vector<AnnotationRecord> out;
  for (const auto& [k, e] : latest_) {
    if (k.second == annotator_id) out.push_back(e.record);
  }
  return out;
}

std::optional<AnnotationJournal::Entry> AnnotationJournal::find(
    std::size_t pair_id, const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  const auto it = latest_.find(Key{pair_id, annotator_id});
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t AnnotationJournal::version() const {
  std::lock_guard lock(mutex_);
  return version_;
}

}  // namespace mtaudit::annotation
