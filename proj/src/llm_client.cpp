#include "mtaudit/llm_client.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "mtaudit/annotation.hpp"
#include "mtaudit/errors.hpp"

namespace mtaudit::adversary {

namespace {

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

nlohmann::json build_chat_request(const std::string& model, const std::string& prompt) {
  return nlohmann::json{{"model", model},
                        {"temperature", 0},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
}

std::string parse_chat_response(const nlohmann::json& body) {
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmUnavailable(std::string("unexpected chat-completion response: ") + e.what());
  }
}

HttpLlmClient::HttpLlmClient(LlmSettings settings)
    : settings_(std::move(settings)),
      slots_(std::clamp(settings_.max_in_flight, 1, 1024)) {
  const auto scheme_end = settings_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("LLM endpoint must be an absolute http(s) URL");
  }
  const auto path_start = settings_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = settings_.endpoint;
    path_ = "/";
  } else {
    base_url_ = settings_.endpoint.substr(0, path_start);
    path_ = settings_.endpoint.substr(path_start);
  }
}

void HttpLlmClient::log_transcript(const nlohmann::json& entry) {
  if (settings_.transcript_path.empty()) return;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(settings_.transcript_path, std::ios::app);
  out << entry.dump() << '\n';
}

std::string HttpLlmClient::complete(const std::string& prompt) {
  SlotGuard slot(slots_);
  const auto request = build_chat_request(settings_.model, prompt);

  httplib::Client client(base_url_);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(settings_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path_, headers, request.dump(), "application/json");

  nlohmann::json entry{{"timestamp", annotation::format_timestamp(annotation::now())},
                       {"endpoint", settings_.endpoint},
                       {"request", request}};
  if (!res) {
    entry["error"] = httplib::to_string(res.error());
    log_transcript(entry);
    throw LlmUnavailable("LLM request failed: " + httplib::to_string(res.error()));
  }
  entry["status"] = res->status;
  entry["response"] = res->body;
  log_transcript(entry);
  if (res->status != 200) {
    throw LlmUnavailable("LLM endpoint returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw LlmUnavailable(std::string("LLM response is not JSON: ") + e.what());
  }
  return parse_chat_response(body);
}

}  // namespace mtaudit::adversary
