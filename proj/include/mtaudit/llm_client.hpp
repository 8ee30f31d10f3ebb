#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "json.hpp"
#include "mtaudit/adversary.hpp"

namespace mtaudit::adversary {

struct LlmSettings {
  // Full chat-completions URL, e.g. "https://api.openai.com/v1/chat/completions".
  std::string endpoint;
  std::string model = "gpt-4o";
  // Name of the environment variable holding the bearer token.
  std::string api_key_env = "MTAUDIT_LLM_API_KEY";
  int max_in_flight = 4;
  int timeout_seconds = 60;
  // JSON Lines log of every request/response pair; empty disables it.
  std::filesystem::path transcript_path;
};

nlohmann::json build_chat_request(const std::string& model, const std::string& prompt);
// Returns choices[0].message.content; throws LlmUnavailable on other shapes.
std::string parse_chat_response(const nlohmann::json& body);

// JSON-over-HTTP chat-completion client (temperature 0). At most
// max_in_flight requests run concurrently; extra callers block.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmSettings settings);
  std::string complete(const std::string& prompt) override;

 private:
  void log_transcript(const nlohmann::json& entry);

  LlmSettings settings_;
  std::string base_url_;
  std::string path_;
  std::counting_semaphore<1024> slots_;
  std::mutex log_mutex_;
};

}  // namespace mtaudit::adversary
