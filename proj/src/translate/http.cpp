#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "goalinf/translate/translate.hpp"

namespace goalinf::translate {

std::string api_key_from_env() {
  const char* key = std::getenv("OPENAI_API_KEY");
  if (!key || !*key) throw AuthError("OPENAI_API_KEY is not set");
  return key;
}

HttpTransport::HttpTransport(HttpOptions options) : options_(std::move(options)) {
  if (options_.api_key.empty()) throw AuthError("no API key configured");
  if (options_.model.empty()) throw InvalidRequest("no model name configured for live requests");
}

std::string HttpTransport::complete(const Completion& request) {
  nlohmann::json body = {
      {"model", options_.model},
      {"temperature", request.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
  };
  httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};

  int delay_ms = options_.initial_backoff_ms;
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds);
    client.set_read_timeout(options_.timeout_seconds);
    auto res = client.Post(options_.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500) {
      rate_limited = res->status == 429;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("unexpected response shape: ") + e.what());
    }
  }
  if (rate_limited) throw RateLimited("still rate limited after " + std::to_string(options_.max_retries) + " retries");
  throw TransportError(last_error + " after " + std::to_string(options_.max_retries) + " retries");
}

}  // namespace goalinf::translate
