// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "navsim/agent.hpp"

namespace navsim {

/// Remote chat-completion endpoint settings. The credential is read from the
/// environment variable named in api_key_env and never stored in files.
struct RemoteEndpoint {
  std::string url;
  std::string model = "navigation-core";
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 2;
  std::string api_key_env;
  double backoff_initial_s = 0.5;
};

struct HttpUrlParts {
  std::string host;
  int port = 80;
  std::string path = "/";
};

inline HttpUrlParts parse_http_url(const std::string& url) {
  const std::string prefix = "http://";
  if (url.rfind(prefix, 0) != 0)
    throw std::invalid_argument("only http:// endpoints are supported: " + url);
  HttpUrlParts parts;
  std::string rest = url.substr(prefix.size());
  const std::size_t slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) parts.path = rest.substr(slash);
  const std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    parts.host = authority;
  } else {
    parts.host = authority.substr(0, colon);
    parts.port = std::stoi(authority.substr(colon + 1));
  }
  if (parts.host.empty()) throw std::invalid_argument("empty host in url: " + url);
  return parts;
}

/// Chat-completion request body for a prompt bundle: the system text as the
/// system message, the scene plus tool feedback as the user message.
inline json chat_request_body(const PromptBundle& prompt, const RemoteEndpoint& ep) {
  std::string user = prompt.scene;
  for (const auto& f : prompt.feedback) user += "\n\n" + f;
  json body;
  body["model"] = ep.model;
  body["messages"] = json::array({{{"role", "system"}, {"content", prompt.system}},
                                  {{"role", "user"}, {"content", user}}});
  body["temperature"] = ep.temperature;
  return body;
}

/// Extract the assistant text from a chat-completion response body.
inline std::optional<std::string> parse_chat_response(const std::string& body) {
  try {
    const json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

/// Decision core backed by a remote chat-completion service. Applies the
/// configured timeout and bounded retries with exponential backoff; failures
/// surface as transport errors for the agent's rule fallback.
class RemoteLlmCore final : public DecisionCore {
 public:
  explicit RemoteLlmCore(RemoteEndpoint endpoint) : ep_(std::move(endpoint)) {}

  std::string name() const override { return "remote"; }

  CoreResult complete(const PromptBundle& prompt, const AgentContext&) override {
    HttpUrlParts parts;
    try {
      parts = parse_http_url(ep_.url);
    } catch (const std::exception& e) {
      return {"", std::string("endpoint: ") + e.what(), 0};
    }

    const std::string body = chat_request_body(prompt, ep_).dump();
    std::string last_error = "no attempt made";

    for (int attempt = 0; attempt <= ep_.max_retries; ++attempt) {
      if (attempt > 0) {
        const double backoff = ep_.backoff_initial_s * std::pow(2.0, attempt - 1);
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      }

      httplib::Client client(parts.host, parts.port);
      client.set_connection_timeout(std::chrono::duration<double>(ep_.timeout_s));
      client.set_read_timeout(std::chrono::duration<double>(ep_.timeout_s));
      client.set_write_timeout(std::chrono::duration<double>(ep_.timeout_s));
      httplib::Headers headers;
      if (!ep_.api_key_env.empty()) {
        if (const char* key = std::getenv(ep_.api_key_env.c_str()))
          headers.emplace("Authorization", std::string("Bearer ") + key);
      }

      auto res = client.Post(parts.path, headers, body, "application/json");
      if (!res) {
        last_error = "transport: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "http status " + std::to_string(res->status);
        continue;
      }
      auto content = parse_chat_response(res->body);
      if (!content) {
        last_error = "malformed chat-completion response body";
        continue;
      }
      return {*content, "", attempt};
    }
    return {"", last_error, ep_.max_retries};
  }

 private:
  RemoteEndpoint ep_;
};

}  // namespace navsim
