// SPDX-License-Identifier: Apache-2.0
//
// Standalone mock chat-completion server for exercising --core remote
// against a local endpoint.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "navsim/testing/mock_llm.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mock chat-completion server"};
  navsim::testing::MockLlmServer::Behavior behavior;
  app.add_option("--response", behavior.response_text, "assistant reply text");
  app.add_option("--delay-ms", behavior.delay_ms, "per-request delay");
  app.add_option("--fail-first", behavior.fail_first_n,
                 "fail this many requests before succeeding");
  app.add_option("--status", behavior.fail_status, "failure HTTP status");
  CLI11_PARSE(app, argc, argv);

  navsim::testing::MockLlmServer server(behavior);
  std::cout << "listening on " << server.url() << std::endl;
  std::cout << "press enter to stop" << std::endl;
  std::cin.get();
  return 0;
}
