// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "repoforge/github.hpp"

namespace repoforge {

/// Loopback HTTP server exposing a FixtureCorpus through the same REST wire
/// format the live repository host speaks, so the REST client can be tested
/// end-to-end with no network.
class FixtureService {
 public:
  explicit FixtureService(FixtureCorpus corpus);
  ~FixtureService();
  FixtureService(const FixtureService&) = delete;
  FixtureService& operator=(const FixtureService&) = delete;

  void start();  // binds 127.0.0.1 on a free port
  void stop();
  int port() const { return port_; }
  std::string base_url() const;

  /// The next `requests` requests answer 403 + Retry-After (rate-limit drill).
  void fail_next(int requests, int retry_after_s);

 private:
  struct Impl;  // hides httplib from the header
  FixtureCorpus corpus_;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> fail_requests_{0};
  std::atomic<int> retry_after_s_{1};
};

}  // namespace repoforge
