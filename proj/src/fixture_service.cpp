// SPDX-License-Identifier: Apache-2.0
#include "repoforge/fixture_service.hpp"

#include <algorithm>
#include <chrono>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

struct FixtureService::Impl {
  httplib::Server server;
};

FixtureService::FixtureService(FixtureCorpus corpus)
    : corpus_(std::move(corpus)), impl_(std::make_unique<Impl>()) {}

FixtureService::~FixtureService() { stop(); }

std::string FixtureService::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void FixtureService::fail_next(int requests, int retry_after_s) {
  retry_after_s_ = retry_after_s;
  fail_requests_ = requests;
}

void FixtureService::start() {
  httplib::Server& srv = impl_->server;

  srv.set_pre_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    int left = fail_requests_.load();
    while (left > 0 &&
           !fail_requests_.compare_exchange_weak(left, left - 1)) {
    }
    if (left > 0) {
      res.status = 403;
      res.set_header("Retry-After", std::to_string(retry_after_s_.load()));
      res.set_header("x-ratelimit-remaining", "0");
      res.set_content(R"({"message":"API rate limit exceeded"})", "application/json");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  auto not_found = [](httplib::Response& res) {
    res.status = 404;
    res.set_content(R"({"message":"Not Found"})", "application/json");
  };

  srv.Get("/search/repositories",
          [this, not_found](const httplib::Request& req, httplib::Response& res) {
            std::string q = req.get_param_value("q");
            int per_page = req.has_param("per_page")
                               ? std::atoi(req.get_param_value("per_page").c_str())
                               : 10;
            std::vector<RepoCandidate> hits;
            if (q.rfind("topic:", 0) == 0) {
              std::string topic = to_lower(q.substr(6));
              for (const RepoCandidate& c : corpus_.all())
                if (std::find(c.topics.begin(), c.topics.end(), topic) !=
                    c.topics.end())
                  hits.push_back(c);
            } else {
              for (const RepoCandidate& c : corpus_.all()) {
                bool hit = q.find('/') != std::string::npos
                               ? to_lower(c.ref.full_name) == to_lower(q)
                               : contains_ci(c.ref.name(), q);
                if (hit) hits.push_back(c);
              }
            }
            sort_candidates(hits);
            if (per_page > 0 && static_cast<int>(hits.size()) > per_page)
              hits.resize(per_page);
            json items = json::array();
            for (const RepoCandidate& c : hits) {
              items.push_back({{"full_name", c.ref.full_name},
                               {"name", c.ref.name()},
                               {"clone_url", c.ref.clone_url},
                               {"topics", c.topics},
                               {"stargazers_count", c.stars},
                               {"description", c.description}});
            }
            json body = {{"total_count", items.size()},
                         {"incomplete_results", false},
                         {"items", items}};
            res.set_content(body.dump(), "application/json");
          });

  srv.Get(R"(/repos/([^/]+)/([^/]+)/readme)",
          [this, not_found](const httplib::Request& req, httplib::Response& res) {
            std::string full = req.matches[1].str() + "/" + req.matches[2].str();
            if (!corpus_.find(full) || !corpus_.has_readme(full)) {
              not_found(res);
              return;
            }
            json body = {{"name", "README.md"},
                         {"encoding", "base64"},
                         {"content", base64_encode(corpus_.readme(full))}};
            res.set_content(body.dump(), "application/json");
          });

  srv.Get("/search/issues",
          [this](const httplib::Request& req, httplib::Response& res) {
            std::string q = req.get_param_value("q");
            int per_page = req.has_param("per_page")
                               ? std::atoi(req.get_param_value("per_page").c_str())
                               : 10;
            // q := repo:owner/name+type:{issue|pr}+term... ('+' may arrive
            // as a space depending on the client's encoder)
            std::string repo;
            ThreadKind kind = ThreadKind::Issue;
            std::vector<std::string> terms;
            std::string tok;
            auto take = [&](const std::string& t) {
              if (t.empty()) return;
              if (t.rfind("repo:", 0) == 0)
                repo = t.substr(5);
              else if (t.rfind("type:", 0) == 0)
                kind = t.substr(5) == "pr" ? ThreadKind::PullRequest
                                           : ThreadKind::Issue;
              else
                terms.push_back(t);
            };
            for (char c : q) {
              if (c == '+' || c == ' ') {
                take(tok);
                tok.clear();
              } else {
                tok += c;
              }
            }
            take(tok);
            std::vector<ThreadItem> items =
                repo.empty() ? std::vector<ThreadItem>{}
                             : corpus_.threads(repo, kind);
            rank_threads(items, join(terms, " "));
            if (per_page > 0 && static_cast<int>(items.size()) > per_page)
              items.resize(per_page);
            json arr = json::array();
            for (const ThreadItem& t : items) {
              json item = {{"number", t.id},
                           {"title", t.title},
                           {"body", t.body},
                           {"state", t.state}};
              if (t.kind == ThreadKind::PullRequest)
                item["pull_request"] = {
                    {"url", "http://localhost/repos/" + repo + "/pulls/" +
                                std::to_string(t.id)}};
              arr.push_back(item);
            }
            json body = {{"total_count", arr.size()}, {"items", arr}};
            res.set_content(body.dump(), "application/json");
          });

  srv.Get(R"(/repos/([^/]+)/([^/]+)/pulls/(\d+)/files)",
          [this, not_found](const httplib::Request& req, httplib::Response& res) {
            std::string full = req.matches[1].str() + "/" + req.matches[2].str();
            int id = std::atoi(req.matches[3].str().c_str());
            auto t = corpus_.thread(full, ThreadKind::PullRequest, id);
            if (!t) {
              not_found(res);
              return;
            }
            json arr = json::array();
            for (const PrFile& f : split_diff_by_file(t->diff)) {
              // GitHub's "patch" is the hunks without the ---/+++ header.
              std::vector<std::string> lines = split(f.diff, '\n');
              std::string status = "modified";
              std::string patch;
              for (const std::string& line : lines) {
                if (line.rfind("--- ", 0) == 0) {
                  if (trim(line.substr(4)) == "/dev/null") status = "added";
                  continue;
                }
                if (line.rfind("+++ ", 0) == 0) {
                  if (trim(line.substr(4)) == "/dev/null") status = "removed";
                  continue;
                }
                if (line.empty() && patch.empty()) continue;
                patch += line;
                patch += '\n';
              }
              if (!patch.empty() && patch.back() == '\n') patch.pop_back();
              arr.push_back(
                  {{"filename", f.path}, {"status", status}, {"patch", patch}});
            }
            res.set_content(arr.dump(), "application/json");
          });

  port_ = srv.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) raise(Errc::NetworkError, "fixture service could not bind");
  thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  while (!srv.is_running())
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
}

void FixtureService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace repoforge
