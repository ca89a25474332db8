// SPDX-License-Identifier: Apache-2.0
// Repository store: record serialization, upsert/get/remove semantics, index
// ordering, crash tolerance of the append-only index, and the fault-injection
// seam that simulates a crash at every I/O step of a write.
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/store.hpp"
#include "repoforge/util.hpp"

using namespace repoforge;
namespace fs = std::filesystem;

namespace {

struct Arena {
  fs::path root;
  explicit Arena(const std::string& tag) {
    root = fs::temp_directory_path() /
           ("repoforge-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Arena() { fs::remove_all(root); }
};

RepoRecord make_record(const std::string& full_name, const std::string& qd,
                       const std::string& experience = "worked fine") {
  RepoRecord r;
  r.ref = RepoRef::parse(full_name, "https://github.test/" + full_name + ".git");
  r.image.tag = "repoforge/" + full_name.substr(full_name.find('/') + 1) + ":cafe0123";
  r.image.created_at_ms = 1700000000000;
  r.function_description = full_name + " does a thing";
  r.experience = experience;
  r.query_digest = qd;
  r.created_at_ms = 1700000001000;
  return r;
}

/// Exception type thrown by the injection hook so the tests can tell an
/// injected crash apart from a genuine store error.
struct InjectedFault : std::runtime_error {
  explicit InjectedFault(const std::string& op)
      : std::runtime_error("injected fault at " + op) {}
};

std::vector<std::string> names_of(const std::vector<RepoRecord>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.ref.full_name);
  return out;
}

}  // namespace

// ---- record serialization ----------------------------------------------------

TEST_CASE("repo records survive a JSON round trip") {
  RepoRecord r = make_record("octo/widget", "aaaa1111");
  r.experience = "needed two retries; pin numpy<2\nsecond line";
  const std::string text = record_to_json_text(r);
  RepoRecord back = record_from_json_text(text);
  CHECK(back.ref.full_name == "octo/widget");
  CHECK(back.ref.clone_url == "https://github.test/octo/widget.git");
  CHECK(back.image.tag == r.image.tag);
  CHECK(back.image.created_at_ms == r.image.created_at_ms);
  CHECK(back.function_description == r.function_description);
  CHECK(back.experience == r.experience);
  CHECK(back.query_digest == "aaaa1111");
  CHECK(back.created_at_ms == r.created_at_ms);
  // Serialization is deterministic, so blobs are content-addressable.
  CHECK(record_to_json_text(back) == text);
}

TEST_CASE("record parsing rejects non-objects and missing fields") {
  CHECK_THROWS_AS(record_from_json_text("[]"), Error);
  CHECK_THROWS_AS(record_from_json_text("not json at all"), Error);
  try {
    record_from_json_text(R"({"full_name":"a/b","image":{"tag":"t"}})");
    FAIL("accepted a record with missing fields");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StorePersist);
    CHECK(std::string(e.what()).find("missing field") != std::string::npos);
  }
}

// ---- put / get / upsert --------------------------------------------------------

TEST_CASE("put stores records retrievable by (repository, query digest)") {
  Arena a("store-put");
  RepoStore store(a.root / "store");

  CHECK(store.size() == 0);
  CHECK_FALSE(store.get("octo/widget", "q1").has_value());
  CHECK(store.list().empty());

  store.put(make_record("octo/widget", "q1", "first run notes"));
  CHECK(store.size() == 1);
  auto got = store.get("octo/widget", "q1");
  REQUIRE(got.has_value());
  CHECK(got->experience == "first run notes");
  CHECK(got->image.tag == "repoforge/widget:cafe0123");

  // The blob lands under its own content digest.
  const std::string blob_digest =
      sha256_hex(record_to_json_text(make_record("octo/widget", "q1", "first run notes")));
  CHECK(fs::exists(a.root / "store" / "blobs" / blob_digest));

  // Same repository under a different query is a distinct record.
  store.put(make_record("octo/widget", "q2"));
  // Different repository under the same query is a distinct record.
  store.put(make_record("acme/gadget", "q1"));
  CHECK(store.size() == 3);

  // Unknown lookups miss.
  CHECK_FALSE(store.get("octo/widget", "q3").has_value());
  CHECK_FALSE(store.get("nobody/nothing", "q1").has_value());
}

TEST_CASE("put on an existing key replaces the record in place") {
  Arena a("store-upsert");
  RepoStore store(a.root / "store");
  store.put(make_record("octo/widget", "q1", "old notes"));
  store.put(make_record("octo/widget", "q1", "new notes"));
  CHECK(store.size() == 1);
  auto got = store.get("octo/widget", "q1");
  REQUIRE(got.has_value());
  CHECK(got->experience == "new notes");

  // Re-putting identical content is harmless too (same blob digest).
  store.put(make_record("octo/widget", "q1", "new notes"));
  CHECK(store.size() == 1);
}

TEST_CASE("list returns live records most recently written first") {
  Arena a("store-order");
  RepoStore store(a.root / "store");
  store.put(make_record("one/alpha", "q"));
  store.put(make_record("two/beta", "q"));
  store.put(make_record("three/gamma", "q"));
  CHECK(names_of(store.list()) ==
        std::vector<std::string>{"three/gamma", "two/beta", "one/alpha"});

  // An upsert counts as the most recent write and moves the record forward.
  store.put(make_record("one/alpha", "q", "rerun"));
  CHECK(names_of(store.list()) ==
        std::vector<std::string>{"one/alpha", "three/gamma", "two/beta"});
}

TEST_CASE("remove hides a record and reports whether anything was removed") {
  Arena a("store-remove");
  RepoStore store(a.root / "store");
  store.put(make_record("octo/widget", "q1"));
  store.put(make_record("octo/widget", "q2"));

  CHECK(store.remove("octo/widget", "q1"));
  CHECK_FALSE(store.get("octo/widget", "q1").has_value());
  CHECK(store.get("octo/widget", "q2").has_value());
  CHECK(store.size() == 1);

  CHECK_FALSE(store.remove("octo/widget", "q1"));   // already gone
  CHECK_FALSE(store.remove("never/present", "q1")); // never there

  // A removed key can be written again.
  store.put(make_record("octo/widget", "q1", "back again"));
  auto got = store.get("octo/widget", "q1");
  REQUIRE(got.has_value());
  CHECK(got->experience == "back again");
}

TEST_CASE("records persist across reopening the store") {
  Arena a("store-reopen");
  {
    RepoStore store(a.root / "store");
    store.put(make_record("one/alpha", "q", "alpha notes"));
    store.put(make_record("two/beta", "q", "beta notes"));
  }
  RepoStore reopened(a.root / "store");
  CHECK(names_of(reopened.list()) ==
        std::vector<std::string>{"two/beta", "one/alpha"});
  auto got = reopened.get("one/alpha", "q");
  REQUIRE(got.has_value());
  CHECK(got->experience == "alpha notes");
}

// ---- stale flags ---------------------------------------------------------------

TEST_CASE("list resolves stale flags through the image probe") {
  Arena a("store-stale");
  RepoStore store(a.root / "store");
  store.put(make_record("one/alpha", "q"));
  store.put(make_record("two/beta", "q"));

  auto rows = store.list(
      [](const std::string& tag) { return tag == "repoforge/alpha:cafe0123"; });
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    if (r.ref.full_name == "one/alpha") CHECK_FALSE(r.stale);
    if (r.ref.full_name == "two/beta") CHECK(r.stale);
  }

  // The plain listing never marks anything stale.
  for (const auto& r : store.list()) CHECK_FALSE(r.stale);
}

// ---- index damage tolerance ------------------------------------------------------

TEST_CASE("a torn final index line is ignored and healed on the next write") {
  Arena a("store-torn");
  const fs::path root = a.root / "store";
  {
    RepoStore store(root);
    store.put(make_record("one/alpha", "q"));
    store.put(make_record("two/beta", "q"));
  }
  // Simulate a crash mid-append: chop the file in the middle of the last line.
  const fs::path index = root / "index.jsonl";
  std::string text = read_file_text(index);
  const std::size_t second_line_start = text.find('\n') + 1;
  const std::string torn =
      text.substr(0, second_line_start + 10);  // partial, no newline
  write_file_atomic(index, torn);

  RepoStore reopened(root);
  CHECK(names_of(reopened.list()) == std::vector<std::string>{"one/alpha"});
  CHECK_FALSE(reopened.get("two/beta", "q").has_value());

  // The next write rewrites the trusted prefix before appending.
  reopened.put(make_record("three/gamma", "q"));
  CHECK(names_of(reopened.list()) ==
        std::vector<std::string>{"three/gamma", "one/alpha"});
  std::string healed = read_file_text(index);
  CHECK(healed.back() == '\n');
  // Trusted prefix preserved, torn fragment gone, exactly two whole lines left.
  CHECK(healed.substr(0, second_line_start) == text.substr(0, second_line_start));
  CHECK(std::count(healed.begin(), healed.end(), '\n') == 2);
}

TEST_CASE("a corrupt line poisons only the index tail after it") {
  Arena a("store-midrot");
  const fs::path root = a.root / "store";
  {
    RepoStore store(root);
    store.put(make_record("one/alpha", "q"));
  }
  const fs::path index = root / "index.jsonl";
  // A complete but unparseable line between two valid ones: everything from
  // the rot onward is distrusted, the prefix stays authoritative.
  append_line(index, R"({"op":"frobnicate"})");
  {
    // The next write heals the file first, so the new record is appended to
    // the trusted prefix rather than after the rot.
    RepoStore store(root);
    store.put(make_record("two/beta", "q"));
    CHECK(names_of(store.list()) ==
          std::vector<std::string>{"two/beta", "one/alpha"});
  }
  RepoStore reopened(root);
  CHECK(names_of(reopened.list()) ==
        std::vector<std::string>{"two/beta", "one/alpha"});
  // The heal dropped the rotten line entirely.
  CHECK(read_file_text(index).find("frobnicate") == std::string::npos);
}

TEST_CASE("an index entry whose blob vanished is skipped, not fatal") {
  Arena a("store-orphan");
  RepoStore store(a.root / "store");
  store.put(make_record("one/alpha", "q"));
  store.put(make_record("two/beta", "q"));
  // Lose beta's blob out from under the index.
  const std::string beta_digest =
      sha256_hex(record_to_json_text(make_record("two/beta", "q")));
  fs::remove(a.root / "store" / "blobs" / beta_digest);

  CHECK_FALSE(store.get("two/beta", "q").has_value());
  CHECK(names_of(store.list()) == std::vector<std::string>{"one/alpha"});
}

// ---- fault injection ---------------------------------------------------------------

TEST_CASE("a clean put touches its I/O points in a fixed order") {
  Arena a("store-ops");
  RepoStore store(a.root / "store");
  std::vector<std::string> ops;
  store.set_io_hook([&](const std::string& op) { ops.push_back(op); });

  store.put(make_record("octo/widget", "q1"));
  CHECK(ops == std::vector<std::string>{"blob_tmp_write", "blob_rename",
                                        "index_open", "index_append",
                                        "index_flush"});

  ops.clear();
  store.remove("octo/widget", "q1");
  CHECK(ops == std::vector<std::string>{"index_open", "index_append",
                                        "index_flush"});

  ops.clear();
  store.remove("octo/widget", "q1");  // miss: no index write at all
  CHECK(ops.empty());
}

TEST_CASE("a crash at any I/O point of put leaves the store consistent") {
  const std::vector<std::string> points = {"blob_tmp_write", "blob_rename",
                                           "index_open", "index_append",
                                           "index_flush"};
  const RepoRecord before = make_record("kept/steady", "q0", "pre-crash state");
  const RepoRecord incoming = make_record("new/arrival", "q1", "post-crash state");

  for (const std::string& point : points) {
    CAPTURE(point);
    Arena a("store-crash-" + point.substr(point.find('_') + 1));
    const fs::path root = a.root / "store";
    {
      RepoStore store(root);
      store.put(before);
      store.set_io_hook([&](const std::string& op) {
        if (op == point) throw InjectedFault(op);
      });
      CHECK_THROWS_AS(store.put(incoming), InjectedFault);
    }

    // Reopen cold, as a restart would, and demand old XOR new state.
    RepoStore reopened(root);
    auto kept = reopened.get("kept/steady", "q0");
    REQUIRE(kept.has_value());
    CHECK(kept->experience == "pre-crash state");
    auto arrived = reopened.get("new/arrival", "q1");
    if (arrived.has_value()) {
      CHECK(arrived->experience == "post-crash state");  // fully there
      CHECK(reopened.size() == 2);
    } else {
      CHECK(reopened.size() == 1);  // or not there at all
    }

    // A retry must land regardless of where the crash hit.
    reopened.put(incoming);
    auto retried = reopened.get("new/arrival", "q1");
    REQUIRE(retried.has_value());
    CHECK(retried->experience == "post-crash state");
    CHECK(reopened.size() == 2);
  }
}

TEST_CASE("a crash during remove leaves the record either live or gone") {
  for (const std::string& point :
       {std::string("index_open"), std::string("index_append"),
        std::string("index_flush")}) {
    CAPTURE(point);
    Arena a("store-rmcrash");
    const fs::path root = a.root / "store";
    {
      RepoStore store(root);
      store.put(make_record("octo/widget", "q1"));
      store.set_io_hook([&](const std::string& op) {
        if (op == point) throw InjectedFault(op);
      });
      CHECK_THROWS_AS(store.remove("octo/widget", "q1"), InjectedFault);
    }
    RepoStore reopened(root);
    auto got = reopened.get("octo/widget", "q1");
    if (got.has_value()) CHECK(got->experience == "worked fine");  // intact
    // Retrying the removal converges on "gone" either way.
    reopened.remove("octo/widget", "q1");
    CHECK_FALSE(reopened.get("octo/widget", "q1").has_value());
  }
}
