// SPDX-License-Identifier: Apache-2.0
#include "repoforge/orchestrator.hpp"

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"
#include "json.hpp"

namespace repoforge {

using nlohmann::json;

// ---- TrajectoryContext -------------------------------------------------------

TrajectoryContext::TrajectoryContext(PhaseId phase, History& history,
                                     TrajectoryWriter* writer, SpoolStore& spool,
                                     int max_actions)
    : phase_(phase),
      history_(history),
      writer_(writer),
      spool_(spool),
      max_actions_(max_actions) {}

void TrajectoryContext::require_budget() const {
  if (used_ >= max_actions_)
    raise(Errc::PhaseBudgetExceeded,
          std::string(to_string(phase_)) + " phase spent all " +
              std::to_string(max_actions_) + " actions without submitting");
}

const Step& TrajectoryContext::record(Action action, std::string payload,
                                      ObsStatus status) {
  require_budget();
  Step s;
  s.seq = history_.next_seq();
  s.phase = phase_;
  s.action = std::move(action);
  s.observation = make_observation(spool_, std::move(payload), status);
  const Step& stored = history_.append(std::move(s));
  ++used_;
  if (writer_) writer_->write_step(stored);
  return stored;
}

void TrajectoryContext::marker(const std::string& name) {
  if (writer_) writer_->write_marker(phase_, name, now_ms());
}

// ---- command payload ---------------------------------------------------------

std::string compose_command_payload(const CommandResult& r) {
  // Exit status last so it survives tail-keeping truncation.
  std::string out = r.stdout_text;
  if (!out.empty() && out.back() != '\n') out += '\n';
  if (!r.stderr_text.empty()) {
    out += "--- stderr ---\n";
    out += r.stderr_text;
    if (out.back() != '\n') out += '\n';
  }
  out += "exit=" + std::to_string(r.exit_code);
  if (r.timed_out) out += " timeout";
  return out;
}

// ---- FinalReport ---------------------------------------------------------------

std::string FinalReport::to_json_text() const {
  json j;
  j["success"] = success;
  j["repo"] = repo_full_name;
  j["reused_stored"] = reused_stored;
  j["answer"] = answer;
  j["artifacts"] = artifacts;
  json phases_json = json::array();
  for (const auto& p : phases) {
    phases_json.push_back({{"phase", to_string(p.phase)},
                           {"success", p.success},
                           {"summary", p.summary},
                           {"steps", p.steps_used}});
  }
  j["phases"] = phases_json;
  j["failure_reason"] = failure_reason;
  j["trajectory"] = trajectory_file;
  j["isolation"] = isolation;
  json cost = json::parse(cost_json, nullptr, false);
  j["cost"] = cost.is_discarded() ? json::object() : cost;
  return j.dump(2) + "\n";
}

// ---- Orchestrator --------------------------------------------------------------

Orchestrator::Orchestrator(EngineServices services, fs::path run_dir)
    : services_(services) {
  paths_.run_dir = std::move(run_dir);
  paths_.trajectory = paths_.run_dir / "trajectory.jsonl";
  paths_.report = paths_.run_dir / "report.json";
  paths_.workspace_root = paths_.run_dir / "workspaces";
  fs::create_directories(paths_.run_dir);
}

FinalReport Orchestrator::run_query(const Query& q) {
  if (!q.valid()) raise(Errc::Usage, "query text must not be empty");

  FinalReport rep;
  rep.isolation = services_.sandbox.isolation();
  rep.trajectory_file = paths_.trajectory.filename().string();

  History history;
  TrajectoryWriter writer(paths_.trajectory);
  const int cap = services_.budget.max_actions_per_phase;

  auto outcome = [&](PhaseId p, bool success, std::string summary) {
    PhaseOutcome o;
    o.phase = p;
    o.success = success;
    o.summary = std::move(summary);
    o.steps_used = static_cast<int>(history.phase_steps(p).size());
    rep.phases.push_back(std::move(o));
  };

  SearchResult found;
  SetupResult setup;
  ApplyResult applied;
  StoreResult stored;
  PhaseId stage = PhaseId::Search;
  try {
    {
      TrajectoryContext ctx(PhaseId::Search, history, &writer, services_.spool, cap);
      ctx.marker("phase-start");
      found = run_search_phase(services_, q, ctx);
    }
    rep.repo_full_name = found.ref.full_name;
    rep.reused_stored = found.from_store;
    outcome(PhaseId::Search, true,
            (found.from_store ? "reusing stored " : "selected ") + found.ref.full_name);

    stage = PhaseId::Setup;
    if (found.from_store) {
      writer.write_marker(PhaseId::Setup, "setup-skipped", now_ms());
      outcome(PhaseId::Setup, true, "skipped: stored environment image");
    } else {
      TrajectoryContext ctx(PhaseId::Setup, history, &writer, services_.spool, cap);
      ctx.marker("phase-start");
      setup = run_setup_phase(services_, q, found, ctx);
      outcome(PhaseId::Setup, true, "environment ready in " + setup.repo_dir);
    }

    stage = PhaseId::Apply;
    {
      TrajectoryContext ctx(PhaseId::Apply, history, &writer, services_.spool, cap);
      ctx.marker("phase-start");
      applied = run_apply_phase(services_, q, found, setup, ctx);
      outcome(PhaseId::Apply, applied.success,
              applied.summary.empty() ? "submitted" : applied.summary);
    }

    stage = PhaseId::Store;
    {
      TrajectoryContext ctx(PhaseId::Store, history, &writer, services_.spool, cap);
      if (!found.from_store && applied.success) ctx.marker("phase-start");
      stored = run_store_phase(services_, q, found, setup, applied, ctx);
      std::string summary = stored.skipped
                                ? (found.from_store ? "skipped: record already stored"
                                                    : "skipped: apply failed")
                                : (stored.success ? "stored " + found.ref.full_name
                                                  : "model declined to store");
      outcome(PhaseId::Store, stored.success || stored.skipped, summary);
    }

    rep.success = applied.success;
    rep.answer = applied.answer;
    rep.artifacts = applied.artifacts;
  } catch (const Error& e) {
    rep.success = false;
    rep.failure_reason = e.what();
    outcome(stage, false, e.what());
    writer.write_marker(stage, "aborted", now_ms());
  }

  if (!setup.handle.id.empty() && setup.handle.state == SandboxState::Running) {
    try {
      services_.sandbox.destroy(setup.handle);
    } catch (const Error&) {
      // Teardown best effort; artifacts stay readable in the workspace dir.
    }
  }

  rep.cost_json = services_.gateway.ledger().to_json_text();
  write_file_atomic(paths_.report, rep.to_json_text());
  return rep;
}

}  // namespace repoforge
