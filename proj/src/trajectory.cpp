// SPDX-License-Identifier: Apache-2.0
#include "repoforge/trajectory.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

// json objects keep keys sorted, so dump() is canonical for a given value.

std::string serialize_trajectory_line(const TrajectoryLine& line) {
  json j;
  j["phase"] = to_string(line.phase);
  j["ts"] = line.ts;
  if (line.kind == TrajectoryLine::Kind::Marker) {
    j["marker"] = line.marker;
    return j.dump();
  }
  const Step& s = line.step;
  j["seq"] = s.seq;
  json args = json::object();
  for (const auto& [k, v] : s.action.args) args[k] = v;
  j["action"] = {{"kind", to_string(s.action.kind)}, {"args", args}};
  j["observation"] = {{"status", to_string(s.observation.status)},
                      {"payload_digest", s.observation.payload_digest},
                      {"byte_len", s.observation.byte_len_original}};
  return j.dump();
}

TrajectoryLine parse_trajectory_line(const std::string& text) {
  json j = json::parse(text);
  TrajectoryLine line;
  line.phase = phase_from_string(j.at("phase").get<std::string>());
  line.ts = j.at("ts").get<std::int64_t>();
  if (j.contains("marker")) {
    line.kind = TrajectoryLine::Kind::Marker;
    line.marker = j.at("marker").get<std::string>();
    return line;
  }
  line.kind = TrajectoryLine::Kind::Step;
  Step& s = line.step;
  s.seq = j.at("seq").get<int>();
  s.phase = line.phase;
  s.action.kind = action_kind_from_string(j.at("action").at("kind").get<std::string>());
  for (const auto& [k, v] : j.at("action").at("args").items())
    s.action.args[k] = v.get<std::string>();
  s.action.issued_at_ms = line.ts;
  const json& o = j.at("observation");
  s.observation.status = obs_status_from_string(o.at("status").get<std::string>());
  s.observation.payload_digest = o.at("payload_digest").get<std::string>();
  s.observation.byte_len_original = o.at("byte_len").get<std::uint64_t>();
  return line;
}

std::string mask_timestamps(const std::string& log_text) {
  std::istringstream in(log_text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    j["ts"] = 0;
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrajectoryWriter::TrajectoryWriter(fs::path file) : path_(std::move(file)) {
  fs::create_directories(path_.parent_path());
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) raise(Errc::StorePersist, "cannot open trajectory " + path_.string());
}

void TrajectoryWriter::write_step(const Step& s) {
  TrajectoryLine line;
  line.kind = TrajectoryLine::Kind::Step;
  line.step = s;
  line.phase = s.phase;
  line.ts = s.action.issued_at_ms;
  out_ << serialize_trajectory_line(line) << '\n';
  out_.flush();
}

void TrajectoryWriter::write_marker(PhaseId phase, const std::string& name,
                                    std::int64_t ts) {
  TrajectoryLine line;
  line.kind = TrajectoryLine::Kind::Marker;
  line.marker = name;
  line.phase = phase;
  line.ts = ts;
  out_ << serialize_trajectory_line(line) << '\n';
  out_.flush();
}

std::vector<TrajectoryLine> read_trajectory(const fs::path& file) {
  std::vector<TrajectoryLine> out;
  std::istringstream in(read_file_text(file));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(parse_trajectory_line(line));
  }
  return out;
}

}  // namespace repoforge
