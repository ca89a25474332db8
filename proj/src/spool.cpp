// SPDX-License-Identifier: Apache-2.0
#include "repoforge/spool.hpp"

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

SpoolStore::SpoolStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::string SpoolStore::put(std::string_view bytes) {
  std::string digest = sha256_hex(bytes);
  fs::path p = path_for(digest);
  if (!fs::exists(p)) write_file_atomic(p, bytes);
  return digest;
}

bool SpoolStore::has(const std::string& digest) const {
  return fs::exists(path_for(digest));
}

std::string SpoolStore::read(const std::string& digest) const {
  return read_file_text(path_for(digest));
}

fs::path SpoolStore::path_for(const std::string& digest) const {
  return dir_ / digest;
}

Observation make_observation(SpoolStore& spool, std::string payload,
                             ObsStatus status) {
  Observation obs;
  obs.byte_len_original = payload.size();
  obs.payload_digest = spool.put(payload);
  if (payload.size() > kObservationKeepBytes) {
    // Error outranks Truncated: a failed command stays visibly failed. The
    // clipping is still detectable via byte_len_original != payload.size().
    obs.status = status == ObsStatus::Error ? ObsStatus::Error : ObsStatus::Truncated;
    obs.payload = payload.substr(payload.size() - kObservationKeepBytes);
  } else {
    obs.status = status;
    obs.payload = std::move(payload);
  }
  return obs;
}

}  // namespace repoforge
