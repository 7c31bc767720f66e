#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <string>

#include "json.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/version.hpp"

namespace twistlab {

// One append-only record per CLI invocation.  The log is JSON-lines so that
// concurrent runs pointed at the same results directory interleave whole
// records, never partial ones (the append happens under an exclusive flock).
struct RunRecord {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json outputs = nlohmann::json::object();
  std::int64_t wallclock_ms = 0;
  std::string artifact_version = kVersion;
  std::string timestamp;  // ISO-8601 UTC; filled at append time when empty
};

inline std::string iso8601_utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json to_json(const RunRecord& rec) {
  return nlohmann::json{{"command", rec.command},
                        {"params", rec.params},
                        {"seed", rec.seed},
                        {"outputs", rec.outputs},
                        {"wallclock_ms", rec.wallclock_ms},
                        {"artifact_version", rec.artifact_version},
                        {"timestamp", rec.timestamp}};
}

inline void append_run_record(const std::string& dir, RunRecord rec) {
  if (rec.timestamp.empty()) rec.timestamp = iso8601_utc_now();
  const std::string path = dir.empty() ? "runs.jsonl" : dir + "/runs.jsonl";
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) {
    throw Error("cannot open run log " + path + ": " + std::strerror(errno));
  }
  ::flock(fd, LOCK_EX);
  const std::string line = to_json(rec).dump() + "\n";
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::flock(fd, LOCK_UN);
      ::close(fd);
      throw Error("short write to run log " + path + ": " + std::strerror(err));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

}  // namespace twistlab
