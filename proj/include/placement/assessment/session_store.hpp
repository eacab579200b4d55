#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "placement/assessment/event_log.hpp"
#include "placement/assessment/session.hpp"
#include "placement/ims/repository.hpp"

namespace placement::assessment {

class SessionNotFound : public std::runtime_error {
 public:
  explicit SessionNotFound(const std::string& id)
      : std::runtime_error("session not found: " + id) {}
};

/// Event logs keyed by session id: `<dir>/<id>.jsonl` on disk, or in memory
/// when constructed without a directory. Appends to different sessions may
/// run concurrently.
class SessionStore {
 public:
  SessionStore() = default;
  explicit SessionStore(std::filesystem::path directory);

  void append(const std::string& session_id, std::span<const SessionEvent> events);
  [[nodiscard]] std::vector<SessionEvent> load(const std::string& session_id) const;
  [[nodiscard]] bool contains(const std::string& session_id) const;

  [[nodiscard]] const std::optional<std::filesystem::path>& directory() const noexcept {
    return directory_;
  }

  /// Session ids become file names: [A-Za-z0-9_-]{1,128}.
  [[nodiscard]] static bool valid_id(std::string_view id) noexcept;

 private:
  [[nodiscard]] std::filesystem::path path_for(const std::string& id) const;

  std::optional<std::filesystem::path> directory_;
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<SessionEvent>> memory_;
};

/// Replays a persisted session against the repository's competence and
/// items. Throws SessionNotFound for unknown ids.
[[nodiscard]] TestSession resume_session(const SessionStore& store, const std::string& session_id,
                                         const ims::Repository& repository);

}  // namespace placement::assessment
