#include "placement/assessment/session_store.hpp"

#include <fstream>

namespace placement::assessment {

namespace fs = std::filesystem;

SessionStore::SessionStore(fs::path directory) : directory_(std::move(directory)) {
  fs::create_directories(*directory_);
}

bool SessionStore::valid_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

fs::path SessionStore::path_for(const std::string& id) const {
  return *directory_ / (id + ".jsonl");
}

void SessionStore::append(const std::string& session_id, std::span<const SessionEvent> events) {
  if (!valid_id(session_id)) throw EventLogError("invalid session id '" + session_id + "'");
  if (!directory_) {
    std::lock_guard lock(mutex_);
    auto& log = memory_[session_id];
    log.insert(log.end(), events.begin(), events.end());
    return;
  }
  std::ofstream out(path_for(session_id), std::ios::app | std::ios::binary);
  if (!out) throw EventLogError("cannot open event log for " + session_id);
  for (const auto& ev : events) out << to_json_line(ev) << '\n';
  out.flush();
  if (!out) throw EventLogError("cannot write event log for " + session_id);
}

std::vector<SessionEvent> SessionStore::load(const std::string& session_id) const {
  if (!valid_id(session_id)) throw SessionNotFound(session_id);
  if (!directory_) {
    std::lock_guard lock(mutex_);
    const auto it = memory_.find(session_id);
    if (it == memory_.end()) throw SessionNotFound(session_id);
    return it->second;
  }
  std::ifstream in(path_for(session_id), std::ios::binary);
  if (!in) throw SessionNotFound(session_id);
  std::vector<SessionEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(from_json_line(line));
  }
  return events;
}

bool SessionStore::contains(const std::string& session_id) const {
  if (!valid_id(session_id)) return false;
  if (!directory_) {
    std::lock_guard lock(mutex_);
    return memory_.count(session_id) != 0;
  }
  std::error_code ec;
  return fs::exists(path_for(session_id), ec);
}

TestSession resume_session(const SessionStore& store, const std::string& session_id,
                           const ims::Repository& repository) {
  const std::vector<SessionEvent> events = store.load(session_id);
  if (events.empty()) throw SessionNotFound(session_id);
  std::string competence_id;
  try {
    competence_id = events.front().payload.at("competenceRef").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw EventLogError("created event of " + session_id + " lacks competenceRef");
  }
  const ims::CompetenceDefinition* competence = repository.find_competence(competence_id);
  if (competence == nullptr) {
    throw EventLogError("session " + session_id + " refers to unknown competence '" +
                        competence_id + "'");
  }
  return TestSession::replay(events, *competence, repository.items);
}

}  // namespace placement::assessment
