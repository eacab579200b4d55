#include "placement/assessment/event_log.hpp"

namespace placement::assessment {

namespace {

constexpr std::pair<EventKind, std::string_view> kKinds[] = {
    {EventKind::Created, "created"},
    {EventKind::QuestionServed, "question_served"},
    {EventKind::AnswerScored, "answer_scored"},
    {EventKind::Estimated, "estimated"},
};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string to_json_line(const SessionEvent& event) {
  nlohmann::json j;
  j["seq"] = event.seq;
  j["kind"] = std::string(to_string(event.kind));
  j["timestamp"] = ims::format_timestamp(event.timestamp);
  j["payload"] = event.payload;
  return j.dump();
}

SessionEvent from_json_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw EventLogError(std::string("malformed event: ") + e.what());
  }
  if (!j.is_object() || !j.contains("seq") || !j.contains("kind") || !j.contains("timestamp") ||
      !j.contains("payload")) {
    throw EventLogError("event is missing seq/kind/timestamp/payload");
  }
  SessionEvent ev;
  try {
    ev.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    bool known = false;
    for (const auto& [k, name] : kKinds) {
      if (name == kind) {
        ev.kind = k;
        known = true;
      }
    }
    if (!known) throw EventLogError("unknown event kind '" + kind + "'");
    const auto ts = ims::parse_timestamp(j.at("timestamp").get<std::string>());
    if (!ts) throw EventLogError("bad event timestamp");
    ev.timestamp = *ts;
  } catch (const nlohmann::json::exception& e) {
    throw EventLogError(std::string("malformed event: ") + e.what());
  }
  ev.payload = j.at("payload");
  return ev;
}

}  // namespace placement::assessment
