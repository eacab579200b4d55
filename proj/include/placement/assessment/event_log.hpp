#pragma once

// Session event log. One JSON object per line:
//
//   {"seq":0,"kind":"created","timestamp":"2026-10-16T09:00:00.000Z","payload":{...}}
//
// kinds and payloads:
//   created          sessionId, learnerRef, competenceRef, mode, totalQuestions,
//                    config{thetaInitial,tolerance,maxIterations,thetaMin,thetaMax},
//                    shuffleChoices, shuffleSeed
//   question_served  itemId, index
//   answer_scored    itemId, choiceId, u
//   estimated        theta, standardError, status, iterations

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "placement/ims/types.hpp"

namespace placement::assessment {

enum class EventKind { Created, QuestionServed, AnswerScored, Estimated };

std::string_view to_string(EventKind kind) noexcept;

struct SessionEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Created;
  ims::Timestamp timestamp{};
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

class EventLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string to_json_line(const SessionEvent& event);

/// Throws EventLogError on a malformed line.
[[nodiscard]] SessionEvent from_json_line(std::string_view line);

}  // namespace placement::assessment
