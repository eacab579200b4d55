#pragma once

// The placement-test state machine: serve the form one question at a time,
// score each answer 0/1, estimate ability once the n-th answer arrives.
//
// A session is a serial object; callers serialize mutations of one session.
// Every transition is recorded as a SessionEvent, and replaying those events
// against the same competence and bank rebuilds an identical session.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placement/assessment/event_log.hpp"
#include "placement/assessment/form.hpp"
#include "placement/ims/types.hpp"
#include "placement/irt/model.hpp"

namespace placement::assessment {

enum class SessionState { InProgress, Completed };

std::string_view to_string(SessionState state) noexcept;

class SessionStateError : public std::runtime_error {
 public:
  enum class Reason { NotCurrentItem, UnknownChoice, AlreadyCompleted, NotCompleted };

  SessionStateError(Reason reason, const std::string& message)
      : std::runtime_error(message), reason_(reason) {}

  [[nodiscard]] Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

struct SessionOptions {
  SelectionMode mode = SelectionMode::FixedByImportance;
  irt::EstimationConfig config{};
  bool shuffle_choices = false;
  std::uint64_t shuffle_seed = 0;
};

struct AnsweredQuestion {
  std::string item_id;
  std::string choice_id;
  int u = 0;
};

struct ElementBreakdown {
  std::string element_id;
  std::size_t answered = 0;
  std::size_t correct = 0;

  /// correct / answered, or nullopt when no served item assessed the element.
  [[nodiscard]] std::optional<double> fraction_correct() const;
};

struct SessionResult {
  irt::AbilityEstimate estimate;
  std::vector<ElementBreakdown> per_element;
  ims::CompetencyRecord record;
};

class TestSession {
 public:
  /// Builds the form (throws InsufficientItemsError) and serves the first
  /// question. `bank` may hold items of other competences; only linked ones
  /// are used.
  static TestSession create(std::string id, std::string learner_ref,
                            const ims::CompetenceDefinition& competence,
                            const std::vector<ims::ItemDefinition>& bank, SessionOptions options,
                            ims::Timestamp now);

  /// Rebuilds a session from its event log. Throws EventLogError when the
  /// log does not describe a consistent run over this competence and bank.
  static TestSession replay(std::span<const SessionEvent> events,
                            const ims::CompetenceDefinition& competence,
                            const std::vector<ims::ItemDefinition>& bank);

  struct SubmitOutcome {
    int u = 0;
    bool completed = false;
    const ims::ItemDefinition* next = nullptr;
  };

  /// Scores the answer to the currently served item. The n-th answer
  /// finalizes the session: ability is estimated and result() is set.
  /// Throws SessionStateError for a completed session, an item that is not
  /// the one being served, or an unknown choice id.
  SubmitOutcome submit_answer(std::string_view item_id, std::string_view choice_id,
                              ims::Timestamp now);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const std::string& learner_ref() const noexcept { return learner_ref_; }
  [[nodiscard]] const std::string& competence_ref() const noexcept { return competence_.id; }
  [[nodiscard]] const ims::CompetenceDefinition& competence() const noexcept { return competence_; }
  [[nodiscard]] const SessionOptions& options() const noexcept { return options_; }
  [[nodiscard]] SessionState state() const noexcept { return state_; }
  [[nodiscard]] std::size_t cursor() const noexcept { return answered_.size(); }
  [[nodiscard]] std::size_t total_questions() const noexcept { return total_; }

  /// Ids of the items in the form. In adaptive mode the form grows as
  /// questions are served.
  [[nodiscard]] const std::vector<std::string>& form() const noexcept { return form_; }
  [[nodiscard]] const std::vector<AnsweredQuestion>& answers() const noexcept { return answered_; }
  [[nodiscard]] const irt::ResponseVector& responses() const noexcept { return responses_; }

  /// The item awaiting an answer; throws SessionStateError when completed.
  [[nodiscard]] const ims::ItemDefinition& current_item() const;

  [[nodiscard]] const std::optional<SessionResult>& result() const noexcept { return result_; }
  [[nodiscard]] const std::vector<SessionEvent>& events() const noexcept { return events_; }

  [[nodiscard]] const ims::ItemDefinition* find_item(std::string_view item_id) const;

 private:
  TestSession() = default;

  void emit(EventKind kind, ims::Timestamp at, nlohmann::json payload);
  void serve(const ims::ItemDefinition& item, ims::Timestamp at);
  void finalize(ims::Timestamp now);
  [[nodiscard]] double provisional_theta() const;

  std::string id_;
  std::string learner_ref_;
  ims::CompetenceDefinition competence_;
  std::vector<ims::ItemDefinition> pool_;
  SessionOptions options_;
  std::size_t total_ = 0;
  std::vector<std::string> form_;
  std::set<std::string> served_;
  std::vector<AnsweredQuestion> answered_;
  irt::ResponseVector responses_;
  SessionState state_ = SessionState::InProgress;
  std::optional<SessionResult> result_;
  std::vector<SessionEvent> events_;
};

/// Appends the session's competency record to the learner profile.
void record_result(ims::LearnerProfile& profile, const SessionResult& result);

}  // namespace placement::assessment
