#include "placement/assessment/session.hpp"

#include <algorithm>

#include "placement/irt/estimator.hpp"

namespace placement::assessment {

using nlohmann::json;

std::string_view to_string(SessionState state) noexcept {
  return state == SessionState::InProgress ? "in_progress" : "completed";
}

std::optional<double> ElementBreakdown::fraction_correct() const {
  if (answered == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(answered);
}

namespace {

json config_to_json(const irt::EstimationConfig& c) {
  return json{{"thetaInitial", c.theta_initial},
              {"tolerance", c.tolerance},
              {"maxIterations", c.max_iterations},
              {"thetaMin", c.theta_bounds.lower},
              {"thetaMax", c.theta_bounds.upper}};
}

irt::EstimationConfig config_from_json(const json& j) {
  irt::EstimationConfig c;
  c.theta_initial = j.at("thetaInitial").get<double>();
  c.tolerance = j.at("tolerance").get<double>();
  c.max_iterations = j.at("maxIterations").get<int>();
  c.theta_bounds.lower = j.at("thetaMin").get<double>();
  c.theta_bounds.upper = j.at("thetaMax").get<double>();
  return c;
}

}  // namespace

TestSession TestSession::create(std::string id, std::string learner_ref,
                                const ims::CompetenceDefinition& competence,
                                const std::vector<ims::ItemDefinition>& bank,
                                SessionOptions options, ims::Timestamp now) {
  options.config.validate();
  std::vector<ims::ItemDefinition> form =
      build_form(competence, bank, options.mode, options.config.theta_initial);

  TestSession s;
  s.id_ = std::move(id);
  s.learner_ref_ = std::move(learner_ref);
  s.competence_ = competence;
  s.pool_ = linked_items(competence, bank);
  s.options_ = options;
  s.total_ = static_cast<std::size_t>(competence.required_questions);

  s.emit(EventKind::Created, now,
         json{{"sessionId", s.id_},
              {"learnerRef", s.learner_ref_},
              {"competenceRef", competence.id},
              {"mode", std::string(to_string(options.mode))},
              {"totalQuestions", s.total_},
              {"config", config_to_json(options.config)},
              {"shuffleChoices", options.shuffle_choices},
              {"shuffleSeed", options.shuffle_seed}});

  if (options.mode == SelectionMode::FixedByImportance) {
    for (const auto& item : form) s.form_.push_back(item.id);
  }
  s.serve(*s.find_item(form.front().id), now);
  return s;
}

const ims::ItemDefinition* TestSession::find_item(std::string_view item_id) const {
  for (const auto& item : pool_) {
    if (item.id == item_id) return &item;
  }
  return nullptr;
}

void TestSession::emit(EventKind kind, ims::Timestamp at, json payload) {
  events_.push_back(SessionEvent{events_.size(), kind, at, std::move(payload)});
}

void TestSession::serve(const ims::ItemDefinition& item, ims::Timestamp at) {
  if (options_.mode == SelectionMode::AdaptiveMaxInfo) form_.push_back(item.id);
  served_.insert(item.id);
  emit(EventKind::QuestionServed, at, json{{"itemId", item.id}, {"index", answered_.size()}});
}

const ims::ItemDefinition& TestSession::current_item() const {
  if (state_ == SessionState::Completed) {
    throw SessionStateError(SessionStateError::Reason::AlreadyCompleted,
                            "session " + id_ + " is completed");
  }
  return *find_item(form_.at(answered_.size()));
}

double TestSession::provisional_theta() const {
  const irt::AbilityEstimate e = irt::estimate_ability(responses_, options_.config);
  if (e.status == irt::EstimationStatus::NonFiniteMLE) return options_.config.theta_initial;
  return e.theta;
}

TestSession::SubmitOutcome TestSession::submit_answer(std::string_view item_id,
                                                      std::string_view choice_id,
                                                      ims::Timestamp now) {
  const ims::ItemDefinition& item = current_item();
  if (item.id != item_id) {
    throw SessionStateError(SessionStateError::Reason::NotCurrentItem,
                            "item '" + std::string(item_id) + "' is not the question being served ('" +
                                item.id + "')");
  }
  if (item.find_choice(choice_id) == nullptr) {
    throw SessionStateError(SessionStateError::Reason::UnknownChoice,
                            "item '" + item.id + "' has no choice '" + std::string(choice_id) + "'");
  }

  const int u = choice_id == item.correct_choice ? 1 : 0;
  answered_.push_back(AnsweredQuestion{item.id, std::string(choice_id), u});
  responses_.add(item.scale, u);
  emit(EventKind::AnswerScored, now,
       json{{"itemId", item.id}, {"choiceId", std::string(choice_id)}, {"u", u}});

  SubmitOutcome out;
  out.u = u;
  if (answered_.size() == total_) {
    finalize(now);
    out.completed = true;
    return out;
  }
  if (options_.mode == SelectionMode::AdaptiveMaxInfo) {
    serve(*select_max_information(pool_, served_, provisional_theta()), now);
  } else {
    serve(*find_item(form_[answered_.size()]), now);
  }
  out.next = &current_item();
  return out;
}

void TestSession::finalize(ims::Timestamp now) {
  SessionResult r;
  r.estimate = irt::estimate_ability(responses_, options_.config);

  for (const auto& element : competence_.elements) {
    ElementBreakdown row{element.id, 0, 0};
    for (const auto& a : answered_) {
      if (find_item(a.item_id)->element_ref == element.id) {
        ++row.answered;
        row.correct += static_cast<std::size_t>(a.u);
      }
    }
    r.per_element.push_back(std::move(row));
  }

  r.record.competence_ref = competence_.id;
  r.record.theta = r.estimate.theta;
  r.record.standard_error = r.estimate.standard_error;
  r.record.status = r.estimate.status;
  r.record.item_count = static_cast<int>(answered_.size());
  r.record.timestamp = now;

  state_ = SessionState::Completed;
  emit(EventKind::Estimated, now,
       json{{"theta", r.estimate.theta},
            {"standardError", r.estimate.standard_error},
            {"status", std::string(irt::to_string(r.estimate.status))},
            {"iterations", r.estimate.iterations()}});
  result_ = std::move(r);
}

TestSession TestSession::replay(std::span<const SessionEvent> events,
                                const ims::CompetenceDefinition& competence,
                                const std::vector<ims::ItemDefinition>& bank) {
  if (events.empty() || events.front().kind != EventKind::Created) {
    throw EventLogError("event log does not start with a created event");
  }
  const SessionEvent& created = events.front();
  std::optional<TestSession> session;
  try {
    const json& p = created.payload;
    if (p.at("competenceRef").get<std::string>() != competence.id) {
      throw EventLogError("event log belongs to competence '" +
                          p.at("competenceRef").get<std::string>() + "'");
    }
    SessionOptions options;
    const auto mode = parse_selection_mode(p.at("mode").get<std::string>());
    if (!mode) throw EventLogError("unknown selection mode in event log");
    options.mode = *mode;
    options.config = config_from_json(p.at("config"));
    options.shuffle_choices = p.value("shuffleChoices", false);
    options.shuffle_seed = p.value("shuffleSeed", std::uint64_t{0});
    session = create(p.at("sessionId").get<std::string>(), p.at("learnerRef").get<std::string>(),
                     competence, bank, options, created.timestamp);

    for (const auto& ev : events.subspan(1)) {
      if (ev.kind != EventKind::AnswerScored) continue;
      session->submit_answer(ev.payload.at("itemId").get<std::string>(),
                             ev.payload.at("choiceId").get<std::string>(), ev.timestamp);
    }
  } catch (const json::exception& e) {
    throw EventLogError(std::string("malformed event payload: ") + e.what());
  } catch (const SessionStateError& e) {
    throw EventLogError(std::string("event log replay rejected: ") + e.what());
  } catch (const InsufficientItemsError& e) {
    throw EventLogError(std::string("event log replay rejected: ") + e.what());
  }

  const auto& rebuilt = session->events_;
  if (rebuilt.size() < events.size() ||
      !std::equal(events.begin(), events.end(), rebuilt.begin())) {
    throw EventLogError("event log diverges from the replayed session " + session->id_);
  }
  return std::move(*session);
}

void record_result(ims::LearnerProfile& profile, const SessionResult& result) {
  profile.add_record(result.record);
}

}  // namespace placement::assessment
