#include "placement/service/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>

#include "placement/ims/formats.hpp"

namespace placement::service {

using nlohmann::json;
using assessment::SessionStateError;
using assessment::TestSession;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::InvalidState:
      return 409;
    case ErrorCode::ValidationFailed:
      return 422;
    case ErrorCode::Internal:
      return 500;
  }
  return 500;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
      return "not_found";
    case ErrorCode::InvalidState:
      return "invalid_state";
    case ErrorCode::ValidationFailed:
      return "validation_failed";
    case ErrorCode::Internal:
      return "internal";
  }
  return "internal";
}

json ApiError::to_json() const {
  json err{{"code", std::string(to_string(code_))}, {"message", what()}};
  if (!detail_.is_null()) err["detail"] = detail_;
  return json{{"error", std::move(err)}};
}

namespace {

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ApiError& e) {
    return ApiResponse{http_status(e.code()), e.to_json()};
  } catch (const std::exception& e) {
    const ApiError internal(ErrorCode::Internal, e.what());
    return ApiResponse{500, internal.to_json()};
  }
}

std::string required_string(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string()) {
    throw ApiError(ErrorCode::ValidationFailed, std::string("field '") + key + "' must be a string",
                   json{{"field", key}});
  }
  return body.at(key).get<std::string>();
}

ApiError not_found(std::string_view resource, const std::string& id) {
  return ApiError(ErrorCode::NotFound, std::string(resource) + " '" + id + "' not found",
                  json{{"resource", resource}, {"id", id}});
}

json choices_json(const TestSession& session, const ims::ItemDefinition& item) {
  std::vector<ims::Choice> choices = item.choices;
  if (session.options().shuffle_choices) {
    const std::uint64_t seed =
        session.options().shuffle_seed ^ std::hash<std::string>{}(item.id);
    std::mt19937_64 gen(seed);
    std::shuffle(choices.begin(), choices.end(), gen);
  }
  json out = json::array();
  for (const auto& c : choices) out.push_back(json{{"id", c.id}, {"text", c.text}});
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

PlacementService::PlacementService(ims::LoadedRepository loaded, ServiceConfig config)
    : repository_(std::move(loaded.repository)),
      profile_paths_(std::move(loaded.profile_paths)),
      config_(std::move(config)),
      store_(config_.sessions_dir ? assessment::SessionStore(*config_.sessions_dir)
                                  : assessment::SessionStore()),
      id_gen_(std::random_device{}()) {
  config_.estimation.validate();
  report_ = ims::validate_repository(repository_.competences, repository_.items,
                                     repository_.profiles);
  report_.findings.insert(report_.findings.begin(), loaded.load_findings.begin(),
                          loaded.load_findings.end());
  for (const auto& p : repository_.profiles) profiles_.emplace(p.id, p);
  if (!config_.clock) {
    config_.clock = [] {
      return std::chrono::time_point_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now());
    };
  }
}

std::unique_ptr<PlacementService> PlacementService::from_directory(
    const std::filesystem::path& root, ServiceConfig config) {
  ims::LoadedRepository loaded = ims::load_repository(root);
  if (!config.repository_dir) config.repository_dir = root;
  return std::make_unique<PlacementService>(std::move(loaded), std::move(config));
}

ims::Timestamp PlacementService::now() const { return config_.clock(); }

std::string PlacementService::new_session_id() {
  std::lock_guard lock(id_mutex_);
  for (;;) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(id_gen_()));
    std::string id(buf);
    std::shared_lock sessions_lock(sessions_mutex_);
    if (!sessions_.count(id) && !store_.contains(id)) return id;
  }
}

std::shared_ptr<PlacementService::Entry> PlacementService::find_entry(const std::string& id) {
  {
    std::shared_lock lock(sessions_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  if (!store_.contains(id)) throw not_found("session", id);

  auto entry = std::make_shared<Entry>();
  try {
    entry->session = assessment::resume_session(store_, id, repository_);
  } catch (const assessment::SessionNotFound&) {
    throw not_found("session", id);
  }
  std::unique_lock lock(sessions_mutex_);
  return sessions_.emplace(id, std::move(entry)).first->second;
}

void PlacementService::persist(const TestSession& session, std::size_t from_event) {
  const auto& events = session.events();
  store_.append(session.id(),
                std::span<const assessment::SessionEvent>(events).subspan(from_event));
}

void PlacementService::store_result(const TestSession& session) {
  std::lock_guard lock(profiles_mutex_);
  auto it = profiles_.find(session.learner_ref());
  if (it == profiles_.end()) return;
  assessment::record_result(it->second, *session.result());
  if (config_.repository_dir) {
    std::filesystem::path path;
    if (auto p = profile_paths_.find(it->first); p != profile_paths_.end()) {
      path = p->second;
    } else {
      std::filesystem::create_directories(*config_.repository_dir / "learners");
      path = *config_.repository_dir / "learners" / (it->first + ".xml");
      profile_paths_.emplace(it->first, path);
    }
    ims::write_file_atomic(path, ims::serialize_profile(it->second));
  }
}

std::optional<ims::LearnerProfile> PlacementService::profile(const std::string& learner_id) const {
  std::lock_guard lock(profiles_mutex_);
  if (auto it = profiles_.find(learner_id); it != profiles_.end()) return it->second;
  return std::nullopt;
}

json PlacementService::question_json(const TestSession& session) {
  const ims::ItemDefinition& item = session.current_item();
  return json{{"itemId", item.id},
              {"body", item.body},
              {"choices", choices_json(session, item)},
              {"index", session.cursor()},
              {"total", session.total_questions()}};
}

json PlacementService::result_json(const TestSession& session) {
  const auto& result = session.result();
  if (!result) {
    throw ApiError(ErrorCode::InvalidState, "session " + session.id() + " is still in progress",
                   json{{"answered", session.cursor()}, {"total", session.total_questions()}});
  }
  json per_element = json::array();
  for (const auto& row : result->per_element) {
    const auto fraction = row.fraction_correct();
    per_element.push_back(json{{"elementId", row.element_id},
                               {"answered", row.answered},
                               {"correct", row.correct},
                               {"fractionCorrect", fraction ? json(*fraction) : json(nullptr)}});
  }
  return json{{"sessionId", session.id()},
              {"learnerRef", session.learner_ref()},
              {"competenceRef", session.competence_ref()},
              {"theta", result->estimate.theta},
              {"standardError", number_or_null(result->estimate.standard_error)},
              {"status", std::string(irt::to_string(result->estimate.status))},
              {"iterations", result->estimate.iterations()},
              {"items", session.cursor()},
              {"timestamp", ims::format_timestamp(result->record.timestamp)},
              {"perElement", std::move(per_element)}};
}

json PlacementService::competence_json(const ims::CompetenceDefinition& c) {
  json elements = json::array();
  for (const auto& e : c.elements) {
    json knowledge = json::array();
    for (const auto& k : e.knowledge_items) {
      knowledge.push_back(json{{"label", k.label}, {"kind", std::string(to_string(k.kind))}});
    }
    const auto& p = e.performance;
    elements.push_back(json{{"id", e.id},
                            {"ability", std::string(to_string(e.ability))},
                            {"kind", std::string(to_string(e.kind))},
                            {"knowledge", std::move(knowledge)},
                            {"performance",
                             {{"context", std::string(to_string(p.context))},
                              {"complexity", p.complexity},
                              {"autonomy", std::string(to_string(p.autonomy))},
                              {"scope", std::string(to_string(p.scope))},
                              {"frequency", p.frequency}}}});
  }
  return json{{"id", c.id},
              {"title", c.title},
              {"description", c.description},
              {"prerequisites", c.prerequisites},
              {"requiredQuestions", c.required_questions},
              {"choicesPerQuestion", c.choices_per_question},
              {"elements", std::move(elements)}};
}

json PlacementService::profile_json(const ims::LearnerProfile& p) {
  json records = json::array();
  for (const auto& r : p.competency_records) {
    records.push_back(json{{"competenceRef", r.competence_ref},
                           {"theta", r.theta},
                           {"standardError", number_or_null(r.standard_error)},
                           {"status", std::string(irt::to_string(r.status))},
                           {"items", r.item_count},
                           {"timestamp", ims::format_timestamp(r.timestamp)}});
  }
  return json{{"id", p.id},
              {"identification",
               {{"name", p.identification.name}, {"affiliation", p.identification.affiliation}}},
              {"competencyRecords", std::move(records)}};
}

ApiResponse PlacementService::create_session(const json& body) {
  return guarded([&] {
    const std::string learner = required_string(body, "learnerRef");
    const std::string competence_id = required_string(body, "competenceRef");

    assessment::SessionOptions options;
    options.config = config_.estimation;
    if (body.contains("mode")) {
      const auto& m = body.at("mode");
      const auto mode = m.is_string() ? assessment::parse_selection_mode(m.get<std::string>())
                                      : std::nullopt;
      if (!mode) {
        throw ApiError(ErrorCode::ValidationFailed, "mode must be 'fixed' or 'adaptive'",
                       json{{"field", "mode"}});
      }
      options.mode = *mode;
    }
    if (body.contains("shuffleChoices")) {
      if (!body.at("shuffleChoices").is_boolean()) {
        throw ApiError(ErrorCode::ValidationFailed, "shuffleChoices must be a boolean",
                       json{{"field", "shuffleChoices"}});
      }
      options.shuffle_choices = body.at("shuffleChoices").get<bool>();
    }
    if (body.contains("shuffleSeed")) {
      const auto& seed = body.at("shuffleSeed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
        throw ApiError(ErrorCode::ValidationFailed, "shuffleSeed must be a non-negative integer",
                       json{{"field", "shuffleSeed"}});
      }
      options.shuffle_seed = body.at("shuffleSeed").get<std::uint64_t>();
    }

    {
      std::lock_guard lock(profiles_mutex_);
      if (!profiles_.count(learner)) throw not_found("learner", learner);
    }
    const ims::CompetenceDefinition* competence = repository_.find_competence(competence_id);
    if (competence == nullptr) throw not_found("competence", competence_id);

    auto entry = std::make_shared<Entry>();
    try {
      entry->session = TestSession::create(new_session_id(), learner, *competence,
                                           repository_.items, options, now());
    } catch (const assessment::InsufficientItemsError& e) {
      throw ApiError(ErrorCode::ValidationFailed, e.what(),
                     json{{"reason", "insufficient_items"},
                          {"competence", e.competence()},
                          {"available", e.available()},
                          {"required", e.required()}});
    }
    const TestSession& session = *entry->session;
    persist(session, 0);
    json out{{"sessionId", session.id()},
             {"totalQuestions", session.total_questions()},
             {"firstQuestion", question_json(session)}};
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(session.id(), std::move(entry));
    }
    return ApiResponse{201, std::move(out)};
  });
}

ApiResponse PlacementService::submit_answer(const std::string& session_id, const json& body) {
  return guarded([&] {
    const std::string item_id = required_string(body, "itemId");
    const std::string choice_id = required_string(body, "choiceId");
    const auto entry = find_entry(session_id);

    std::lock_guard lock(entry->mutex);
    TestSession& session = *entry->session;
    const std::size_t before = session.events().size();
    TestSession::SubmitOutcome outcome;
    try {
      outcome = session.submit_answer(item_id, choice_id, now());
    } catch (const SessionStateError& e) {
      const bool bad_choice = e.reason() == SessionStateError::Reason::UnknownChoice;
      throw ApiError(bad_choice ? ErrorCode::ValidationFailed : ErrorCode::InvalidState, e.what(),
                     json{{"answered", session.cursor()}, {"total", session.total_questions()}});
    }
    persist(session, before);

    json out{{"answered", session.cursor()}, {"total", session.total_questions()}};
    if (outcome.completed) {
      store_result(session);
      out["completed"] = true;
    } else {
      out["completed"] = false;
      out["nextQuestion"] = question_json(session);
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse PlacementService::get_session(const std::string& session_id) {
  return guarded([&] {
    const auto entry = find_entry(session_id);
    std::lock_guard lock(entry->mutex);
    const TestSession& session = *entry->session;
    json out{{"sessionId", session.id()},
             {"learnerRef", session.learner_ref()},
             {"competenceRef", session.competence_ref()},
             {"mode", std::string(to_string(session.options().mode))},
             {"state", std::string(to_string(session.state()))},
             {"answered", session.cursor()},
             {"total", session.total_questions()}};
    if (session.state() == assessment::SessionState::InProgress) {
      out["currentQuestion"] = question_json(session);
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse PlacementService::get_result(const std::string& session_id) {
  return guarded([&] {
    const auto entry = find_entry(session_id);
    std::lock_guard lock(entry->mutex);
    return ApiResponse{200, result_json(*entry->session)};
  });
}

ApiResponse PlacementService::list_competences() const {
  return guarded([&] {
    json out = json::array();
    for (const auto& c : repository_.competences) out.push_back(competence_json(c));
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse PlacementService::get_competence(const std::string& competence_id) const {
  return guarded([&] {
    const ims::CompetenceDefinition* c = repository_.find_competence(competence_id);
    if (c == nullptr) throw not_found("competence", competence_id);
    return ApiResponse{200, competence_json(*c)};
  });
}

ApiResponse PlacementService::get_learner(const std::string& learner_id) const {
  return guarded([&] {
    auto p = profile(learner_id);
    if (!p) throw not_found("learner", learner_id);
    return ApiResponse{200, profile_json(*p)};
  });
}

}  // namespace placement::service
