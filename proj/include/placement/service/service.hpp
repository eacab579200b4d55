#pragma once

// Session lifecycle and read endpoints, independent of the HTTP transport.
// Every call returns the status code and JSON body the HTTP layer sends.
//
//   POST /api/sessions                   {learnerRef, competenceRef, mode?,
//                                         shuffleChoices?, shuffleSeed?}
//   POST /api/sessions/{id}/answers      {itemId, choiceId}
//   GET  /api/sessions/{id}
//   GET  /api/sessions/{id}/result
//   GET  /api/competences[/{id}]
//   GET  /api/learners/{id}
//
// Errors: {"error": {"code", "message", "detail"?}} with not_found -> 404,
// invalid_state -> 409, validation_failed -> 422, internal -> 500.
//
// No authentication: learnerRef is trusted input.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "placement/assessment/session.hpp"
#include "placement/assessment/session_store.hpp"
#include "placement/ims/repository.hpp"
#include "placement/irt/model.hpp"

namespace placement::service {

enum class ErrorCode { NotFound, InvalidState, ValidationFailed, Internal };

[[nodiscard]] int http_status(ErrorCode code) noexcept;
[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class ApiError : public std::runtime_error {
 public:
  ApiError(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const nlohmann::json& detail() const noexcept { return detail_; }
  [[nodiscard]] nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceConfig {
  irt::EstimationConfig estimation{};
  // Profiles are written back here on completion (learners/<id>.xml unless
  // the profile was loaded from another file). Unset: profiles stay in memory.
  std::optional<std::filesystem::path> repository_dir;
  // Session event logs. Unset: kept in memory.
  std::optional<std::filesystem::path> sessions_dir;
  std::function<ims::Timestamp()> clock;
};

class PlacementService {
 public:
  PlacementService(ims::LoadedRepository loaded, ServiceConfig config);

  /// Loads and validates the directory; findings are kept in startup_report().
  static std::unique_ptr<PlacementService> from_directory(const std::filesystem::path& root,
                                                          ServiceConfig config);

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse submit_answer(const std::string& session_id, const nlohmann::json& body);
  ApiResponse get_session(const std::string& session_id);
  ApiResponse get_result(const std::string& session_id);
  ApiResponse list_competences() const;
  ApiResponse get_competence(const std::string& competence_id) const;
  ApiResponse get_learner(const std::string& learner_id) const;

  [[nodiscard]] const ims::ValidationReport& startup_report() const noexcept { return report_; }
  [[nodiscard]] const ims::Repository& repository() const noexcept { return repository_; }
  [[nodiscard]] std::optional<ims::LearnerProfile> profile(const std::string& learner_id) const;

  /// Serialized views shared with other front-ends (CLI, tests).
  [[nodiscard]] static nlohmann::json result_json(const assessment::TestSession& session);
  [[nodiscard]] static nlohmann::json question_json(const assessment::TestSession& session);
  [[nodiscard]] static nlohmann::json competence_json(const ims::CompetenceDefinition& c);
  [[nodiscard]] static nlohmann::json profile_json(const ims::LearnerProfile& p);

 private:
  struct Entry {
    std::mutex mutex;
    std::optional<assessment::TestSession> session;
  };

  std::shared_ptr<Entry> find_entry(const std::string& session_id);
  std::string new_session_id();
  void persist(const assessment::TestSession& session, std::size_t from_event);
  void store_result(const assessment::TestSession& session);
  ims::Timestamp now() const;

  ims::Repository repository_;
  std::map<std::string, std::filesystem::path> profile_paths_;
  ims::ValidationReport report_;
  ServiceConfig config_;
  assessment::SessionStore store_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;

  mutable std::mutex profiles_mutex_;
  std::map<std::string, ims::LearnerProfile> profiles_;

  std::mutex id_mutex_;
  std::mt19937_64 id_gen_;
};

}  // namespace placement::service
