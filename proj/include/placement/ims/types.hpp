#pragma once

// Domain model for the three interchange subsets: items (question bank),
// competence definitions and learner profiles.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placement/irt/model.hpp"

namespace placement::ims {

/// An invariant violation found while building or parsing a value. Names the
/// offending object (item id, competence id, ...) and field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string subject, std::string field, const std::string& message);

  [[nodiscard]] const std::string& subject() const noexcept { return subject_; }
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string subject_;
  std::string field_;
};

enum class Ability { Apply, Synthesize, Evaluate, Memorize };
enum class ElementKind { Knowledge, Skill, Attitude };
enum class KnowledgeKind { Concept, Fact, Principle, Procedure };
enum class PerformanceContext { Familiar, Unfamiliar };
enum class Autonomy { Assisted, Autonomous };
enum class Scope { Partial, Total };

std::string_view to_string(Ability v) noexcept;
std::string_view to_string(ElementKind v) noexcept;
std::string_view to_string(KnowledgeKind v) noexcept;
std::string_view to_string(PerformanceContext v) noexcept;
std::string_view to_string(Autonomy v) noexcept;
std::string_view to_string(Scope v) noexcept;

std::optional<Ability> parse_ability(std::string_view s) noexcept;
std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept;
std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s) noexcept;
std::optional<PerformanceContext> parse_context(std::string_view s) noexcept;
std::optional<Autonomy> parse_autonomy(std::string_view s) noexcept;
std::optional<Scope> parse_scope(std::string_view s) noexcept;

struct KnowledgeItem {
  std::string label;
  KnowledgeKind kind = KnowledgeKind::Concept;

  friend bool operator==(const KnowledgeItem&, const KnowledgeItem&) = default;
};

inline constexpr int kOrdinalMin = 1;
inline constexpr int kOrdinalMax = 5;

struct Performance {
  PerformanceContext context = PerformanceContext::Familiar;
  int complexity = 1;
  Autonomy autonomy = Autonomy::Autonomous;
  Scope scope = Scope::Total;
  int frequency = 1;

  friend bool operator==(const Performance&, const Performance&) = default;
};

struct CompetencyElement {
  std::string id;
  Ability ability = Ability::Apply;
  ElementKind kind = ElementKind::Skill;
  std::vector<KnowledgeItem> knowledge_items;
  Performance performance;

  friend bool operator==(const CompetencyElement&, const CompetencyElement&) = default;
};

struct CompetenceDefinition {
  std::string id;
  std::string title;
  std::string description;
  std::vector<std::string> prerequisites;
  std::vector<CompetencyElement> elements;
  int required_questions = 1;    // n
  int choices_per_question = 2;  // m

  [[nodiscard]] const CompetencyElement* find_element(std::string_view element_id) const;

  friend bool operator==(const CompetenceDefinition&, const CompetenceDefinition&) = default;
};

/// Throws ValidationError on the first violated invariant of a single
/// competence (cross-references are checked by validate_repository).
void check_invariants(const CompetenceDefinition& c);

struct Choice {
  std::string id;
  std::string text;

  friend bool operator==(const Choice&, const Choice&) = default;
};

struct ItemDefinition {
  std::string id;
  std::string body;
  std::vector<Choice> choices;
  std::string correct_choice;
  irt::ItemParameters scale;
  double importance = 0.0;
  std::string element_ref;
  std::string competence_ref;

  [[nodiscard]] const Choice* find_choice(std::string_view choice_id) const;

  friend bool operator==(const ItemDefinition&, const ItemDefinition&) = default;
};

void check_invariants(const ItemDefinition& item);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// RFC 3339 in UTC with millisecond precision, e.g. 2026-10-16T09:30:00.000Z.
[[nodiscard]] std::string format_timestamp(Timestamp t);

/// Accepts RFC 3339 with 'Z' or a numeric offset and up to nine fractional
/// digits (truncated to milliseconds).
[[nodiscard]] std::optional<Timestamp> parse_timestamp(std::string_view text);

struct CompetencyRecord {
  std::string competence_ref;
  double theta = 0.0;
  double standard_error = 0.0;
  irt::EstimationStatus status = irt::EstimationStatus::Converged;
  int item_count = 0;
  Timestamp timestamp{};

  friend bool operator==(const CompetencyRecord&, const CompetencyRecord&) = default;
};

struct Identification {
  std::string name;
  std::string affiliation;

  friend bool operator==(const Identification&, const Identification&) = default;
};

struct LearnerProfile {
  std::string id;
  Identification identification;
  std::vector<CompetencyRecord> competency_records;

  /// Appends a record. A record with the same (competence, timestamp) as an
  /// existing one is moved forward by one millisecond until unique.
  void add_record(CompetencyRecord record);

  [[nodiscard]] const CompetencyRecord* latest_record(std::string_view competence_id) const;

  friend bool operator==(const LearnerProfile&, const LearnerProfile&) = default;
};

void check_invariants(const LearnerProfile& profile);

}  // namespace placement::ims
