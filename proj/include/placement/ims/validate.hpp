#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "placement/ims/types.hpp"

namespace placement::ims {

enum class Severity { Error, Warning };

enum class FindingKind {
  ParseFailure,
  DuplicateId,
  UnresolvedReference,
  PrerequisiteCycle,
  ElementWithoutItems,
  InsufficientItems,
  TooManyChoices,
};

std::string_view to_string(Severity s) noexcept;
std::string_view to_string(FindingKind k) noexcept;

struct Finding {
  Severity severity = Severity::Error;
  FindingKind kind = FindingKind::ParseFailure;
  std::string subject;
  std::string message;
  // Ids involved, e.g. every competence on a prerequisite cycle (sorted).
  std::vector<std::string> members;
};

struct ValidationReport {
  std::vector<Finding> findings;

  [[nodiscard]] bool empty() const noexcept { return findings.empty(); }
  [[nodiscard]] bool has_errors() const noexcept;
  [[nodiscard]] std::vector<const Finding*> of_kind(FindingKind kind) const&;
  std::vector<const Finding*> of_kind(FindingKind kind) const&& = delete;
};

/// Cross-reference checks over parsed collections. Never throws on parsed
/// input; every problem is reported as a finding.
///
/// Errors: duplicate ids, unresolved prerequisite / competence / element /
/// profile references, prerequisite cycles (self-loops included) and
/// competences with fewer linked items than their required question count.
/// Warnings: elements no item links to, items offering more choices than
/// the competence allows.
[[nodiscard]] ValidationReport validate_repository(const std::vector<CompetenceDefinition>& competences,
                                                   const std::vector<ItemDefinition>& items,
                                                   const std::vector<LearnerProfile>& profiles);

}  // namespace placement::ims
