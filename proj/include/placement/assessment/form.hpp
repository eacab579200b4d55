#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placement/ims/types.hpp"

namespace placement::assessment {

enum class SelectionMode { FixedByImportance, AdaptiveMaxInfo };

std::string_view to_string(SelectionMode mode) noexcept;
/// Accepts "fixed" / "adaptive".
std::optional<SelectionMode> parse_selection_mode(std::string_view text) noexcept;

class InsufficientItemsError : public std::runtime_error {
 public:
  InsufficientItemsError(std::string competence, std::size_t available, std::size_t required);

  [[nodiscard]] const std::string& competence() const noexcept { return competence_; }
  [[nodiscard]] std::size_t available() const noexcept { return available_; }
  [[nodiscard]] std::size_t required() const noexcept { return required_; }

 private:
  std::string competence_;
  std::size_t available_;
  std::size_t required_;
};

/// Items of `bank` linked to the competence, in bank order.
[[nodiscard]] std::vector<ims::ItemDefinition> linked_items(
    const ims::CompetenceDefinition& competence, const std::vector<ims::ItemDefinition>& bank);

/// FixedByImportance: the n most important linked items (ties by id),
/// served easiest first (ascending b, ties by id).
/// AdaptiveMaxInfo: only the opening item, the linked item with the
/// largest information at theta_initial.
/// Throws InsufficientItemsError when fewer than n items are linked.
[[nodiscard]] std::vector<ims::ItemDefinition> build_form(
    const ims::CompetenceDefinition& competence, const std::vector<ims::ItemDefinition>& bank,
    SelectionMode mode, double theta_initial = 0.0);

/// Unused candidate maximizing a^2 P Q at theta; ties go to the smaller id.
/// nullptr when every candidate is used.
[[nodiscard]] const ims::ItemDefinition* select_max_information(
    const std::vector<ims::ItemDefinition>& candidates, const std::set<std::string>& used,
    double theta);

}  // namespace placement::assessment
