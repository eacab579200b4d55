#include "placement/assessment/form.hpp"

#include <algorithm>

#include "placement/irt/estimator.hpp"

namespace placement::assessment {

std::string_view to_string(SelectionMode mode) noexcept {
  return mode == SelectionMode::FixedByImportance ? "fixed" : "adaptive";
}

std::optional<SelectionMode> parse_selection_mode(std::string_view text) noexcept {
  if (text == "fixed") return SelectionMode::FixedByImportance;
  if (text == "adaptive") return SelectionMode::AdaptiveMaxInfo;
  return std::nullopt;
}

InsufficientItemsError::InsufficientItemsError(std::string competence, std::size_t available,
                                               std::size_t required)
    : std::runtime_error("competence '" + competence + "' has " + std::to_string(available) +
                         " linked items, " + std::to_string(required) + " required"),
      competence_(std::move(competence)),
      available_(available),
      required_(required) {}

std::vector<ims::ItemDefinition> linked_items(const ims::CompetenceDefinition& competence,
                                              const std::vector<ims::ItemDefinition>& bank) {
  std::vector<ims::ItemDefinition> out;
  std::copy_if(bank.begin(), bank.end(), std::back_inserter(out),
               [&](const ims::ItemDefinition& i) { return i.competence_ref == competence.id; });
  return out;
}

const ims::ItemDefinition* select_max_information(const std::vector<ims::ItemDefinition>& candidates,
                                                  const std::set<std::string>& used,
                                                  double theta) {
  const ims::ItemDefinition* best = nullptr;
  double best_info = -1.0;
  for (const auto& item : candidates) {
    if (used.count(item.id)) continue;
    const double info = irt::item_information(theta, item.scale);
    if (best == nullptr || info > best_info || (info == best_info && item.id < best->id)) {
      best = &item;
      best_info = info;
    }
  }
  return best;
}

std::vector<ims::ItemDefinition> build_form(const ims::CompetenceDefinition& competence,
                                            const std::vector<ims::ItemDefinition>& bank,
                                            SelectionMode mode, double theta_initial) {
  std::vector<ims::ItemDefinition> pool = linked_items(competence, bank);
  const auto n = static_cast<std::size_t>(competence.required_questions);
  if (pool.size() < n) throw InsufficientItemsError(competence.id, pool.size(), n);

  if (mode == SelectionMode::AdaptiveMaxInfo) {
    return {*select_max_information(pool, {}, theta_initial)};
  }

  std::sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) {
    if (x.importance != y.importance) return x.importance > y.importance;
    return x.id < y.id;
  });
  pool.resize(n);
  std::sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) {
    if (x.scale.difficulty() != y.scale.difficulty()) {
      return x.scale.difficulty() < y.scale.difficulty();
    }
    return x.id < y.id;
  });
  return pool;
}

}  // namespace placement::assessment
