#include "placement/ims/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace placement::ims {

std::string_view to_string(Severity s) noexcept {
  return s == Severity::Error ? "error" : "warning";
}

std::string_view to_string(FindingKind k) noexcept {
  switch (k) {
    case FindingKind::ParseFailure:
      return "parse-failure";
    case FindingKind::DuplicateId:
      return "duplicate-id";
    case FindingKind::UnresolvedReference:
      return "unresolved-reference";
    case FindingKind::PrerequisiteCycle:
      return "prerequisite-cycle";
    case FindingKind::ElementWithoutItems:
      return "element-without-items";
    case FindingKind::InsufficientItems:
      return "insufficient-items";
    case FindingKind::TooManyChoices:
      return "too-many-choices";
  }
  return "unknown";
}

bool ValidationReport::has_errors() const noexcept {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Error; });
}

std::vector<const Finding*> ValidationReport::of_kind(FindingKind kind) const& {
  std::vector<const Finding*> out;
  for (const auto& f : findings) {
    if (f.kind == kind) out.push_back(&f);
  }
  return out;
}

namespace {

// Tarjan's strongly connected components over the prerequisite graph.
// Components of size > 1, or single nodes with a self-edge, are cycles.
std::vector<std::vector<std::string>> prerequisite_cycles(
    const std::map<std::string, std::vector<std::string>>& graph) {
  std::map<std::string, int> index;
  std::map<std::string, int> low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> cycles;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : graph.at(v)) {
      if (!graph.count(w)) continue;
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> component;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.push_back(w);
      } while (w != v);
      const auto& edges = graph.at(v);
      const bool self_loop = std::find(edges.begin(), edges.end(), v) != edges.end();
      if (component.size() > 1 || self_loop) {
        std::sort(component.begin(), component.end());
        cycles.push_back(std::move(component));
      }
    }
  };

  for (const auto& [v, _] : graph) {
    if (!index.count(v)) visit(v);
  }
  return cycles;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ValidationReport validate_repository(const std::vector<CompetenceDefinition>& competences,
                                     const std::vector<ItemDefinition>& items,
                                     const std::vector<LearnerProfile>& profiles) {
  ValidationReport report;
  auto error = [&](FindingKind kind, std::string subject, std::string message,
                   std::vector<std::string> members = {}) {
    report.findings.push_back(
        Finding{Severity::Error, kind, std::move(subject), std::move(message), std::move(members)});
  };
  auto warning = [&](FindingKind kind, std::string subject, std::string message) {
    report.findings.push_back(
        Finding{Severity::Warning, kind, std::move(subject), std::move(message), {}});
  };

  std::map<std::string, const CompetenceDefinition*> by_id;
  for (const auto& c : competences) {
    if (!by_id.emplace(c.id, &c).second) {
      error(FindingKind::DuplicateId, c.id, "competence id defined more than once");
    }
  }
  std::set<std::string> item_ids;
  for (const auto& i : items) {
    if (!item_ids.insert(i.id).second) {
      error(FindingKind::DuplicateId, i.id, "item id defined more than once");
    }
  }
  std::set<std::string> learner_ids;
  for (const auto& p : profiles) {
    if (!learner_ids.insert(p.id).second) {
      error(FindingKind::DuplicateId, p.id, "learner id defined more than once");
    }
  }

  std::map<std::string, std::vector<std::string>> graph;
  for (const auto& c : competences) {
    auto& edges = graph[c.id];
    for (const auto& pre : c.prerequisites) {
      edges.push_back(pre);
      if (!by_id.count(pre)) {
        error(FindingKind::UnresolvedReference, c.id, "prerequisite '" + pre + "' is not defined");
      }
    }
  }
  for (auto& cycle : prerequisite_cycles(graph)) {
    const std::string subject = cycle.front();
    std::string message = "prerequisite cycle among: " + join(cycle, ", ");
    error(FindingKind::PrerequisiteCycle, subject, std::move(message), std::move(cycle));
  }

  std::map<std::string, std::size_t> linked_items;
  std::map<std::pair<std::string, std::string>, std::size_t> linked_per_element;
  for (const auto& i : items) {
    const auto found = by_id.find(i.competence_ref);
    if (found == by_id.end()) {
      error(FindingKind::UnresolvedReference, i.id,
            "competence '" + i.competence_ref + "' is not defined");
      continue;
    }
    const CompetenceDefinition& c = *found->second;
    if (c.find_element(i.element_ref) == nullptr) {
      error(FindingKind::UnresolvedReference, i.id,
            "element '" + i.element_ref + "' is not part of competence '" + c.id + "'");
      continue;
    }
    ++linked_items[c.id];
    ++linked_per_element[{c.id, i.element_ref}];
    if (static_cast<int>(i.choices.size()) > c.choices_per_question) {
      warning(FindingKind::TooManyChoices, i.id,
              std::to_string(i.choices.size()) + " choices exceed the " +
                  std::to_string(c.choices_per_question) + " allowed by '" + c.id + "'");
    }
  }

  for (const auto& c : competences) {
    for (const auto& e : c.elements) {
      if (!linked_per_element.count({c.id, e.id})) {
        warning(FindingKind::ElementWithoutItems, c.id + "/" + e.id, "no item assesses element");
      }
    }
    const std::size_t have = linked_items[c.id];
    if (have < static_cast<std::size_t>(c.required_questions)) {
      error(FindingKind::InsufficientItems, c.id,
            std::to_string(have) + " linked items but " + std::to_string(c.required_questions) +
                " questions required");
    }
  }

  for (const auto& p : profiles) {
    for (const auto& r : p.competency_records) {
      if (!by_id.count(r.competence_ref)) {
        error(FindingKind::UnresolvedReference, p.id,
              "record refers to unknown competence '" + r.competence_ref + "'");
      }
    }
  }
  return report;
}

}  // namespace placement::ims
