#include "placement/ims/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace placement::ims {

ValidationError::ValidationError(std::string subject, std::string field,
                                 const std::string& message)
    : std::runtime_error("'" + subject + "' field '" + field + "': " + message),
      subject_(std::move(subject)),
      field_(std::move(field)) {}

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Ability, 4> kAbilities{{{Ability::Apply, "apply"},
                                             {Ability::Synthesize, "synthesize"},
                                             {Ability::Evaluate, "evaluate"},
                                             {Ability::Memorize, "memorize"}}};
constexpr NameTable<ElementKind, 3> kElementKinds{{{ElementKind::Knowledge, "knowledge"},
                                                   {ElementKind::Skill, "skill"},
                                                   {ElementKind::Attitude, "attitude"}}};
constexpr NameTable<KnowledgeKind, 4> kKnowledgeKinds{{{KnowledgeKind::Concept, "concept"},
                                                       {KnowledgeKind::Fact, "fact"},
                                                       {KnowledgeKind::Principle, "principle"},
                                                       {KnowledgeKind::Procedure, "procedure"}}};
constexpr NameTable<PerformanceContext, 2> kContexts{
    {{PerformanceContext::Familiar, "familiar"}, {PerformanceContext::Unfamiliar, "unfamiliar"}}};
constexpr NameTable<Autonomy, 2> kAutonomy{
    {{Autonomy::Assisted, "assisted"}, {Autonomy::Autonomous, "autonomous"}}};
constexpr NameTable<Scope, 2> kScopes{{{Scope::Partial, "partial"}, {Scope::Total, "total"}}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) noexcept {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const NameTable<E, N>& table, std::string_view s) noexcept {
  for (const auto& [v, name] : table) {
    if (name == s) return v;
  }
  return std::nullopt;
}

bool ordinal_ok(int v) { return v >= kOrdinalMin && v <= kOrdinalMax; }

}  // namespace

std::string_view to_string(Ability v) noexcept { return name_of(kAbilities, v); }
std::string_view to_string(ElementKind v) noexcept { return name_of(kElementKinds, v); }
std::string_view to_string(KnowledgeKind v) noexcept { return name_of(kKnowledgeKinds, v); }
std::string_view to_string(PerformanceContext v) noexcept { return name_of(kContexts, v); }
std::string_view to_string(Autonomy v) noexcept { return name_of(kAutonomy, v); }
std::string_view to_string(Scope v) noexcept { return name_of(kScopes, v); }

std::optional<Ability> parse_ability(std::string_view s) noexcept {
  return value_of(kAbilities, s);
}
std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept {
  return value_of(kElementKinds, s);
}
std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s) noexcept {
  return value_of(kKnowledgeKinds, s);
}
std::optional<PerformanceContext> parse_context(std::string_view s) noexcept {
  return value_of(kContexts, s);
}
std::optional<Autonomy> parse_autonomy(std::string_view s) noexcept {
  return value_of(kAutonomy, s);
}
std::optional<Scope> parse_scope(std::string_view s) noexcept { return value_of(kScopes, s); }

const CompetencyElement* CompetenceDefinition::find_element(std::string_view element_id) const {
  for (const auto& e : elements) {
    if (e.id == element_id) return &e;
  }
  return nullptr;
}

void check_invariants(const CompetenceDefinition& c) {
  if (c.id.empty()) throw ValidationError("<competence>", "identifier", "must not be empty");
  if (c.elements.empty()) throw ValidationError(c.id, "element", "at least one element required");
  if (c.required_questions < 1) {
    throw ValidationError(c.id, "questions", "required question count must be >= 1");
  }
  if (c.choices_per_question < 2) {
    throw ValidationError(c.id, "choices", "choices per question must be >= 2");
  }
  std::set<std::string_view> ids;
  for (const auto& e : c.elements) {
    if (e.id.empty()) throw ValidationError(c.id, "element.identifier", "must not be empty");
    if (!ids.insert(e.id).second) {
      throw ValidationError(c.id, "element.identifier", "duplicate element '" + e.id + "'");
    }
    if (e.kind == ElementKind::Skill && e.knowledge_items.empty()) {
      throw ValidationError(e.id, "knowledge", "a skill element requires knowledge items");
    }
    if (e.kind == ElementKind::Attitude && !e.knowledge_items.empty()) {
      throw ValidationError(e.id, "knowledge", "an attitude element carries no knowledge items");
    }
    if (!ordinal_ok(e.performance.complexity)) {
      throw ValidationError(e.id, "performance.complexity", "must be in 1..5");
    }
    if (!ordinal_ok(e.performance.frequency)) {
      throw ValidationError(e.id, "performance.frequency", "must be in 1..5");
    }
  }
}

const Choice* ItemDefinition::find_choice(std::string_view choice_id) const {
  for (const auto& c : choices) {
    if (c.id == choice_id) return &c;
  }
  return nullptr;
}

void check_invariants(const ItemDefinition& item) {
  if (item.id.empty()) throw ValidationError("<item>", "identifier", "must not be empty");
  if (item.choices.size() < 2) {
    throw ValidationError(item.id, "choice", "at least two choices required");
  }
  std::set<std::string_view> ids;
  for (const auto& c : item.choices) {
    if (c.id.empty()) throw ValidationError(item.id, "choice.identifier", "must not be empty");
    if (!ids.insert(c.id).second) {
      throw ValidationError(item.id, "choice.identifier", "duplicate choice '" + c.id + "'");
    }
  }
  if (item.find_choice(item.correct_choice) == nullptr) {
    throw ValidationError(item.id, "correct",
                          "correct choice '" + item.correct_choice + "' is not a listed choice");
  }
  if (!(item.importance >= 0.0 && item.importance <= 1.0)) {
    throw ValidationError(item.id, "importance", "must be within [0, 1]");
  }
  if (item.element_ref.empty()) throw ValidationError(item.id, "elementRef", "must not be empty");
  if (item.competence_ref.empty()) {
    throw ValidationError(item.id, "competenceRef", "must not be empty");
  }
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(hms.hours().count()),
                static_cast<long long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()),
                static_cast<long long>(hms.subseconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  auto digits = [&](std::size_t count) -> std::optional<int> {
    if (pos + count > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const char c = text[pos + i];
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      v = v * 10 + (c - '0');
    }
    pos += count;
    return v;
  };
  auto expect = [&](auto pred) {
    if (pos >= text.size() || !pred(text[pos])) return false;
    ++pos;
    return true;
  };

  const auto y = digits(4);
  if (!y || !expect([](char c) { return c == '-'; })) return std::nullopt;
  const auto mo = digits(2);
  if (!mo || !expect([](char c) { return c == '-'; })) return std::nullopt;
  const auto d = digits(2);
  if (!d || !expect([](char c) { return c == 'T' || c == 't' || c == ' '; })) return std::nullopt;
  const auto h = digits(2);
  if (!h || !expect([](char c) { return c == ':'; })) return std::nullopt;
  const auto mi = digits(2);
  if (!mi || !expect([](char c) { return c == ':'; })) return std::nullopt;
  const auto s = digits(2);
  if (!s) return std::nullopt;

  long long millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int count = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (count < 3) millis = millis * 10 + (text[pos] - '0');
      ++count;
      ++pos;
    }
    if (count == 0 || count > 9) return std::nullopt;
    for (int i = count; i < 3; ++i) millis *= 10;
  }

  int offset_minutes = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    ++pos;
    const auto oh = digits(2);
    if (!oh || !expect([](char c) { return c == ':'; })) return std::nullopt;
    const auto om = digits(2);
    if (!om || *oh > 23 || *om > 59) return std::nullopt;
    offset_minutes = sign * (*oh * 60 + *om);
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 60) return std::nullopt;
  const auto t = sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s} + milliseconds{millis} -
                 minutes{offset_minutes};
  return time_point_cast<milliseconds>(t);
}

void LearnerProfile::add_record(CompetencyRecord record) {
  auto clash = [&](const CompetencyRecord& r) {
    return r.competence_ref == record.competence_ref && r.timestamp == record.timestamp;
  };
  while (std::any_of(competency_records.begin(), competency_records.end(), clash)) {
    record.timestamp += std::chrono::milliseconds{1};
  }
  competency_records.push_back(std::move(record));
}

const CompetencyRecord* LearnerProfile::latest_record(std::string_view competence_id) const {
  const CompetencyRecord* best = nullptr;
  for (const auto& r : competency_records) {
    if (r.competence_ref == competence_id && (best == nullptr || r.timestamp >= best->timestamp)) {
      best = &r;
    }
  }
  return best;
}

void check_invariants(const LearnerProfile& profile) {
  if (profile.id.empty()) throw ValidationError("<learner>", "identifier", "must not be empty");
  std::set<std::pair<std::string_view, Timestamp>> seen;
  for (const auto& r : profile.competency_records) {
    if (r.competence_ref.empty()) {
      throw ValidationError(profile.id, "competencyRecord.competenceRef", "must not be empty");
    }
    if (!(r.theta >= -3.0 && r.theta <= 3.0)) {
      throw ValidationError(profile.id, "competencyRecord.theta", "must be within [-3, 3]");
    }
    if (!(r.standard_error > 0.0)) {
      throw ValidationError(profile.id, "competencyRecord.stderr", "must be > 0");
    }
    if (r.item_count < 0) {
      throw ValidationError(profile.id, "competencyRecord.items", "must be >= 0");
    }
    if (!seen.emplace(r.competence_ref, r.timestamp).second) {
      throw ValidationError(profile.id, "competencyRecord.timestamp",
                            "duplicate record for '" + r.competence_ref + "' at " +
                                format_timestamp(r.timestamp));
    }
  }
}

}  // namespace placement::ims
