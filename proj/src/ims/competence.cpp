#include "placement/ims/formats.hpp"
#include "placement/ims/xml.hpp"
#include "xml_fields.hpp"

namespace placement::ims {

using detail::required;
using detail::required_enum;
using detail::required_int;

CompetenceDefinition parse_competence(std::string_view document) {
  const xml::Element root = xml::parse(document);
  detail::expect_root(root, "competence");

  CompetenceDefinition c;
  c.id = required(root, "identifier", "<competence>");
  c.title = detail::child_text(root, "title");
  c.description = detail::child_text(root, "description");
  for (const xml::Element* p : root.children_named("prerequisite")) {
    c.prerequisites.push_back(required(*p, "ref", c.id));
  }

  const xml::Element* delivery = root.first_child("delivery");
  if (delivery == nullptr) throw ValidationError(c.id, "delivery", "missing <delivery>");
  c.required_questions = required_int(*delivery, "questions", c.id);
  c.choices_per_question = required_int(*delivery, "choices", c.id);

  for (const xml::Element* e : root.children_named("element")) {
    CompetencyElement el;
    el.id = required(*e, "identifier", c.id);
    el.ability = required_enum(*e, "ability", el.id, parse_ability);
    el.kind = required_enum(*e, "kind", el.id, parse_element_kind);
    for (const xml::Element* k : e->children_named("knowledge")) {
      el.knowledge_items.push_back(
          KnowledgeItem{k->text, required_enum(*k, "kind", el.id, parse_knowledge_kind)});
    }
    const xml::Element* perf = e->first_child("performance");
    if (perf == nullptr) throw ValidationError(el.id, "performance", "missing <performance>");
    el.performance.context = required_enum(*perf, "context", el.id, parse_context);
    el.performance.complexity = required_int(*perf, "complexity", el.id);
    el.performance.autonomy = required_enum(*perf, "autonomy", el.id, parse_autonomy);
    el.performance.scope = required_enum(*perf, "scope", el.id, parse_scope);
    el.performance.frequency = required_int(*perf, "frequency", el.id);
    c.elements.push_back(std::move(el));
  }

  check_invariants(c);
  return c;
}

std::string serialize_competence(const CompetenceDefinition& c) {
  xml::Element root("competence");
  root.set("identifier", c.id);
  root.add_text_child("title", c.title);
  root.add_text_child("description", c.description);
  for (const auto& p : c.prerequisites) root.add_child(xml::Element("prerequisite")).set("ref", p);
  root.add_child(xml::Element("delivery"))
      .set("questions", std::to_string(c.required_questions))
      .set("choices", std::to_string(c.choices_per_question));

  for (const auto& el : c.elements) {
    xml::Element e("element");
    e.set("identifier", el.id);
    e.set("ability", std::string(to_string(el.ability)));
    e.set("kind", std::string(to_string(el.kind)));
    for (const auto& k : el.knowledge_items) {
      e.add_text_child("knowledge", k.label).set("kind", std::string(to_string(k.kind)));
    }
    e.add_child(xml::Element("performance"))
        .set("context", std::string(to_string(el.performance.context)))
        .set("complexity", std::to_string(el.performance.complexity))
        .set("autonomy", std::string(to_string(el.performance.autonomy)))
        .set("scope", std::string(to_string(el.performance.scope)))
        .set("frequency", std::to_string(el.performance.frequency));
    root.add_child(std::move(e));
  }
  return xml::write(root);
}

}  // namespace placement::ims
