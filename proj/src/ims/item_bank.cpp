#include <algorithm>

#include "placement/ims/formats.hpp"
#include "placement/ims/xml.hpp"
#include "xml_fields.hpp"

namespace placement::ims {

using detail::optional_attr;
using detail::required;
using detail::required_real;

std::vector<ItemDefinition> parse_item_bank(std::string_view document) {
  const xml::Element root = xml::parse(document);
  detail::expect_root(root, "itemBank");
  const std::string bank_competence = optional_attr(root, "competenceRef");

  std::vector<ItemDefinition> items;
  for (const xml::Element* e : root.children_named("item")) {
    ItemDefinition item;
    item.id = required(*e, "identifier", "<item line " + std::to_string(e->line) + ">");
    const std::string& subject = item.id;

    double a = 1.0;
    if (e->find_attribute("a") != nullptr) a = required_real(*e, "a", subject);
    const double b = required_real(*e, "b", subject);
    try {
      item.scale = irt::ItemParameters(a, b);
    } catch (const irt::DomainError& err) {
      throw ValidationError(subject, "a/b", err.what());
    }
    item.importance = required_real(*e, "importance", subject);
    item.element_ref = required(*e, "elementRef", subject);
    item.competence_ref = optional_attr(*e, "competenceRef");
    if (item.competence_ref.empty()) item.competence_ref = bank_competence;

    item.body = detail::child_text(*e, "body");
    for (const xml::Element* c : e->children_named("choice")) {
      item.choices.push_back(Choice{required(*c, "identifier", subject), c->text});
    }
    const xml::Element* correct = e->first_child("correct");
    if (correct == nullptr) throw ValidationError(subject, "correct", "missing <correct>");
    item.correct_choice = correct->text;

    check_invariants(item);
    items.push_back(std::move(item));
  }
  return items;
}

std::string serialize_item_bank(const std::vector<ItemDefinition>& items) {
  xml::Element root("itemBank");
  const bool shared =
      !items.empty() && std::all_of(items.begin(), items.end(), [&](const ItemDefinition& i) {
        return i.competence_ref == items.front().competence_ref;
      });
  if (shared) root.set("competenceRef", items.front().competence_ref);

  for (const auto& item : items) {
    xml::Element e("item");
    e.set("identifier", item.id);
    e.set("a", xml::format_real(item.scale.discrimination()));
    e.set("b", xml::format_real(item.scale.difficulty()));
    e.set("importance", xml::format_real(item.importance));
    e.set("elementRef", item.element_ref);
    if (!shared) e.set("competenceRef", item.competence_ref);
    e.add_text_child("body", item.body);
    for (const auto& c : item.choices) {
      e.add_text_child("choice", c.text).set("identifier", c.id);
    }
    e.add_text_child("correct", item.correct_choice);
    root.add_child(std::move(e));
  }
  return xml::write(root);
}

}  // namespace placement::ims
