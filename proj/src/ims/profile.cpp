#include "placement/ims/formats.hpp"
#include "placement/ims/xml.hpp"
#include "xml_fields.hpp"

namespace placement::ims {

using detail::required;
using detail::required_int;
using detail::required_real;

LearnerProfile parse_profile(std::string_view document) {
  const xml::Element root = xml::parse(document);
  detail::expect_root(root, "learner");

  LearnerProfile p;
  p.id = required(root, "identifier", "<learner>");
  if (const xml::Element* ident = root.first_child("identification")) {
    p.identification.name = detail::child_text(*ident, "name");
    p.identification.affiliation = detail::child_text(*ident, "affiliation");
  }
  for (const xml::Element* e : root.children_named("competencyRecord")) {
    CompetencyRecord r;
    r.competence_ref = required(*e, "competenceRef", p.id);
    r.theta = required_real(*e, "theta", p.id);
    r.standard_error = required_real(*e, "stderr", p.id);
    const std::string status = required(*e, "status", p.id);
    try {
      r.status = irt::parse_status(status);
    } catch (const irt::DomainError&) {
      throw ValidationError(p.id, "status", "unknown value '" + status + "'");
    }
    r.item_count = required_int(*e, "items", p.id);
    const std::string ts = required(*e, "timestamp", p.id);
    const auto parsed = parse_timestamp(ts);
    if (!parsed) throw ValidationError(p.id, "timestamp", "not RFC 3339: '" + ts + "'");
    r.timestamp = *parsed;
    p.competency_records.push_back(std::move(r));
  }
  check_invariants(p);
  return p;
}

std::string serialize_profile(const LearnerProfile& p) {
  xml::Element root("learner");
  root.set("identifier", p.id);
  xml::Element& ident = root.add_child(xml::Element("identification"));
  ident.add_text_child("name", p.identification.name);
  ident.add_text_child("affiliation", p.identification.affiliation);
  for (const auto& r : p.competency_records) {
    root.add_child(xml::Element("competencyRecord"))
        .set("competenceRef", r.competence_ref)
        .set("theta", xml::format_real(r.theta))
        .set("stderr", xml::format_real(r.standard_error))
        .set("status", std::string(irt::to_string(r.status)))
        .set("items", std::to_string(r.item_count))
        .set("timestamp", format_timestamp(r.timestamp));
  }
  return xml::write(root);
}

}  // namespace placement::ims
