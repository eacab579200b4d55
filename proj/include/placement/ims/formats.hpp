#pragma once

// XML subsets (UTF-8, lower-camel element names):
//
//   <itemBank competenceRef="...">
//     <item identifier="q1" a="1" b="0.1" importance="0.8" elementRef="...">
//       <body>...</body>
//       <choice identifier="A">...</choice> ...
//       <correct>A</correct>
//     </item>
//   </itemBank>
//
//   <competence identifier="...">
//     <title/> <description/> <prerequisite ref="..."/>*
//     <delivery questions="n" choices="m"/>
//     <element identifier="..." ability="apply" kind="skill">
//       <knowledge kind="procedure">...</knowledge>*
//       <performance context="familiar" complexity="3" autonomy="autonomous"
//                    scope="total" frequency="4"/>
//     </element>+
//   </competence>
//
//   <learner identifier="...">
//     <identification><name/><affiliation/></identification>
//     <competencyRecord competenceRef="..." theta="..." stderr="..."
//                       status="converged" items="20" timestamp="RFC 3339"/>*
//   </learner>
//
// Parsers throw xml::ParseError for malformed documents and ValidationError
// for invariant violations. Text content is whitespace-trimmed.

#include <string>
#include <string_view>
#include <vector>

#include "placement/ims/types.hpp"

namespace placement::ims {

[[nodiscard]] std::vector<ItemDefinition> parse_item_bank(std::string_view document);
[[nodiscard]] std::string serialize_item_bank(const std::vector<ItemDefinition>& items);

[[nodiscard]] CompetenceDefinition parse_competence(std::string_view document);
[[nodiscard]] std::string serialize_competence(const CompetenceDefinition& competence);

[[nodiscard]] LearnerProfile parse_profile(std::string_view document);
[[nodiscard]] std::string serialize_profile(const LearnerProfile& profile);

}  // namespace placement::ims
