#include <catch_amalgamated.hpp>

#include "fixture_paths.hpp"
#include "generators.hpp"
#include "placement/ims/formats.hpp"
#include "placement/ims/repository.hpp"
#include "placement/ims/xml.hpp"

using namespace placement::ims;
using placement::testing::sql_repo;
using placement::testing::ValueGenerator;

TEST_CASE("SQL competence fixture") {
  const auto c = parse_competence(read_file(sql_repo() / "competences" / "sql.xml"));
  CHECK(c.id == "sql");
  CHECK(c.prerequisites == std::vector<std::string>{"relational-algebra"});
  CHECK(c.required_questions == 20);
  CHECK(c.choices_per_question == 4);
  REQUIRE(c.elements.size() == 3);
  CHECK(c.elements[0].id == "sql-create");
  CHECK(c.elements[1].id == "sql-manipulate");
  CHECK(c.elements[2].id == "sql-retrieve");
  for (const auto& e : c.elements) {
    CHECK(e.ability == Ability::Apply);
    CHECK(e.kind == ElementKind::Skill);
    CHECK_FALSE(e.knowledge_items.empty());
  }
}

TEST_CASE("SQL item bank fixture") {
  const auto items = parse_item_bank(read_file(sql_repo() / "items" / "sql.xml"));
  REQUIRE(items.size() == 20);
  for (std::size_t i = 0; i < items.size(); ++i) {
    CHECK(items[i].scale.discrimination() == 1.0);
    CHECK(items[i].scale.difficulty() == Catch::Approx(0.1 * static_cast<double>(i + 1)).margin(1e-15));
    CHECK(items[i].competence_ref == "sql");
    CHECK(items[i].choices.size() == 4);
    CHECK(items[i].find_choice(items[i].correct_choice) != nullptr);
  }
}

TEST_CASE("fixture files survive parse and serialize unchanged") {
  for (const auto& entry : std::filesystem::directory_iterator(sql_repo() / "competences")) {
    const auto c = parse_competence(read_file(entry.path()));
    CHECK(parse_competence(serialize_competence(c)) == c);
  }
  for (const auto& entry : std::filesystem::directory_iterator(sql_repo() / "items")) {
    const auto items = parse_item_bank(read_file(entry.path()));
    const auto text = serialize_item_bank(items);
    CHECK(parse_item_bank(text) == items);
    CHECK(serialize_item_bank(parse_item_bank(text)) == text);
  }
  for (const auto& entry : std::filesystem::directory_iterator(sql_repo() / "learners")) {
    const auto p = parse_profile(read_file(entry.path()));
    CHECK(parse_profile(serialize_profile(p)) == p);
  }
}

TEST_CASE("generated values round-trip") {
  ValueGenerator gen(20141016);
  for (int i = 0; i < 200; ++i) {
    const auto c = gen.competence();
    CHECK_NOTHROW(check_invariants(c));
    CHECK(parse_competence(serialize_competence(c)) == c);

    const auto bank = gen.item_bank();
    CHECK(parse_item_bank(serialize_item_bank(bank)) == bank);

    const auto p = gen.profile();
    CHECK(parse_profile(serialize_profile(p)) == p);
  }
}

TEST_CASE("discrimination defaults to one") {
  const auto items = parse_item_bank(R"(<itemBank competenceRef="c">
  <item identifier="q" b="0.5" importance="1" elementRef="e">
    <body>?</body><choice identifier="A">a</choice><choice identifier="B">b</choice>
    <correct>B</correct>
  </item>
</itemBank>)");
  REQUIRE(items.size() == 1);
  CHECK(items[0].scale.discrimination() == 1.0);
  CHECK(items[0].competence_ref == "c");
}

namespace {

std::string item_doc(const std::string& attrs, const std::string& inner) {
  return "<itemBank competenceRef=\"c\"><item identifier=\"q\" " + attrs + ">" + inner +
         "</item></itemBank>";
}

const std::string kChoices =
    "<body>?</body><choice identifier=\"A\">a</choice><choice identifier=\"B\">b</choice>";

template <typename Fn>
std::string rejected_field(Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("item invariants") {
  const std::string ok = "b=\"0\" importance=\"0.5\" elementRef=\"e\"";
  CHECK_NOTHROW(parse_item_bank(item_doc(ok, kChoices + "<correct>A</correct>")));
  CHECK(rejected_field([&] { (void)parse_item_bank(item_doc(ok, kChoices + "<correct>Z</correct>")); }) ==
        "correct");
  CHECK(rejected_field([&] {
          (void)parse_item_bank(item_doc("b=\"0\" importance=\"1.5\" elementRef=\"e\"",
                                         kChoices + "<correct>A</correct>"));
        }) == "importance");
  CHECK(rejected_field([&] {
          (void)parse_item_bank(item_doc("b=\"0\" elementRef=\"e\"", kChoices + "<correct>A</correct>"));
        }) == "importance");
  CHECK(rejected_field([&] {
          (void)parse_item_bank(item_doc("a=\"0\" b=\"0\" importance=\"0.5\" elementRef=\"e\"",
                                         kChoices + "<correct>A</correct>"));
        }) == "a/b");
  CHECK(rejected_field([&] {
          (void)parse_item_bank(item_doc(
              ok, "<body>?</body><choice identifier=\"A\">a</choice><choice identifier=\"A\">b</choice>"
                  "<correct>A</correct>"));
        }) == "choice.identifier");
  CHECK_THROWS_AS(parse_item_bank("<itemBank><item"), xml::ParseError);
}

TEST_CASE("competence invariants") {
  const auto doc = [](const std::string& element) {
    return "<competence identifier=\"c\"><title>t</title><description>d</description>"
           "<delivery questions=\"2\" choices=\"4\"/>" +
           element + "</competence>";
  };
  const std::string perf =
      "<performance context=\"familiar\" complexity=\"3\" autonomy=\"assisted\" scope=\"partial\" "
      "frequency=\"2\"/>";
  CHECK_NOTHROW(parse_competence(doc("<element identifier=\"e\" ability=\"memorize\" kind=\"knowledge\">" +
                                     perf + "</element>")));
  CHECK(rejected_field([&] {
          (void)parse_competence(doc("<element identifier=\"e\" ability=\"apply\" kind=\"skill\">" + perf +
                                     "</element>"));
        }) == "knowledge");
  CHECK(rejected_field([&] {
          (void)parse_competence(doc(
              "<element identifier=\"e\" ability=\"evaluate\" kind=\"attitude\"><knowledge kind=\"fact\">x"
              "</knowledge>" +
              perf + "</element>"));
        }) == "knowledge");
  CHECK(rejected_field([&] { (void)parse_competence(doc("")); }) == "element");
  CHECK(rejected_field([&] {
          (void)parse_competence(doc("<element identifier=\"e\" ability=\"guess\" kind=\"knowledge\">" +
                                     perf + "</element>"));
        }) == "ability");
}

TEST_CASE("profile invariants and timestamps") {
  LearnerProfile p;
  p.id = "l";
  CompetencyRecord r{"sql", 1.25, 0.5, placement::irt::EstimationStatus::Converged, 20,
                     *parse_timestamp("2026-10-16T09:00:00.000Z")};
  p.add_record(r);
  p.add_record(r);
  REQUIRE(p.competency_records.size() == 2);
  CHECK(p.competency_records[1].timestamp - p.competency_records[0].timestamp ==
        std::chrono::milliseconds(1));
  CHECK(p.latest_record("sql") == &p.competency_records[1]);
  CHECK(parse_profile(serialize_profile(p)) == p);

  CHECK(format_timestamp(*parse_timestamp("2026-10-16T11:30:00.5+02:00")) == "2026-10-16T09:30:00.500Z");
  CHECK_FALSE(parse_timestamp("16/10/2026").has_value());

  auto bad = p;
  bad.competency_records[0].theta = 3.5;
  CHECK_THROWS_AS(check_invariants(bad), ValidationError);
  bad = p;
  bad.competency_records[0].standard_error = 0.0;
  CHECK_THROWS_AS(check_invariants(bad), ValidationError);
}

TEST_CASE("non-finite standard errors survive the profile format") {
  LearnerProfile p;
  p.id = "l";
  p.add_record({"sql", -3.0, std::numeric_limits<double>::infinity(),
                placement::irt::EstimationStatus::NonFiniteMLE, 20,
                *parse_timestamp("2026-10-16T09:00:00Z")});
  CHECK(parse_profile(serialize_profile(p)) == p);
}
