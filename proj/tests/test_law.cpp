#include <gtest/gtest.h>

#include <string>

#include <sarrt/law.hpp>
#include <sarrt/law_spec.hpp>

using namespace sarrt;

namespace {

std::string data(const char* name) { return std::string(SARRT_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST(LawSpec, ParsesEveryKind) {
  EXPECT_EQ(parse_law("uniform").kind(), LawKind::Uniform);
  EXPECT_EQ(parse_law("max:3").as<law::MaxOrder>().k, 3);
  EXPECT_EQ(parse_law("min:2").as<law::MinOrder>().k, 2);
  EXPECT_DOUBLE_EQ(parse_law("pow:0.5").as<law::Power>().beta, 0.5);
  EXPECT_DOUBLE_EQ(parse_law("const:0.25").as<law::Constant>().theta, 0.25);
  const auto atom = parse_law("atom:0.3+max:2");
  EXPECT_EQ(atom.kind(), LawKind::AtomMixture);
  EXPECT_DOUBLE_EQ(atom.atom_mass(), 0.3);
  EXPECT_EQ(atom.as<law::AtomMixture>().base->kind(), LawKind::MaxOrder);
  EXPECT_EQ(parse_law("table:" + data("tent.csv")).kind(), LawKind::Tabulated);
  EXPECT_EQ(parse_law("  uniform  ").kind(), LawKind::Uniform);
}

TEST(LawSpec, RoundTripsThroughSpec) {
  for (const char* text : {"uniform", "max:4", "min:5", "pow:3", "const:0.5", "atom:0.25+uniform", "pow:0.1"}) {
    const auto law = parse_law(text);
    EXPECT_EQ(parse_law(law.spec()).spec(), law.spec()) << text;
  }
  EXPECT_EQ(parse_law("atom:0.25+uniform").spec(), "atom:0.25+uniform");
}

TEST(LawSpec, ErrorsNameTheOffendingToken) {
  auto token_of = [](const std::string& text) {
    try {
      parse_law(text);
    } catch (const LawParseError& e) {
      return e.token();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(token_of("gauss:1"), "gauss");
  EXPECT_EQ(token_of("max:two"), "two");
  EXPECT_EQ(token_of("max:2.5"), "2.5");
  EXPECT_EQ(token_of("pow:1e"), "1e");
  EXPECT_EQ(token_of("atom:0.1"), "0.1");
  EXPECT_EQ(token_of("atom:0.1+atom:0.2+uniform"), "atom:0.2+uniform");
  EXPECT_EQ(token_of("uniform:1"), "uniform:1");
  EXPECT_EQ(token_of("bogus"), "bogus");
  EXPECT_THROW(parse_law(""), LawParseError);
}

TEST(LawSpec, RejectsOutOfRangeParameters) {
  EXPECT_THROW(parse_law("max:0"), InvalidLaw);
  EXPECT_THROW(parse_law("min:-1"), InvalidLaw);
  EXPECT_THROW(parse_law("pow:0"), InvalidLaw);
  EXPECT_THROW(parse_law("pow:-2"), InvalidLaw);
  EXPECT_THROW(parse_law("const:1"), InvalidLaw);
  EXPECT_THROW(parse_law("const:0"), InvalidLaw);
  EXPECT_THROW(parse_law("atom:1+uniform"), InvalidLaw);
  EXPECT_THROW(parse_law("atom:-0.1+uniform"), InvalidLaw);
}

TEST(LawSpec, TableFileValidation) {
  EXPECT_THROW(parse_law("table:" + data("bad_order.csv")), InvalidLaw);
  EXPECT_THROW(parse_law("table:" + data("bad_header.csv")), InvalidLaw);
  EXPECT_THROW(parse_law("table:" + data("missing.csv")), IoError);
}

TEST(TabulatedDensity, NormalizesToUnitMass) {
  const TabulatedDensity t({0.1, 0.4, 0.9}, {0.0, 2.0, 1.0});
  double mass = 0.0;
  for (std::size_t i = 0; i < t.segments(); ++i) mass += t.segment_mass(i);
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(t.cumulative().back(), 1.0);
  EXPECT_DOUBLE_EQ(t.density(0.05), 0.0);
  EXPECT_NEAR(t.density(0.25), 0.5 * t.density(0.4), 1e-12);
}

TEST(TabulatedDensity, RejectsBadGrids) {
  EXPECT_THROW(TabulatedDensity({0.5}, {1.0}), InvalidLaw);
  EXPECT_THROW(TabulatedDensity({0.0, 1.5}, {1.0, 1.0}), InvalidLaw);
  EXPECT_THROW(TabulatedDensity({0.0, 0.5}, {1.0, -1.0}), InvalidLaw);
  EXPECT_THROW(TabulatedDensity({0.0, 0.5}, {0.0, 0.0}), InvalidLaw);
}

TEST(AttachmentLaw, AtomMixturesDoNotNest) {
  const auto inner = AttachmentLaw::atom_mixture(0.1, AttachmentLaw::uniform());
  EXPECT_THROW(AttachmentLaw::atom_mixture(0.2, inner), InvalidLaw);
}
