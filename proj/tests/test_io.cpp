#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/random.hpp"

using namespace hardyiso;
using namespace hardyiso::testing;
using hardyiso::io::Json;

namespace {

void expect_same(const DiscAutomorphism& x, const DiscAutomorphism& y) {
  EXPECT_EQ(x.lambda(), y.lambda());
  EXPECT_EQ(x.a(), y.a());
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Json, ComplexShape) {
  const Json j = io::to_json(Complex(0.25, -3.0));
  EXPECT_EQ(j.dump(), R"({"im":-3.0,"re":0.25})");
  EXPECT_EQ(io::complex_from_json(j), Complex(0.25, -3.0));
}

TEST(Json, AutomorphismRoundTrip) {
  Rng rng(50);
  for (int i = 0; i < 200; ++i) {
    const auto phi = random_automorphism(rng, 0.999);
    expect_same(io::automorphism_from_json(Json::parse(io::to_json(phi).dump())), phi);
  }
}

TEST(Json, SpecFuzzRoundTrip) {
  Rng rng(51);
  for (int i = 0; i < 1000; ++i) {
    IsometrySpec s = random_spec(rng, random_automorphism(rng), static_cast<std::size_t>(i % 5), 1.0 + uniform(rng, 0.0, 5.0));
    if (i % 7 == 0) s.infinite = construct_zero_intersection(DiscAutomorphism(kI, (1.0 + kI) / 2.0));
    const IsometrySpec back = io::spec_from_json(Json::parse(io::to_json(s).dump()));
    EXPECT_EQ(back.p, s.p);
    EXPECT_EQ(back.phase, s.phase);
    expect_same(back.phi, s.phi);
    ASSERT_EQ(back.psi_factors.size(), s.psi_factors.size());
    for (std::size_t k = 0; k < s.psi_factors.size(); ++k) expect_same(back.psi_factors[k], s.psi_factors[k]);
    EXPECT_EQ(back.infinite.has_value(), s.infinite.has_value());
    // Emitting again reproduces the same text.
    EXPECT_EQ(io::to_json(back).dump(), io::to_json(s).dump());
  }
}

TEST(Json, ThinnedConstructionRoundTrip) {
  const auto c = construct_nonzero_intersection(DiscAutomorphism::hyperbolic_standard(0.5), 5);
  const auto back = io::construction_from_json(Json::parse(io::to_json(c).dump()));
  EXPECT_EQ(back.kind, ConstructionKind::ThinnedForwardProduct);
  EXPECT_EQ(back.indices, c.indices);
  EXPECT_EQ(back.index_tails, c.index_tails);
  EXPECT_EQ(back.budget, c.budget);
  EXPECT_EQ(back.budget_upper, c.budget_upper);
  EXPECT_EQ(back.double_sum_bound, c.double_sum_bound);
}

TEST(Json, ClassificationShape) {
  const Json j = io::to_json(classify(DiscAutomorphism(kI, (1.0 + kI) / 2.0)));
  EXPECT_EQ(j["kind"], "Parabolic");
  ASSERT_EQ(j["fixed_points"].size(), 1u);
  EXPECT_NEAR(j["fixed_points"][0]["re"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["fixed_points"][0]["im"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j["orientation"], "plus");
  EXPECT_TRUE(io::to_json(classify(DiscAutomorphism::rotation(kI)))["orientation"].is_null());
}

TEST(Json, UnboundedValuesBecomeNull) {
  ConvergenceVerdict v;
  v.partial_sums = {1.0, 2.0};
  const Json j = io::to_json(v);
  EXPECT_TRUE(j["tail_bound"].is_null());
  EXPECT_TRUE(j["fit_residual"].is_null());
  EXPECT_EQ(j["terms"], 2);
  EXPECT_NO_THROW(Json::parse(j.dump()));
}

TEST(Json, Malformed) {
  EXPECT_THROW(io::complex_from_json(Json::parse(R"({"re":1})")), ParseError);
  EXPECT_THROW(io::complex_from_json(Json::parse(R"({"re":"1","im":0})")), ParseError);
  EXPECT_THROW(io::complex_from_json(Json::parse("[1,2]")), ParseError);
  EXPECT_THROW(io::automorphism_from_json(Json::parse(R"({"lambda":{"re":1,"im":0}})")), ParseError);
  EXPECT_THROW(io::spec_from_json(Json::parse(R"({"phi":{"lambda":{"re":1,"im":0},"a":{"re":0,"im":0}}})")), ParseError);
  EXPECT_THROW(io::construction_from_json(Json::parse(R"({"kind":"Other","phi":{}})")), ParseError);
  EXPECT_THROW(io::load("{not json"), ParseError);
  EXPECT_THROW(io::load("   "), ParseError);
  EXPECT_THROW(io::load("/nonexistent/file.json"), ParseError);
}

TEST(Json, SemanticErrorsAreNotParseErrors) {
  // Well-formed input that violates a precondition.
  const auto bad_a = Json::parse(R"({"lambda":{"re":1,"im":0},"a":{"re":1.5,"im":0}})");
  EXPECT_THROW(io::automorphism_from_json(bad_a), DomainError);
  const auto bad_phase = Json::parse(
      R"({"p":3,"phase":{"re":2,"im":0},"phi":{"lambda":{"re":1,"im":0},"a":{"re":0,"im":0}}})");
  EXPECT_THROW(io::spec_from_json(bad_phase), DomainError);
}

TEST(Json, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "hardyiso_io_test.json";
  {
    std::ofstream os(path);
    os << io::to_json(DiscAutomorphism(kI, 0.25)).dump();
  }
  expect_same(io::automorphism_from_json(io::load(path.string())), DiscAutomorphism(kI, 0.25));
  std::filesystem::remove(path);
}

TEST(Csv, FormatAndPrecision) {
  const auto seq = ZeroSequence::orbit(DiscAutomorphism{}, DiscAutomorphism(kI, (1.0 + kI) / 2.0));
  const auto terms = seq.take(100);
  const auto sums = partial_sums(terms);
  std::ostringstream os;
  io::write_orbit_csv(os, terms, sums, 0);
  const auto lines = split_lines(os.str());
  ASSERT_EQ(lines.size(), 101u);
  EXPECT_EQ(lines[0], "n,re_b,im_b,one_minus_abs,partial_sum");
  for (std::size_t k = 0; k < 100; ++k) {
    std::istringstream row(lines[k + 1]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_EQ(std::stoul(cells[0]), k);
    // max_digits10 output parses back to the identical double.
    EXPECT_EQ(std::stod(cells[1]), terms[k].value.real());
    EXPECT_EQ(std::stod(cells[2]), terms[k].value.imag());
    EXPECT_EQ(std::stod(cells[3]), terms[k].one_minus_abs());
    EXPECT_EQ(std::stod(cells[4]), sums[k]);
  }
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

TEST(Csv, FirstIndexOffset) {
  const auto terms = ZeroSequence::forward_orbit(DiscAutomorphism::hyperbolic_standard(0.5)).take(3);
  std::ostringstream os;
  io::write_orbit_csv(os, terms, partial_sums(terms), 1);
  const auto lines = split_lines(os.str());
  EXPECT_EQ(lines[1].substr(0, 2), "1,");
  EXPECT_EQ(lines[3].substr(0, 2), "3,");
}
