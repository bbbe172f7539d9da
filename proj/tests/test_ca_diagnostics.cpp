#include <gtest/gtest.h>

#include "soccerseq/ca_diagnostics.hpp"

#include <sstream>

using namespace soccerseq;
using namespace soccerseq::diag;

namespace {

Bits bits(std::initializer_list<int> v) {
  Bits b(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) b(i++) = static_cast<std::uint8_t>(x);
  return b;
}

DiagnosticsConfig short_run() {
  DiagnosticsConfig c;
  c.run_steps = 400;
  c.trials = 5;
  return c;
}

}  // namespace

TEST(Binarize, ThresholdIsInclusive) {
  fca::FuzzyState<double> s(3);
  s << 0.49, 0.5, 0.9;
  EXPECT_EQ(binarize(s), bits({0, 1, 1}));
}

TEST(SeriesEntropy, KnownValues) {
  EXPECT_DOUBLE_EQ(series_entropy(bits({0, 0, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(series_entropy(bits({0, 1, 0, 1})), 1.0);
  EXPECT_NEAR(series_entropy(bits({1, 0, 0, 0, 0, 0, 0, 0, 0, 0})), 0.4689955935892812, 1e-15);
}

TEST(SiteEntropy, AveragesColumns) {
  BitHistory h(4, 2);
  h << 0, 1,
       0, 0,
       0, 1,
       0, 0;
  EXPECT_DOUBLE_EQ(site_entropy(h), 0.5);
}

TEST(MutualInformation, IdenticalAndIndependentPatterns) {
  EXPECT_DOUBLE_EQ(mutual_information(bits({0, 1, 1, 0}), bits({0, 1, 1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(mutual_information(bits({0, 1, 1, 0}), bits({1, 0, 0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(mutual_information(bits({0, 0, 1, 1}), bits({0, 1, 0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(mutual_information(bits({1, 1, 1, 1}), bits({0, 1, 0, 1})), 0.0);
  EXPECT_THROW(mutual_information(bits({0, 1}), bits({0})), std::invalid_argument);
}

TEST(MutualInformation, Symmetric) {
  const auto a = bits({0, 1, 1, 0, 1, 1, 1, 0});
  const auto b = bits({1, 1, 0, 0, 1, 0, 1, 0});
  EXPECT_EQ(mutual_information(a, b), mutual_information(b, a));
}

TEST(Measures, ConstantRuleIsDead) {
  const auto rules = fca::uniform_rules(0, 12);
  EXPECT_DOUBLE_EQ(measure_entropy(rules, short_run()).mean_entropy, 0.0);
  EXPECT_DOUBLE_EQ(measure_mi(rules, short_run()).mean_mi, 0.0);
}

TEST(Measures, IdentityRuleKeepsInformation) {
  const auto rules = fca::uniform_rules(204, 12);
  EXPECT_DOUBLE_EQ(measure_entropy(rules, short_run()).mean_entropy, 0.0);
  EXPECT_DOUBLE_EQ(measure_mi(rules, short_run()).mean_mi, 1.0);
}

TEST(Measures, AlternatingComplementHasFullEntropy) {
  const auto rules = fca::uniform_rules(51, 12);
  const auto e = measure_entropy(rules, short_run());
  EXPECT_DOUBLE_EQ(e.mean_entropy, 1.0);
  EXPECT_DOUBLE_EQ(e.std_dev, 0.0);
  EXPECT_DOUBLE_EQ(measure_mi(rules, short_run()).mean_mi, 1.0);
}

TEST(Measures, BoundedAndSeedDeterministic) {
  const auto rules = fca::parse_rules("238,17,85,252,3,240,51,204,170,15");
  const auto a = diagnose_rules(0, rules, short_run());
  const auto b = diagnose_rules(0, rules, short_run());
  EXPECT_EQ(a.mean_entropy, b.mean_entropy);
  EXPECT_EQ(a.mean_mi, b.mean_mi);
  EXPECT_GE(a.mean_entropy, 0.0);
  EXPECT_LE(a.mean_entropy, 1.0);
  EXPECT_GE(a.mean_mi, 0.0);
  EXPECT_LE(a.mean_mi, 1.0);
  EXPECT_GE(a.std_entropy, 0.0);
}

TEST(Measures, ConfigValidation) {
  DiagnosticsConfig c;
  c.window = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.run_steps = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(DiagCsv, HeaderAndRows) {
  std::ostringstream out;
  write_diag_csv(out, {{0, 10, 0.5, 0.1, 0.25}});
  EXPECT_EQ(out.str(), "# schema_version=1\ngeneration,n,mean_entropy,std_entropy,mean_mi\n0,10,0.5,0.1,0.25\n");
}
