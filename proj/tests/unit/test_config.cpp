#include <gtest/gtest.h>

#include "erw/config.hpp"

namespace {

using namespace erw::harness;

TEST(ConfigText, ParsesKeysCommentsAndBlankLines) {
  const auto map = parse_config_text(
      "# return times\nkind=ReturnTimeDiffusive\n\n p = 0.5 \nk=100\r\ncap=1e7\n");
  EXPECT_EQ(map.at("kind"), "ReturnTimeDiffusive");
  EXPECT_EQ(map.at("p"), "0.5");
  EXPECT_EQ(map.at("k"), "100");
  EXPECT_EQ(map.at("cap"), "1e7");
}

TEST(ConfigText, RejectsUnknownDuplicateAndMalformed) {
  EXPECT_THROW(parse_config_text("kind=ReturnTimeDiffusive\nsteps=3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("p=0.5\np=0.6\n"), ConfigError);
  EXPECT_THROW(parse_config_text("p 0.5\n"), ConfigError);
}

TEST(ConfigText, ScientificCountsAreFlooredWithNotice) {
  std::vector<std::string> notices;
  const auto c = config_from_map(
      {{"kind", "ReturnTimeDiffusive"}, {"p", "0.5"}, {"k", "100"}, {"cap", "2.5e3"},
       {"replicas", "1e4"}},
      &notices);
  EXPECT_EQ(*c.cap, 2500u);
  EXPECT_EQ(c.replicas, 10000u);
  EXPECT_TRUE(notices.empty());
  const auto d = config_from_map(
      {{"kind", "ReturnTimeDiffusive"}, {"p", "0.5"}, {"k", "100"}, {"cap", "1234.7"}}, &notices);
  EXPECT_EQ(*d.cap, 1234u);
  ASSERT_EQ(notices.size(), 1u);
  EXPECT_NE(notices[0].find("floored"), std::string::npos);
}

TEST(ConfigText, RoundTrips) {
  ExperimentConfig c;
  c.kind = ExperimentKind::EarlyReturnProbe;
  c.p = 0.6;
  c.k = TrainingRule::parse("CriticalPhase");
  c.n = 1'000'000;
  c.replicas = 5000;
  c.seed = 99;
  c.checkpoint_times = {0.4, 0.2, 0.1, 0.05};
  c.output_dir = "out/probe";
  const auto back = config_from_map(parse_config_text(to_config_text(c)));
  EXPECT_TRUE(back == c);
}

TEST(ParseCount, AcceptsIntegersAndScientific) {
  EXPECT_EQ(parse_count("18446744073709551615"), 18446744073709551615ULL);
  EXPECT_EQ(parse_count("1e9"), 1'000'000'000u);
  bool floored = false;
  EXPECT_EQ(parse_count("3.9", &floored), 3u);
  EXPECT_TRUE(floored);
  EXPECT_THROW(parse_count("-1"), ConfigError);
  EXPECT_THROW(parse_count("abc"), ConfigError);
}

TEST(TrainingRule, ParsesAndResolves) {
  using erw::MemoryParam;
  EXPECT_EQ(TrainingRule::parse("17").resolve(MemoryParam(0.6), std::nullopt), 17u);
  EXPECT_EQ(TrainingRule::parse("CriticalPhase").resolve(MemoryParam(0.6), 1'000'000), 244u);
  EXPECT_EQ(TrainingRule::parse("CriticalPhase").resolve(MemoryParam(0.75), 1'000'000), 14u);
  EXPECT_EQ(TrainingRule::parse("LogRule").resolve(MemoryParam(0.75), 1'000'000), 14u);
  EXPECT_EQ(TrainingRule::parse("PowerRule(0.55)").resolve(MemoryParam(0.6), 1'000'000), 1995u);
  EXPECT_EQ(TrainingRule::parse("PowerRule(0.55)").to_string(), "PowerRule(0.55)");
  EXPECT_THROW(TrainingRule::parse("PowerRule(1.5)"), ConfigError);
  EXPECT_THROW(TrainingRule::parse("CriticalPhase").resolve(MemoryParam(0.6), std::nullopt),
               ConfigError);
  EXPECT_THROW(TrainingRule::parse("CriticalPhase").resolve(MemoryParam(0.9), 100), ConfigError);
}

ExperimentConfig base(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.p = 0.6;
  c.k = TrainingRule::of(10);
  c.n = 1000;
  c.cap = 10'000;
  c.replicas = 10;
  return c;
}

TEST(Validate, AcceptsCompleteConfigs) {
  for (const auto kind : {ExperimentKind::ReturnTimeDiffusive, ExperimentKind::ScalingMarginals,
                          ExperimentKind::OvertrainedClt, ExperimentKind::MartingaleDiagnostics,
                          ExperimentKind::EarlyReturnProbe}) {
    EXPECT_NO_THROW(validate(base(kind))) << to_string(kind);
  }
  auto traj = base(ExperimentKind::TrajectoryFigure);
  traj.replicas = 1;
  traj.n = 0;
  EXPECT_NO_THROW(validate(traj));
}

TEST(Validate, ChecksCompletenessBeforeRunning) {
  auto c = base(ExperimentKind::ReturnTimeDiffusive);
  c.cap.reset();
  EXPECT_THROW(validate(c), ConfigError);
  c = base(ExperimentKind::ScalingMarginals);
  c.n.reset();
  EXPECT_THROW(validate(c), ConfigError);
  c = base(ExperimentKind::ScalingMarginals);
  c.p.reset();
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Validate, CapMustExceedK) {
  auto c = base(ExperimentKind::ReturnTimeDiffusive);
  c.cap = 10;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Validate, RegimeMustMatchKind) {
  auto c = base(ExperimentKind::ReturnTimeDiffusive);
  c.p = 0.75;
  EXPECT_THROW(validate(c), ConfigError);
  c.kind = ExperimentKind::ReturnTimeCritical;
  EXPECT_NO_THROW(validate(c));
  c.p = 0.6;
  EXPECT_THROW(validate(c), ConfigError);
  auto d = base(ExperimentKind::MartingaleDiagnostics);
  d.p = 0.8;
  EXPECT_THROW(validate(d), ConfigError);
}

TEST(Validate, ReplicasAndTimes) {
  auto c = base(ExperimentKind::ScalingMarginals);
  c.replicas = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = base(ExperimentKind::ScalingMarginals);
  c.checkpoint_times = {0.5, 0.25};
  EXPECT_THROW(validate(c), ConfigError);
  c.checkpoint_times = {0.001, 1.0};  // floor(1) = 1 < k
  EXPECT_THROW(validate(c), ConfigError);
  auto t = base(ExperimentKind::TrajectoryFigure);
  t.replicas = 2;
  EXPECT_THROW(validate(t), ConfigError);
}

TEST(Kinds, NamesRoundTrip) {
  for (int i = 0; i <= static_cast<int>(ExperimentKind::TrajectoryFigure); ++i) {
    const auto kind = static_cast<ExperimentKind>(i);
    EXPECT_EQ(parse_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_kind("Nope"), ConfigError);
}

}  // namespace
