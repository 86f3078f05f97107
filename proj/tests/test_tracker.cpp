#include "specklemap/tracker.hpp"

#include "tracker_properties.hpp"

#include <gtest/gtest.h>

using namespace specklemap;

TEST(Tracker, ConfirmsOnThirdConsecutiveDetection) {
    Tracker t;  // required_count 3
    EXPECT_TRUE(t.update({{100, 100, 2.0}}, 0.0).empty());
    EXPECT_TRUE(t.update({{104, 101, 2.05}}, 0.5).empty());
    const auto out = t.update({{108, 102, 2.1}}, 1.0);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].hit_count, 3);
    EXPECT_DOUBLE_EQ(out[0].u, 108.0);
    EXPECT_TRUE(out[0].detected_this_frame);
}

TEST(Tracker, RequiredCountOneConfirmsImmediately) {
    TrackerConfig cfg;
    cfg.required_count = 1;
    Tracker t(cfg);
    EXPECT_EQ(t.update({{10, 10, 1.0}}, 0.0).size(), 1u);
}

TEST(Tracker, ExpiresAfterMaxAge) {
    TrackerConfig cfg;
    cfg.required_count = 1;
    Tracker t(cfg);
    t.update({{10, 10, 1.0}}, 0.0);
    EXPECT_TRUE(t.update({}, 1.5).empty());
    EXPECT_TRUE(t.tracks().empty());
}

TEST(Tracker, ConfirmedTrackReportedWhileAliveWithoutDetection) {
    TrackerConfig cfg;
    cfg.required_count = 1;
    Tracker t(cfg);
    t.update({{10, 10, 1.0}}, 0.0);
    const auto out = t.update({}, 0.5);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FALSE(out[0].detected_this_frame);
}

TEST(Tracker, GatesSplitTracks) {
    Tracker t;
    t.update({{100, 100, 2.0}}, 0.0);
    t.update({{100, 140, 2.0}}, 0.1);  // 40 px away
    t.update({{100, 100, 2.5}}, 0.2);  // depth jump 0.5 m
    EXPECT_EQ(t.tracks().size(), 3u);
    for (const Track& tr : t.tracks()) EXPECT_EQ(tr.hit_count, 1);
}

TEST(Tracker, OneDetectionFeedsOneTrack) {
    Tracker t;
    t.update({{100, 100, 2.0}, {110, 100, 2.0}}, 0.0);
    t.update({{105, 100, 2.0}}, 0.1);
    int hits = 0;
    for (const Track& tr : t.tracks()) hits += tr.hit_count;
    EXPECT_EQ(hits, 3);
    EXPECT_EQ(t.tracks().size(), 2u);
}

TEST(Tracker, NearestTrackWins) {
    Tracker t;
    t.update({{100, 100, 2.0}, {120, 100, 2.0}}, 0.0);
    t.update({{117, 100, 2.0}}, 0.1);
    EXPECT_EQ(t.tracks()[0].hit_count, 1);
    EXPECT_EQ(t.tracks()[1].hit_count, 2);
}

TEST(Tracker, NonIncreasingTimestampIsContractError) {
    Tracker t;
    t.update({}, 1.0);
    EXPECT_THROW(t.update({}, 1.0), ContractError);
    EXPECT_THROW(t.update({}, 0.5), ContractError);
}

TEST(Tracker, InvalidConfigRejected) {
    TrackerConfig cfg;
    cfg.required_count = 0;
    EXPECT_THROW(Tracker{cfg}, ParameterError);
    cfg = {};
    cfg.max_age = 0.0;
    EXPECT_THROW(Tracker{cfg}, ParameterError);
    cfg = {};
    cfg.gate_px = -1.0;
    EXPECT_THROW(Tracker{cfg}, ParameterError);
}

TEST(Tracker, ResetRestartsIds) {
    Tracker t;
    t.update({{1, 1, 1.0}}, 0.0);
    t.reset();
    t.update({{1, 1, 1.0}}, 0.0);
    EXPECT_EQ(t.tracks().front().id, 0);
}

class TrackerConfirmation : public ::testing::TestWithParam<int> {};

TEST_P(TrackerConfirmation, ExactlyAtRequiredCount) { EXPECT_EQ(testsupport::check_confirmation_count(GetParam()), ""); }

INSTANTIATE_TEST_SUITE_P(RequiredCounts, TrackerConfirmation, ::testing::Values(1, 2, 3, 5));

TEST(TrackerProperties, ExpiryStrictlyAfterMaxAge) {
    for (double age : {0.25, 1.0, 2.0}) EXPECT_EQ(testsupport::check_expiry(age), "");
}

TEST(TrackerProperties, ReplayDeterministicAndOneToOne) { EXPECT_EQ(testsupport::check_replay_determinism(200), ""); }
