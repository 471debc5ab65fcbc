#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <tuple>

#include "movi/column_map.hpp"
#include "movi/recording.hpp"
#include "oracles.hpp"

using namespace movi;

namespace {

constexpr const char* kHeader = "t,entity,kind,px,py,pz,qx,qy,qz,qw\n";

ErrorCode code_of(const std::string& csv) {
  try {
    parse_recording(csv);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected parse failure";
  return ErrorCode::io_error;
}

}  // namespace

TEST(ParseRecording, MinimalTwoRowTrack) {
  const std::string csv = std::string(kHeader) +
                          "0.0,right_hand,hand,0,1,0,0,0,0,1\n"
                          "0.1,right_hand,hand,0.5,1,0,0,0,0,1\n";
  const auto rec = parse_recording(csv);
  ASSERT_EQ(rec.tracks.size(), 1u);
  EXPECT_EQ(rec.tracks[0].entity_id, "right_hand");
  EXPECT_EQ(rec.tracks[0].kind, EntityKind::hand);
  ASSERT_EQ(rec.tracks[0].samples.size(), 2u);
  EXPECT_EQ(rec.tracks[0].samples[1].t, 0.1);
  EXPECT_EQ(rec.tracks[0].samples[1].position, (Vec3{0.5, 1, 0}));
  EXPECT_EQ(rec.meta.convention, kConvention);
}

TEST(ParseRecording, ZeroQuaternionIsBad) {
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,hand,0,0,0,0,0,0,0\n"), ErrorCode::bad_quaternion);
}

TEST(ParseRecording, QuaternionOutsideRenormalizationBand) {
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,hand,0,0,0,0,0,0,1.002\n"), ErrorCode::bad_quaternion);
}

TEST(ParseRecording, QuaternionInsideBandIsRenormalized) {
  const auto rec = parse_recording(std::string(kHeader) + "0,right_hand,hand,0,0,0,0,0,0,1.0005\n");
  EXPECT_NEAR(norm(rec.tracks[0].samples[0].orientation), 1.0, 1e-12);
}

TEST(ParseRecording, TimeGoingBackwardsWithinEntity) {
  const std::string csv = std::string(kHeader) +
                          "0.2,right_hand,hand,0,0,0,0,0,0,1\n"
                          "0.1,right_hand,hand,0,0,0,0,0,0,1\n";
  EXPECT_EQ(code_of(csv), ErrorCode::non_monotonic_time);
}

TEST(ParseRecording, RepeatedTimestampIsNonMonotonic) {
  const std::string csv = std::string(kHeader) +
                          "0.1,right_hand,hand,0,0,0,0,0,0,1\n"
                          "0.1,right_hand,hand,0,0,0,0,0,0,1\n";
  EXPECT_EQ(code_of(csv), ErrorCode::non_monotonic_time);
}

TEST(ParseRecording, InterleavedEntitiesMayArriveOutOfGlobalOrder) {
  const std::string csv = std::string(kHeader) +
                          "0.2,right_hand,hand,0,0,0,0,0,0,1\n"
                          "0.1,object:ball,object,0,0,0,0,0,0,1\n"
                          "0.3,right_hand,hand,0,0,0,0,0,0,1\n";
  const auto rec = parse_recording(csv);
  ASSERT_EQ(rec.tracks.size(), 2u);
  EXPECT_EQ(rec.tracks[0].entity_id, "object:ball");
  EXPECT_EQ(rec.tracks[1].samples.size(), 2u);
}

TEST(ParseRecording, MalformedRows) {
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,hand,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,hand,x,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,hand,nan,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "-1,right_hand,hand,0,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "0,right_hand,object,0,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "0,torso,hand,0,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of(std::string(kHeader) + "0,object:,object,0,0,0,0,0,0,1\n"), ErrorCode::malformed_row);
  EXPECT_EQ(code_of("time,entity\n0,right_hand\n"), ErrorCode::malformed_row);
}

TEST(ParseRecording, EmptyInputs) {
  EXPECT_EQ(code_of(""), ErrorCode::empty_input);
  EXPECT_EQ(code_of("\n\n"), ErrorCode::empty_input);
  EXPECT_EQ(code_of(kHeader), ErrorCode::empty_input);
  EXPECT_EQ(code_of("# source=x\n"), ErrorCode::empty_input);
}

TEST(ParseRecording, ToleratesCrlfAndBom) {
  const std::string csv = "\xEF\xBB\xBFt,entity,kind,px,py,pz,qx,qy,qz,qw\r\n0,left_hand,hand,1,2,3,0,0,0,1\r\n";
  const auto rec = parse_recording(csv);
  EXPECT_EQ(rec.tracks[0].samples[0].position, (Vec3{1, 2, 3}));
}

TEST(ParseRecording, ReadsMetaComments) {
  const std::string csv = "# source=clip 7, take 2\n# rate_hz=90\n# convention=rh-yup-m-xyzw\n"
                          "# marker.release_time=0.5\n# free text comment\n" +
                          std::string(kHeader) + "0,left_hand,hand,1,2,3,0,0,0,1\n";
  const auto rec = parse_recording(csv);
  EXPECT_EQ(rec.meta.source, "clip 7, take 2");
  EXPECT_EQ(rec.meta.rate_hz, 90.0);
  EXPECT_EQ(rec.meta.markers.at("release_time"), 0.5);
}

TEST(SerializeRecording, RefusesEmptyRecording) {
  MotionRecording rec;
  try {
    serialize_recording(rec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_input);
  }
}

TEST(SerializeRecording, RowsSortedByTimeThenEntity) {
  // Independent oracle: collect (t, entity) pairs and std::sort them.
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    const auto rec = oracle::random_recording(rng);
    std::vector<std::pair<double, std::string>> expected;
    for (const auto& tr : rec.tracks)
      for (const auto& s : tr.samples) expected.emplace_back(s.t, tr.entity_id);
    std::sort(expected.begin(), expected.end());

    std::vector<std::pair<double, std::string>> actual;
    bool past_header = false;
    for (auto line : detail::lines(serialize_recording(rec))) {
      if (!past_header) {
        past_header = line == kCsvHeader;
        continue;
      }
      const auto f = detail::split(line, ',');
      actual.emplace_back(*detail::parse_double(f[0]), std::string(f[1]));
    }
    EXPECT_EQ(actual, expected);
  }
}

TEST(SerializeRecording, InterleavedEntitiesExample) {
  MotionRecording rec;
  rec.tracks = {{"object:ball", EntityKind::object, {{0.05, {}, {}}, {0.15, {}, {}}}},
                {"right_hand", EntityKind::hand, {{0.0, {}, {}}, {0.1, {}, {}}, {0.15, {}, {}}}}};
  const auto text = serialize_recording(rec);
  const auto pos = [&](const std::string& row) { return text.find(row); };
  EXPECT_LT(pos("0,right_hand"), pos("0.05,object:ball"));
  EXPECT_LT(pos("0.05,object:ball"), pos("0.1,right_hand"));
  EXPECT_LT(pos("0.1,right_hand"), pos("0.15,object:ball"));
  EXPECT_LT(pos("0.15,object:ball"), pos("0.15,right_hand"));
}

TEST(SerializeRecording, ShortestRoundTripNumbers) {
  MotionRecording rec;
  rec.tracks = {{"right_hand", EntityKind::hand, {{0.1, {0.3, -1e-7, 123456.789}, {}}}}};
  const auto text = serialize_recording(rec);
  EXPECT_NE(text.find("\n0.1,right_hand,hand,0.3,-1e-07,123456.789,0,0,0,1\n"), std::string::npos) << text;
}

TEST(RecordingProperties, RoundTripAndCanonicalFixpoint) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto rec = oracle::random_recording(rng);
    const auto bytes = serialize_recording(rec);
    const auto back = parse_recording(bytes);
    ASSERT_EQ(back, rec) << bytes;
    ASSERT_EQ(serialize_recording(back), bytes);
  }
}

TEST(Validate, ValidRecordingHasEmptyReport) {
  std::mt19937_64 rng(3);
  const auto rec = oracle::random_recording(rng);
  const auto result = validate(rec);
  EXPECT_TRUE(result.issues.empty());
  EXPECT_TRUE(result.ok());
  EXPECT_EQ(result.recording, rec);
}

TEST(Validate, RenormalizesWithinBand) {
  MotionRecording rec;
  rec.tracks = {{"right_hand", EntityKind::hand, {{0.0, {}, {0, 0, 0, 1.0005}}, {0.1, {}, {}}}}};
  const auto result = validate(rec);
  ASSERT_EQ(result.issues.size(), 1u);
  EXPECT_EQ(result.issues[0].severity, Severity::warning);
  EXPECT_EQ(result.issues[0].code, "renormalized");
  EXPECT_EQ(result.issues[0].sample, 0u);
  EXPECT_TRUE(result.ok());
  EXPECT_LE(std::abs(norm(result.recording.tracks[0].samples[0].orientation) - 1.0), 1e-6);
}

TEST(Validate, ReportsViolations) {
  MotionRecording rec;
  rec.tracks = {{"right_hand", EntityKind::hand, {{0.0, {}, {}}, {0.1, {}, {}}}},
                {"right_hand", EntityKind::hand, {{0.2, {}, {}}, {0.1, {}, {0, 0, 0, 2}}}},
                {"object:ball", EntityKind::hand, {{0.0, {NAN, 0, 0}, {}}}},
                {"torso", EntityKind::unknown, {}}};
  const auto result = validate(rec);
  EXPECT_FALSE(result.ok());
  auto has = [&](const std::string& code) {
    return std::any_of(result.issues.begin(), result.issues.end(),
                       [&](const Issue& i) { return i.code == code && i.severity == Severity::violation; });
  };
  EXPECT_TRUE(has("duplicate entity"));
  EXPECT_TRUE(has("non-monotonic time"));
  EXPECT_TRUE(has("bad quaternion"));
  EXPECT_TRUE(has("kind mismatch"));
  EXPECT_TRUE(has("non-finite position"));
  EXPECT_TRUE(has("bad entity id"));
  EXPECT_TRUE(has("empty track"));
}

TEST(Validate, EmptyRecordingAndForeignConvention) {
  MotionRecording rec;
  rec.meta.convention = "lh-yup-cm";
  const auto result = validate(rec);
  EXPECT_EQ(result.issues.size(), 2u);
}

TEST(Validate, RenormalizationMakesEveryOrientationUnit) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> skew(-9e-4, 9e-4);
  for (int i = 0; i < 50; ++i) {
    auto rec = oracle::random_recording(rng);
    for (auto& tr : rec.tracks)
      for (auto& s : tr.samples) {
        const double f = 1.0 + skew(rng);
        s.orientation = {s.orientation.x * f, s.orientation.y * f, s.orientation.z * f, s.orientation.w * f};
      }
    const auto result = validate(rec);
    ASSERT_TRUE(result.ok());
    for (const auto& tr : result.recording.tracks)
      for (const auto& s : tr.samples) EXPECT_LE(std::abs(norm(s.orientation) - 1.0), 1e-6);
  }
}

TEST(ColumnMap, ParsesWideLeftHandedCsv) {
  const std::string config =
      "# wide export\n"
      "time=Timestamp\ntime_scale=0.001\ntime_origin=first\nposition_scale=0.01\nhandedness=left\n"
      "source=clip-17\nrate_hz=90\n"
      "entity.right_hand.px=RX\nentity.right_hand.py=RY\nentity.right_hand.pz=RZ\n"
      "entity.right_hand.qx=RQX\nentity.right_hand.qy=RQY\nentity.right_hand.qz=RQZ\nentity.right_hand.qw=RQW\n"
      "entity.object:ball.kind=object\n"
      "entity.object:ball.px=BX\nentity.object:ball.py=BY\nentity.object:ball.pz=BZ\n"
      "entity.object:ball.qx=BQX\nentity.object:ball.qy=BQY\nentity.object:ball.qz=BQZ\nentity.object:ball.qw=BQW\n";
  const std::string csv =
      "Timestamp,RX,RY,RZ,RQX,RQY,RQZ,RQW,BX,BY,BZ,BQX,BQY,BQZ,BQW\n"
      "1000,10,100,20,0.1,0.2,0.3,0.9273618495495703,,,,,,,\n"
      "1100,11,100,20,0,0,0,1,50,60,70,0,0,0,1\n";
  const auto rec = parse_recording(csv, parse_column_map(config));
  EXPECT_EQ(rec.meta.source, "clip-17");
  EXPECT_EQ(rec.meta.rate_hz, 90.0);
  const auto* hand = rec.find("right_hand");
  const auto* ball = rec.find("object:ball");
  ASSERT_TRUE(hand && ball);
  ASSERT_EQ(hand->samples.size(), 2u);
  ASSERT_EQ(ball->samples.size(), 1u);  // blank cells in the first frame
  EXPECT_EQ(hand->samples[0].t, 0.0);
  EXPECT_NEAR(hand->samples[1].t, 0.1, 1e-12);
  EXPECT_NEAR(hand->samples[0].position.x, 0.1, 1e-12);
  EXPECT_NEAR(hand->samples[0].position.z, -0.2, 1e-12);
  EXPECT_DOUBLE_EQ(hand->samples[0].orientation.x, -0.1);
  EXPECT_DOUBLE_EQ(hand->samples[0].orientation.y, -0.2);
  EXPECT_DOUBLE_EQ(hand->samples[0].orientation.z, 0.3);
  EXPECT_NEAR(ball->samples[0].position.y, 0.6, 1e-12);
  EXPECT_TRUE(validate(rec).ok());
}

TEST(ColumnMap, RejectsIncompleteConfig) {
  EXPECT_THROW(parse_column_map("entity.right_hand.px=A\n"), Error);
  EXPECT_THROW(parse_column_map("time=T\nentity.right_hand.px=A\n"), Error);
  EXPECT_THROW(parse_column_map("time=T\nbogus=1\n"), Error);
  EXPECT_THROW(parse_column_map("time=T\nentity.torso.px=A\n"), Error);
}

TEST(ColumnMap, MissingColumnInData) {
  const auto map = parse_column_map(
      "time=T\nentity.left_hand.px=A\nentity.left_hand.py=B\nentity.left_hand.pz=C\n"
      "entity.left_hand.qx=D\nentity.left_hand.qy=E\nentity.left_hand.qz=F\nentity.left_hand.qw=G\n");
  try {
    parse_recording("T,A,B,C,D,E,F\n0,0,0,0,0,0,0\n", map);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::bad_config);
  }
}
