#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "egotrack/features.hpp"

using namespace egotrack;

namespace {

DetectionRecord object_det(int64_t frame, int class_id, double cx, double cy) {
  return {"v", frame, class_id, 0.8,
          BBox(cx - 20, cy - 20, cx + 20, cy + 20), {1920, 1080}};
}

ActionSegment segment(int64_t start, int64_t stop, int verb = 0) {
  return {"v", 1, start, stop, verb, 0};
}

HandTimeline sentinel_timeline(int64_t frames) {
  return build_timeline({}, frames, {1920, 1080}, "v");
}

}  // namespace

TEST_CASE("feature dimensionalities") {
  CHECK(feature_dim(FeatureKind::LR) == 4);
  CHECK(feature_dim(FeatureKind::LR_BPV) == 356);
  CHECK(feature_dim(FeatureKind::LR_TRC_BPV) == 356);
  CHECK(feature_dim(FeatureKind::LR_OBJ) == 708);
}

TEST_CASE("LR rows carry sentinels when both hands are absent") {
  const auto tl = sentinel_timeline(20);
  const Eigen::MatrixXd lr = build_lr(tl, segment(5, 15));
  REQUIRE(lr.rows() == 10);
  REQUIRE(lr.cols() == 4);
  for (int t = 0; t < 10; ++t) {
    CHECK(lr(t, 0) == 0.25);
    CHECK(lr(t, 1) == 1.5);
    CHECK(lr(t, 2) == 0.75);
    CHECK(lr(t, 3) == 1.5);
  }
}

TEST_CASE("LR rejects segments outside the timeline") {
  const auto tl = sentinel_timeline(10);
  CHECK_THROWS_AS(build_lr(tl, segment(5, 15)), std::out_of_range);
}

TEST_CASE("BPV marks distinct classes once per frame") {
  FrameDetections dets;
  dets[2] = {object_det(2, 7, 100, 100), object_det(2, 7, 400, 400),
             object_det(2, 12, 700, 300)};
  const Eigen::MatrixXd bpv = build_bpv(dets, segment(0, 5));
  REQUIRE(bpv.rows() == 5);
  REQUIRE(bpv.cols() == 352);
  CHECK(bpv.row(0).sum() == 0.0);
  CHECK(bpv.row(2).sum() == 2.0);  // two distinct classes
  CHECK(bpv(2, 6) == 1.0);         // class 7 -> column 6
  CHECK(bpv(2, 11) == 1.0);
  // strictly binary
  for (int t = 0; t < 5; ++t)
    for (int c = 0; c < 352; ++c)
      CHECK((bpv(t, c) == 0.0 || bpv(t, c) == 1.0));
}

TEST_CASE("tracked BPV bridges detection gaps") {
  FrameDetections dets;
  dets[1] = {object_det(1, 5, 500, 500)};
  dets[4] = {object_det(4, 5, 512, 500)};
  const Eigen::MatrixXd bpv = build_bpv(dets, segment(0, 6));
  const Eigen::MatrixXd trc = build_trc_bpv(dets, segment(0, 6));
  CHECK(bpv(2, 4) == 0.0);
  CHECK(bpv(3, 4) == 0.0);
  CHECK(trc(2, 4) == 1.0);  // interpolated presence
  CHECK(trc(3, 4) == 1.0);
  // tracking only adds presence
  for (int t = 0; t < 6; ++t)
    for (int c = 0; c < 352; ++c) CHECK(trc(t, c) >= bpv(t, c));
}

TEST_CASE("absent classes stay all-zero") {
  FrameDetections dets;
  dets[0] = {object_det(0, 3, 100, 100)};
  const Eigen::MatrixXd trc = build_trc_bpv(dets, segment(0, 4));
  for (int t = 0; t < 4; ++t) CHECK(trc(t, 40) == 0.0);
}

TEST_CASE("object coordinates use the longest-running track") {
  FrameDetections dets;
  // two concurrent instances of class 9: a long track on the left and a
  // single detection on the right
  for (int64_t f = 0; f < 6; ++f) {
    dets[f].push_back(object_det(f, 9, 300 + 4.0 * f, 500));
  }
  dets[2].push_back(object_det(2, 9, 1500, 200));
  const Eigen::MatrixXd obj =
      build_obj_coords(dets, segment(0, 6), {1920, 1080});
  REQUIRE(obj.cols() == 704);
  const int col = 2 * 8;  // class 9
  for (int t = 0; t < 6; ++t) {
    CHECK_THAT(obj(t, col),
               Catch::Matchers::WithinAbs((300 + 4.0 * t) / 1920.0, 1e-9));
    CHECK_THAT(obj(t, col + 1), Catch::Matchers::WithinAbs(500 / 1080.0, 1e-9));
  }
  // every other class stays (0,0)
  for (int t = 0; t < 6; ++t) {
    for (int c = 0; c < 704; ++c) {
      if (c == col || c == col + 1) continue;
      CHECK(obj(t, c) == 0.0);
    }
  }
}

TEST_CASE("built features match their kind's dimensionality") {
  const auto tl = sentinel_timeline(10);
  FrameDetections dets;
  dets[1] = {object_det(1, 2, 600, 400)};
  for (FeatureKind kind : {FeatureKind::LR, FeatureKind::LR_BPV,
                           FeatureKind::LR_TRC_BPV, FeatureKind::LR_OBJ}) {
    const FeatureSequence seq =
        build_features(kind, tl, dets, segment(0, 10, 42), {1920, 1080});
    CHECK(seq.steps.cols() == feature_dim(kind));
    CHECK(seq.steps.rows() == 10);
    CHECK(seq.label == 42);
  }
}

TEST_CASE("sampling picks floor(i*T/target) rows") {
  Eigen::MatrixXd seq(161, 1);
  for (int t = 0; t < 161; ++t) seq(t, 0) = t;
  const Eigen::MatrixXd s = sample_sequence(seq, 32);
  REQUIRE(s.rows() == 32);
  for (int i = 0; i < 32; ++i) CHECK(s(i, 0) == i * 161 / 32);
  CHECK(s(0, 0) == 0.0);
  CHECK(s(1, 0) == 5.0);
  CHECK(s(2, 0) == 10.0);
}

TEST_CASE("sampling a length-32 sequence is the identity") {
  Eigen::MatrixXd seq(32, 2);
  seq.setRandom();
  CHECK(sample_sequence(seq, 32) == seq);
}

TEST_CASE("sampling 64 rows takes the even ones") {
  Eigen::MatrixXd seq(64, 1);
  for (int t = 0; t < 64; ++t) seq(t, 0) = t;
  const Eigen::MatrixXd s = sample_sequence(seq, 32);
  for (int i = 0; i < 32; ++i) CHECK(s(i, 0) == 2 * i);
  CHECK(s(31, 0) == 62.0);  // last row preserved when T is a multiple
}

TEST_CASE("short sequences upsample by index repetition") {
  Eigen::MatrixXd seq(3, 1);
  seq << 0, 1, 2;
  const Eigen::MatrixXd s = sample_sequence(seq, 8);
  REQUIRE(s.rows() == 8);
  CHECK(s(0, 0) == 0.0);
  CHECK(s(7, 0) == 2.0);
  std::set<double> values(s.data(), s.data() + 8);
  CHECK(values == std::set<double>{0.0, 1.0, 2.0});
}

TEST_CASE("pad_batch zero-fills beyond the true length") {
  FeatureSequence a, b;
  a.kind = b.kind = FeatureKind::LR;
  a.steps = Eigen::MatrixXd::Ones(3, 4);
  b.steps = Eigen::MatrixXd::Ones(5, 4);
  a.label = 1;
  b.label = 2;
  const PaddedBatch batch = pad_batch({a, b});
  REQUIRE(batch.sequences.size() == 2);
  CHECK(batch.lengths == std::vector<int64_t>{3, 5});
  CHECK(batch.sequences[0].rows() == 5);
  CHECK(batch.sequences[0].bottomRows(2).isZero());
  // unpad round trip
  CHECK(batch.sequences[0].topRows(3) == a.steps);
  CHECK(batch.sequences[1] == b.steps);
}

TEST_CASE("pad_batch rejects mixed kinds") {
  FeatureSequence a, b;
  a.kind = FeatureKind::LR;
  b.kind = FeatureKind::LR_BPV;
  a.steps = Eigen::MatrixXd::Zero(2, 4);
  b.steps = Eigen::MatrixXd::Zero(2, 356);
  CHECK_THROWS_AS(pad_batch({a, b}), std::invalid_argument);
}
