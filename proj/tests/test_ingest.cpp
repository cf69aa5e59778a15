#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "egotrack/ingest.hpp"

using namespace egotrack;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& contents) {
    path = fs::temp_directory_path() /
           ("egotrack_test_" + std::to_string(::rand()) + ".tmp");
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

const char* kOneDetection =
    R"({"video_id":"P01_01","frame":3,"class_id":0,"confidence":0.9,)"
    R"("x1":10.0,"y1":20.0,"x2":110.0,"y2":220.0,"width":1920,"height":1080})"
    "\n";

}  // namespace

TEST_CASE("empty detections file loads to an empty map") {
  TempFile f("");
  CHECK(load_detections(f.path.string()).empty());
}

TEST_CASE("single record round trip") {
  TempFile f(kOneDetection);
  const auto dets = load_detections(f.path.string());
  REQUIRE(dets.size() == 1);
  const auto& frames = dets.at("P01_01");
  REQUIRE(frames.size() == 1);
  const auto& rec = frames.at(3).front();
  CHECK(rec.class_id == 0);
  CHECK(rec.confidence == 0.9);
  CHECK(rec.box.x_min() == 10.0);
  CHECK(rec.image_size.width == 1920.0);

  // serialize -> reload preserves the record
  TempFile f2(serialize_detection(rec) + "\n");
  const auto again = load_detections(f2.path.string());
  CHECK(serialize_detection(again.at("P01_01").at(3).front()) ==
        serialize_detection(rec));
}

TEST_CASE("malformed line reports its line number") {
  TempFile f(std::string(kOneDetection) + "{not json\n");
  CHECK_THROWS_WITH(load_detections(f.path.string()),
                    Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("out-of-range class id is rejected") {
  TempFile f(
      R"({"video_id":"v","frame":0,"class_id":353,"confidence":0.5,)"
      R"("x1":0,"y1":0,"x2":1,"y2":1,"width":10,"height":10})"
      "\n");
  CHECK_THROWS_AS(load_detections(f.path.string()), std::runtime_error);
}

TEST_CASE("grouping preserves every record exactly once") {
  std::string contents;
  for (int i = 0; i < 20; ++i) {
    nlohmann::json j;
    j["video_id"] = i % 2 ? "a" : "b";
    j["frame"] = i / 4;
    j["class_id"] = i % 5;
    j["confidence"] = 0.5;
    j["x1"] = 0.0; j["y1"] = 0.0; j["x2"] = 10.0; j["y2"] = 10.0;
    j["width"] = 100; j["height"] = 100;
    contents += j.dump() + "\n";
  }
  TempFile f(contents);
  const auto dets = load_detections(f.path.string());
  size_t total = 0;
  for (const auto& [vid, frames] : dets)
    for (const auto& [frame, recs] : frames) total += recs.size();
  CHECK(total == 20);
}

TEST_CASE("confidence filter is strict") {
  std::vector<DetectionRecord> recs;
  for (double c : {0.2, 0.25, 0.26}) {
    recs.push_back({"v", 0, 0, c, BBox(0, 0, 1, 1), {10, 10}});
  }
  const auto kept = filter_by_confidence(recs, 0.25);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].confidence == 0.26);
}

TEST_CASE("confidence filter is idempotent and order preserving") {
  std::vector<DetectionRecord> recs;
  for (int i = 0; i < 10; ++i) {
    recs.push_back({"v", i, 0, 0.1 * i, BBox(0, 0, 1, 1), {10, 10}});
  }
  const auto once = filter_by_confidence(recs, 0.3);
  const auto twice = filter_by_confidence(once, 0.3);
  REQUIRE(once.size() == twice.size());
  for (size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].frame == twice[i].frame);
    CHECK(once[i].confidence > 0.3);
  }
  for (size_t i = 1; i < once.size(); ++i) {
    CHECK(once[i].frame > once[i - 1].frame);
  }
}

TEST_CASE("annotations load and validate") {
  TempFile f(
      "video_id,participant_id,start_frame,stop_frame,verb_class,noun_class\n"
      "P01_01,1,30,120,4,17\n"
      "P25_03,25,0,60,0,0\n");
  const auto segs = load_annotations(f.path.string());
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].participant_id == 1);
  CHECK(segs[0].verb_class == 4);
  CHECK(segs[1].video_id == "P25_03");
}

TEST_CASE("annotation with inverted frames is rejected") {
  TempFile f(
      "video_id,participant_id,start_frame,stop_frame,verb_class,noun_class\n"
      "P01_01,1,120,30,4,17\n");
  CHECK_THROWS_AS(load_annotations(f.path.string()), std::runtime_error);
}

TEST_CASE("participant split") {
  std::vector<ActionSegment> segs;
  for (int pid : {1, 5, 9, 25, 31}) {
    segs.push_back({"P" + std::to_string(pid), pid, 0, 10, 0, 0});
  }
  const std::set<int> train = {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 13, 14,
                               15, 16, 17, 19, 20, 21, 22, 23, 24};
  const std::set<int> test = {25, 26, 27, 28, 29, 30, 31};
  const auto [tr, te] = split_by_participant(segs, train, test);
  CHECK(tr.size() == 2);  // participants 1 and 5
  CHECK(te.size() == 2);  // participants 25 and 31
  // participant 9 lands in neither split
  for (const auto& s : tr) CHECK(s.participant_id != 9);
  for (const auto& s : te) CHECK(s.participant_id != 9);
  // no video shared between splits
  for (const auto& a : tr)
    for (const auto& b : te) CHECK(a.video_id != b.video_id);
}

TEST_CASE("overlapping split ids are rejected") {
  CHECK_THROWS_AS(split_by_participant({}, {1, 2}, {2, 3}),
                  std::invalid_argument);
}

TEST_CASE("empty test set sends listed participants to train") {
  std::vector<ActionSegment> segs = {{"a", 1, 0, 10, 0, 0},
                                     {"b", 2, 0, 10, 0, 0}};
  const auto [tr, te] = split_by_participant(segs, {1, 2}, {});
  CHECK(tr.size() == 2);
  CHECK(te.empty());
}

TEST_CASE("splits file parses") {
  TempFile f("train: 1, 2, 3\ntest: 25,26\n");
  const auto split = load_splits(f.path.string());
  CHECK(split.train_ids == std::set<int>{1, 2, 3});
  CHECK(split.test_ids == std::set<int>{25, 26});
}
