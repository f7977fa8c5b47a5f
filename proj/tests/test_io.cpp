#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "cellbench/atomic_file.hpp"
#include "cellbench/dense_io.hpp"
#include "cellbench/image_io.hpp"
#include "cellbench/label_map.hpp"
#include "cellbench/report.hpp"

using namespace cellbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("cellbench_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("load_label_map examples") {
  TempDir tmp;
  SUBCASE("all-zero 5x5 PNG") {
    cv::imwrite((tmp.path / "z.png").string(), cv::Mat::zeros(5, 5, CV_8UC1));
    const LabelMap m = load_label_map(tmp.path / "z.png");
    CHECK(m.height() == 5);
    CHECK(instance_count(m) == 0);
  }
  SUBCASE("16-bit PNG with values {0,1,2}") {
    cv::Mat img = cv::Mat::zeros(4, 6, CV_16UC1);
    img.at<std::uint16_t>(1, 1) = 1;
    img.at<std::uint16_t>(2, 4) = 2;
    img.at<std::uint16_t>(3, 5) = 2;
    cv::imwrite((tmp.path / "a.png").string(), img);
    const LabelMap m = load_label_map(tmp.path / "a.png");
    CHECK(instance_count(m) == 2);
    CHECK(m(2, 4) == 2);
    CHECK(m.width() == 6);
  }
  SUBCASE("RGB PNG is rejected") {
    cv::imwrite((tmp.path / "rgb.png").string(), cv::Mat(4, 4, CV_8UC3, cv::Scalar(1, 2, 3)));
    try {
      load_label_map(tmp.path / "rgb.png");
      FAIL("expected an error");
    } catch (const ImageIoError& e) {
      CHECK(std::string(e.what()).find("multi-channel label image") != std::string::npos);
    }
  }
  SUBCASE("unreadable file") {
    std::ofstream(tmp.path / "junk.png") << "not an image";
    CHECK_THROWS_AS(load_label_map(tmp.path / "junk.png"), ImageIoError);
    CHECK_THROWS_AS(load_label_map(tmp.path / "absent.png"), ImageIoError);
  }
  SUBCASE("TIFF labels") {
    cv::Mat img = cv::Mat::zeros(3, 3, CV_16UC1);
    img.at<std::uint16_t>(1, 1) = 700;
    cv::imwrite((tmp.path / "t.tif").string(), img);
    CHECK(load_label_map(tmp.path / "t.tif")(1, 1) == 700);
  }
}

TEST_CASE("label PNG round trip") {
  TempDir tmp;
  LabelMap m(7, 9);
  m(0, 0) = 1;
  m(3, 4) = 65535;
  m(6, 8) = 300;
  write_label_map_png(tmp.path / "m.png", m);
  CHECK(load_label_map(tmp.path / "m.png") == m);
  CHECK_FALSE(fs::exists(tmp.path / "m.png.tmp"));
  m(1, 1) = 70000;
  CHECK_THROWS(write_label_map_png(tmp.path / "big.png", m));
  const ImageMeta meta = read_image_meta(tmp.path / "m.png");
  CHECK(meta.channels == 1);
  CHECK(meta.pixel_count == 63);
}

TEST_CASE("intensity images load as RGB in [0,1]") {
  TempDir tmp;
  cv::Mat bgr(2, 3, CV_8UC3, cv::Scalar(0, 0, 255));  // pure red in BGR order
  cv::imwrite((tmp.path / "red.png").string(), bgr);
  const DenseMap img = load_intensity_image(tmp.path / "red.png");
  REQUIRE(img.channel_count() == 3);
  CHECK(img.channel(0)(1, 2) == 1.0);
  CHECK(img.channel(2)(1, 2) == 0.0);
  cv::Mat gray16(2, 2, CV_16UC1, cv::Scalar(65535));
  cv::imwrite((tmp.path / "g.png").string(), gray16);
  const DenseMap g = load_intensity_image(tmp.path / "g.png");
  CHECK(g.channel_count() == 1);
  CHECK(g.channel(0)(0, 0) == 1.0);
}

TEST_CASE("dense file round trip") {
  TempDir tmp;
  DenseMap m(3, 4, 2);
  for (std::size_t i = 0; i < 12; ++i) {
    m.channel(0)[i] = 0.5 * static_cast<double>(i);
    m.channel(1)[i] = -0.25 * static_cast<double>(i);
  }
  write_dense_file(tmp.path / "d.flow", DenseFile{"probability", {"prob", "elevation"}, m});
  const DenseFile back = read_dense_file(tmp.path / "d.flow");
  CHECK(back.kind == "probability");
  CHECK(back.channel_names == std::vector<std::string>{"prob", "elevation"});
  CHECK(back.map == m);
  std::ofstream(tmp.path / "bad.flow") << "{\"format\":\"other\"}\n";
  CHECK_THROWS(read_dense_file(tmp.path / "bad.flow"));
  std::string bytes = slurp(tmp.path / "d.flow");
  bytes.resize(bytes.size() - 4);
  std::ofstream(tmp.path / "short.flow", std::ios::binary) << bytes;
  CHECK_THROWS(read_dense_file(tmp.path / "short.flow"));
}

TEST_CASE("atomic write replaces the target in one step") {
  TempDir tmp;
  write_file_atomic(tmp.path / "x.txt", "first");
  write_file_atomic(tmp.path / "x.txt", "second");
  CHECK(slurp(tmp.path / "x.txt") == "second");
  CHECK_FALSE(fs::exists(tmp.path / "x.txt.tmp"));
  write_file_atomic(tmp.path / "new_dir" / "x.txt", "y");
  CHECK(slurp(tmp.path / "new_dir" / "x.txt") == "y");
  CHECK_THROWS(write_file_atomic(tmp.path / "x.txt" / "under_a_file.txt", "y"));
}

TEST_CASE("format_double is shortest round-trip") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    REQUIRE(std::stod(report::format_double(v)) == v);
  }
  CHECK(report::format_double(0.5) == "0.5");
  CHECK(report::format_double(2.0 / 3.0) == "0.6666666666666666");
  CHECK(report::format_double(1.0) == "1");
}

TEST_CASE("metrics CSV round trip through the ranking reader") {
  std::vector<report::MetricsRow> rows(3);
  rows[0] = {"img_a", 3, 1, 2, precision_recall_f1(3, 1, 2), 12.5, 1'000'000, report::RowStatus::ok};
  rows[1] = {"img_b", 0, 0, 4, precision_recall_f1(0, 0, 4), std::nullopt, 250'000, report::RowStatus::missing};
  rows[2] = {"img_c", 0, 0, 5, precision_recall_f1(0, 0, 5), 3.0, 4'000'000, report::RowStatus::dimension_mismatch};
  const std::string csv = report::metrics_csv(rows, MatchConfig{});
  CHECK(csv.rfind("# schema=cellbench.metrics/1 iou_threshold=0.5 strict=true boundary=both", 0) == 0);
  CHECK(csv.find("img_a,3,1,2,0.75,0.6,0.6666666666666665,12.5,1000000,ok\n") != std::string::npos);
  const auto records = report::parse_metrics_csv(csv, "teamX");
  REQUIRE(records.size() == 2);
  CHECK(records[0].case_id == "img_a");
  CHECK(records[0].team_id == "teamX");
  CHECK(records[0].f1 == rows[0].metrics.f1);
  CHECK(records[0].runtime_seconds == 12.5);
  CHECK(records[1].case_id == "img_c");
  CHECK(records[1].pixel_count == 4'000'000);
}

TEST_CASE("metrics CSV reader accepts minimal case_id files and rejects malformed ones") {
  const auto recs = report::parse_metrics_csv("case_id,f1\nc1,0.5\nc2,1\n", "T");
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].f1 == 1.0);
  CHECK(recs[0].runtime_seconds == 0.0);
  CHECK_THROWS(report::parse_metrics_csv("name,f1\nc1,0.5\n", "T"));
  CHECK_THROWS(report::parse_metrics_csv("case_id,f1\nc1,abc\n", "T"));
  CHECK_THROWS(report::parse_metrics_csv("case_id,f1\nc1,0.5,7\n", "T"));
}

TEST_CASE("report documents embed their configuration") {
  RankingTable table({"A", "B"}, {"c0", "c1"});
  table.set(0, 0, 0.9, 1, 1);
  table.set(0, 1, 0.8, 1, 1);
  table.set(1, 0, 0.5, 2, 1);
  const LeaderBoard board = rank_then_aggregate(table, Aggregate::mean, {RuntimeMode::hard_cap});
  const auto doc = report::leaderboard_json(board, table);
  CHECK(doc["schema"] == "cellbench.leaderboard/1");
  CHECK(doc["runtime_mode"] == "cap");
  CHECK(doc["missing_entries"] == 1);
  CHECK(doc["teams"][0]["team"] == "A");
  CHECK(doc["teams"][0]["rank"] == 1);

  const std::string rm = report::rank_matrix_csv(table, per_case_ranks(table, RuntimeMode::hard_cap), RuntimeMode::hard_cap);
  CHECK(rm.find("team,c0:f1,c0:runtime,c1:f1,c1:runtime\n") != std::string::npos);
  CHECK(rm.find("B,2,2,2,2\n") != std::string::npos);

  const std::string schemes = report::scheme_comparison_csv({board, board});
  CHECK(schemes.rfind("team,rank_then_mean,rank_then_mean\nA,1,1\nB,2,2\n", 0) == 0);
}
