#include <doctest.h>

#include <nlohmann/json.hpp>

#include "engage/analytics.hpp"
#include "engage/errors.hpp"
#include "engage/rng.hpp"

using namespace engage;
using analytics::Frame;
using analytics::MessageObservation;

namespace {

MessageObservation obs(Frame f, int grade = 10, int trimester = 1) {
  MessageObservation o;
  o.text = "msg";
  o.frame = f;
  o.grade = grade;
  o.trimester = trimester;
  o.group_id = "g";
  o.ref = {"l", 0, 0};
  return o;
}

std::vector<MessageObservation> repeat(Frame f, int n, int grade = 10,
                                       int trimester = 1) {
  std::vector<MessageObservation> v;
  for (int i = 0; i < n; ++i) v.push_back(obs(f, grade, trimester));
  return v;
}

void extend(std::vector<MessageObservation>& dst,
            const std::vector<MessageObservation>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

TEST_CASE("round2 is half-up") {
  // 0.125 and 0.375 are exact in binary, so the .5 boundary is real
  CHECK(analytics::round2(0.125) == doctest::Approx(0.13));
  CHECK(analytics::round2(0.375) == doctest::Approx(0.38));
  CHECK(analytics::round2(32.664) == doctest::Approx(32.66));
  CHECK(analytics::round2(0.0) == 0.0);
}

TEST_CASE("overall 136 gain vs 66 loss") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 136);
  extend(all, repeat(Frame::loss, 66));
  auto cells = analytics::overall_distribution(all);
  CHECK(cells[Frame::gain].count == 136);
  CHECK(cells[Frame::loss].count == 66);
  // 136/202 = 67.3267...% -> 67.33; 66/202 = 32.6732...% -> 32.67
  CHECK(cells[Frame::gain].percent == doctest::Approx(67.33));
  CHECK(cells[Frame::loss].percent == doctest::Approx(32.67));
}

TEST_CASE("overall on empty observations is empty") {
  CHECK(analytics::overall_distribution({}).empty());
}

TEST_CASE("grade normalization divides counts by group census") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 66, 10);
  extend(all, repeat(Frame::gain, 75, 11));
  extend(all, repeat(Frame::gain, 61, 12));
  extend(all, repeat(Frame::loss, 10, 10));
  extend(all, repeat(Frame::loss, 10, 11));
  extend(all, repeat(Frame::loss, 10, 12));
  analytics::GroupCensus census{{10, 7}, {11, 9}, {12, 14}};
  auto by_grade = analytics::grade_normalized(all, census);
  // 66/7 = 9.4285 -> 9.43, 75/9 = 8.333 -> 8.33, 61/14 = 4.357 -> 4.36
  CHECK(analytics::round2(by_grade[10][Frame::gain].ratio) ==
        doctest::Approx(9.43));
  CHECK(analytics::round2(by_grade[11][Frame::gain].ratio) ==
        doctest::Approx(8.33));
  CHECK(analytics::round2(by_grade[12][Frame::gain].ratio) ==
        doctest::Approx(4.36));
  CHECK(by_grade[10][Frame::gain].count == 66);
}

TEST_CASE("grade missing from census throws") {
  analytics::GroupCensus census{{10, 7}};
  auto all = repeat(Frame::gain, 3, 11);
  CHECK_THROWS_AS(analytics::grade_normalized(all, census), ValidationError);
}

TEST_CASE("census scaling leaves percentages invariant") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 30, 10);
  extend(all, repeat(Frame::loss, 20, 10));
  auto a = analytics::grade_normalized(all, {{10, 4}});
  auto b = analytics::grade_normalized(all, {{10, 8}});
  CHECK(a[10][Frame::gain].percent == b[10][Frame::gain].percent);
  CHECK(a[10][Frame::loss].percent == b[10][Frame::loss].percent);
  // ratios halve when the census doubles
  CHECK(a[10][Frame::gain].ratio == doctest::Approx(2 * b[10][Frame::gain].ratio));
}

TEST_CASE("trimester percentages over grand total") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 56, 10, 1);
  extend(all, repeat(Frame::gain, 52, 10, 2));
  extend(all, repeat(Frame::gain, 31, 10, 3));
  auto by_tri = analytics::trimester_distribution(all);
  // 56/139 -> 40.29%, 52/139 -> 37.41%, 31/139 -> 22.30%
  CHECK(by_tri[1][Frame::gain].percent == doctest::Approx(40.29));
  CHECK(by_tri[2][Frame::gain].percent == doctest::Approx(37.41));
  CHECK(by_tri[3][Frame::gain].percent == doctest::Approx(22.30));
  CHECK(by_tri[1][Frame::gain].count == 56);
}

// property: within each breakdown the rounded percentages sum to ~100
TEST_CASE("percentage sums stay within rounding slack") {
  rng::SplitMix64 gen(2025);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<MessageObservation> all;
    analytics::GroupCensus census;
    for (int grade = 9; grade <= 12; ++grade) {
      census[grade] = 1 + static_cast<int>(gen.bounded(10));
      extend(all, repeat(Frame::gain, 1 + static_cast<int>(gen.bounded(40)),
                         grade, 1 + static_cast<int>(gen.bounded(3))));
      extend(all, repeat(Frame::loss, 1 + static_cast<int>(gen.bounded(40)),
                         grade, 1 + static_cast<int>(gen.bounded(3))));
    }
    auto report = analytics::aggregate(all, census);
    // two cells rounded to 2 dp can each be off by half a cent
    double overall_sum = report.overall[Frame::gain].percent +
                         report.overall[Frame::loss].percent;
    CHECK(std::abs(overall_sum - 100.0) <= 0.0101);
    for (auto& [grade, cells] : report.by_grade) {
      double s = cells[Frame::gain].percent + cells[Frame::loss].percent;
      CHECK(std::abs(s - 100.0) <= 0.0101);
    }
    double tri_sum = 0.0;
    for (auto& [tri, cells] : report.by_trimester) {
      tri_sum += cells[Frame::gain].percent + cells[Frame::loss].percent;
    }
    CHECK(std::abs(tri_sum - 100.0) <= 0.0301);  // up to 6 rounded cells
  }
}

TEST_CASE("golden csv for a tiny report") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 3, 10, 1);
  extend(all, repeat(Frame::loss, 1, 10, 2));
  auto report = analytics::aggregate(all, {{10, 2}});
  CHECK(analytics::report_to_csv(report) ==
        "breakdown,key,frame,count,ratio,percent\n"
        "overall,all,gain,3,3.00,75.00\n"
        "overall,all,loss,1,1.00,25.00\n"
        "grade,10,gain,3,1.50,75.00\n"
        "grade,10,loss,1,0.50,25.00\n"
        "trimester,1,gain,3,3.00,75.00\n"
        "trimester,1,loss,0,0.00,0.00\n"
        "trimester,2,gain,0,0.00,0.00\n"
        "trimester,2,loss,1,1.00,25.00\n");
}

TEST_CASE("empty report serializes to header only") {
  analytics::AggregateReport empty;
  CHECK(analytics::report_to_csv(empty) ==
        "breakdown,key,frame,count,ratio,percent\n");
}

TEST_CASE("json report carries the same numbers") {
  std::vector<MessageObservation> all = repeat(Frame::gain, 136, 10, 1);
  extend(all, repeat(Frame::loss, 66, 10, 1));
  auto report = analytics::aggregate(all, {{10, 7}});
  auto j = nlohmann::json::parse(analytics::report_to_json(report));
  CHECK(j["overall"]["gain"]["count"] == 136);
  CHECK(j["overall"]["gain"]["percent"] == doctest::Approx(67.33));
  CHECK(j["overall"]["loss"]["percent"] == doctest::Approx(32.67));
  CHECK(j["by_grade"]["10"]["gain"]["ratio"] ==
        doctest::Approx(136.0 / 7.0));
  CHECK(j["by_trimester"]["1"]["gain"]["percent"] == doctest::Approx(67.33));
}
