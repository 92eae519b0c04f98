#include "engage/analytics.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "engage/csv.hpp"
#include "engage/errors.hpp"

namespace engage::analytics {

const char* frame_name(Frame f) { return f == Frame::gain ? "gain" : "loss"; }

double round2(double x) {
  return std::floor(x * 100.0 + 0.5) / 100.0;
}

namespace {

std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

// Fills both frame cells from counts; `denominators` divides the count for
// the ratio (1 when the breakdown has no group normalization). Percentages
// are computed from the ratios.
std::map<Frame, FrameCell> make_cells(long gain_count, long loss_count,
                                      double denominator) {
  std::map<Frame, FrameCell> cells;
  double gain_ratio = static_cast<double>(gain_count) / denominator;
  double loss_ratio = static_cast<double>(loss_count) / denominator;
  double total = gain_ratio + loss_ratio;
  for (Frame f : {Frame::gain, Frame::loss}) {
    FrameCell cell;
    cell.count = f == Frame::gain ? gain_count : loss_count;
    cell.ratio = f == Frame::gain ? gain_ratio : loss_ratio;
    cell.percent =
        total > 0 ? round2(100.0 * cell.ratio / total) : 0.0;
    cells[f] = cell;
  }
  return cells;
}

}  // namespace

std::map<Frame, FrameCell> overall_distribution(
    const std::vector<MessageObservation>& obs) {
  if (obs.empty()) return {};
  long gain = 0, loss = 0;
  for (const auto& o : obs) (o.frame == Frame::gain ? gain : loss)++;
  return make_cells(gain, loss, 1.0);
}

std::map<int, std::map<Frame, FrameCell>> grade_normalized(
    const std::vector<MessageObservation>& obs, const GroupCensus& census) {
  std::map<int, std::pair<long, long>> counts;  // grade -> (gain, loss)
  for (const auto& o : obs) {
    auto& c = counts[o.grade];
    (o.frame == Frame::gain ? c.first : c.second)++;
  }
  std::map<int, std::map<Frame, FrameCell>> out;
  for (const auto& [grade, c] : counts) {
    auto it = census.find(grade);
    if (it == census.end() || it->second <= 0) {
      throw ValidationError("grade_normalized: no group census for grade " +
                            std::to_string(grade));
    }
    out[grade] = make_cells(c.first, c.second, static_cast<double>(it->second));
  }
  return out;
}

std::map<int, std::map<Frame, FrameCell>> trimester_distribution(
    const std::vector<MessageObservation>& obs) {
  std::map<int, std::pair<long, long>> counts;
  long total = 0;
  for (const auto& o : obs) {
    auto& c = counts[o.trimester];
    (o.frame == Frame::gain ? c.first : c.second)++;
    ++total;
  }
  std::map<int, std::map<Frame, FrameCell>> out;
  for (const auto& [tri, c] : counts) {
    auto cells = make_cells(c.first, c.second, 1.0);
    // percentage over the sum of all trimester totals, not within-trimester
    for (auto& [frame, cell] : cells) {
      cell.percent =
          total > 0 ? round2(100.0 * static_cast<double>(cell.count) /
                             static_cast<double>(total))
                    : 0.0;
    }
    out[tri] = cells;
  }
  return out;
}

AggregateReport aggregate(const std::vector<MessageObservation>& obs,
                          const GroupCensus& census) {
  AggregateReport r;
  r.overall = overall_distribution(obs);
  r.by_grade = grade_normalized(obs, census);
  r.by_trimester = trimester_distribution(obs);
  return r;
}

std::string report_to_csv(const AggregateReport& report) {
  std::string out = "breakdown,key,frame,count,ratio,percent\n";
  auto emit = [&](const std::string& breakdown, const std::string& key,
                  const std::map<Frame, FrameCell>& cells) {
    for (Frame f : {Frame::gain, Frame::loss}) {
      auto it = cells.find(f);
      if (it == cells.end()) continue;
      const FrameCell& c = it->second;
      out += csv::write_row({breakdown, key, frame_name(f),
                             std::to_string(c.count), fmt2(c.ratio),
                             fmt2(c.percent)});
    }
  };
  if (!report.overall.empty()) emit("overall", "all", report.overall);
  for (const auto& [grade, cells] : report.by_grade) {
    emit("grade", std::to_string(grade), cells);
  }
  for (const auto& [tri, cells] : report.by_trimester) {
    emit("trimester", std::to_string(tri), cells);
  }
  return out;
}

std::string report_to_json(const AggregateReport& report) {
  nlohmann::ordered_json j;
  auto cells_json = [](const std::map<Frame, FrameCell>& cells) {
    nlohmann::ordered_json o;
    for (Frame f : {Frame::gain, Frame::loss}) {
      auto it = cells.find(f);
      if (it == cells.end()) continue;
      o[frame_name(f)] = {{"count", it->second.count},
                          {"ratio", it->second.ratio},
                          {"percent", it->second.percent}};
    }
    return o;
  };
  j["overall"] = cells_json(report.overall);
  j["by_grade"] = nlohmann::ordered_json::object();
  for (const auto& [grade, cells] : report.by_grade) {
    j["by_grade"][std::to_string(grade)] = cells_json(cells);
  }
  j["by_trimester"] = nlohmann::ordered_json::object();
  for (const auto& [tri, cells] : report.by_trimester) {
    j["by_trimester"][std::to_string(tri)] = cells_json(cells);
  }
  return j.dump(2) + "\n";
}

}  // namespace engage::analytics
