#pragma once

#include <map>
#include <string>
#include <vector>

#include "engage/corpus.hpp"

namespace engage::analytics {

enum class Frame { gain, loss };

struct MessageObservation {
  std::string text;
  Frame frame = Frame::gain;
  int grade = 0;
  int trimester = 0;
  std::string group_id;
  corpus::SentenceRef ref;
};

// grade -> number of distinct groups at that grade
using GroupCensus = std::map<int, int>;

struct FrameCell {
  long count = 0;
  double ratio = 0.0;    // count normalized by groups (grade breakdown only)
  double percent = 0.0;  // within-breakdown percentage, 2 decimals, half-up
};

struct AggregateReport {
  std::map<Frame, FrameCell> overall;                     // empty when no obs
  std::map<int, std::map<Frame, FrameCell>> by_grade;     // grade ascending
  std::map<int, std::map<Frame, FrameCell>> by_trimester; // trimester asc
};

// Rounds half-up to 2 decimals.
double round2(double x);

std::map<Frame, FrameCell> overall_distribution(
    const std::vector<MessageObservation>& obs);

// ratio = count/groups per grade and frame; percentages computed within
// each grade. Throws ValidationError when an observed grade is missing
// from the census.
std::map<int, std::map<Frame, FrameCell>> grade_normalized(
    const std::vector<MessageObservation>& obs, const GroupCensus& census);

std::map<int, std::map<Frame, FrameCell>> trimester_distribution(
    const std::vector<MessageObservation>& obs);

AggregateReport aggregate(const std::vector<MessageObservation>& obs,
                          const GroupCensus& census);

// CSV columns: breakdown,key,frame,count,ratio,percent with deterministic
// ordering (overall, grade, trimester; keys ascending; gain before loss).
std::string report_to_csv(const AggregateReport& report);
std::string report_to_json(const AggregateReport& report);

const char* frame_name(Frame f);

}  // namespace engage::analytics
