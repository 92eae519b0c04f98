#include <doctest.h>

#include <string>

#include "engage/csv.hpp"
#include "engage/rng.hpp"

using namespace engage;

TEST_CASE("quoting rules") {
  CHECK(csv::quote_field("plain") == "plain");
  CHECK(csv::quote_field("a,b") == "\"a,b\"");
  CHECK(csv::quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::quote_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("parse handles quoted fields") {
  auto rows = csv::parse("a,\"b,c\",\"d\"\"e\"\nf,g,h\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rows[1] == std::vector<std::string>{"f", "g", "h"});
}

TEST_CASE("parse handles embedded newline and crlf") {
  auto rows = csv::parse("x,\"multi\nline\"\r\ny,z\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][1] == "multi\nline");
  CHECK(rows[1] == std::vector<std::string>{"y", "z"});
}

// property: write then parse is identity for random field content
TEST_CASE("round trip property") {
  rng::SplitMix64 gen(20240817);
  const std::string alphabet = "ab,\"\n á;x ";
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> fields;
    size_t n = 1 + gen.bounded(5);
    for (size_t i = 0; i < n; ++i) {
      std::string f;
      size_t len = gen.bounded(12);
      for (size_t k = 0; k < len; ++k) {
        f.push_back(alphabet[gen.bounded(alphabet.size())]);
      }
      // a bare \r inside an unquoted field is not representable; avoid
      // generating it as the sole content by quoting via special chars
      fields.push_back(f);
    }
    auto rows = csv::parse(csv::write_row(fields));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == fields);
  }
}
