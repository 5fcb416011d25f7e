#include "doctest.h"

#include <string>
#include <vector>

#include "core/config.hpp"

using namespace msplab;

namespace {

const char* kSample =
    "kind = msp-check\n"
    "seed = 7\n"
    "# a comment line\n"
    "[target]\n"
    "P = 3\n"
    "S = 1\n"
    "S = 1,2\n"
    "alpha = 0.5\n"
    "[dynamics]\n"
    "eta = 0.25\n"
    "record = true\n";

}  // namespace

TEST_CASE("parse keeps preamble, sections, and repeated keys in order") {
  Config c = config_parse(kSample);
  CHECK(c.get("", "kind") == "msp-check");
  CHECK(c.get_int("", "seed") == 7);
  CHECK(c.get_int("target", "P") == 3);
  std::vector<std::string> sets = c.find_all("target", "S");
  REQUIRE(sets.size() == 2);
  CHECK(sets[0] == "1");
  CHECK(sets[1] == "1,2");
  CHECK(c.get_double("target", "alpha") == doctest::Approx(0.5));
  CHECK(c.get_double("dynamics", "eta") == doctest::Approx(0.25));
  CHECK(c.get_bool_or("dynamics", "record", false));
  CHECK(!c.has("dynamics", "missing"));
}

TEST_CASE("whitespace and comments are tolerated") {
  Config c = config_parse("  kind =  demo  \n\n   # note\n [ s ] \n k=v\n");
  CHECK(c.get("", "kind") == "demo");
  CHECK(c.get("s", "k") == "v");
}

TEST_CASE("malformed input raises config errors") {
  CHECK_THROWS_AS(config_parse("kind msp-check\n"), ConfigError);
  CHECK_THROWS_AS(config_parse("[unclosed\nk = v\n"), ConfigError);
  CHECK_THROWS_AS(config_parse("[]\n"), ConfigError);
  CHECK_THROWS_AS(config_parse("= value\n"), ConfigError);
}

TEST_CASE("typed getters validate their values") {
  Config c = config_parse("x = 1.5\nn = 12\nb = maybe\n");
  CHECK(c.get_double("", "x") == doctest::Approx(1.5));
  CHECK_THROWS_AS(c.get_int("", "x"), ConfigError);
  CHECK(c.get_int("", "n") == 12);
  CHECK(c.get_u64_or("", "n", 0) == 12);
  CHECK(c.get_u64_or("", "absent", 99) == 99);
  CHECK_THROWS_AS(c.get_bool_or("", "b", false), ConfigError);
  CHECK_THROWS_AS(c.get("", "absent"), ConfigError);
  CHECK(c.get_or("", "absent", "dflt") == "dflt");
  CHECK(c.get_double_or("", "absent", 2.5) == doctest::Approx(2.5));
  CHECK(c.get_int_or("", "absent", -3) == -3);
}

TEST_CASE("format round-trips entry for entry") {
  Config c = config_parse(kSample);
  Config back = config_parse(config_format(c));
  REQUIRE(back.entries.size() == c.entries.size());
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    CHECK(back.entries[i].section == c.entries[i].section);
    CHECK(back.entries[i].key == c.entries[i].key);
    CHECK(back.entries[i].value == c.entries[i].value);
  }
}

TEST_CASE("set overwrites the first match or appends") {
  Config c = config_parse("kind = a\n[s]\nk = 1\n");
  c.set("", "kind", "b");
  CHECK(c.get("", "kind") == "b");
  CHECK(c.entries.size() == 2);
  c.set("s", "fresh", "v");
  CHECK(c.entries.size() == 3);
  CHECK(c.get("s", "fresh") == "v");
  // appended entry lands at the end but format still groups it under [s]
  Config back = config_parse(config_format(c));
  CHECK(back.get("s", "fresh") == "v");
}

TEST_CASE("double lists") {
  std::vector<double> v = parse_double_list("1, 2.5 ,-3");
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(2.5));
  CHECK(v[2] == doctest::Approx(-3.0));
  CHECK(parse_double_list("").empty());
  CHECK_THROWS_AS(parse_double_list("1,two"), ConfigError);
}
