#include <doctest.h>

#include "reference.hpp"
#include "rfw/twoway.hpp"
#include "support.hpp"

using namespace rfw;
using rfw::testing::random_up;

namespace {

TwoWayTransducer twoway_fixture(const std::string& name) { return load_twoway(std::string(RFW_FIXTURE_DIR) + "/" + name + ".json"); }

// Moves between positions 1 and 2 forever.
TwoWayTransducer oscillator() {
  TwoWayTransducer T;
  T.input = Alphabet({"a"});
  T.output = Alphabet({"b"});
  int s = T.add_state("s"), l = T.add_state("l"), r = T.add_state("r");
  T.set_initial(s);
  T.set_move(s, 0, kEndmarker, {r, Dir::Right, {}});
  T.set_move(r, 0, 0, {l, Dir::Right, {0}});
  T.set_move(l, 0, 0, {r, Dir::Left, {0}});
  return T;
}

// Right mover printing the parity of the a's strictly before the head.
TwoWayTransducer parity() {
  TwoWayTransducer T;
  T.input = Alphabet({"a", "b"});
  T.output = Alphabet({"e", "o"});
  Lookbehind L;
  L.initial = 0;
  L.delta = {{1, 0}, {0, 1}};
  L.names = {"even", "odd"};
  T.lookbehind = L;
  int s = T.add_state("s");
  T.set_move(s, 0, kEndmarker, {s, Dir::Right, {}});
  for (int d = 0; d < 2; ++d)
    for (Letter a = 0; a < 2; ++a) T.set_move(s, d, a, {s, Dir::Right, {d}});
  return T;
}

}  // namespace

TEST_CASE("eval_2dt examples") {
  TwoWayTransducer r = twoway_fixture("replace_2dt"), d = twoway_fixture("double_2dt");
  auto res = eval_2dt(r, parse_up(r.input, "(001)^w"), 6);
  CHECK(res.status == TwoWayResult::Status::Defined);
  CHECK(res.out == *reference::replace(parse_up(r.input, "(001)^w"), 6));
  CHECK(r.output.render(res.out) == "111111");
  auto zd = eval_2dt(d, parse_up(d.input, "(0)^w"), 5);
  CHECK(zd.status == TwoWayResult::Status::Defined);
  CHECK(d.output.render(zd.out) == "00000");
  auto osc = eval_2dt(oscillator(), parse_up(Alphabet({"a"}), "(a)^w"), 10);
  CHECK(osc.status == TwoWayResult::Status::Undefined);
  auto silent = eval_2dt(r, parse_up(r.input, "(0)^w"), 1, 1000);
  CHECK(silent.status == TwoWayResult::Status::Inconclusive);
  CHECK(silent.steps == 1000);
}

TEST_CASE("blocked run and endmarker discipline") {
  TwoWayTransducer d = twoway_fixture("double_2dt");
  TwoWayTransducer T = oscillator();
  CHECK_THROWS_AS(T.set_move(0, 0, kEndmarker, {1, Dir::Left, {}}), std::invalid_argument);
  TwoWayTransducer empty;
  empty.input = Alphabet({"a"});
  empty.add_state("s");
  CHECK(eval_2dt(empty, parse_up(empty.input, "(a)^w"), 1).status == TwoWayResult::Status::Undefined);
  CHECK(d.moves_left());
  CHECK_FALSE(parity().moves_left());
}

TEST_CASE("lookbehind reads the prefix before the head") {
  TwoWayTransducer T = parity();
  auto res = eval_2dt(T, parse_up(T.input, "aab(a)^w"), 6);
  REQUIRE(res.status == TwoWayResult::Status::Defined);
  CHECK(T.output.render(res.out) == "eoeeoe");
}

TEST_CASE("property: fixtures agree with the reference functions") {
  std::mt19937 rng(12);
  TwoWayTransducer r = twoway_fixture("replace_2dt"), d = twoway_fixture("double_2dt");
  for (int i = 0; i < 150; ++i) {
    UPWord x = random_up(rng, 3, 6, 4);
    auto ref_r = reference::replace(x, 60);
    auto got_r = eval_2dt(r, x, 60, 200000);
    if (ref_r) {
      REQUIRE(got_r.status == TwoWayResult::Status::Defined);
      CHECK(got_r.out == *ref_r);
    } else {
      CHECK(got_r.status != TwoWayResult::Status::Defined);
    }
    auto got_d = eval_2dt(d, x, 60);
    REQUIRE(got_d.status == TwoWayResult::Status::Defined);
    CHECK(got_d.out == *reference::double_(x, 60));
  }
}

TEST_CASE("2dT JSON round trip") {
  for (const TwoWayTransducer& T : {twoway_fixture("replace_2dt"), twoway_fixture("double_2dt"), parity()}) {
    TwoWayTransducer U = twoway_from_json(twoway_to_json(T));
    CHECK(twoway_to_json(U) == twoway_to_json(T));
  }
  CHECK_THROWS_AS(twoway_from_json("{\"states\": 3}"), FormatError);
  CHECK_THROWS_AS(twoway_from_json(R"({"input_alphabet":["a"],"output_alphabet":["b"],"states":["s"],"initial":"s",
    "transitions":[{"from":"s","letter":"|-","to":"s","move":"left"}]})"),
                  FormatError);
}
