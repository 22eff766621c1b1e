#include <doctest.h>

#include "support.hpp"

using namespace rfw;
using rfw::testing::random_up;
using rfw::testing::random_word;

namespace {

const Alphabet ab({"a", "b"});
const Alphabet bits({"0", "1"});

Word w(const Alphabet& al, const std::string& s) { return al.parse(s); }

}  // namespace

TEST_CASE("canonicalize examples") {
  CHECK(canonicalize(w(ab, "ab"), w(ab, "ab")) == UPWord{{}, w(ab, "ab")});
  CHECK(canonicalize(w(ab, "a"), w(ab, "ba")) == UPWord{{}, w(ab, "ab")});
  CHECK(canonicalize(w(bits, "0"), w(bits, "1010")) == UPWord{{}, w(bits, "01")});
  CHECK_THROWS_AS(canonicalize(Word{}, Word{}), std::invalid_argument);
}

TEST_CASE("canonicalize against brute-force candidates") {
  // Oracle: the shortest (prefix, primitive period) pair that agrees on a long window.
  std::mt19937 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    UPWord x{random_word(rng, 2, 0, 5), random_word(rng, 2, 1, 6)};
    UPWord c = canonicalize(x.prefix, x.period);
    std::size_t n = 40;
    Word ref = take(x, n);
    CHECK(take(c, n) == ref);
    std::size_t best_p = 100, best_v = 100;
    for (std::size_t v = 1; v <= 6 && best_v == 100; ++v)
      for (std::size_t p = 0; p <= 6; ++p) {
        bool ok = p + v <= n;
        for (std::size_t i = p + v; i < n && ok; ++i) ok = ref[i] == ref[i - v];
        if (ok) {
          best_p = p;
          best_v = v;
          break;
        }
      }
    CHECK(c.period.size() == best_v);
    CHECK(c.prefix.size() == best_p);
  }
}

TEST_CASE("up_equal examples") {
  CHECK(up_equal({{}, w(ab, "ab")}, {w(ab, "a"), w(ab, "ba")}));
  CHECK(up_equal({w(bits, "0"), w(bits, "10")}, {{}, w(bits, "01")}));
  CHECK_FALSE(up_equal({{}, w(bits, "01")}, {{}, w(bits, "0")}));
}

TEST_CASE("lcp examples") {
  CHECK(lcp(w(bits, "0011"), w(bits, "0100")) == w(bits, "0"));
  CHECK(lcp(UPWord{{}, w(bits, "01")}, w(bits, "0100")) == w(bits, "010"));
  CHECK(lcp(UPWord{{}, w(bits, "0")}, UPWord{{}, w(bits, "01")}) == w(bits, "0"));
  CHECK_THROWS_AS(lcp(UPWord{{}, w(bits, "01")}, UPWord{w(bits, "0"), w(bits, "10")}), InfiniteLcp);
}

TEST_CASE("strip_prefix examples") {
  CHECK(strip_prefix(w(ab, "abab"), w(ab, "ab")) == w(ab, "ab"));
  CHECK(strip_prefix(UPWord{{}, w(ab, "ab")}, w(ab, "a")) == UPWord{{}, w(ab, "ba")});
  CHECK_THROWS_AS(strip_prefix(w(ab, "ab"), w(ab, "aba")), NotPrefix);
  CHECK(strip_prefix(w(ab, "ab"), Word{}) == w(ab, "ab"));
}

TEST_CASE("slice conventions") {
  Word u = w(ab, "abba");
  CHECK(slice(u, 2, 3) == w(ab, "bb"));
  CHECK(slice(u, 3, 2).empty());
  CHECK(slice(u, 3, 10) == w(ab, "ba"));
}

TEST_CASE("property: canonical form is idempotent and unroll invariant") {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 500; ++iter) {
    Word u = random_word(rng, 3, 0, 6), v = random_word(rng, 3, 1, 5);
    std::size_t k = rng() % 4;
    UPWord c = canonicalize(u, v);
    CHECK(canonicalize(c.prefix, c.period) == c);
    UPWord d = canonicalize(concat(u, power(v, k)), v);
    CHECK(up_equal(d, c));
    CHECK(d == c);
  }
}

TEST_CASE("property: up_equal matches naive comparison") {
  std::mt19937 rng(12);
  for (int iter = 0; iter < 500; ++iter) {
    UPWord x = random_up(rng, 2, 4, 4), y = random_up(rng, 2, 4, 4);
    CHECK(up_equal(x, y) == (take(x, 100) == take(y, 100)));
    CHECK(up_equal(x, y) == (x == y));
    CHECK(up_equal(x, x));
  }
}

TEST_CASE("property: lcp symmetry and strip_prefix disagreement") {
  std::mt19937 rng(13);
  for (int iter = 0; iter < 500; ++iter) {
    Word x = random_word(rng, 2, 0, 8), y = random_word(rng, 2, 0, 8);
    Word c = lcp(x, y);
    CHECK(c == lcp(y, x));
    CHECK(lcp(x, concat(x, random_word(rng, 2, 0, 3))).size() == x.size());
    Word rx = strip_prefix(x, c), ry = strip_prefix(y, c);
    CHECK((rx.empty() || ry.empty() || rx.front() != ry.front()));

    UPWord a = random_up(rng, 2, 4, 4), b = random_up(rng, 2, 4, 4);
    if (a == b) continue;
    Word d = lcp(a, b);
    CHECK(d == lcp(b, a));
    CHECK(at(strip_prefix(a, d), 0) != at(strip_prefix(b, d), 0));
  }
}

TEST_CASE("UP serialization round trip") {
  Alphabet multi({"x1", "x2"});
  UPWord x = parse_up(multi, "x1(x2 x1)^w");
  CHECK(render(multi, x) == "(x1 x2)^w");
  CHECK(render(multi, parse_up(multi, "x1 x2(x2 x1)^w")) == "x1 x2(x2 x1)^w");
  CHECK(parse_up(bits, "0(1)^w") == UPWord{w(bits, "0"), w(bits, "1")});
  Alphabet trits({"0", "1", "2"});
  CHECK(parse_up(trits, "\"002\"(0)^w") == UPWord{{0, 0, 2}, {0}});
  CHECK_THROWS(parse_up(bits, "0()^w"));
}
