#include <doctest.h>

#include "malsched/errors.hpp"
#include "malsched/gen.hpp"
#include "malsched/rat.hpp"

using namespace malsched;

TEST_CASE("rationals normalize to lowest terms with positive denominators") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-2, 4) == Rat(-1, 2));
  CHECK(Rat(2, -4) == Rat(-1, 2));
  CHECK(Rat(0, 7) == Rat(0));
  CHECK(Rat(1, 2).str() == "1/2");
  CHECK(Rat(-6, 3).str() == "-2");
}

TEST_CASE("parsing accepts integers and p/q, rejects junk") {
  CHECK(Rat::parse("5") == Rat(5));
  CHECK(Rat::parse("-7/14") == Rat(-1, 2));
  CHECK(Rat::parse("123456789012345678901234567890").str() ==
        "123456789012345678901234567890");
  CHECK_THROWS_AS(Rat::parse(""), ValidationError);
  CHECK_THROWS_AS(Rat::parse("1/0"), ValidationError);
  CHECK_THROWS_AS(Rat::parse("a/b"), ValidationError);
  CHECK_THROWS_AS(Rat(1, 0), ValidationError);
}

TEST_CASE("floor follows the integer lattice for both signs") {
  CHECK(Rat(5, 2).floor() == Rat(2));
  CHECK(Rat(-5, 2).floor() == Rat(-3));
  CHECK(Rat(4).floor() == Rat(4));
  CHECK(Rat(5, 2).floor_long() == 2);
}

TEST_CASE("powers of two are exact in both directions") {
  CHECK(Rat::pow2(0) == Rat(1));
  CHECK(Rat::pow2(5) == Rat(32));
  CHECK(Rat::pow2(-3) == Rat(1, 8));
  CHECK(Rat::pow2(40) * Rat::pow2(-40) == Rat(1));
}

TEST_CASE("field arithmetic agrees with a 64-bit reference on random smalls") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    long a = rng.uniform(-40, 40), b = rng.uniform(1, 23);
    long c = rng.uniform(-40, 40), d = rng.uniform(1, 23);
    Rat x(a, b), y(c, d);
    CHECK((x + y) == Rat(a * d + c * b, b * d));
    CHECK((x - y) == Rat(a * d - c * b, b * d));
    CHECK((x * y) == Rat(a * c, b * d));
    if (c != 0) CHECK((x / y) == Rat(a * d, b * c));
    CHECK((x < y) == (a * d < c * b));
  }
}

TEST_CASE("division by zero is rejected") {
  CHECK_THROWS_AS(Rat(1) / Rat(0), ValidationError);
}
