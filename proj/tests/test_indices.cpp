#include <doctest.h>

#include "fmmv/indices.hpp"

using namespace fmmv;

TEST_CASE("oplus") {
  CHECK(oplus(SignedNumber{2}, SignedNumber{3}).value == 5);
  CHECK(oplus(SignedNumber{-2}, SignedNumber{-3}).value == 5);
  CHECK(oplus(SignedNumber{-2}, SignedNumber{3}).value == -5);
  CHECK_THROWS(oplus(SignedNumber{0}, SignedNumber{1}));
}

TEST_CASE("compositions") {
  auto pc = positive_compositions(4, 2);
  CHECK(pc == std::vector<std::vector<int>>{{1, 3}, {2, 2}, {3, 1}});
  CHECK(positive_compositions(5, 1) == std::vector<std::vector<int>>{{5}});
  // count: C(w-1, d-1)
  CHECK(positive_compositions(7, 3).size() == 15);
  // slot bound: s_2 >= 2
  auto bounded = positive_compositions(4, 2, {SlotBound{2, 2}});
  CHECK(bounded == std::vector<std::vector<int>>{{1, 3}, {2, 2}});

  CHECK(signed_compositions(4, 2).size() == 3 * 4);
  CHECK(signed_compositions(3, 3).size() == 8);
  for (const auto& s : signed_compositions(5, 2)) {
    CHECK(s.weight() == 5);
    CHECK(s.depth() == 2);
  }
  CHECK(euler_indices(4, 2).size() == 12);
}

TEST_CASE("binomial") {
  CHECK(binomial(7, 3) == 35);
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(6, 0) == 1);
  CHECK(binomial(8, 8) == 1);
}

TEST_CASE("reversal") {
  SignedComposition s{{2, -1}};
  auto [rev, sign] = reversal_pair(s);
  CHECK(rev.parts == std::vector<int>{1, -2});
  CHECK(sign == -1);  // (-1)^weight
  auto [rev2, sign2] = reversal_pair(rev);
  CHECK(rev2.parts == s.parts);
  CHECK(sign2 == sign);
}

TEST_CASE("family parsing and parity patterns") {
  auto f = parse_family("t*");
  REQUIRE(f.has_value());
  CHECK(f->tag == FamilyTag::t);
  CHECK(f->star);
  CHECK(family_name(*f) == "t*");
  CHECK(family_name(Family{FamilyTag::Zeta2, false}) == "z2");
  CHECK(!parse_family("bogus").has_value());

  CHECK(family_eps(FamilyTag::t, 3) == std::vector<int>{-1, -1, -1});
  CHECK(family_eps(FamilyTag::Zeta2, 2) == std::vector<int>{1, 1});
  CHECK(family_eps(FamilyTag::T, 2) == std::vector<int>{1, -1});
  CHECK(family_eps(FamilyTag::S, 2) == std::vector<int>{-1, 1});
  CHECK(family_eps(FamilyTag::T, 1) == std::vector<int>{-1});
  CHECK(family_eps(FamilyTag::S, 1) == std::vector<int>{1});
}

TEST_CASE("index grammar round-trips") {
  SignedComposition s{{-2, 1}};
  CHECK(format_mmv(s) == "-2,1");
  CHECK(parse_mmv("-2,1").parts == s.parts);
  EulerIndex e{{1, 2}, {-1, 1}};
  CHECK(format_euler(e) == "1~,2");
  EulerIndex back = parse_euler("1~,2");
  CHECK(back.mags == e.mags);
  CHECK(back.signs == e.signs);
  CHECK_THROWS(parse_mmv("0,1"));
}
