#include <doctest.h>

#include "fmmv/cache.hpp"
#include "fmmv/evaluator.hpp"

#include <cstdio>
#include <filesystem>
#include <unistd.h>

using namespace fmmv;

TEST_CASE("frozen depth-1 and depth-2 residues") {
  // zeta_5(1 bar) = sum (-1)^n / n = -1 + 1/2 - 1/3 + 1/4 = 4 mod 5
  CHECK(euler_sum_mod(EulerIndex{{1}, {-1}}, 5) == 4);
  CHECK(euler_sum_mod(EulerIndex{{1, 1}, {1, 1}}, 5) == 0);
  // M_5((-1)) = 1 + 1/3 = 3 mod 5; M_5((1)) = 1/2 + 1/4 = 2 mod 5
  CHECK(mmv_mod(SignedComposition{{-1}}, 5) == 3);
  CHECK(mmv_mod(SignedComposition{{1}}, 5) == 2);
  CHECK(eval_ref(ValueRef::specialized(FamilyTag::t, {1, 1}, {}, true), 5) == 2);
  CHECK(eval_ref(ValueRef::specialized(FamilyTag::T, {1}, {-1}), 5) == 1);
  CHECK(eval_ref(ValueRef::specialized(FamilyTag::T, {2}, {-1}), 7) == 1);
  // t_p(1) = q2 mod p
  CHECK(eval_ref(ValueRef::specialized(FamilyTag::t, {1}), 5) == 3);
  CHECK(eval_ref(ValueRef::specialized(FamilyTag::t, {1}), 7) == 2);
}

TEST_CASE("depth-1 specializations collapse") {
  for (u64 p : {7ull, 11ull, 13ull}) {
    for (int s : {1, 2, 3}) {
      CHECK(eval_ref(ValueRef::specialized(FamilyTag::S, {s}), p) ==
            eval_ref(ValueRef::specialized(FamilyTag::Zeta2, {s}), p));
      CHECK(eval_ref(ValueRef::specialized(FamilyTag::T, {s}), p) ==
            eval_ref(ValueRef::specialized(FamilyTag::t, {s}), p));
    }
  }
}

TEST_CASE("key grammar round-trips") {
  for (const char* key : {"t:1,1~", "T*:2,1", "es:1~,2", "z2:3", "chi*S:1,1~"}) {
    ValueRef ref = ValueRef::parse_key(key);
    CHECK(ref.key() == key);
  }
  // raw MMV keys canonicalize to the matching specialization
  CHECK(ValueRef::parse_key("m:-2,1").key() == "S:2,1");
  CHECK(ValueRef::parse_key("am:-1~,1").key() == "S:1~,1");
  CHECK(ValueRef::parse_key("m*:1,-1").key() == "T*:1,1");
  CHECK_THROWS(ValueRef::parse_key("bogus:1"));
  CHECK_THROWS(ValueRef::parse_key("t:0"));
}

TEST_CASE("DP agrees with the naive oracle on a sample") {
  for (u64 p : {5ull, 11ull, 17ull}) {
    for (bool star : {false, true}) {
      for (const auto& parts : {std::vector<int>{-2, 1}, std::vector<int>{1, 1, -1},
                                std::vector<int>{3}}) {
        ValueRef ref = ValueRef::mmv(SignedComposition{parts}, star);
        if (static_cast<u64>(ref.weight() + 2) >= p) continue;
        CHECK(eval_ref(ref, p) == naive_eval(ref, p));
      }
      ValueRef es = ValueRef::euler(EulerIndex{{1, 2}, {-1, 1}}, star);
      CHECK(eval_ref(es, 11) == naive_eval(es, 11));
    }
  }
}

TEST_CASE("window_eval and the residue cache") {
  ValueRef ref = ValueRef::specialized(FamilyTag::t, {1});
  AdeleSample plain = window_eval(ref, sieve_window(5, 7));
  CHECK(plain.entries == std::map<u64, u64>{{5, 3}, {7, 2}});

  auto dir = std::filesystem::temp_directory_path() /
             ("fmmv-test-cache-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  {
    ResidueCache cache(dir);
    AdeleSample cached = window_eval(ref, sieve_window(5, 40), &cache, 2);
    CHECK(cached.agrees_with(plain));
    CHECK(cache.stats().entries == cached.entries.size());
  }
  {
    // reload from disk: all hits, identical residues
    ResidueCache cache(dir);
    CHECK(cache.get(ref, 5) == 3);
    CHECK(cache.get(ref, 7) == 2);
    CHECK_THROWS(cache.put(ref, 5, 4));  // write-once
    cache.put(ref, 5, 3);                // identical re-insert is fine
    cache.clear();
    CHECK(cache.stats().entries == 0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("small primes are skipped, not evaluated") {
  ValueRef ref = ValueRef::mmv(SignedComposition{{2, 1}});  // weight 3
  CHECK_THROWS_AS(eval_ref(ref, 5), std::domain_error);
  AdeleSample s = window_eval(ref, sieve_window(5, 13));
  CHECK(s.entries.count(5) == 0);
  CHECK(s.skips.size() == 1);
  CHECK(s.entries.count(7) == 1);
}
