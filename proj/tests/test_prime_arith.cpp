#include <doctest.h>

#include "fmmv/prime_arith.hpp"

using namespace fmmv;

TEST_CASE("sieve_window") {
  PrimeWindow w = sieve_window(5, 20);
  std::vector<u64> got;
  for (const Prime& p : w.primes) got.push_back(p.value);
  CHECK(got == std::vector<u64>{5, 7, 11, 13, 17, 19});
  CHECK(sieve_window(24, 28).empty());
}

TEST_CASE("modular basics") {
  CHECK(mod_pow(2, 10, 7) == 2);  // 1024 mod 7
  for (u64 p : {5ull, 7ull, 97ull})
    for (u64 a = 1; a < p; ++a) CHECK(mod_mul(a, mod_inv_raw(a, p), p) == 1);
  CHECK(mod_rat(Rat(1, 2), 7) == 4);
  CHECK(mod_rat(Rat(-3, 8), 11) == mod_mul(11 - 3, mod_inv_raw(8, 11), 11));
  CHECK_THROWS(mod_rat(Rat(1, 7), 7));
}

TEST_CASE("batch inverses match mod_inv_raw") {
  for (u64 p : {5ull, 101ull}) {
    auto inv = batch_inverses(p);
    REQUIRE(inv.size() == p - 1);
    for (u64 n = 1; n < p; ++n) CHECK(inv[n - 1] == mod_inv_raw(n, p));
  }
}

TEST_CASE("bernoulli numbers mod p") {
  CHECK(bernoulli_mod(1, 7) == 3);  // -1/2 mod 7
  CHECK(bernoulli_mod(4, 7) == 3);  // -1/30 mod 7
  // odd Bernoulli numbers beyond B_1 vanish
  for (u64 p : {7ull, 13ull, 31ull})
    for (u64 n = 3; n < p - 1; n += 2) CHECK(bernoulli_mod(n, p) == 0);
}

TEST_CASE("euler numbers mod p") {
  CHECK(euler_number_mod(2, 5) == 4);  // E_2 = -1
  CHECK(euler_number_mod(4, 7) == 5);  // E_4 = 5
  CHECK(euler_number_mod(0, 11) == 1);
  CHECK(euler_number_mod(1, 11) == 0);  // odd Euler numbers vanish
}

TEST_CASE("fermat quotient, beta, catalan, chi") {
  CHECK(fermat_quotient2(5) == 3);
  CHECK(fermat_quotient2(7) == 2);
  CHECK(beta_mod(3, 7) == 1);
  for (u64 p : {7ull, 11ull, 13ull, 31ull}) {
    CHECK(beta_mod(2, p) == 0);  // beta at even weight vanishes identically
    CHECK(beta_mod(4, p) == 0);
    CHECK(chi_mod(p) == (p % 4 == 1 ? 1 : p - 1));
  }
  // catalan constant surrogate is E_{p-3}/2
  for (u64 p : {7ull, 11ull})
    CHECK(catalan_mod(p) == mod_mul(euler_number_mod(p - 3, p), mod_inv_raw(2, p), p));
}

TEST_CASE("constant monomials") {
  ConstantMonomial m = ConstantMonomial::parse("q2^2*b3*chi");
  CHECK(m.q2_power == 2);
  CHECK(m.beta_factors == std::vector<int>{3});
  CHECK(m.chi_power == 1);
  CHECK(m.weight() == 2 + 3);
  CHECK(ConstantMonomial::parse(m.str()) == m);
  CHECK(ConstantMonomial::parse("1").is_unit());
  CHECK(ConstantMonomial::parse("b3^2").str() == "b3^2");

  // q2^2 at p=5: q2 = 3, so 9 mod 5 = 4
  CHECK(const_eval(ConstantMonomial::parse("q2^2"), 5) == 4);
  CHECK(const_eval(ConstantMonomial::parse("chi*G"), 7) ==
        mod_mul(chi_mod(7), catalan_mod(7), 7));
  CHECK_THROWS_AS(const_eval(ConstantMonomial::parse("b3"), 3), std::domain_error);
}

TEST_CASE("adele samples") {
  PrimeWindow w = sieve_window(5, 30);
  AdeleSample a = const_sample(ConstantMonomial::parse("q2"), w);
  CHECK(a.entries.at(5) == 3);
  CHECK(a.entries.at(7) == 2);
  AdeleSample b = const_sample(ConstantMonomial::parse("q2"), sieve_window(5, 20));
  CHECK(a.agrees_with(b));
}
