#ifndef FMMV_PRIME_ARITH_HPP
#define FMMV_PRIME_ARITH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fmmv/rational.hpp"

namespace fmmv {

using u64 = std::uint64_t;

/// A sieve-certified prime.
struct Prime {
  u64 value = 0;
  friend auto operator<=>(const Prime&, const Prime&) = default;
};

/// An element of Z/pZ, always stored in [0, p).
struct Residue {
  u64 value = 0;
  u64 modulus = 0;
};

// --- raw mod-p helpers (p < 2^31, products stay in 64 bits) ---
inline u64 mod_add(u64 a, u64 b, u64 p) { u64 s = a + b; return s >= p ? s - p : s; }
inline u64 mod_sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mod_mul(u64 a, u64 b, u64 p) { return a * b % p; }
inline u64 mod_neg(u64 a, u64 p) { return a ? p - a : 0; }
u64 mod_pow(u64 base, u64 exp, u64 m);
/// Inverse of a mod p, a not divisible by p. Throws on a == 0.
u64 mod_inv_raw(u64 a, u64 p);
/// Residue of the rational n/d.
u64 mod_rat(const Rat& r, u64 p);

/// The ascending list of primes in [lo, hi].
struct PrimeWindow {
  u64 lo = 0, hi = 0;
  std::vector<Prime> primes;
  bool empty() const { return primes.empty(); }
  std::size_t size() const { return primes.size(); }
};

/// A finite window of coordinates of an adele-like element: prime -> residue.
/// Two samples agree when they match on the (non-empty) intersection of
/// their key sets.  Skipped primes are recorded, never silently dropped.
struct AdeleSample {
  std::map<u64, u64> entries;
  std::vector<std::pair<u64, std::string>> skips;

  bool agrees_with(const AdeleSample& other) const;
};

/// A product of the named A-constants: q2^a * beta_{w1}*beta_{w2}*... * G^c * chi^e.
/// Canonical form keeps beta factors sorted and chi reduced mod 2.
struct ConstantMonomial {
  int q2_power = 0;
  std::vector<int> beta_factors;  // each w >= 2, sorted
  int catalan_power = 0;
  int chi_power = 0;  // 0 or 1

  void canonicalize();
  int weight() const;  // q2 ~ 1, beta_w ~ w, G ~ 2, chi ~ 0
  bool is_unit() const {
    return q2_power == 0 && beta_factors.empty() && catalan_power == 0 && chi_power == 0;
  }
  std::string str() const;
  static ConstantMonomial parse(const std::string& s);
  friend auto operator<=>(const ConstantMonomial&, const ConstantMonomial&) = default;
};

PrimeWindow sieve_window(u64 lo, u64 hi);

Residue mod_inv(Residue a);

/// [1^-1, 2^-1, ..., (p-1)^-1] mod p in O(p) multiplications.
std::vector<u64> batch_inverses(u64 p);

/// B_n mod p via the defining recurrence, 0 <= n <= p-2.
u64 bernoulli_mod(u64 n, u64 p);

/// All of B_0..B_n mod p at once (the per-prime O(n^2) table).
std::vector<u64> bernoulli_table_mod(u64 n, u64 p);

/// Euler number E_n mod p (0 for odd n).
u64 euler_number_mod(u64 n, u64 p);

/// Fermat quotient (2^{p-1}-1)/p mod p, computed mod p^2.
u64 fermat_quotient2(u64 p);

/// beta_w = B_{p-w}/w mod p; requires p > w.
u64 beta_mod(int w, u64 p);

/// Finite Catalan constant E_{p-3}/2 mod p; requires p > 3.
u64 catalan_mod(u64 p);

/// chi = (-1)^{(p-1)/2} mod p; requires odd p.
u64 chi_mod(u64 p);

/// Evaluates one constant monomial at one prime.  Throws std::domain_error
/// if the prime is too small for a factor.
u64 const_eval(const ConstantMonomial& c, u64 p);

/// Samples a constant monomial over a window; disallowed primes are skipped
/// with a recorded warning.
AdeleSample const_sample(const ConstantMonomial& c, const PrimeWindow& window);

}  // namespace fmmv

#endif
