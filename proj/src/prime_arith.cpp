#include "fmmv/prime_arith.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace fmmv {

u64 mod_pow(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = r * base % m;
    base = base * base % m;
    exp >>= 1;
  }
  return r;
}

u64 mod_inv_raw(u64 a, u64 p) {
  a %= p;
  if (a == 0) throw std::domain_error("division by zero mod " + std::to_string(p));
  // extended Euclid
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(p), nr = static_cast<std::int64_t>(a);
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::int64_t tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  if (r != 1) throw std::domain_error("not invertible mod " + std::to_string(p));
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<u64>(t);
}

u64 mod_rat(const Rat& r, u64 p) {
  std::int64_t n = r.num() % static_cast<std::int64_t>(p);
  if (n < 0) n += static_cast<std::int64_t>(p);
  u64 d = static_cast<u64>(r.den()) % p;
  return mod_mul(static_cast<u64>(n), mod_inv_raw(d, p), p);
}

bool AdeleSample::agrees_with(const AdeleSample& other) const {
  bool met = false;
  for (const auto& [p, v] : entries) {
    auto it = other.entries.find(p);
    if (it == other.entries.end()) continue;
    met = true;
    if (it->second != v) return false;
  }
  return met;
}

void ConstantMonomial::canonicalize() {
  std::sort(beta_factors.begin(), beta_factors.end());
  chi_power &= 1;
}

int ConstantMonomial::weight() const {
  int w = q2_power + 2 * catalan_power;
  for (int b : beta_factors) w += b;
  return w;
}

std::string ConstantMonomial::str() const {
  if (is_unit()) return "1";
  std::ostringstream os;
  bool first = true;
  auto sep = [&] { if (!first) os << "*"; first = false; };
  if (q2_power > 0) {
    sep(); os << "q2";
    if (q2_power > 1) os << "^" << q2_power;
  }
  for (std::size_t i = 0; i < beta_factors.size();) {
    std::size_t j = i;
    while (j < beta_factors.size() && beta_factors[j] == beta_factors[i]) ++j;
    sep(); os << "b" << beta_factors[i];
    if (j - i > 1) os << "^" << (j - i);
    i = j;
  }
  if (catalan_power > 0) {
    sep(); os << "G";
    if (catalan_power > 1) os << "^" << catalan_power;
  }
  if (chi_power & 1) { sep(); os << "chi"; }
  return os.str();
}

ConstantMonomial ConstantMonomial::parse(const std::string& s) {
  ConstantMonomial c;
  if (s == "1" || s.empty()) return c;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t star = s.find('*', pos);
    std::string factor = s.substr(pos, star == std::string::npos ? star : star - pos);
    pos = star == std::string::npos ? s.size() : star + 1;
    int power = 1;
    if (auto caret = factor.find('^'); caret != std::string::npos) {
      power = std::stoi(factor.substr(caret + 1));
      factor = factor.substr(0, caret);
    }
    if (factor == "q2") c.q2_power += power;
    else if (factor == "G") c.catalan_power += power;
    else if (factor == "chi") c.chi_power += power;
    else if (factor.size() > 1 && factor[0] == 'b') {
      int w = std::stoi(factor.substr(1));
      if (w < 2) throw std::invalid_argument("beta factor needs w >= 2: " + factor);
      for (int i = 0; i < power; ++i) c.beta_factors.push_back(w);
    } else if (factor == "1") {
      // unit factor, ignore
    } else {
      throw std::invalid_argument("unknown constant factor: " + factor);
    }
  }
  c.canonicalize();
  return c;
}

PrimeWindow sieve_window(u64 lo, u64 hi) {
  if (lo < 2 || hi < lo) throw std::invalid_argument("sieve_window: need 2 <= lo <= hi");
  std::vector<bool> composite(hi + 1, false);
  PrimeWindow w{lo, hi, {}};
  for (u64 n = 2; n <= hi; ++n) {
    if (composite[n]) continue;
    if (n >= lo) w.primes.push_back(Prime{n});
    for (u64 m = n * n; m <= hi; m += n) composite[m] = true;
  }
  return w;
}

Residue mod_inv(Residue a) {
  return Residue{mod_inv_raw(a.value, a.modulus), a.modulus};
}

std::vector<u64> batch_inverses(u64 p) {
  if (p < 3) throw std::invalid_argument("batch_inverses: need p >= 3");
  // prefix-product trick: one inversion total
  std::vector<u64> pre(p, 1);
  for (u64 k = 1; k < p; ++k) pre[k] = pre[k - 1] * k % p;
  u64 inv_all = mod_inv_raw(pre[p - 1], p);
  std::vector<u64> inv(p - 1);
  for (u64 k = p - 1; k >= 1; --k) {
    inv[k - 1] = inv_all * pre[k - 1] % p;
    inv_all = inv_all * k % p;
  }
  return inv;
}

std::vector<u64> bernoulli_table_mod(u64 n, u64 p) {
  if (n > p - 2) throw std::domain_error("bernoulli_mod: pole, need n <= p-2");
  // sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1, so B_m = -sum_{j<m}.../(m+1)
  std::vector<u64> B(n + 1, 0);
  B[0] = 1;
  std::vector<u64> row{1, 1};  // Pascal row m (starts at m = 1)
  for (u64 m = 1; m <= n; ++m) {
    // advance to row m+1
    row.push_back(1);
    for (u64 j = m; j >= 1; --j) row[j] = mod_add(row[j], row[j - 1], p);
    u64 s = 0;
    for (u64 j = 0; j < m; ++j) s = mod_add(s, mod_mul(row[j], B[j], p), p);
    B[m] = mod_mul(mod_neg(s, p), mod_inv_raw((m + 1) % p, p), p);
  }
  return B;
}

namespace {

// Per-prime memo for the O(p^2) recurrences; every named constant at a
// prime reuses the same table.
std::mutex table_mutex;

const std::vector<u64>& bernoulli_full_table(u64 p) {
  static std::map<u64, std::vector<u64>> cache;
  std::lock_guard<std::mutex> lk(table_mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, bernoulli_table_mod(p - 2, p)).first;
  return it->second;
}

}  // namespace

u64 bernoulli_mod(u64 n, u64 p) {
  if (n > p - 2) throw std::domain_error("bernoulli_mod: pole, need n <= p-2");
  if (p > 16) return bernoulli_full_table(p)[n];
  return bernoulli_table_mod(n, p)[n];
}

u64 euler_number_mod(u64 n, u64 p) {
  if (n >= p) throw std::invalid_argument("euler_number_mod: need n < p");
  if (n & 1) return 0;
  // sum_{k=0}^{n/2} C(n, 2k) E_{2k} = 0 for even n >= 2, E_0 = 1
  std::vector<u64> E(n / 2 + 1, 0);
  E[0] = 1;
  for (u64 m = 2; m <= n; m += 2) {
    // C(m, 2k) for 0 <= 2k <= m
    u64 c = 1, s = 0;  // c = C(m, 0)
    for (u64 k = 0; 2 * k < m; ++k) {
      s = mod_add(s, mod_mul(c, E[k], p), p);
      // C(m, 2k+2) = C(m, 2k) * (m-2k)(m-2k-1) / ((2k+1)(2k+2))
      u64 num = mod_mul((m - 2 * k) % p, (m - 2 * k - 1) % p, p);
      u64 den = mod_mul((2 * k + 1) % p, (2 * k + 2) % p, p);
      c = mod_mul(c, mod_mul(num, mod_inv_raw(den, p), p), p);
    }
    E[m / 2] = mod_neg(s, p);  // C(m, m) = 1
  }
  return E[n / 2];
}

u64 fermat_quotient2(u64 p) {
  if (p < 3) throw std::domain_error("fermat quotient needs odd p");
  u64 p2 = p * p;
  u64 t = mod_pow(2, p - 1, p2);  // == 1 + p*q2 mod p^2
  return (t - 1) / p % p;
}

u64 beta_mod(int w, u64 p) {
  if (w < 2 || p <= static_cast<u64>(w) + 2)
    throw std::domain_error("beta_" + std::to_string(w) + " needs p > w+2");
  return mod_mul(bernoulli_mod(p - w, p), mod_inv_raw(w, p), p);
}

u64 catalan_mod(u64 p) {
  if (p <= 3) throw std::domain_error("finite Catalan needs p > 3");
  static std::map<u64, u64> cache;
  std::lock_guard<std::mutex> lk(table_mutex);
  auto it = cache.find(p);
  if (it == cache.end())
    it = cache.emplace(p, mod_mul(euler_number_mod(p - 3, p), mod_inv_raw(2, p), p)).first;
  return it->second;
}

u64 chi_mod(u64 p) {
  if (p < 3 || p % 2 == 0) throw std::domain_error("chi needs odd p");
  return ((p - 1) / 2) % 2 == 0 ? 1 : p - 1;
}

u64 const_eval(const ConstantMonomial& c, u64 p) {
  u64 r = 1 % p;
  if (c.q2_power > 0) {
    if (p < 3) throw std::domain_error("q2 needs p > 2");
    r = mod_mul(r, mod_pow(fermat_quotient2(p), c.q2_power, p), p);
  }
  for (int w : c.beta_factors) r = mod_mul(r, beta_mod(w, p), p);
  if (c.catalan_power > 0)
    r = mod_mul(r, mod_pow(catalan_mod(p), c.catalan_power, p), p);
  if (c.chi_power & 1) r = mod_mul(r, chi_mod(p), p);
  return r;
}

AdeleSample const_sample(const ConstantMonomial& c, const PrimeWindow& window) {
  AdeleSample s;
  for (const Prime& pr : window.primes) {
    try {
      s.entries[pr.value] = const_eval(c, pr.value);
    } catch (const std::domain_error& e) {
      s.skips.emplace_back(pr.value, e.what());
    }
  }
  return s;
}

}  // namespace fmmv
