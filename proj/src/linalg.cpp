#include "fmmv/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace fmmv {

namespace {

BigInt dot(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// round(n / d) to nearest, d > 0
BigInt round_div(const BigInt& n, const BigInt& d) {
  BigInt q = (2 * n + d) / (2 * d);
  // floor of (2n+d)/(2d) gives nearest with ties up; fix C++ truncation for
  // negative numerators
  if ((2 * n + d) < 0 && (2 * n + d) % (2 * d) != 0) --q;
  return q;
}

}  // namespace

// All-integer LLL (Cohen, "A Course in Computational Algebraic Number
// Theory", Algorithm 2.6.7): d[k] are the Gram determinants, lambda[i][j]
// the scaled Gram-Schmidt coefficients mu[i][j] * d[j+1].
std::vector<std::vector<BigInt>> lll_reduce(std::vector<std::vector<BigInt>> b) {
  const int n = static_cast<int>(b.size());
  if (n <= 1) return b;
  std::vector<BigInt> d(static_cast<std::size_t>(n) + 1);
  std::vector<std::vector<BigInt>> lam(n, std::vector<BigInt>(n, 0));
  d[0] = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      BigInt u = dot(b[i], b[j]);
      for (int k = 0; k < j; ++k) u = (d[k + 1] * u - lam[i][k] * lam[j][k]) / d[k];
      if (j < i)
        lam[i][j] = u;
      else
        d[i + 1] = u;
    }
    if (d[i + 1] == 0) throw std::invalid_argument("lll_reduce: basis not independent");
  }

  auto red = [&](int k, int l) {
    if (2 * abs(lam[k][l]) <= d[l + 1]) return;
    BigInt q = round_div(lam[k][l], d[l + 1]);
    for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= q * b[l][c];
    lam[k][l] -= q * d[l + 1];
    for (int i = 0; i < l; ++i) lam[k][i] -= q * lam[l][i];
  };

  int k = 1;
  while (k < n) {
    red(k, k - 1);
    // Lovasz condition with delta = 3/4:
    //   d[k+1]*d[k-1] >= (3/4) d[k]^2 - lam[k][k-1]^2
    if (4 * (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1]) < 3 * d[k] * d[k]) {
      // swap b[k-1], b[k] and patch the Gram data
      std::swap(b[k - 1], b[k]);
      for (int j = 0; j < k - 1; ++j) std::swap(lam[k][j], lam[k - 1][j]);
      BigInt lamk = lam[k][k - 1];
      BigInt Bk = (d[k - 1] * d[k + 1] + lamk * lamk) / d[k];
      for (int i = k + 1; i < n; ++i) {
        BigInt t = lam[i][k];
        lam[i][k] = (d[k + 1] * lam[i][k - 1] - lamk * t) / d[k];
        lam[i][k - 1] = (Bk * t + lamk * lam[i][k]) / d[k + 1];
      }
      d[k] = Bk;
      k = std::max(k - 1, 1);
    } else {
      for (int l = k - 2; l >= 0; --l) red(k, l);
      ++k;
    }
  }
  return b;
}

void make_primitive(std::vector<BigInt>& v) {
  BigInt g = 0;
  for (const BigInt& x : v) g = gcd(g, x);
  if (g == 0) return;
  for (BigInt& x : v) x /= g;
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (*it == 0) continue;
    if (*it < 0)
      for (BigInt& x : v) x = -x;
    break;
  }
}

BigInt crt_combine(const std::vector<std::pair<BigInt, BigInt>>& residues) {
  BigInt x = 0, m = 1;
  for (const auto& [r, mod] : residues) {
    // solve x' == x (mod m), x' == r (mod mod)
    BigInt g, inv_m;
    {  // extended gcd of m mod `mod`
      BigInt a = m % mod, b = mod, u0 = 1, u1 = 0;
      while (b != 0) {
        BigInt q = a / b;
        BigInt t = a - q * b; a = b; b = t;
        t = u0 - q * u1; u0 = u1; u1 = t;
      }
      g = a;
      inv_m = u0;
    }
    if (g != 1) throw std::invalid_argument("crt_combine: moduli not coprime");
    BigInt diff = ((r - x) % mod + mod) % mod;
    BigInt t = (diff * (inv_m % mod + mod)) % mod;
    x += m * t;
    m *= mod;
    x %= m;
    if (x < 0) x += m;
  }
  return x;
}

bool QRowReducer::add(std::vector<Rat> row) {
  if (row.size() != cols_) throw std::invalid_argument("QRowReducer: size mismatch");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    int p = pivots_[r];
    if (!row[static_cast<std::size_t>(p)].is_zero()) {
      Rat f = row[static_cast<std::size_t>(p)];
      for (std::size_t c = 0; c < cols_; ++c) row[c] -= f * rows_[r][c];
    }
  }
  int pivot = -1;
  for (int c = static_cast<int>(cols_) - 1; c >= 0; --c)
    if (!row[static_cast<std::size_t>(c)].is_zero()) { pivot = c; break; }
  if (pivot < 0) return false;
  Rat f = row[static_cast<std::size_t>(pivot)];
  for (std::size_t c = 0; c < cols_; ++c) row[c] /= f;
  rows_.push_back(std::move(row));
  pivots_.push_back(pivot);
  return true;
}

int rank_mod_m61(const std::vector<std::vector<BigInt>>& rows) {
  if (rows.empty()) return 0;
  const unsigned long long M = (1ULL << 61) - 1;
  std::vector<std::vector<unsigned long long>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<unsigned long long> mr;
    mr.reserve(r.size());
    for (const BigInt& x : r) {
      BigInt v = x % M;
      if (v < 0) v += M;
      mr.push_back(v.convert_to<unsigned long long>());
    }
    m.push_back(std::move(mr));
  }
  auto mulmod = [&](unsigned long long a, unsigned long long b) {
    return static_cast<unsigned long long>(
        static_cast<unsigned __int128>(a) * b % M);
  };
  auto powmod = [&](unsigned long long a, unsigned long long e) {
    unsigned long long r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  };
  std::size_t nrows = m.size(), ncols = m[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < nrows; ++col) {
    std::size_t sel = row;
    while (sel < nrows && m[sel][col] == 0) ++sel;
    if (sel == nrows) continue;
    std::swap(m[sel], m[row]);
    unsigned long long inv = powmod(m[row][col], M - 2);
    for (std::size_t c = col; c < ncols; ++c) m[row][c] = mulmod(m[row][c], inv);
    for (std::size_t r2 = row + 1; r2 < nrows; ++r2) {
      if (m[r2][col] == 0) continue;
      unsigned long long f = m[r2][col];
      for (std::size_t c = col; c < ncols; ++c) {
        unsigned long long sub = mulmod(f, m[row][c]);
        m[r2][c] = (m[r2][c] + M - sub) % M;
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

}  // namespace fmmv
