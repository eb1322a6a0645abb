#ifndef FMMV_LINALG_HPP
#define FMMV_LINALG_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "fmmv/rational.hpp"

namespace fmmv {

using BigInt = boost::multiprecision::cpp_int;

/// Exact integer LLL reduction (Lovasz delta = 3/4), all-integer variant:
/// Gram determinants d_i and scaled mu's stay in BigInt, no floating point
/// anywhere.  Rows are lattice basis vectors; returns the reduced basis.
std::vector<std::vector<BigInt>> lll_reduce(std::vector<std::vector<BigInt>> basis);

/// Divides a vector by the gcd of its entries (no-op on the zero vector)
/// and flips signs so the last nonzero entry is positive.
void make_primitive(std::vector<BigInt>& v);

/// CRT: combines residues r_i mod m_i (pairwise coprime) into the unique
/// residue mod prod(m_i).
BigInt crt_combine(const std::vector<std::pair<BigInt, BigInt>>& residues);

/// Incremental row reduction over Q.  Pivots sit on the LAST nonzero
/// coordinate of each row, so the coordinates that never become pivots —
/// the surviving "basis" columns — are the earliest ones.
class QRowReducer {
 public:
  explicit QRowReducer(std::size_t cols) : cols_(cols) {}

  /// Reduces `row` against the stored rows; if a nonzero remainder is
  /// left, stores it (pivot-normalized) and returns true.
  bool add(std::vector<Rat> row);

  std::size_t rank() const { return rows_.size(); }
  const std::vector<std::vector<Rat>>& rows() const { return rows_; }
  const std::vector<int>& pivots() const { return pivots_; }

 private:
  std::size_t cols_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<int> pivots_;  // pivot column of each stored row
};

/// Rank of an integer matrix modulo the Mersenne prime 2^61-1 (a certified
/// lower bound for the rational rank).
int rank_mod_m61(const std::vector<std::vector<BigInt>>& rows);

}  // namespace fmmv

#endif
