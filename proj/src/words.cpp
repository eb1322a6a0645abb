#include "fmmv/words.hpp"

#include <algorithm>
#include <stdexcept>

namespace fmmv {

bool is_letter_char(char c) {
  return c == 'a' || c == 'b' || c == 'c' || c == 'B' || c == 'G';
}

Letter letter_from_char(char c) {
  if (!is_letter_char(c)) throw std::invalid_argument(std::string("bad letter: ") + c);
  return static_cast<Letter>(c);
}

Word::Word(std::string s) : letters(std::move(s)) {
  if (letters.empty()) throw std::invalid_argument("empty word");
  for (char c : letters)
    if (!is_letter_char(c)) throw std::invalid_argument(std::string("bad letter: ") + c);
}

void WordSum::add(const Word& w, long long c) {
  if (c == 0) return;
  auto it = terms.find(w);
  if (it == terms.end()) {
    terms.emplace(w, c);
  } else if ((it->second += c) == 0) {
    terms.erase(it);
  }
}

namespace {

void shuffle_rec(const std::string& u, std::size_t i, const std::string& v,
                 std::size_t j, std::string& acc, WordSum& out) {
  if (i == u.size() && j == v.size()) {
    out.add(Word(acc), 1);
    return;
  }
  if (i < u.size()) {
    acc.push_back(u[i]);
    shuffle_rec(u, i + 1, v, j, acc, out);
    acc.pop_back();
  }
  if (j < v.size()) {
    acc.push_back(v[j]);
    shuffle_rec(u, i, v, j + 1, acc, out);
    acc.pop_back();
  }
}

}  // namespace

WordSum shuffle(const Word& u, const Word& v) {
  WordSum out;
  std::string acc;
  acc.reserve(u.letters.size() + v.letters.size());
  shuffle_rec(u.letters, 0, v.letters, 0, acc, out);
  return out;
}

// --- series oracle --------------------------------------------------------

namespace {

// Degree-p coefficient of the running series: exactly zero by parity, or a
// 1/p slot with numerator mu (an unknown integer part rides along but only
// ever flows past degree p).
enum class SlotState { ZeroExact, Mu, Poisoned };

}  // namespace

u64 series_coeff(const Word& w, u64 p) {
  if (w.ends_in_a())
    throw std::domain_error("word ends in 'a': not value-translatable");
  if (p <= static_cast<u64>(w.weight()) + 1)
    throw std::domain_error("prime too small for word weight");
  const std::size_t n = static_cast<std::size_t>(p);

  std::vector<u64> c(n, 0);  // coefficients of t^0..t^{p-1}
  c[0] = 1;
  int parity = 0;  // all supported degrees == parity (mod 2)
  SlotState slot = SlotState::ZeroExact;
  u64 mu = 0;
  auto inv = batch_inverses(p);

  std::vector<u64> h(n, 0);
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    char L = *it;
    if (L == 'a') {
      // divide coefficient of t^k by k; constant term is zero here since
      // at least one integration already happened
      for (std::size_t k = 1; k < n; ++k)
        if (c[k]) c[k] = mod_mul(c[k], inv[k - 1], p);
      // dividing a 1/p slot by p leaves the model; harmless unless it is
      // still live when the word ends (any later letter recomputes the slot)
      if (slot == SlotState::Mu) slot = SlotState::Poisoned;
      continue;  // parity unchanged
    }
    // multiply by the letter form, h = form * series:
    //   b: h_k =  c_k     + h_{k-2}     c: h_k = -c_k     - h_{k-2}
    //   B: h_k =  c_{k-1} + h_{k-2}     G: h_k = -c_{k-1} - h_{k-2}
    bool shift = (L == 'B' || L == 'G');
    bool negate = (L == 'c' || L == 'G');
    for (std::size_t k = 0; k < n; ++k) {
      u64 base = shift ? (k >= 1 ? c[k - 1] : 0) : c[k];
      u64 prev = k >= 2 ? h[k - 2] : 0;
      h[k] = negate ? mod_neg(mod_add(base, prev, p), p) : mod_add(base, prev, p);
    }
    // integrate: new c_k = h_{k-1}/k; the degree-p coefficient becomes
    // h_{p-1}/p, tracked in the slot
    parity ^= (L == 'b' || L == 'c') ? 1 : 0;
    if ((p & 1) == static_cast<u64>(parity)) {
      slot = SlotState::Mu;
      mu = h[n - 1];
    } else {
      slot = SlotState::ZeroExact;
      mu = 0;
    }
    c[0] = 0;
    for (std::size_t k = 1; k < n; ++k)
      c[k] = h[k - 1] ? mod_mul(h[k - 1], inv[k - 1], p) : 0;
  }
  if (slot == SlotState::Poisoned)
    throw std::domain_error("non-integral coefficient: 'a' over a 1/p slot");
  return slot == SlotState::Mu ? mu : 0;
}

// --- symbolic translation ---------------------------------------------------

u64 SignedValueRef::eval(u64 p) const {
  if (zero) return 0;
  u64 v = eval_ref(ref, p);
  if (chi_factor && chi_mod(p) != 1) v = mod_neg(v, p);
  return scalar < 0 ? mod_neg(v, p) : v;
}

SignedValueRef word_to_value(const Word& w) {
  if (w.ends_in_a())
    throw std::domain_error("word ends in 'a': not value-translatable");
  // decompose as a^{s1-1} L1 a^{s2-1} L2 ... Lr
  std::vector<char> L;
  std::vector<int> s;
  int run = 0;
  for (char ch : w.letters) {
    if (ch == 'a') {
      ++run;
    } else {
      L.push_back(ch);
      s.push_back(run + 1);
      run = 0;
    }
  }
  int r = static_cast<int>(L.size());
  // parity of each chain variable, innermost up: b/c flip, B/G keep
  std::vector<int> par(r + 2, 0);
  for (int j = r; j >= 1; --j)
    par[j] = par[j + 1] ^ ((L[j - 1] == 'b' || L[j - 1] == 'c') ? 1 : 0);
  auto sp = [&](int j) {  // letter alternation sign sigma'_j, sigma'_0 = +1
    if (j == 0) return 1;
    char ch = L[j - 1];
    return (ch == 'c' || ch == 'G') ? -1 : 1;
  };
  // constant sign: -1 per c-letter whose inner neighbour parity is odd
  int C = 1;
  for (int j = 1; j <= r; ++j)
    if (L[j - 1] == 'c' && par[j + 1] == 1) C = -C;

  SignedValueRef out;
  if (par[1] == 0) {
    // head variable must equal the odd prime p: coefficient identically 0
    out.zero = true;
    out.ref = ValueRef::mmv(SignedComposition{});
    return out;
  }
  if (s[0] >= 2)
    throw std::domain_error("non-integral head: word starts a^{s1-1} with s1 >= 2");

  // head factor sigma~_1^{(p+1)/2}: +1, or -chi(p) when sigma~_1 = -1
  int sigma1 = sp(1) * sp(0);
  out.scalar = C * (sigma1 < 0 ? -1 : 1);
  out.chi_factor = sigma1 < 0 ? 1 : 0;

  AmmvIndex tail;
  for (int j = 2; j <= r; ++j) {
    tail.s.push_back(s[j - 1]);
    tail.eps.push_back(par[j] == 0 ? 1 : -1);
    tail.sigma.push_back(sp(j) * sp(j - 1));
  }
  out.ref = ValueRef::ammv(std::move(tail));
  return out;
}

std::vector<Word> translatable_words(int n) {
  std::vector<Word> out;
  const std::string alphabet = "abcBG";
  std::string cur(static_cast<std::size_t>(n), 'a');
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      if (cur.back() != 'a') out.emplace_back(cur);
      return;
    }
    for (char ch : alphabet) {
      cur[static_cast<std::size_t>(pos)] = ch;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<ShuffleRelation> linear_shuffle_relations(int wt) {
  if (wt < 2) throw std::invalid_argument("linear_shuffle_relations: wt >= 2");
  std::vector<ShuffleRelation> out;
  for (char x : {'b', 'c', 'B', 'G'}) {
    for (const Word& v : translatable_words(wt - 1)) {
      ShuffleRelation rel{letter_from_char(x), v, {}, false, ""};
      WordSum sum = shuffle(Word(std::string(1, x)), v);
      // collect value terms keyed by (ref, chi)
      std::map<std::pair<std::string, int>, std::pair<SignedValueRef, long long>> acc;
      for (const auto& [word, coeff] : sum.terms) {
        SignedValueRef sv;
        try {
          sv = word_to_value(word);
        } catch (const std::domain_error& e) {
          rel.skipped = true;
          rel.skip_reason = word.letters + ": " + e.what();
          break;
        }
        if (sv.zero) continue;
        long long signed_coeff = coeff * sv.scalar;
        auto key = std::make_pair(sv.ref.key(), sv.chi_factor);
        auto it = acc.find(key);
        if (it == acc.end()) {
          SignedValueRef canon = sv;
          canon.scalar = 1;
          acc.emplace(key, std::make_pair(canon, signed_coeff));
        } else {
          it->second.second += signed_coeff;
        }
      }
      if (!rel.skipped) {
        bool all_chi = !acc.empty();
        for (const auto& [key, tc] : acc)
          if (tc.second != 0 && tc.first.chi_factor == 0) all_chi = false;
        for (auto& [key, tc] : acc) {
          if (tc.second == 0) continue;
          SignedValueRef term = tc.first;
          if (all_chi) term.chi_factor = 0;  // divide out the unit chi
          rel.terms.emplace_back(term, tc.second);
        }
      }
      out.push_back(std::move(rel));
    }
  }
  return out;
}

}  // namespace fmmv
