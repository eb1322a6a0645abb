#include "fmmv/indices.hpp"

#include <sstream>
#include <stdexcept>

namespace fmmv {

SignedNumber oplus(SignedNumber a, SignedNumber b) {
  if (a.value == 0 || b.value == 0) throw std::invalid_argument("oplus: zero argument");
  int mag = a.magnitude() + b.magnitude();
  return SignedNumber{a.sign() == b.sign() ? mag : -mag};
}

int SignedComposition::weight() const {
  int w = 0;
  for (int p : parts) w += p < 0 ? -p : p;
  return w;
}

int EulerIndex::weight() const {
  int w = 0;
  for (int m : mags) w += m;
  return w;
}

int AmmvIndex::weight() const {
  int w = 0;
  for (int v : s) w += v;
  return w;
}

std::string family_name(Family f) {
  std::string base;
  switch (f.tag) {
    case FamilyTag::EulerSum: base = "es"; break;
    case FamilyTag::MMV: base = "m"; break;
    case FamilyTag::AMMV: base = "am"; break;
    case FamilyTag::t: base = "t"; break;
    case FamilyTag::T: base = "T"; break;
    case FamilyTag::S: base = "S"; break;
    case FamilyTag::Zeta2: base = "z2"; break;
  }
  if (f.star) base += "*";
  return base;
}

std::optional<Family> parse_family(const std::string& name) {
  std::string base = name;
  bool star = false;
  if (!base.empty() && base.back() == '*') {
    star = true;
    base.pop_back();
  }
  if (base == "es") return Family{FamilyTag::EulerSum, star};
  if (base == "m" || base == "mmv") return Family{FamilyTag::MMV, star};
  if (base == "am") return Family{FamilyTag::AMMV, star};
  if (base == "t") return Family{FamilyTag::t, star};
  if (base == "T") return Family{FamilyTag::T, star};
  if (base == "S") return Family{FamilyTag::S, star};
  if (base == "z2" || base == "zeta2") return Family{FamilyTag::Zeta2, star};
  return std::nullopt;
}

std::vector<int> family_eps(FamilyTag f, int d) {
  std::vector<int> eps(d);
  for (int j = 1; j <= d; ++j) {
    switch (f) {
      case FamilyTag::t: eps[j - 1] = -1; break;
      case FamilyTag::Zeta2: eps[j - 1] = 1; break;
      case FamilyTag::T: eps[j - 1] = (d - j + 1) % 2 == 0 ? 1 : -1; break;
      case FamilyTag::S: eps[j - 1] = (d - j) % 2 == 0 ? 1 : -1; break;
      default: throw std::invalid_argument("family_eps: not a parity-specialized family");
    }
  }
  return eps;
}

SignedComposition specialize(FamilyTag f, const std::vector<int>& s) {
  SignedComposition out;
  out.parts.reserve(s.size());
  auto eps = family_eps(f, static_cast<int>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] <= 0) throw std::invalid_argument("specialize: parts must be positive");
    out.parts.push_back(eps[j] * s[j]);
  }
  return out;
}

std::pair<SignedComposition, int> reversal_pair(const SignedComposition& s) {
  SignedComposition r;
  r.parts.assign(s.parts.rbegin(), s.parts.rend());
  for (int& p : r.parts) p = -p;
  return {r, s.weight() % 2 == 0 ? 1 : -1};
}

namespace {

void compositions_rec(int w, int d, std::vector<int>& cur,
                      const std::vector<SlotBound>& bounds,
                      std::vector<std::vector<int>>& out) {
  int slot = static_cast<int>(cur.size()) + 1;
  int lo = 1;
  for (const auto& b : bounds)
    if (b.slot == slot && b.min > lo) lo = b.min;
  if (slot == d) {
    if (w >= lo) {
      cur.push_back(w);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int v = lo; v <= w - (d - slot); ++v) {
    cur.push_back(v);
    compositions_rec(w - v, d, cur, bounds, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> positive_compositions(int w, int d,
                                                    const std::vector<SlotBound>& bounds) {
  if (d < 1 || d > w) throw std::invalid_argument("compositions: need 1 <= d <= w");
  for (const auto& b : bounds)
    if (b.slot < 1 || b.slot > d) throw std::invalid_argument("constraint slot out of [1,d]");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  compositions_rec(w, d, cur, bounds, out);
  return out;
}

std::vector<SignedComposition> signed_compositions(int w, int d,
                                                   const std::vector<SlotBound>& bounds) {
  std::vector<SignedComposition> out;
  for (const auto& comp : positive_compositions(w, d, bounds)) {
    int n = static_cast<int>(comp.size());
    // signs ordered + before - per slot, lexicographic over slots
    for (int mask = 0; mask < (1 << n); ++mask) {
      SignedComposition s;
      s.parts.resize(n);
      for (int j = 0; j < n; ++j)
        s.parts[j] = (mask >> (n - 1 - j)) & 1 ? -comp[j] : comp[j];
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<EulerIndex> euler_indices(int w, int d) {
  std::vector<EulerIndex> out;
  for (const auto& comp : positive_compositions(w, d)) {
    int n = static_cast<int>(comp.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
      EulerIndex e;
      e.mags = comp;
      e.signs.resize(n);
      for (int j = 0; j < n; ++j) e.signs[j] = (mask >> (n - 1 - j)) & 1 ? -1 : 1;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

std::string format_mmv(const SignedComposition& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.parts.size(); ++i) {
    if (i) os << ",";
    os << s.parts[i];
  }
  return os.str();
}

std::string format_euler(const EulerIndex& e) {
  std::ostringstream os;
  for (std::size_t i = 0; i < e.mags.size(); ++i) {
    if (i) os << ",";
    os << e.mags[i];
    if (e.signs[i] < 0) os << "~";
  }
  return os.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SignedComposition parse_mmv(const std::string& text) {
  SignedComposition s;
  for (const auto& tok : split_commas(text)) {
    int v = std::stoi(tok);
    if (v == 0) throw std::invalid_argument("index part must be nonzero");
    s.parts.push_back(v);
  }
  return s;
}

EulerIndex parse_euler(const std::string& text) {
  EulerIndex e;
  for (auto tok : split_commas(text)) {
    int sign = 1;
    if (!tok.empty() && tok.back() == '~') {
      sign = -1;
      tok.pop_back();
    }
    int m = std::stoi(tok);
    if (m < 1) throw std::invalid_argument("magnitude must be >= 1");
    e.mags.push_back(m);
    e.signs.push_back(sign);
  }
  return e;
}

}  // namespace fmmv
