#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <vector>

#include "bsx/arith.hpp"

namespace bsx {

// b^power when is_t is false, t^power with power = +-1 otherwise.
struct syllable {
  bool is_t = false;
  bigint power;

  friend bool operator==(const syllable&, const syllable&) = default;
};

// Word in b and t, stored with b-runs merged. t-letters are kept as written.
class word {
 public:
  word() = default;

  void push_b(const bigint& a) {
    if (a == 0) return;
    if (!syl_.empty() && !syl_.back().is_t) {
      syl_.back().power += a;
      if (syl_.back().power == 0) syl_.pop_back();
      return;
    }
    syl_.push_back({false, a});
  }

  void push_t(int sign) { syl_.push_back({true, bigint(sign > 0 ? 1 : -1)}); }

  void append(const word& w) {
    for (const auto& s : w.syl_) s.is_t ? push_t(s.power > 0 ? 1 : -1) : push_b(s.power);
  }

  const std::vector<syllable>& syllables() const { return syl_; }
  bool empty() const { return syl_.empty(); }

  std::size_t t_count() const {
    std::size_t c = 0;
    for (const auto& s : syl_) c += s.is_t;
    return c;
  }

  word inverse() const {
    word w;
    for (auto it = syl_.rbegin(); it != syl_.rend(); ++it)
      it->is_t ? w.push_t(it->power > 0 ? -1 : 1) : w.push_b(-it->power);
    return w;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& s : syl_) {
      if (!out.empty()) out += ' ';
      char letter = s.is_t ? 't' : 'b';
      bigint e = s.power;
      if (e < 0) {
        letter = char(std::toupper(letter));
        e = -e;
      }
      out += letter;
      if (e != 1) out += "^" + e.str();
    }
    return out;
  }

  friend bool operator==(const word&, const word&) = default;

 private:
  std::vector<syllable> syl_;
};

inline word make_b(const bigint& a) {
  word w;
  w.push_b(a);
  return w;
}

inline word operator*(word a, const word& b) {
  a.append(b);
  return a;
}

// Tokens b, B, t, T with optional ^int exponents; whitespace is ignored.
inline word parse_word(const std::string& text) {
  word w;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    char c = text[i];
    if (c != 'b' && c != 'B' && c != 't' && c != 'T')
      throw syntax_error(i, std::string("unexpected character '") + c + "'");
    ++i;
    bigint exp = 1;
    skip_ws();
    if (i < text.size() && text[i] == '^') {
      std::size_t caret = i++;
      skip_ws();
      bool neg = false;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (start == i) throw syntax_error(caret, "missing exponent after '^'");
      exp = bigint(text.substr(start, i - start));
      if (neg) exp = -exp;
      skip_ws();
    }
    if (std::isupper(static_cast<unsigned char>(c))) exp = -exp;
    if (c == 'b' || c == 'B') {
      w.push_b(exp);
    } else {
      int sign = exp > 0 ? 1 : -1;
      for (bigint k = abs_big(exp); k > 0; --k) w.push_t(sign);
    }
  }
  return w;
}

// b^{a_0} t^{e_1} b^{a_1} ... t^{e_k} b^{a_k}
struct britton_form {
  std::vector<bigint> b_exps{bigint(0)};
  std::vector<int> t_signs;

  std::size_t kappa() const { return t_signs.size(); }

  word to_word() const {
    word w;
    w.push_b(b_exps[0]);
    for (std::size_t i = 0; i < t_signs.size(); ++i) {
      w.push_t(t_signs[i]);
      w.push_b(b_exps[i + 1]);
    }
    return w;
  }

  friend bool operator==(const britton_form&, const britton_form&) = default;
};

inline bool is_pinch_free(const bs_params& bs, const britton_form& f) {
  for (std::size_t i = 1; i < f.t_signs.size(); ++i) {
    const bigint& a = f.b_exps[i];
    if (f.t_signs[i - 1] > 0 && f.t_signs[i] < 0 && a % bs.m() == 0) return false;
    if (f.t_signs[i - 1] < 0 && f.t_signs[i] > 0 && a % bs.n() == 0) return false;
  }
  return true;
}

// Rewrites t b^{jm} T -> b^{jn} and T b^{jn} t -> b^{jm} until no pinch is left.
// The reduced prefix is kept on a stack, so each new t-letter only has to be
// checked against the letter before it.
inline britton_form britton_reduce(const bs_params& bs, const word& w) {
  britton_form f;
  for (const auto& s : w.syllables()) {
    if (!s.is_t) {
      f.b_exps.back() += s.power;
      continue;
    }
    int sign = s.power > 0 ? 1 : -1;
    if (!f.t_signs.empty() && f.t_signs.back() == -sign) {
      const bigint& a = f.b_exps.back();
      bool pinch = f.t_signs.back() > 0 ? a % bs.m() == 0 : a % bs.n() == 0;
      if (pinch) {
        bigint image = f.t_signs.back() > 0 ? bigint(a / bs.m() * bs.n())
                                            : bigint(a / bs.n() * bs.m());
        f.b_exps.pop_back();
        f.t_signs.pop_back();
        f.b_exps.back() += image;
        continue;
      }
    }
    f.t_signs.push_back(sign);
    f.b_exps.push_back(0);
  }
  return f;
}

struct t_stats_result {
  std::size_t kappa;  // t-letters left after reduction
  long long sigma;    // exponent sum of t
};

inline t_stats_result t_stats(const bs_params& bs, const word& w) {
  long long sigma = 0;
  for (const auto& s : w.syllables())
    if (s.is_t) sigma += s.power > 0 ? 1 : -1;
  return {britton_reduce(bs, w).kappa(), sigma};
}

// Returns B with gamma b^A gamma^-1 = b^B. Throws precondition_failed naming
// the first prime whose valuation in A is too small for the t-height of gamma.
inline bigint commute_power(const bs_params& bs, const word& gamma, const bigint& a) {
  britton_form g = britton_reduce(bs, gamma);
  const std::size_t kappa = g.kappa();
  if (a != 0) {
    for (const auto& pe : bs.primes()) {
      unsigned va = valuation(a, pe.p);
      bool ok = pe.vm == pe.vn ? va >= pe.vm : va >= kappa * pe.vm && va >= kappa * pe.vn;
      if (!ok) throw precondition_failed(pe.p);
    }
  }
  word w = g.to_word() * make_b(a) * g.to_word().inverse();
  britton_form r = britton_reduce(bs, w);
  if (r.kappa() != 0) throw std::logic_error("conjugate of b^A did not collapse");
  bigint b = r.b_exps[0];
  if (a != 0) {
    long long sigma = 0;
    for (int s : g.t_signs) sigma += s;
    for (const auto& pe : bs.primes()) {
      long long want = (long long)valuation(a, pe.p) + sigma * ((long long)pe.vn - pe.vm);
      if ((long long)valuation(b, pe.p) != want)
        throw std::logic_error("valuation shift mismatch in commute_power");
    }
  }
  return b;
}

}  // namespace bsx
