#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bsx/error.hpp"

namespace bsx {

using bigint = boost::multiprecision::cpp_int;

inline bigint abs_big(const bigint& x) { return x < 0 ? bigint(-x) : x; }

inline bigint gcd_big(const bigint& a, const bigint& b) {
  return boost::multiprecision::gcd(abs_big(a), abs_big(b));
}

inline bigint pow_big(std::uint64_t p, unsigned e) {
  return boost::multiprecision::pow(bigint(p), e);
}

// p-adic valuation; k must be nonzero.
inline unsigned valuation(const bigint& k, std::uint64_t p) {
  bigint x = abs_big(k);
  unsigned e = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++e;
  }
  return e;
}

// Divides out every factor p of x in place and returns how many there were.
inline unsigned strip_prime(bigint& x, std::uint64_t p) {
  unsigned e = 0;
  while (x % p == 0) {
    x /= p;
    ++e;
  }
  return e;
}

// A cardinal in {1, 2, ...} or infinity.
class ext_card {
 public:
  ext_card() : value_(1) {}
  ext_card(const bigint& v) : value_(v) {  // NOLINT: implicit on purpose
    if (v < 1) throw error(errc::invalid_input, "cardinal must be positive");
  }
  template <std::integral I>
  ext_card(I v) : ext_card(bigint(v)) {}  // NOLINT

  static ext_card infinity() {
    ext_card c;
    c.value_.reset();
    return c;
  }

  bool is_finite() const { return value_.has_value(); }
  bool is_infinite() const { return !value_.has_value(); }

  const bigint& value() const {
    if (!value_) throw error(errc::infinite_label, "label is infinite");
    return *value_;
  }

  // gcd(k, inf) = |k|
  bigint gcd_with(std::int64_t k) const {
    bigint ak = abs_big(bigint(k));
    return value_ ? gcd_big(*value_, ak) : ak;
  }

  // inf / d = inf; for finite values d must divide exactly.
  ext_card divided_by(const bigint& d) const {
    if (!value_) return *this;
    return ext_card(bigint(*value_ / d));
  }

  ext_card times(const bigint& f) const {
    if (!value_) return *this;
    return ext_card(bigint(*value_ * f));
  }

  std::string to_string() const { return value_ ? value_->str() : "inf"; }

  static ext_card parse(const std::string& s) {
    if (s == "inf" || s == "infinity") return infinity();
    if (s.empty() ||
        !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw error(errc::invalid_input, "not a cardinal: '" + s + "'");
    return ext_card(bigint(s));
  }

  friend bool operator==(const ext_card& a, const ext_card& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ext_card& a, const ext_card& b) {
    if (a.is_finite() != b.is_finite())
      return a.is_finite() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_infinite()) return std::strong_ordering::equal;
    if (*a.value_ < *b.value_) return std::strong_ordering::less;
    if (*a.value_ > *b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::optional<bigint> value_;
};

inline std::ostream& operator<<(std::ostream& os, const ext_card& c) {
  return os << c.to_string();
}

struct prime_exponents {
  std::uint64_t p;
  unsigned vm;  // valuation in m
  unsigned vn;  // valuation in n
};

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t x) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= x; ++d) {
    if (x % d == 0) {
      out.push_back(d);
      while (x % d == 0) x /= d;
    }
  }
  if (x > 1) out.push_back(x);
  return out;
}

inline std::uint64_t abs_u64(std::int64_t x) {
  return x < 0 ? std::uint64_t(0) - std::uint64_t(x) : std::uint64_t(x);
}

// Parameters of BS(m,n) = <b, t | t b^m t^-1 = b^n>.
class bs_params {
 public:
  bs_params(std::int64_t m, std::int64_t n) : m_(m), n_(n) {
    if (m == 0 || n == 0) throw error(errc::invalid_params, "m and n must be nonzero");
    std::vector<std::uint64_t> ps = prime_divisors(abs_u64(m));
    for (std::uint64_t p : prime_divisors(abs_u64(n)))
      if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    for (std::uint64_t p : ps) {
      primes_.push_back({p, valuation(bigint(m), p), valuation(bigint(n), p)});
      max_exp_ = std::max({max_exp_, primes_.back().vm, primes_.back().vn});
    }
  }

  std::int64_t m() const { return m_; }
  std::int64_t n() const { return n_; }
  std::uint64_t abs_m() const { return abs_u64(m_); }
  std::uint64_t abs_n() const { return abs_u64(n_); }
  bool balanced() const { return abs_m() == abs_n(); }

  // Primes dividing mn in ascending order; every other prime has vm = vn = 0.
  const std::vector<prime_exponents>& primes() const { return primes_; }
  // Largest exponent of any prime in m or n.
  unsigned max_exponent() const { return max_exp_; }

  bs_params swapped() const { return bs_params(n_, m_); }

  friend bool operator==(const bs_params& a, const bs_params& b) {
    return a.m_ == b.m_ && a.n_ == b.n_;
  }

 private:
  std::int64_t m_;
  std::int64_t n_;
  std::vector<prime_exponents> primes_;
  unsigned max_exp_ = 0;
};

inline ext_card phenotype(const bs_params& bs, const ext_card& k) {
  if (k.is_infinite()) return k;
  bigint rest = k.value();
  bigint kept = 1;
  for (const auto& pe : bs.primes()) {
    unsigned e = strip_prime(rest, pe.p);
    if (pe.vm == pe.vn && e > pe.vn) kept *= pow_big(pe.p, e);
  }
  return ext_card(bigint(rest * kept));
}

inline bool is_phenotype(const bs_params& bs, const bigint& q) {
  return q >= 1 && phenotype(bs, ext_card(q)) == ext_card(q);
}

inline void require_phenotype(const bs_params& bs, const bigint& q) {
  if (!is_phenotype(bs, q))
    throw error(errc::not_a_phenotype, q.str() + " is not a phenotype");
}

// Smallest k with Phe(k) = q whose normal closure of b^k is the MC_q kernel.
inline bigint special_divisor_s(const bs_params& bs, const bigint& q) {
  require_phenotype(bs, q);
  bigint s = q;
  for (const auto& pe : bs.primes()) {
    if (pe.vm == pe.vn) {
      if (valuation(q, pe.p) == 0) s *= pow_big(pe.p, pe.vm);
    } else {
      s *= pow_big(pe.p, std::min(pe.vm, pe.vn));
    }
  }
  return s;
}

// Largest divisor r of k with gcd(r, m) = gcd(r, n).
inline bigint order_r(const bs_params& bs, const bigint& k) {
  if (k < 1) throw error(errc::invalid_input, "k must be positive");
  bigint rest = k;
  bigint kept = 1;
  for (const auto& pe : bs.primes()) {
    unsigned e = strip_prime(rest, pe.p);
    if (pe.vm == pe.vn)
      kept *= pow_big(pe.p, e);
    else
      kept *= pow_big(pe.p, std::min({e, pe.vm, pe.vn}));
  }
  return rest * kept;
}

// All k <= bound with Phe(k) = q, ascending.
inline std::vector<bigint> phenotype_preimage(const bs_params& bs, const bigint& q,
                                              const bigint& bound) {
  require_phenotype(bs, q);
  std::vector<bigint> out;
  const auto& ps = bs.primes();
  // exponent caps per prime; nullopt means unbounded
  std::vector<std::optional<unsigned>> cap(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].vm != ps[i].vn) continue;
    cap[i] = valuation(q, ps[i].p) > ps[i].vn ? 0u : ps[i].vm;
  }
  auto rec = [&](auto&& self, std::size_t i, const bigint& cur) -> void {
    if (cur > bound) return;
    if (i == ps.size()) {
      out.push_back(cur);
      return;
    }
    bigint x = cur;
    for (unsigned e = 0; !cap[i] || e <= *cap[i]; ++e) {
      if (x > bound) break;
      self(self, i + 1, x);
      x *= ps[i].p;
    }
  };
  rec(rec, 0, q);
  std::sort(out.begin(), out.end());
  return out;
}

// Labels of a kappa-confined (m,n)-graph with phenotype q stay below this bound.
inline bigint confinement_bound(const bs_params& bs, const bigint& q, unsigned kappa) {
  require_phenotype(bs, q);
  bigint rad = 1;
  for (const auto& pe : bs.primes()) rad *= pe.p;
  return q * boost::multiprecision::pow(rad, kappa * bs.max_exponent());
}

inline bigint approximation_level(const bs_params& bs, const bigint& q, unsigned kappa,
                                  unsigned j) {
  if (bs.abs_m() < 2 || bs.abs_n() < 2)
    throw error(errc::param_too_small, "requires |m|, |n| >= 2");
  require_phenotype(bs, q);
  bigint level = q;
  for (const auto& pe : bs.primes()) {
    if (pe.vm == pe.vn) {
      if (valuation(q, pe.p) <= pe.vn) level *= pow_big(pe.p, pe.vm);
    } else {
      level *= pow_big(pe.p, j * kappa * bs.max_exponent());
    }
  }
  if (phenotype(bs, ext_card(level)) != ext_card(q))
    throw std::logic_error("approximation level lost its phenotype");
  return level;
}

}  // namespace bsx
