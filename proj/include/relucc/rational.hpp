#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace relucc {

using Int = mpz_class;

// Exact rational scalar used throughout the network IR. Backed by GMP's
// mpq_class, so values are always reduced and the denominator is positive.
class Rational {
public:
  Rational() : q_(0) {}
  Rational(int v) : q_(v) {}
  Rational(long v) : q_((long)v) {}
  Rational(const Int& v) : q_(v) {}
  Rational(const Int& num, const Int& den) : q_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Parses "n" or "n/d"; the representation is canonicalized.
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Int(s), Int(1));
    return Rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  }

  const Int& num() const { return q_.get_num(); }
  const Int& den() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  bool is_zero() const { return q_ == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  double to_double() const { return q_.get_d(); }

  // "n" when integral, otherwise "n/d"; round-trips bit-exactly via parse().
  std::string str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

private:
  mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }

inline Rational relu(const Rational& r) { return r.sign() > 0 ? r : Rational(0); }

inline Rational clamp(const Rational& r, const Rational& lo, const Rational& hi) {
  return max(lo, min(r, hi));
}

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int floor_of(const Rational& r) { return floor_div(r.num(), r.den()); }

// Nearest integer, ties toward +infinity: round(x) = floor(x + 1/2).
inline Int round_half_up(const Rational& r) {
  return floor_of(r + Rational(1, 2));
}

inline Int pow2(unsigned long e) {
  Int z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, e);
  return z;
}

inline Int lcm(const Int& a, const Int& b) {
  Int z;
  mpz_lcm(z.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return z;
}

// Number of bits in |v|: bitlen(0) = 0, bitlen(1) = 1, bitlen(4) = 3.
inline size_t bitlen(const Int& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

}  // namespace relucc
