#include "dbkit/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace dbkit {

BigInt::BigInt(long long v) {
  if (v == 0) return;
  sign_ = v > 0 ? 1 : -1;
  unsigned long long m = v > 0 ? static_cast<unsigned long long>(v)
                               : ~static_cast<unsigned long long>(v) + 1ull;
  while (m) {
    d_.push_back(static_cast<uint32_t>(m & 0xffffffffu));
    m >>= 32;
  }
}

void BigInt::trim() {
  while (!d_.empty() && d_.back() == 0) d_.pop_back();
  if (d_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
  std::vector<uint32_t> r;
  r.reserve(std::max(a.size(), b.size()) + 1);
  uint64_t carry = 0;
  for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    uint64_t s = carry;
    if (i < a.size()) s += a[i];
    if (i < b.size()) s += b[i];
    r.push_back(static_cast<uint32_t>(s & 0xffffffffu));
    carry = s >> 32;
  }
  if (carry) r.push_back(static_cast<uint32_t>(carry));
  return r;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
  std::vector<uint32_t> r;
  r.reserve(a.size());
  int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t s = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
    if (s < 0) {
      s += (1ll << 32);
      borrow = 1;
    } else {
      borrow = 0;
    }
    r.push_back(static_cast<uint32_t>(s));
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  BigInt r;
  if (sign_ == o.sign_) {
    r.sign_ = sign_;
    r.d_ = add_mag(d_, o.d_);
  } else {
    int c = cmp_mag(d_, o.d_);
    if (c == 0) return BigInt();
    if (c > 0) {
      r.sign_ = sign_;
      r.d_ = sub_mag(d_, o.d_);
    } else {
      r.sign_ = o.sign_;
      r.d_ = sub_mag(o.d_, d_);
    }
  }
  return r;
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  r.sign_ = -r.sign_;
  return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  if (is_zero() || o.is_zero()) return BigInt();
  BigInt r;
  r.sign_ = sign_ * o.sign_;
  r.d_.assign(d_.size() + o.d_.size(), 0);
  for (size_t i = 0; i < d_.size(); ++i) {
    uint64_t carry = 0;
    for (size_t j = 0; j < o.d_.size(); ++j) {
      uint64_t cur = r.d_[i + j] + static_cast<uint64_t>(d_[i]) * o.d_[j] + carry;
      r.d_[i + j] = static_cast<uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    size_t k = i + o.d_.size();
    while (carry) {
      uint64_t cur = r.d_[k] + carry;
      r.d_[k] = static_cast<uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
      ++k;
    }
  }
  r.trim();
  return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt division by zero");
  int c = cmp_mag(a.d_, b.d_);
  if (c < 0) {
    q = BigInt();
    r = a;
    return;
  }
  // shift-subtract long division on magnitudes
  size_t bits = a.d_.size() * 32;
  std::vector<uint32_t> rem, quo(a.d_.size(), 0);
  rem.reserve(a.d_.size());
  for (size_t i = bits; i-- > 0;) {
    // rem = rem << 1 | bit_i(a)
    uint32_t carry = (a.d_[i / 32] >> (i % 32)) & 1u;
    for (size_t k = 0; k < rem.size(); ++k) {
      uint32_t nxt = rem[k] >> 31;
      rem[k] = (rem[k] << 1) | carry;
      carry = nxt;
    }
    if (carry) rem.push_back(carry);
    if (cmp_mag(rem, b.d_) >= 0) {
      rem = sub_mag(rem, b.d_);
      quo[i / 32] |= (1u << (i % 32));
    }
  }
  q = BigInt();
  q.d_ = std::move(quo);
  q.sign_ = 1;
  q.trim();
  if (!q.is_zero()) q.sign_ = a.sign_ * b.sign_;
  r = BigInt();
  r.d_ = std::move(rem);
  r.sign_ = 1;
  r.trim();
  if (!r.is_zero()) r.sign_ = a.sign_;
}

BigInt BigInt::operator/(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return r;
}

bool BigInt::operator<(const BigInt& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_;
  int c = cmp_mag(d_, o.d_);
  return sign_ >= 0 ? c < 0 : c > 0;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
  BigInt x = a.abs(), y = b.abs();
  while (!y.is_zero()) {
    BigInt q, r;
    divmod(x, y, q, r);
    x = y;
    y = r;
  }
  return x;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

bool BigInt::fits_longlong() const {
  if (d_.size() > 2) return false;
  unsigned long long m = 0;
  for (size_t i = 0; i < d_.size(); ++i) m |= static_cast<unsigned long long>(d_[i]) << (32 * i);
  if (sign_ >= 0) return m <= 0x7fffffffffffffffull;
  return m <= 0x8000000000000000ull;
}

long long BigInt::to_longlong() const {
  unsigned long long m = 0;
  for (size_t i = 0; i < d_.size(); ++i) m |= static_cast<unsigned long long>(d_[i]) << (32 * i);
  return sign_ >= 0 ? static_cast<long long>(m) : -static_cast<long long>(m - 1) - 1;
}

double BigInt::to_double() const {
  double v = 0;
  for (size_t i = d_.size(); i-- > 0;) v = v * 4294967296.0 + d_[i];
  return sign_ < 0 ? -v : v;
}

std::string BigInt::str() const {
  if (is_zero()) return "0";
  std::vector<uint32_t> m = d_;
  std::string out;
  while (!m.empty()) {
    // divide magnitude by 10^9
    uint64_t rem = 0;
    for (size_t i = m.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | m[i];
      m[i] = static_cast<uint32_t>(cur / 1000000000ull);
      rem = cur % 1000000000ull;
    }
    while (!m.empty() && m.back() == 0) m.pop_back();
    std::string chunk = std::to_string(rem);
    if (!m.empty())
      out = std::string(9 - chunk.size(), '0') + chunk + out;
    else
      out = chunk + out;
  }
  return (sign_ < 0 ? "-" : "") + out;
}

}  // namespace dbkit
