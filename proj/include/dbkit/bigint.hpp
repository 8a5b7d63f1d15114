#pragma once

// Small arbitrary-precision signed integer (base 2^32 limbs).  Coefficient
// type of the exact polynomial layer; sizes stay modest, so schoolbook
// multiplication and shift-subtract division are enough.

#include <cstdint>
#include <string>
#include <vector>

namespace dbkit {

class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v);  // NOLINT: implicit by design

  bool is_zero() const { return d_.empty(); }
  int sign() const { return sign_; }

  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator-() const;
  BigInt operator*(const BigInt& o) const;
  BigInt operator/(const BigInt& o) const;  // truncated toward zero
  BigInt operator%(const BigInt& o) const;
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);

  bool operator==(const BigInt& o) const { return sign_ == o.sign_ && d_ == o.d_; }
  bool operator!=(const BigInt& o) const { return !(*this == o); }
  bool operator<(const BigInt& o) const;

  static BigInt gcd(const BigInt& a, const BigInt& b);
  BigInt abs() const;

  bool fits_longlong() const;
  long long to_longlong() const;  // requires fits_longlong()
  double to_double() const;
  std::string str() const;

 private:
  static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b);
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b);  // a >= b
  void trim();
  int sign_ = 0;                 // -1, 0, +1
  std::vector<uint32_t> d_;      // little-endian magnitude, no trailing zeros
};

}  // namespace dbkit
