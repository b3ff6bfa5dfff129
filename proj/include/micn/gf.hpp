#ifndef MICN_GF_HPP
#define MICN_GF_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace micn::gf {

using Element = std::uint8_t;

// GF(2^e) for 1 <= e <= 8. Addition is XOR; multiplication goes through
// a full 2^e x 2^e product table built once at construction.
class Field {
 public:
  // reduction_poly includes the x^e term, e.g. 0x11B for GF(256).
  Field(unsigned exponent, unsigned reduction_poly);

  static const Field& gf2();
  static const Field& gf256();
  // Field of the given order; only powers of two up to 256 are accepted.
  static const Field& of_order(unsigned q);

  unsigned exponent() const { return exponent_; }
  unsigned reduction_poly() const { return poly_; }
  unsigned order() const { return order_; }
  Element generator() const { return generator_; }

  static Element add(Element x, Element y) { return x ^ y; }
  Element mul(Element x, Element y) const { return mul_[(unsigned(x) << 8) | y]; }
  Element inv(Element x) const;
  Element div(Element x, Element y) const { return mul(x, inv(y)); }
  Element pow(Element x, unsigned k) const;

  // dst[j] += c * src[j]
  void axpy(std::span<Element> dst, Element c, std::span<const Element> src) const;
  void scale(std::span<Element> v, Element c) const;

  bool operator==(const Field& other) const {
    return exponent_ == other.exponent_ && poly_ == other.poly_;
  }

 private:
  unsigned exponent_;
  unsigned poly_;
  unsigned order_;
  Element generator_ = 0;
  std::vector<Element> mul_;   // 256*256, indexed (x << 8) | y
  std::array<Element, 256> inv_{};
};

// Carry-less multiply then reduction modulo poly. Independent of Field's tables.
Element clmul_reduce(Element x, Element y, unsigned exponent, unsigned poly);

// True iff poly (with its degree-e term) is irreducible over GF(2).
bool is_irreducible(unsigned poly, unsigned exponent);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace micn::gf

#endif  // MICN_GF_HPP
