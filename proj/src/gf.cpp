#include "micn/gf.hpp"

#include <fmt/format.h>

namespace micn::gf {

Element clmul_reduce(Element x, Element y, unsigned exponent, unsigned poly) {
  unsigned acc = 0;
  for (unsigned bit = 0; bit < 8; ++bit) {
    if (y & (1u << bit)) acc ^= unsigned(x) << bit;
  }
  for (int bit = 14; bit >= int(exponent); --bit) {
    if (acc & (1u << bit)) acc ^= poly << (bit - exponent);
  }
  return Element(acc);
}

bool is_irreducible(unsigned poly, unsigned exponent) {
  if (exponent == 0 || (poly >> exponent) != 1) return false;
  // Trial division by every polynomial of degree 1..e/2.
  auto degree = [](unsigned p) {
    int d = -1;
    while (p) {
      p >>= 1;
      ++d;
    }
    return d;
  };
  for (unsigned divisor = 2; degree(divisor) <= int(exponent) / 2; ++divisor) {
    unsigned rem = poly;
    int dd = degree(divisor);
    while (degree(rem) >= dd) rem ^= divisor << (degree(rem) - dd);
    if (rem == 0) return false;
  }
  return true;
}

Field::Field(unsigned exponent, unsigned reduction_poly)
    : exponent_(exponent), poly_(reduction_poly), order_(1u << exponent) {
  if (exponent < 1 || exponent > 8) {
    throw DomainError(fmt::format("unsupported field exponent {}", exponent));
  }
  if (!is_irreducible(reduction_poly, exponent)) {
    throw DomainError(fmt::format("polynomial {:#x} is not irreducible of degree {}",
                                  reduction_poly, exponent));
  }
  mul_.assign(256 * 256, 0);
  for (unsigned x = 0; x < order_; ++x) {
    for (unsigned y = 0; y < order_; ++y) {
      mul_[(x << 8) | y] = clmul_reduce(Element(x), Element(y), exponent_, poly_);
    }
  }
  for (unsigned x = 1; x < order_; ++x) {
    for (unsigned y = 1; y < order_; ++y) {
      if (mul(Element(x), Element(y)) == 1) {
        inv_[x] = Element(y);
        break;
      }
    }
  }
  for (unsigned g = 1; g < order_ && generator_ == 0; ++g) {
    unsigned period = 1;
    Element p = Element(g);
    while (p != 1) {
      p = mul(p, Element(g));
      ++period;
    }
    if (period == order_ - 1) generator_ = Element(g);
  }
}

const Field& Field::gf2() {
  static const Field field(1, 0x3);
  return field;
}

const Field& Field::gf256() {
  static const Field field(8, 0x11B);
  return field;
}

const Field& Field::of_order(unsigned q) {
  switch (q) {
    case 2: return gf2();
    case 256: return gf256();
    case 4: { static const Field f(2, 0x7); return f; }
    case 8: { static const Field f(3, 0xB); return f; }
    case 16: { static const Field f(4, 0x13); return f; }
    case 32: { static const Field f(5, 0x25); return f; }
    case 64: { static const Field f(6, 0x43); return f; }
    case 128: { static const Field f(7, 0x83); return f; }
    default: throw DomainError(fmt::format("unsupported field order {}", q));
  }
}

Element Field::inv(Element x) const {
  if (x == 0) throw DomainError("inverse of zero");
  return inv_[x];
}

Element Field::pow(Element x, unsigned k) const {
  Element result = 1;
  while (k) {
    if (k & 1) result = mul(result, x);
    x = mul(x, x);
    k >>= 1;
  }
  return result;
}

void Field::axpy(std::span<Element> dst, Element c, std::span<const Element> src) const {
  if (c == 0) return;
  if (c == 1) {
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] ^= src[j];
    return;
  }
  const Element* row = &mul_[unsigned(c) << 8];
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] ^= row[src[j]];
}

void Field::scale(std::span<Element> v, Element c) const {
  if (c == 1) return;
  const Element* row = &mul_[unsigned(c) << 8];
  for (auto& x : v) x = row[x];
}

}  // namespace micn::gf
