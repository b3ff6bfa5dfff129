#ifndef MICN_RREF_HPP
#define MICN_RREF_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "micn/gf.hpp"

namespace micn {

using EncodingVector = std::vector<gf::Element>;
using Payload = std::vector<std::uint8_t>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An encoding vector with the payload bytes it describes.
struct CodedRow {
  EncodingVector coefficients;
  Payload payload;
};

struct NotYetDecodable {
  std::size_t rank;
};

using DecodeResult = std::variant<std::vector<Payload>, NotYetDecodable>;

/// Incrementally maintained reduced row-echelon basis over GF(2^e).
///
/// Every row has a unit leading coefficient in a distinct pivot column and
/// zeros in all other rows' pivot columns; rows are ordered by pivot. Payload
/// bytes ride along as an augmented block and undergo the same row
/// operations, so once the rank reaches the dimension the payload block holds
/// the plaintext segments.
///
/// Columns are 0-based here; MILIC subset indices (1-based) are mapped by the
/// callers.
class RrefBasis {
 public:
  RrefBasis(const gf::Field& field, std::size_t dimension, std::size_t payload_size = 0);

  // Returns true iff vec was not already in the span. Throws DimensionError
  // on a size mismatch.
  bool insert(std::span<const gf::Element> vec, std::span<const std::uint8_t> payload = {});

  std::size_t rank() const { return rows_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t payload_size() const { return payload_size_; }
  bool full_rank() const { return rows_.size() == dimension_; }
  const gf::Field& field() const { return *field_; }

  // Pivot columns in increasing order. A column c is a pivot iff the span
  // holds a vector whose first nonzero coordinate is c.
  std::vector<std::size_t> pivots() const;
  bool has_pivot(std::size_t column) const {
    return column < dimension_ && pivot_row_[column] >= 0;
  }
  // Row position holding the given pivot, if any.
  std::optional<std::size_t> row_for_pivot(std::size_t column) const;

  std::span<const gf::Element> coefficients(std::size_t row) const {
    return {rows_[row].data.data(), dimension_};
  }
  std::span<const std::uint8_t> payload(std::size_t row) const {
    return {rows_[row].data.data() + dimension_, payload_size_};
  }
  std::size_t pivot(std::size_t row) const { return rows_[row].pivot; }

  // sum_r weights[r] * row_r, weights sized to rank().
  CodedRow combine(std::span<const gf::Element> weights) const;

  DecodeResult decode() const;

  bool operator==(const RrefBasis& other) const;

 private:
  struct Row {
    std::size_t pivot;
    std::vector<gf::Element> data;  // coefficients followed by payload
  };

  const gf::Field* field_;
  std::size_t dimension_;
  std::size_t payload_size_;
  std::vector<Row> rows_;
  std::vector<int> pivot_row_;
};

/// Rank accumulator over GF(2) on bit-packed rows. Row echelon only (no
/// back substitution); used where only the rank matters.
class Gf2RankAccumulator {
 public:
  explicit Gf2RankAccumulator(std::size_t dimension);

  // vec holds 0/1 entries.
  bool insert(std::span<const gf::Element> vec);
  bool insert_words(std::vector<std::uint64_t> words);
  std::size_t rank() const { return rank_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t words_per_row() const { return words_; }

 private:
  std::size_t dimension_;
  std::size_t words_;
  std::size_t rank_ = 0;
  std::vector<std::vector<std::uint64_t>> by_pivot_;
};

// Rank of a set of vectors (all of length n) via a throwaway basis.
std::size_t rank_of(const gf::Field& field, std::size_t n,
                    std::span<const EncodingVector> vectors);

// Index of the first nonzero coordinate, or nullopt for the zero vector.
std::optional<std::size_t> leading_column(std::span<const gf::Element> vec);

}  // namespace micn

#endif  // MICN_RREF_HPP
