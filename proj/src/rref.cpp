#include "micn/rref.hpp"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

namespace micn {

std::optional<std::size_t> leading_column(std::span<const gf::Element> vec) {
  for (std::size_t j = 0; j < vec.size(); ++j) {
    if (vec[j] != 0) return j;
  }
  return std::nullopt;
}

RrefBasis::RrefBasis(const gf::Field& field, std::size_t dimension, std::size_t payload_size)
    : field_(&field),
      dimension_(dimension),
      payload_size_(payload_size),
      pivot_row_(dimension, -1) {
  rows_.reserve(dimension);
}

bool RrefBasis::insert(std::span<const gf::Element> vec, std::span<const std::uint8_t> payload) {
  if (vec.size() != dimension_) {
    throw DimensionError(
        fmt::format("vector of length {} inserted into basis of dimension {}", vec.size(), dimension_));
  }
  if (!payload.empty() && payload.size() != payload_size_) {
    throw DimensionError(fmt::format("payload of {} bytes, basis expects {}", payload.size(),
                                     payload_size_));
  }
  const std::size_t width = dimension_ + payload_size_;
  std::vector<gf::Element> row(width, 0);
  std::copy(vec.begin(), vec.end(), row.begin());
  std::copy(payload.begin(), payload.end(), row.begin() + dimension_);

  // Rows are zero left of their pivot, so each elimination only touches the
  // tail starting at that pivot.
  for (const auto& r : rows_) {
    gf::Element c = row[r.pivot];
    if (c == 0) continue;
    std::span<gf::Element> dst(row.data() + r.pivot, width - r.pivot);
    field_->axpy(dst, c, std::span<const gf::Element>(r.data.data() + r.pivot, width - r.pivot));
  }

  auto lead = leading_column(std::span<const gf::Element>(row.data(), dimension_));
  if (!lead) return false;
  const std::size_t p = *lead;
  field_->scale(std::span<gf::Element>(row.data() + p, width - p), field_->inv(row[p]));

  for (auto& r : rows_) {
    gf::Element c = r.data[p];
    if (c == 0) continue;
    std::span<gf::Element> dst(r.data.data() + p, width - p);
    field_->axpy(dst, c, std::span<const gf::Element>(row.data() + p, width - p));
  }

  auto pos = std::lower_bound(rows_.begin(), rows_.end(), p,
                              [](const Row& r, std::size_t col) { return r.pivot < col; });
  rows_.insert(pos, Row{p, std::move(row)});
  for (std::size_t k = 0; k < rows_.size(); ++k) pivot_row_[rows_[k].pivot] = int(k);
  return true;
}

std::vector<std::size_t> RrefBasis::pivots() const {
  std::vector<std::size_t> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.pivot);
  return out;
}

std::optional<std::size_t> RrefBasis::row_for_pivot(std::size_t column) const {
  if (!has_pivot(column)) return std::nullopt;
  return std::size_t(pivot_row_[column]);
}

CodedRow RrefBasis::combine(std::span<const gf::Element> weights) const {
  if (weights.size() != rows_.size()) {
    throw DimensionError(fmt::format("{} weights for {} rows", weights.size(), rows_.size()));
  }
  const std::size_t width = dimension_ + payload_size_;
  std::vector<gf::Element> acc(width, 0);
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    field_->axpy(acc, weights[k], rows_[k].data);
  }
  CodedRow out;
  out.coefficients.assign(acc.begin(), acc.begin() + dimension_);
  out.payload.assign(acc.begin() + dimension_, acc.end());
  return out;
}

DecodeResult RrefBasis::decode() const {
  if (!full_rank()) return NotYetDecodable{rank()};
  std::vector<Payload> segments;
  segments.reserve(dimension_);
  for (const auto& r : rows_) {
    segments.emplace_back(r.data.begin() + dimension_, r.data.end());
  }
  return segments;
}

bool RrefBasis::operator==(const RrefBasis& other) const {
  if (*field_ != *other.field_ || dimension_ != other.dimension_ ||
      rows_.size() != other.rows_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (rows_[k].pivot != other.rows_[k].pivot) return false;
    if (!std::equal(rows_[k].data.begin(), rows_[k].data.begin() + dimension_,
                    other.rows_[k].data.begin())) {
      return false;
    }
  }
  return true;
}

Gf2RankAccumulator::Gf2RankAccumulator(std::size_t dimension)
    : dimension_(dimension), words_((dimension + 63) / 64), by_pivot_(dimension) {}

bool Gf2RankAccumulator::insert(std::span<const gf::Element> vec) {
  if (vec.size() != dimension_) {
    throw DimensionError(fmt::format("vector of length {} for GF(2) rank of dimension {}",
                                     vec.size(), dimension_));
  }
  std::vector<std::uint64_t> words(words_, 0);
  for (std::size_t j = 0; j < dimension_; ++j) {
    if (vec[j] & 1) words[j / 64] |= std::uint64_t(1) << (j % 64);
  }
  return insert_words(std::move(words));
}

bool Gf2RankAccumulator::insert_words(std::vector<std::uint64_t> words) {
  for (std::size_t w = 0; w < words_; ++w) {
    while (words[w] != 0) {
      std::size_t col = w * 64 + std::size_t(std::countr_zero(words[w]));
      auto& row = by_pivot_[col];
      if (row.empty()) {
        row = std::move(words);
        ++rank_;
        return true;
      }
      for (std::size_t k = w; k < words_; ++k) words[k] ^= row[k];
    }
  }
  return false;
}

std::size_t rank_of(const gf::Field& field, std::size_t n, std::span<const EncodingVector> vectors) {
  RrefBasis basis(field, n);
  for (const auto& v : vectors) basis.insert(v);
  return basis.rank();
}

}  // namespace micn
