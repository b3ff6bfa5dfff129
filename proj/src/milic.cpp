#include "micn/milic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace micn::milic {

SubsetIndex subset_of(std::span<const gf::Element> vec) {
  auto lead = leading_column(vec);
  if (!lead) throw MilicError("the zero vector belongs to no MILIC subset");
  return *lead + 1;
}

EncodingVector sample_uniform(SubsetIndex i, std::size_t n, const gf::Field& field, Rng& rng) {
  if (i < 1 || i > n) throw MilicError(fmt::format("subset index {} outside 1..{}", i, n));
  EncodingVector v(n, 0);
  v[i - 1] = uniform_nonzero(field, rng);
  for (std::size_t j = i; j < n; ++j) v[j] = uniform_element(field, rng);
  return v;
}

BigInt cardinality(SubsetIndex i, std::size_t n, unsigned q) {
  if (i < 1 || i > n) throw MilicError(fmt::format("subset index {} outside 1..{}", i, n));
  BigInt out = q - 1;
  for (std::size_t j = i; j < n; ++j) out *= q;
  return out;
}

EncodingVector recombine_to_higher(std::span<const gf::Element> a1, std::span<const gf::Element> a2,
                                   const gf::Field& field, Rng& rng) {
  if (a1.size() != a2.size()) throw MilicError("vectors of different length");
  const SubsetIndex i = subset_of(a1);
  if (subset_of(a2) != i) {
    throw MilicError(fmt::format("vectors lie in A_{} and A_{}", i, subset_of(a2)));
  }
  const gf::Element c1 = uniform_nonzero(field, rng);
  // Characteristic 2: c2 = c1 * a1_i / a2_i cancels coordinate i.
  const gf::Element c2 = field.mul(c1, field.div(a1[i - 1], a2[i - 1]));
  EncodingVector b(a1.size(), 0);
  field.axpy(b, c1, a1);
  field.axpy(b, c2, a2);
  if (!leading_column(b)) throw MilicError("vectors are linearly dependent");
  return b;
}

namespace {

double one_minus_product(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;  // -expm1(0) would be -0
  double log_sum = 0.0;
  for (double t : terms) {
    if (t >= 1.0) return 1.0;
    log_sum += std::log1p(-t);
  }
  return -std::expm1(log_sum);
}

}  // namespace

double prob_fail_single(std::size_t l, std::size_t k, std::size_t n, unsigned q) {
  if (k < 1 || k > n || l < 1 || l > n - k + 1 || q < 2) {
    throw MilicError(fmt::format("invalid single-subset query l={} k={} n={} q={}", l, k, n, q));
  }
  const double log_q = std::log(double(q));
  std::vector<double> terms;
  for (std::size_t j = 2; j <= l; ++j) {
    // (q^(j-1) - 1) / ((q-1) q^(n-k)), in logs
    const double m = double(j - 1);
    const double log_num = m * log_q + std::log1p(-std::exp(-m * log_q));
    terms.push_back(std::exp(log_num - std::log(double(q - 1)) - double(n - k) * log_q));
  }
  return one_minus_product(terms);
}

double prob_fail_multi(std::size_t l, std::size_t k, std::size_t n, unsigned q) {
  if (k < 1 || l < 1 || l * k > n || q < 2) {
    throw MilicError(fmt::format("invalid multi-subset query l={} k={} n={} q={}", l, k, n, q));
  }
  const double log_q = std::log(double(q));
  std::vector<double> terms;
  for (std::size_t j = 1; j <= (l - 1) * k; ++j) {
    terms.push_back(std::exp((double(j) - 1.0 - double(n - k)) * log_q));
  }
  return one_minus_product(terms);
}

namespace {

bool trial_gf2(const std::vector<SubsetIndex>& subsets, std::size_t per_subset, std::size_t n,
               Rng& rng) {
  Gf2RankAccumulator acc(n);
  const std::size_t words = acc.words_per_row();
  for (SubsetIndex i : subsets) {
    const std::size_t lead = i - 1;
    for (std::size_t r = 0; r < per_subset; ++r) {
      std::vector<std::uint64_t> row(words);
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = rng();
        const std::size_t lo = w * 64;
        const std::size_t valid = std::min<std::size_t>(64, n - lo);
        if (valid < 64) bits &= (std::uint64_t(1) << valid) - 1;
        // columns before the leading one are zero
        if (lead >= lo + 64) bits = 0;
        else if (lead > lo) bits &= ~std::uint64_t(0) << (lead - lo);
        row[w] = bits;
      }
      row[lead / 64] |= std::uint64_t(1) << (lead % 64);
      if (!acc.insert_words(std::move(row))) return false;
    }
  }
  return true;
}

bool trial_general(const std::vector<SubsetIndex>& subsets, std::size_t per_subset, std::size_t n,
                   const gf::Field& field, Rng& rng) {
  RrefBasis basis(field, n);
  for (SubsetIndex i : subsets) {
    for (std::size_t r = 0; r < per_subset; ++r) {
      if (!basis.insert(sample_uniform(i, n, field, rng))) return false;
    }
  }
  return true;
}

}  // namespace

MonteCarloEstimate prob_fail_monte_carlo(const RankFailureQuery& query, std::size_t trials, Rng& rng) {
  if (trials < 1) throw MilicError("at least one trial is required");
  std::vector<SubsetIndex> subsets = query.subset_list;
  if (subsets.empty()) {
    for (SubsetIndex i = 1; i <= query.subsets; ++i) subsets.push_back(i);
  }
  if (query.per_subset < 1 || query.per_subset * subsets.size() > query.n) {
    throw MilicError(fmt::format("l*k = {} exceeds n = {}", query.per_subset * subsets.size(), query.n));
  }
  for (SubsetIndex i : subsets) {
    if (i < 1 || i > query.n) throw MilicError(fmt::format("subset index {} outside 1..{}", i, query.n));
  }
  const gf::Field& field = gf::Field::of_order(query.q);

  MonteCarloEstimate out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    bool independent = query.q == 2 ? trial_gf2(subsets, query.per_subset, query.n, rng)
                                    : trial_general(subsets, query.per_subset, query.n, field, rng);
    if (!independent) ++out.failures;
  }
  out.estimate = double(out.failures) / double(trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / double(trials));
  return out;
}

}  // namespace micn::milic
