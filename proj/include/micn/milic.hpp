#ifndef MICN_MILIC_HPP
#define MICN_MILIC_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "micn/random.hpp"
#include "micn/rref.hpp"

// MILIC subsets: A_i holds the nonzero vectors of GF(q)^n whose first nonzero
// coordinate sits at position i (1-based). The A_i partition GF(q)^n \ {0}.
namespace micn::milic {

using SubsetIndex = std::size_t;  // 1-based
using BigInt = boost::multiprecision::cpp_int;

class MilicError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

SubsetIndex subset_of(std::span<const gf::Element> vec);

// Uniform draw from A_i.
EncodingVector sample_uniform(SubsetIndex i, std::size_t n, const gf::Field& field, Rng& rng);

// |A_i| = (q-1) q^(n-i)
BigInt cardinality(SubsetIndex i, std::size_t n, unsigned q);

// Combines two independent members of the same A_i into a member of some A_k,
// k > i: b = c1*a1 + c2*a2 with c1 uniform on F_q^* and c2 cancelling
// coordinate i.
EncodingVector recombine_to_higher(std::span<const gf::Element> a1, std::span<const gf::Element> a2,
                                   const gf::Field& field, Rng& rng);

// Probability that l uniform draws from A_k are linearly dependent.
double prob_fail_single(std::size_t l, std::size_t k, std::size_t n, unsigned q);

// Probability that l uniform draws from each of A_1..A_k have rank below l*k.
double prob_fail_multi(std::size_t l, std::size_t k, std::size_t n, unsigned q);

struct RankFailureQuery {
  std::size_t per_subset = 1;  // l
  std::size_t subsets = 1;     // k
  std::size_t n = 1;
  unsigned q = 2;
  // Optional explicit subset list; empty means A_1..A_k.
  std::vector<SubsetIndex> subset_list{};
};

struct MonteCarloEstimate {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // binomial, from the estimate
};

MonteCarloEstimate prob_fail_monte_carlo(const RankFailureQuery& query, std::size_t trials, Rng& rng);

}  // namespace micn::milic

#endif  // MICN_MILIC_HPP
