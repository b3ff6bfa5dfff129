#ifndef MICN_CONTENT_HPP
#define MICN_CONTENT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "micn/milic.hpp"
#include "micn/random.hpp"
#include "micn/rref.hpp"

namespace micn {

// n equally sized plaintext segments; coding never mixes generations.
struct Generation {
  std::string prefix;
  std::uint64_t id = 1;
  std::vector<Payload> segments;

  std::size_t size() const { return segments.size(); }
  std::size_t segment_size() const { return segments.empty() ? 0 : segments.front().size(); }

  static Generation random(std::string prefix, std::uint64_t id, std::size_t n,
                           std::size_t segment_size, Rng& rng);
};

// c~_{g,i} = sum_{j>=i} a_j c_{g,j}, with a in A_i.
struct CodedSegment {
  std::string prefix;
  std::uint64_t generation = 1;
  milic::SubsetIndex index = 1;
  EncodingVector vector;
  Payload payload;

  bool operator==(const CodedSegment&) const = default;
};

// Parsed forms of the name grammar
//   /<prefix>/micn/<g>/<i>                   interest for A_i
//   /<prefix>/micn/<g>/<i>/<a_i>,...,<a_n>   coded data
//   /<prefix>/<seg>                          plain NDN segment
struct InterestName {
  std::string prefix;
  std::uint64_t generation;
  milic::SubsetIndex index;
  bool operator==(const InterestName&) const = default;
};

struct DataName {
  std::string prefix;
  std::uint64_t generation;
  milic::SubsetIndex index;
  EncodingVector vector;  // full length n, zeros before index
  bool operator==(const DataName&) const = default;
};

struct PlainName {
  std::string prefix;
  std::uint64_t segment;
  bool operator==(const PlainName&) const = default;
};

using ParsedName = std::variant<InterestName, DataName, PlainName>;

class NameParseError : public std::invalid_argument {
 public:
  NameParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

std::string encode_name(const CodedSegment& seg);
std::string interest_name(std::string_view prefix, std::uint64_t generation, milic::SubsetIndex index);
std::string plain_name(std::string_view prefix, std::uint64_t segment);
ParsedName parse_name(std::string_view name);

// Coded segment drawn uniformly from A_i over a complete plaintext generation.
CodedSegment source_reply(const Generation& gen, milic::SubsetIndex i, const gf::Field& field, Rng& rng);

// Re-derives the payload a vector describes over the plaintext generation.
Payload combine_plaintext(const Generation& gen, std::span<const gf::Element> vector,
                          const gf::Field& field);

enum class Protocol { Ndn, NetCodCcn, Micn, MicnIc };

std::string_view protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

struct InterestPacket {
  std::string prefix;
  std::uint64_t generation = 1;
  // MILIC index for MICN variants, segment number for NDN, unused for NetCodCCN.
  std::size_t index = 0;
  std::uint64_t nonce = 0;
  std::optional<std::uint64_t> client_id;
  std::optional<std::vector<bool>> state;  // MICN-IC only; state[i-1] set iff A_i available
};

struct DataPacket {
  CodedSegment segment;
  // Plain NDN data; segment.vector is then the unit vector of the segment.
  bool plain = false;
};

std::string packet_name(const InterestPacket& pkt, Protocol protocol);
std::string packet_name(const DataPacket& pkt);

// 64-bit FNV-1a, used as the client identifier hash.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace micn

#endif  // MICN_CONTENT_HPP
