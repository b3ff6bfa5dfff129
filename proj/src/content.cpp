#include "micn/content.hpp"

#include <charconv>

#include <fmt/format.h>

namespace micn {

Generation Generation::random(std::string prefix, std::uint64_t id, std::size_t n,
                              std::size_t segment_size, Rng& rng) {
  Generation gen{std::move(prefix), id, {}};
  gen.segments.resize(n, Payload(segment_size));
  for (auto& seg : gen.segments) {
    for (auto& b : seg) b = std::uint8_t(rng() & 0xFF);
  }
  return gen;
}

NameParseError::NameParseError(const std::string& what, std::size_t position)
    : std::invalid_argument(fmt::format("{} at position {}", what, position)), position_(position) {}

std::string encode_name(const CodedSegment& seg) {
  std::string out = fmt::format("{}/micn/{}/{}/", seg.prefix, seg.generation, seg.index);
  for (std::size_t j = seg.index - 1; j < seg.vector.size(); ++j) {
    if (j + 1 > seg.index) out += ',';
    out += std::to_string(unsigned(seg.vector[j]));
  }
  return out;
}

std::string interest_name(std::string_view prefix, std::uint64_t generation, milic::SubsetIndex index) {
  return fmt::format("{}/micn/{}/{}", prefix, generation, index);
}

std::string plain_name(std::string_view prefix, std::uint64_t segment) {
  return fmt::format("{}/{}", prefix, segment);
}

namespace {

struct Component {
  std::string_view text;
  std::size_t position;
};

std::uint64_t parse_number(const Component& c, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(c.text.data(), c.text.data() + c.text.size(), value);
  if (ec != std::errc() || ptr != c.text.data() + c.text.size() || c.text.empty()) {
    throw NameParseError(fmt::format("expected {} but found '{}'", what, c.text), c.position);
  }
  return value;
}

}  // namespace

ParsedName parse_name(std::string_view name) {
  if (name.empty() || name.front() != '/') throw NameParseError("name must start with '/'", 0);
  std::vector<Component> parts;
  std::size_t pos = 1;
  while (pos <= name.size()) {
    std::size_t end = name.find('/', pos);
    if (end == std::string_view::npos) end = name.size();
    if (end == pos) throw NameParseError("empty name component", pos);
    parts.push_back({name.substr(pos, end - pos), pos});
    pos = end + 1;
  }

  std::size_t marker = parts.size();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].text == "micn") {
      marker = k;
      break;
    }
  }

  auto prefix_of = [&](std::size_t count) {
    if (count == 0) return std::string();
    std::size_t end = parts[count - 1].position + parts[count - 1].text.size();
    return std::string(name.substr(0, end));
  };

  if (marker == parts.size()) {
    if (parts.size() < 2) throw NameParseError("plain name needs a prefix and a segment", 0);
    return PlainName{prefix_of(parts.size() - 1), parse_number(parts.back(), "segment number")};
  }
  if (marker == 0) throw NameParseError("missing prefix before 'micn'", parts[0].position);
  const std::size_t rest = parts.size() - marker - 1;
  if (rest < 2) throw NameParseError("expected <g>/<i> after 'micn'", name.size());
  if (rest > 3) throw NameParseError("trailing components", parts[marker + 4].position);

  const std::uint64_t g = parse_number(parts[marker + 1], "generation id");
  const std::uint64_t i = parse_number(parts[marker + 2], "subset index");
  if (i == 0) throw NameParseError("subset index must be >= 1", parts[marker + 2].position);
  std::string prefix = prefix_of(marker);
  if (rest == 2) return InterestName{std::move(prefix), g, i};

  const Component& coeffs = parts[marker + 3];
  EncodingVector vec(i - 1, 0);
  std::size_t p = 0;
  while (p <= coeffs.text.size()) {
    std::size_t end = coeffs.text.find(',', p);
    if (end == std::string_view::npos) end = coeffs.text.size();
    Component c{coeffs.text.substr(p, end - p), coeffs.position + p};
    std::uint64_t value = parse_number(c, "coefficient");
    if (value > 255) throw NameParseError("coefficient exceeds 255", c.position);
    vec.push_back(gf::Element(value));
    p = end + 1;
  }
  if (vec[i - 1] == 0) {
    throw NameParseError("leading coefficient must be nonzero", coeffs.position);
  }
  return DataName{std::move(prefix), g, i, std::move(vec)};
}

Payload combine_plaintext(const Generation& gen, std::span<const gf::Element> vector,
                          const gf::Field& field) {
  Payload out(gen.segment_size(), 0);
  for (std::size_t j = 0; j < vector.size(); ++j) field.axpy(out, vector[j], gen.segments[j]);
  return out;
}

CodedSegment source_reply(const Generation& gen, milic::SubsetIndex i, const gf::Field& field, Rng& rng) {
  CodedSegment seg;
  seg.prefix = gen.prefix;
  seg.generation = gen.id;
  seg.index = i;
  seg.vector = milic::sample_uniform(i, gen.size(), field, rng);
  seg.payload = combine_plaintext(gen, seg.vector, field);
  return seg;
}

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Ndn: return "ndn";
    case Protocol::NetCodCcn: return "netcodccn";
    case Protocol::Micn: return "micn";
    case Protocol::MicnIc: return "micn-ic";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::Ndn, Protocol::NetCodCcn, Protocol::Micn, Protocol::MicnIc}) {
    if (protocol_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string packet_name(const InterestPacket& pkt, Protocol protocol) {
  switch (protocol) {
    case Protocol::Ndn: return plain_name(pkt.prefix, pkt.index);
    case Protocol::NetCodCcn: return fmt::format("{}/micn/{}", pkt.prefix, pkt.generation);
    default: return interest_name(pkt.prefix, pkt.generation, pkt.index);
  }
}

std::string packet_name(const DataPacket& pkt) {
  if (pkt.plain) return plain_name(pkt.segment.prefix, pkt.segment.index);
  return encode_name(pkt.segment);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace micn
