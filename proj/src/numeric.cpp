#include "fwlab/numeric.hpp"

#include <charconv>
#include <cmath>

namespace fwlab {

namespace {

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::floor(bits * std::log10(2.0)));
}

}  // namespace

PrecisionMode PrecisionMode::ExtendedBits(unsigned bits) {
  if (bits < kMinExtendedBits) {
    throw DomainError("extended precision needs at least " + std::to_string(kMinExtendedBits) +
                      " significand bits");
  }
  return {Kind::kExtended, bits};
}

PrecisionMode PrecisionMode::Parse(std::string_view text) {
  if (text == "double") return Double();
  constexpr std::string_view kPrefix = "extended";
  if (text.substr(0, kPrefix.size()) != kPrefix) {
    throw DomainError("precision must be 'double' or 'extended:<bits>'");
  }
  std::string_view rest = text.substr(kPrefix.size());
  if (rest.empty()) return ExtendedBits();
  if (rest.front() != ':') throw DomainError("precision must be 'double' or 'extended:<bits>'");
  rest.remove_prefix(1);
  unsigned bits = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), bits);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) {
    throw DomainError("invalid bit count in precision '" + std::string(text) + "'");
  }
  return ExtendedBits(bits);
}

std::string PrecisionMode::ToString() const {
  if (kind == Kind::kDouble) return "double";
  return "extended:" + std::to_string(bits);
}

ExtendedPrecisionScope::ExtendedPrecisionScope(unsigned bits)
    : saved_digits10_(Extended::default_precision()) {
  Extended::default_precision(bits_to_digits10(bits));
}

ExtendedPrecisionScope::~ExtendedPrecisionScope() { Extended::default_precision(saved_digits10_); }

}  // namespace fwlab
