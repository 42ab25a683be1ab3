#include "depthseg/detector.hpp"

namespace depthseg {

std::string_view to_string(Adjust adjust) {
  switch (adjust) {
    case Adjust::None: return "none";
    case Adjust::Bonferroni: return "bonferroni";
    case Adjust::BH: return "bh";
  }
  return "unknown";
}

std::string_view to_string(Selection selection) {
  switch (selection) {
    case Selection::FixedThreshold: return "threshold";
    case Selection::SIC: return "sic";
    case Selection::Penalty: return "penalty";
  }
  return "unknown";
}

std::optional<Adjust> parse_adjust(std::string_view name) {
  if (name == "none") return Adjust::None;
  if (name == "bonferroni") return Adjust::Bonferroni;
  if (name == "bh") return Adjust::BH;
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finaliser over the combined words.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DepthOptions DetectorConfig::depth_options() const {
  DepthOptions opts;
  opts.halfspace.directions = halfspace_directions;
  opts.halfspace.seed = derive_seed(seed, 1);
  opts.mcd.seed = derive_seed(seed, 2);
  opts.mcd.starts = mcd_starts;
  return opts;
}

std::vector<std::size_t> ChangePointResult::indices() const {
  std::vector<std::size_t> out;
  out.reserve(changes.size());
  for (const auto& c : changes) out.push_back(c.k);
  return out;
}

}  // namespace depthseg
