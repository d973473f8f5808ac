#include "pathogen/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pathogen {

bool is_spatial(ModelId model) {
  switch (model) {
    case ModelId::S1:
    case ModelId::S2:
    case ModelId::S3:
      return true;
    default:
      return false;
  }
}

std::string to_string(ModelId model) {
  switch (model) {
    case ModelId::M1: return "m1";
    case ModelId::M2: return "m2";
    case ModelId::M3: return "m3";
    case ModelId::S1: return "s1";
    case ModelId::S2: return "s2";
    case ModelId::S3: return "s3";
  }
  return "?";
}

std::optional<ModelId> parse_model(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "m1") return ModelId::M1;
  if (s == "m2") return ModelId::M2;
  if (s == "m3") return ModelId::M3;
  if (s == "s1") return ModelId::S1;
  if (s == "s2") return ModelId::S2;
  if (s == "s3") return ModelId::S3;
  return std::nullopt;
}

void StopRule::validate() const {
  if (max_population == 0) throw std::invalid_argument("max_population must be positive");
  if (!(max_time > 0.0) || !std::isfinite(max_time))
    throw std::invalid_argument("max_time must be positive and finite");
  if (max_events == 0) throw std::invalid_argument("max_events must be positive");
}

void SimParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must lie in [0, 1]");
  if (spatial()) {
    if (!dim.has_value())
      throw std::invalid_argument("spatial models require a lattice dimension");
    if (*dim < 1 || *dim > kMaxDim)
      throw std::invalid_argument("dim must lie in [1, " + std::to_string(kMaxDim) + "]");
  } else if (dim.has_value()) {
    throw std::invalid_argument("non-spatial models do not take a lattice dimension");
  }
  stop.validate();
}

}  // namespace pathogen
