#include "bufchem/single_chemostat.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bufchem/error.hpp"

namespace bufchem {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kFractionTol = 1e-9;

void check_fractions(const std::vector<double>& f, const char* what) {
  if (f.empty()) throw Error(ErrorKind::Validation, std::string(what) + " must not be empty");
  for (double v : f) {
    if (!(v > 0.0)) throw Error(ErrorKind::Validation, std::string(what) + " must be positive");
  }
  const double sum = std::accumulate(f.begin(), f.end(), 0.0);
  if (std::abs(sum - 1.0) > kFractionTol) {
    throw Error(ErrorKind::Validation, std::string(what) + " must sum to 1");
  }
}

bool washout_attracting(const GrowthModel& model, double S_in, double dilution) {
  const auto lam = lambda_interval(model, dilution);
  return !(lam && lam->contains(S_in));
}

}  // namespace

void validate(const SingleParams& params) {
  if (!(params.S_in > 0.0)) throw Error(ErrorKind::Validation, "S_in must be > 0");
  if (!(params.D > 0.0)) throw Error(ErrorKind::Validation, "D must be > 0");
}

Portrait classify_portrait(const SingleParams& params) {
  validate(params);
  const double S_in = params.S_in;
  const auto lam = lambda_interval(params.model, params.D);

  Portrait out{};
  if (!lam || lam->lower >= S_in + kBoundaryTol) {
    out.kind = PortraitCase::Case1;
    out.equilibria.push_back({S_in, 0.0, SingleTag::WashoutAttracting});
    return out;
  }
  if (std::abs(S_in - lam->lower) <= kBoundaryTol) {
    throw Error(ErrorKind::Degenerate, "S_in coincides with lambda-(D)");
  }
  if (lam->upper && std::abs(S_in - *lam->upper) <= kBoundaryTol) {
    throw Error(ErrorKind::Degenerate, "S_in coincides with lambda+(D)");
  }

  out.equilibria.push_back({lam->lower, S_in - lam->lower, SingleTag::PositiveAttracting});
  if (lam->upper && S_in > *lam->upper) {
    out.kind = PortraitCase::Case2;
    out.equilibria.push_back({*lam->upper, S_in - *lam->upper, SingleTag::PositiveSaddle});
    out.equilibria.push_back({S_in, 0.0, SingleTag::WashoutAttracting});
  } else {
    out.kind = PortraitCase::Case3;
    out.equilibria.push_back({S_in, 0.0, SingleTag::WashoutSaddle});
  }
  return out;
}

std::vector<VesselFlag> network_washout_audit(const SingleParams& params,
                                              const Topology& topology) {
  validate(params);
  std::vector<VesselFlag> flags;
  if (const auto* serial = std::get_if<SerialTopology>(&topology)) {
    check_fractions(serial->volume_fractions, "volume_fractions");
    for (double r : serial->volume_fractions) {
      const double Di = params.D / r;
      flags.push_back({Di, washout_attracting(params.model, params.S_in, Di)});
    }
    return flags;
  }
  const auto& par = std::get<ParallelTopology>(topology);
  check_fractions(par.volume_fractions, "volume_fractions");
  check_fractions(par.flow_fractions, "flow_fractions");
  if (par.volume_fractions.size() != par.flow_fractions.size()) {
    throw Error(ErrorKind::Validation, "volume_fractions and flow_fractions differ in length");
  }
  for (std::size_t i = 0; i < par.volume_fractions.size(); ++i) {
    const double Di = par.flow_fractions[i] / par.volume_fractions[i] * params.D;
    flags.push_back({Di, washout_attracting(params.model, params.S_in, Di)});
  }
  return flags;
}

}  // namespace bufchem
