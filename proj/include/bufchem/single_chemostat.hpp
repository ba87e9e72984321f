#pragma once

// Single perfectly mixed chemostat: phase-portrait classification and the
// washout audit for serial / parallel vessel networks.

#include <variant>
#include <vector>

#include "bufchem/kinetics.hpp"

namespace bufchem {

struct SingleParams {
  GrowthModel model;
  double S_in;
  double D;
};

/// Throws Validation unless S_in > 0 and D > 0.
void validate(const SingleParams& params);

enum class PortraitCase { Case1, Case2, Case3 };

enum class SingleTag { WashoutAttracting, WashoutSaddle, PositiveAttracting, PositiveSaddle };

struct SingleEquilibrium {
  double S;
  double X;
  SingleTag tag;
};

struct Portrait {
  PortraitCase kind;
  std::vector<SingleEquilibrium> equilibria;  // positive ones first, washout last
};

/// Throws Degenerate when S_in lies within 1e-9 of lambda- or lambda+.
Portrait classify_portrait(const SingleParams& params);

struct SerialTopology {
  std::vector<double> volume_fractions;
};

struct ParallelTopology {
  std::vector<double> volume_fractions;
  std::vector<double> flow_fractions;
};

using Topology = std::variant<SerialTopology, ParallelTopology>;

struct VesselFlag {
  double dilution;
  bool washout_attracting;
};

/// Per-vessel washout flags. Serial vessel i is checked at D/r_i with feed
/// S_in (the feed it sees once every upstream vessel is washed out);
/// parallel vessel i at (alpha_i/r_i) D.
std::vector<VesselFlag> network_washout_audit(const SingleParams& params,
                                              const Topology& topology);

}  // namespace bufchem
