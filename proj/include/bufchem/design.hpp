#pragma once

// Volume design for a bistable chemostat: enlarge the single tank
// (scenario 1) or add a buffer tank of volume V2 fed at rate D2 (scenario 2).

#include <vector>

#include "bufchem/buffered_core.hpp"
#include "bufchem/interval_set.hpp"
#include "bufchem/kinetics.hpp"

namespace bufchem {

/// Relative extra volume so that the enlarged tank is no longer bistable:
/// max(0, D / mu(S_in) - 1).
double min_extra_volume_scenario1(const GrowthModel& model, double S_in, double D);

/// (S_in - s)(D - mu(s)) for s in [0, S_in].
double design_varphi(const GrowthModel& model, double S_in, double D, double s);
/// mu(s)(S_in - s) for s in [0, S_in].
double design_psi(const GrowthModel& model, double S_in, double s);

class DesignReport {
 public:
  DesignReport(GrowthModel model, double S_in, double D);

  double delta_v_inf() const noexcept { return delta_v_inf_; }
  double v2_inf() const noexcept { return v2_inf_; }
  double d2_star() const noexcept { return d2_star_; }
  double s_bar() const noexcept { return s_bar_; }
  double varphi_max() const noexcept { return varphi_max_; }
  double psi_max() const noexcept { return psi_max_; }

  /// Buffer feed rates D2 in (0, mu(S_in)) with
  ///   max varphi < D2 v2 (S_in - lambda-(D2)) < D S_in  and  D2 v2 < D.
  IntervalSet d2_interval_for(double v2) const;

  /// Buffered configuration realising (v2, D2) on the original tank.
  BufferedConfig buffered_config(double v2, double D2) const;

 private:
  GrowthModel model_;
  double S_in_, D_;
  double delta_v_inf_ = 0.0, v2_inf_ = 0.0, d2_star_ = 0.0, s_bar_ = 0.0;
  double varphi_max_ = 0.0, psi_max_ = 0.0;
};

/// Requires Lambda(D) non-empty and lambda+(D) < S_in; throws
/// AssumptionViolated naming the failing clause.
DesignReport min_buffer_volume_scenario2(const GrowthModel& model, double S_in, double D);

struct DesignRow {
  double S_in;
  double delta_v_inf;
  double v2_inf;
};

/// Both scenarios over an S_in grid (each entry must satisfy the bistable
/// precondition).
std::vector<DesignRow> design_sweep(const GrowthModel& model, double D,
                                    const std::vector<double>& S_in_grid);

}  // namespace bufchem
