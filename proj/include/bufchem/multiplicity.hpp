#pragma once

// Multiplicity of positive equilibria in the (alpha, r) plane: tangency
// abscissas, the uniqueness bound r_bar(alpha) and the stable-configuration
// domain curve with its jump at ul-alpha.

#include <optional>
#include <utility>
#include <vector>

#include "bufchem/buffered_core.hpp"
#include "bufchem/kinetics.hpp"

namespace bufchem {

enum class MultiplicityCase { CaseI, CaseII_sub1, CaseII_sub2, CaseII_sub3 };

/// Closed range [lo, hi] of r values.
using RRange = std::pair<double, double>;

struct MultiplicityReport {
  MultiplicityCase kind;
  std::optional<double> r_plus_min;        // Case II
  std::optional<RRange> r_minus_interval;  // Case II, extrema of gamma off the main interval
  std::optional<RRange> r_alpha_interval;  // Case I
  double r_bar;                            // sup of the uniqueness set
  double r_safe;  // sup of the uniqueness interval starting at 0 (<= r_bar)
  bool uniqueness_set_empty = false;
};

MultiplicityCase classify_case(const GrowthModel& model, double S_in, double D, double alpha);

/// Abscissas where gamma has a local extremum with gamma(s) = r within 1e-9.
std::vector<double> tangency_abscissas(const BufferedConfig& cfg);

MultiplicityReport r_bar(const GrowthModel& model, double S_in, double D, double alpha);

/// Independent route: minimises the tangency defect over (r, s) by multi-start
/// Levenberg-Marquardt. Throws NoTangency outside Case II or when the residual
/// minimum exceeds 1e-12.
double r_bar_crosscheck(const GrowthModel& model, double S_in, double D, double alpha);

/// Alpha where ul-S(alpha) = lambda+(D), searched on (0, mu(S_in)/D);
/// nullopt when lambda+(D) >= S_in or no crossing exists.
std::optional<double> locate_ul_alpha(const GrowthModel& model, double S_in, double D);

struct DomainPoint {
  double alpha;
  double r_bar;
};

struct DomainCurve {
  std::vector<DomainPoint> points;
  std::optional<double> ul_alpha;
  std::optional<std::pair<double, double>> jump;  // r_bar at ul-alpha -+ 1e-4
};

DomainCurve stable_domain_curve(const GrowthModel& model, double S_in, double D,
                                const std::vector<double>& alpha_grid);

}  // namespace bufchem
