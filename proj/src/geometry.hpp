#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "problems.hpp"
#include "rng.hpp"
#include "table.hpp"

namespace stablab {

// Sampling region for parameter-space scans: a centered ball or an interval
// applied to every coordinate.
struct Region {
  enum class Kind { ball, interval };
  Kind kind = Kind::ball;
  double radius = 2.0;   // ball
  Vec center;            // ball; empty means the origin
  double lo = -2.0, hi = 3.0;  // interval

  static Region ball(double radius, Vec center = Vec());
  static Region interval(double lo, double hi);
  std::string describe() const;
};

// Deterministic sample source: either a uniform lattice (interval regions,
// one dimension) or seeded uniform draws.  Iteration order is fixed, so
// every reduction over samples is reproducible.
class RegionSampler {
public:
  RegionSampler(Region region, long count, std::uint64_t seed, bool grid = false);

  long count() const { return count_; }
  std::uint64_t seed() const { return seed_; }
  const Region& region() const { return region_; }
  bool grid() const { return grid_; }
  std::string describe() const;

  void for_each(int dim, const std::function<void(const Vec&)>& f) const;

private:
  Region region_;
  long count_;
  std::uint64_t seed_;
  bool grid_;
};

struct GeometryEstimate {
  std::string quantity;
  double value = 0.0;
  Vec witness;            // sample attaining the extremum
  long samples_used = 0;
  long samples_excluded = 0;
  std::uint64_t seed = 0;
  std::string region;
  double f_star = 0.0;
  bool f_star_used = false;
  bool f_star_empirical = false;
};

struct FStar {
  double value;
  bool empirical;  // true when found by multistart descent rather than an oracle
};

// Oracle value when the problem provides one, otherwise the best of 32
// descent runs started across the region.  Empirical values are flagged in
// every downstream report.
FStar resolve_f_star(const Problem& p, const Dataset& S, const Region& region,
                     std::uint64_t seed);

// max ||grad f_S|| over samples
GeometryEstimate estimate_lipschitz(const Problem& p, const Dataset& S,
                                    const RegionSampler& sampler);
// max gradient difference quotient over consecutive sample pairs
GeometryEstimate estimate_smoothness(const Problem& p, const Dataset& S,
                                     const RegionSampler& sampler);
// min of 0.5 ||grad f_S||^2 / (f_S - f*) over samples clear of the optimum
GeometryEstimate estimate_pl(const Problem& p, const Dataset& S,
                             const RegionSampler& sampler,
                             std::optional<double> f_star = std::nullopt);
// min of 2 (f_S - f*) / dist^2 to the minimizer set; needs a projection oracle
GeometryEstimate estimate_qg(const Problem& p, const Dataset& S,
                             const RegionSampler& sampler,
                             std::optional<double> f_star = std::nullopt);
// min of ||grad f_S|| / dist to the minimizer set; same oracle requirement
GeometryEstimate estimate_error_bound(const Problem& p, const Dataset& S,
                                      const RegionSampler& sampler);

struct GradCheckReport {
  double max_rel_err = 0.0;
  long checked = 0;
  long excluded = 0;
  bool pass = true;
  double tol = 1e-6;
  Vec worst_w;
  long worst_example = -1;
};

// Central finite differences against the analytic gradient for every sampled
// parameter point crossed with the dataset's examples.  Points adjacent to a
// kink are excluded and counted.
GradCheckReport grad_check(const Problem& p, const Dataset& S,
                           const RegionSampler& sampler, double tol = 1e-6);

Table geometry_table(const GeometryEstimate& e);
Table grad_check_table(const GradCheckReport& r);

}  // namespace stablab
