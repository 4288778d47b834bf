#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "optim.hpp"

namespace stablab {

Region Region::ball(double radius, Vec center) {
  if (!(radius > 0.0)) throw std::invalid_argument("Region: radius must be positive");
  Region r;
  r.kind = Kind::ball;
  r.radius = radius;
  r.center = std::move(center);
  return r;
}

Region Region::interval(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("Region: need lo < hi");
  Region r;
  r.kind = Kind::interval;
  r.lo = lo;
  r.hi = hi;
  return r;
}

std::string Region::describe() const {
  std::ostringstream os;
  if (kind == Kind::ball) {
    os << "ball(r=" << radius;
    if (center.size() > 0) os << ", centered";
    os << ")";
  } else {
    os << "interval[" << lo << "," << hi << "]";
  }
  return os.str();
}

RegionSampler::RegionSampler(Region region, long count, std::uint64_t seed, bool grid)
    : region_(std::move(region)), count_(count), seed_(seed), grid_(grid) {
  if (count_ < 1) throw std::invalid_argument("RegionSampler: count must be positive");
  if (grid_ && region_.kind != Region::Kind::interval)
    throw std::invalid_argument("RegionSampler: grid mode needs an interval region");
}

std::string RegionSampler::describe() const {
  std::ostringstream os;
  os << region_.describe() << (grid_ ? " grid " : " random ") << "N=" << count_;
  return os.str();
}

void RegionSampler::for_each(int dim, const std::function<void(const Vec&)>& f) const {
  if (dim < 1) throw std::invalid_argument("RegionSampler: dimension must be positive");
  if (grid_) {
    if (dim != 1)
      throw std::invalid_argument("RegionSampler: grid mode is one-dimensional");
    Vec w(1);
    for (long i = 0; i < count_; ++i) {
      const double t = count_ == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count_ - 1);
      w[0] = region_.lo + (region_.hi - region_.lo) * t;
      f(w);
    }
    return;
  }
  Rng rng(seed_);
  Vec w(dim);
  for (long i = 0; i < count_; ++i) {
    if (region_.kind == Region::Kind::interval) {
      for (int j = 0; j < dim; ++j) w[j] = rng.uniform(region_.lo, region_.hi);
    } else {
      for (int j = 0; j < dim; ++j) w[j] = rng.normal();
      const double norm = w.norm();
      const double r = region_.radius *
          std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
      w = norm > 0.0 ? Vec((r / norm) * w) : Vec::Zero(dim).eval();
      if (region_.center.size() == dim) w += region_.center;
    }
    f(w);
  }
}

FStar resolve_f_star(const Problem& p, const Dataset& S, const Region& region,
                     std::uint64_t seed) {
  if (auto v = p.optimal_value(S)) return {*v, false};

  // Multistart descent: a conservative step from a coarse smoothness probe,
  // 32 starts across the region, keep the best terminal value.
  RegionSampler probe(region, 64, Rng::mix(seed, 101));
  double beta = 0.0;
  Vec prev;
  Vec gprev;
  probe.for_each(p.dim(), [&](const Vec& w) {
    if (p.near_kink(w)) return;
    Vec g = p.empirical_grad(w, S);
    if (prev.size() > 0) {
      const double dw = (w - prev).norm();
      if (dw > 1e-12) beta = std::max(beta, (g - gprev).norm() / dw);
    }
    prev = w;
    gprev = g;
  });
  if (!(beta > 0.0)) beta = 1.0;
  const double gamma = 1.0 / (2.0 * beta);

  double best = std::numeric_limits<double>::infinity();
  RegionSampler starts(region, 32, Rng::mix(seed, 202));
  RunConfig cfg;
  cfg.alg = Algorithm::gd;
  cfg.iters = 2000;
  cfg.schedule = StepSchedule::constant(gamma);
  cfg.iterate_budget = 0;  // thin
  starts.for_each(p.dim(), [&](const Vec& w0) {
    Trajectory t = run(p, S, cfg, w0);
    if (t.diverged()) return;
    best = std::min(best, t.risks.back());
  });
  if (!std::isfinite(best))
    throw std::runtime_error("resolve_f_star: every descent start diverged");
  return {best, true};
}

namespace {

GeometryEstimate base_estimate(const std::string& quantity, const RegionSampler& s) {
  GeometryEstimate e;
  e.quantity = quantity;
  e.seed = s.seed();
  e.region = s.describe();
  return e;
}

void attach_f_star(GeometryEstimate& e, const Problem& p, const Dataset& S,
                   const RegionSampler& s, std::optional<double> given) {
  e.f_star_used = true;
  if (given) {
    e.f_star = *given;
    e.f_star_empirical = false;
    return;
  }
  FStar fs = resolve_f_star(p, S, s.region(), s.seed());
  e.f_star = fs.value;
  e.f_star_empirical = fs.empirical;
}

}  // namespace

GeometryEstimate estimate_lipschitz(const Problem& p, const Dataset& S,
                                    const RegionSampler& sampler) {
  GeometryEstimate e = base_estimate("lipschitz", sampler);
  sampler.for_each(p.dim(), [&](const Vec& w) {
    if (p.near_kink(w)) {
      ++e.samples_excluded;
      return;
    }
    const double g = p.empirical_grad(w, S).norm();
    if (g > e.value) {
      e.value = g;
      e.witness = w;
    }
    ++e.samples_used;
  });
  return e;
}

GeometryEstimate estimate_smoothness(const Problem& p, const Dataset& S,
                                     const RegionSampler& sampler) {
  GeometryEstimate e = base_estimate("smoothness", sampler);
  Vec prev, gprev;
  sampler.for_each(p.dim(), [&](const Vec& w) {
    if (p.near_kink(w)) {
      ++e.samples_excluded;
      return;
    }
    Vec g = p.empirical_grad(w, S);
    if (prev.size() > 0) {
      const double dw = (w - prev).norm();
      if (dw > 1e-12) {
        const double q = (g - gprev).norm() / dw;
        if (q > e.value) {
          e.value = q;
          e.witness = w;
        }
        ++e.samples_used;
      }
    }
    prev = w;
    gprev = g;
  });
  return e;
}

GeometryEstimate estimate_pl(const Problem& p, const Dataset& S,
                             const RegionSampler& sampler,
                             std::optional<double> f_star) {
  GeometryEstimate e = base_estimate("pl", sampler);
  attach_f_star(e, p, S, sampler, f_star);
  e.value = std::numeric_limits<double>::infinity();
  sampler.for_each(p.dim(), [&](const Vec& w) {
    if (p.near_kink(w)) {
      ++e.samples_excluded;
      return;
    }
    const double gap = p.empirical_risk(w, S) - e.f_star;
    if (gap <= 1e-10) {  // suboptimality below resolution, ratio undefined
      ++e.samples_excluded;
      return;
    }
    const double g2 = p.empirical_grad(w, S).squaredNorm();
    const double ratio = 0.5 * g2 / gap;
    if (ratio < e.value) {
      e.value = ratio;
      e.witness = w;
    }
    ++e.samples_used;
  });
  if (e.samples_used == 0) e.value = 0.0;
  return e;
}

GeometryEstimate estimate_qg(const Problem& p, const Dataset& S,
                             const RegionSampler& sampler,
                             std::optional<double> f_star) {
  GeometryEstimate e = base_estimate("qg", sampler);
  attach_f_star(e, p, S, sampler, f_star);
  e.value = std::numeric_limits<double>::infinity();
  bool oracle_missing = false;
  sampler.for_each(p.dim(), [&](const Vec& w) {
    if (oracle_missing) return;
    if (p.near_kink(w)) {
      ++e.samples_excluded;
      return;
    }
    auto proj = p.project_to_minimizers(w, S);
    if (!proj) {
      oracle_missing = true;
      return;
    }
    const double dist2 = (w - *proj).squaredNorm();
    if (dist2 <= 1e-20) {
      ++e.samples_excluded;
      return;
    }
    const double gap = p.empirical_risk(w, S) - e.f_star;
    const double ratio = 2.0 * gap / dist2;
    if (ratio < e.value) {
      e.value = ratio;
      e.witness = w;
    }
    ++e.samples_used;
  });
  if (oracle_missing)
    throw UnsupportedError("estimate_qg: " + p.kind() +
                           " offers no minimizer-set projection for this dataset");
  if (e.samples_used == 0) e.value = 0.0;
  return e;
}

GeometryEstimate estimate_error_bound(const Problem& p, const Dataset& S,
                                      const RegionSampler& sampler) {
  GeometryEstimate e = base_estimate("error-bound", sampler);
  e.value = std::numeric_limits<double>::infinity();
  bool oracle_missing = false;
  sampler.for_each(p.dim(), [&](const Vec& w) {
    if (oracle_missing) return;
    if (p.near_kink(w)) {
      ++e.samples_excluded;
      return;
    }
    auto proj = p.project_to_minimizers(w, S);
    if (!proj) {
      oracle_missing = true;
      return;
    }
    const double dist = (w - *proj).norm();
    if (dist <= 1e-10) {
      ++e.samples_excluded;
      return;
    }
    const double ratio = p.empirical_grad(w, S).norm() / dist;
    if (ratio < e.value) {
      e.value = ratio;
      e.witness = w;
    }
    ++e.samples_used;
  });
  if (oracle_missing)
    throw UnsupportedError("estimate_error_bound: " + p.kind() +
                           " offers no minimizer-set projection for this dataset");
  if (e.samples_used == 0) e.value = 0.0;
  return e;
}

GradCheckReport grad_check(const Problem& p, const Dataset& S,
                           const RegionSampler& sampler, double tol) {
  GradCheckReport r;
  r.tol = tol;
  const int d = p.dim();
  // cap the example cross product for large datasets, evenly strided
  const std::size_t n = S.size();
  const std::size_t stride = n <= 32 ? 1 : n / 32;

  sampler.for_each(d, [&](const Vec& w) {
    for (std::size_t i = 0; i < n; i += stride) {
      const Example& z = S[i];
      bool kink = p.loss_kink_at(w, z);
      Vec fd(d);
      if (!kink) {
        for (int j = 0; j < d && !kink; ++j) {
          const double h = 1e-5 * std::max(1.0, std::abs(w[j]));
          Vec wp = w, wm = w;
          wp[j] += h;
          wm[j] -= h;
          if (p.loss_kink_at(wp, z) || p.loss_kink_at(wm, z)) {
            kink = true;
            break;
          }
          fd[j] = (p.loss(wp, z) - p.loss(wm, z)) / (2.0 * h);
        }
      }
      if (kink) {
        ++r.excluded;
        continue;
      }
      const Vec g = p.grad_loss(w, z);
      const double rel = (fd - g).norm() / std::max(1.0, g.norm());
      if (rel > r.max_rel_err) {
        r.max_rel_err = rel;
        r.worst_w = w;
        r.worst_example = static_cast<long>(i);
      }
      ++r.checked;
    }
  });
  r.pass = r.max_rel_err <= tol && r.checked > 0;
  return r;
}

namespace {

std::string join_vec(const Vec& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << Table::fmt(v[i]);
  }
  return os.str();
}

}  // namespace

Table geometry_table(const GeometryEstimate& e) {
  Table t({"quantity", "value", "samples_used", "samples_excluded", "witness"},
          {true, false, false, false, true});
  t.add_row({e.quantity, Table::fmt(e.value), Table::fmt(double(e.samples_used)),
             Table::fmt(double(e.samples_excluded)), join_vec(e.witness)});
  t.meta("seed", double(e.seed));
  t.meta("region", e.region);
  if (e.f_star_used) {
    t.meta("f_star", e.f_star);
    t.meta("f_star_mode", e.f_star_empirical ? "empirical-multistart" : "oracle");
  }
  return t;
}

Table grad_check_table(const GradCheckReport& r) {
  Table t({"checked", "excluded", "max_rel_err", "tol", "pass", "worst_example", "worst_w"},
          {false, false, false, false, false, false, true});
  t.add_row({Table::fmt(double(r.checked)), Table::fmt(double(r.excluded)),
             Table::fmt(r.max_rel_err), Table::fmt(r.tol), Table::fmt(r.pass ? 1.0 : 0.0),
             Table::fmt(double(r.worst_example)), join_vec(r.worst_w)});
  return t;
}

}  // namespace stablab
