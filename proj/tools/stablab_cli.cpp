#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "stablab.h"

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void die_api(int rc) {
  std::cerr << "stablab: " << stablab_last_error() << " [status " << rc << "]\n";
  std::exit(1);
}

void check(int rc) {
  if (rc != STABLAB_OK) die_api(rc);
}

struct TableHandle {
  stablab_table* t = nullptr;
  ~TableHandle() { stablab_table_free(t); }
};

struct ProblemHandle {
  stablab_problem* p = nullptr;
  ~ProblemHandle() { stablab_problem_free(p); }
};

struct DatasetHandle {
  stablab_dataset* d = nullptr;
  ~DatasetHandle() { stablab_dataset_free(d); }
};

// ---- output ----------------------------------------------------------

struct OutputSpec {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;  // echoed in order
  std::string format = "csv";
  std::string out;  // empty: env dir or stdout
};

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

bool numeric_token(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void write_csv(std::ostream& os, const stablab_table* t, const OutputSpec& spec) {
  os << "# stablab " << stablab_version() << "\n";
  os << "# subcommand: " << spec.subcommand << "\n";
  os << "# config:";
  for (const auto& [k, v] : spec.flags) os << " --" << k << "=" << v;
  os << "\n";
  os << "# timestamp: " << timestamp_utc() << "\n";
  long metas = 0;
  check(stablab_table_meta_count(t, &metas));
  for (long k = 0; k < metas; ++k) {
    const char* key = nullptr;
    const char* value = nullptr;
    int is_text = 0;
    check(stablab_table_meta(t, k, &key, &value, &is_text));
    os << "# " << key << ": " << value << "\n";
  }
  long rows = 0, cols = 0;
  check(stablab_table_rows(t, &rows));
  check(stablab_table_cols(t, &cols));
  for (long j = 0; j < cols; ++j) {
    const char* name = nullptr;
    check(stablab_table_column_name(t, j, &name));
    os << (j ? "," : "") << name;
  }
  os << "\n";
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      const char* cell = nullptr;
      check(stablab_table_cell(t, i, j, &cell));
      os << (j ? "," : "") << cell;
    }
    os << "\n";
  }
}

void write_json(std::ostream& os, const stablab_table* t, const OutputSpec& spec) {
  os << "{\n  \"config\": {\n";
  os << "    \"tool\": \"stablab\",\n";
  os << "    \"version\": \"" << json_escape(stablab_version()) << "\",\n";
  os << "    \"subcommand\": \"" << json_escape(spec.subcommand) << "\",\n";
  os << "    \"timestamp\": \"" << timestamp_utc() << "\",\n";
  os << "    \"flags\": {";
  for (std::size_t i = 0; i < spec.flags.size(); ++i) {
    os << (i ? ", " : "") << "\"" << json_escape(spec.flags[i].first) << "\": \""
       << json_escape(spec.flags[i].second) << "\"";
  }
  os << "},\n    \"meta\": {";
  long metas = 0;
  check(stablab_table_meta_count(t, &metas));
  for (long k = 0; k < metas; ++k) {
    const char* key = nullptr;
    const char* value = nullptr;
    int is_text = 0;
    check(stablab_table_meta(t, k, &key, &value, &is_text));
    os << (k ? ", " : "") << "\"" << json_escape(key) << "\": ";
    if (!is_text && numeric_token(value)) {
      os << value;
    } else {
      os << "\"" << json_escape(value) << "\"";
    }
  }
  os << "}\n  },\n  \"rows\": [";
  long rows = 0, cols = 0;
  check(stablab_table_rows(t, &rows));
  check(stablab_table_cols(t, &cols));
  std::vector<std::string> names(cols);
  std::vector<int> text(cols);
  for (long j = 0; j < cols; ++j) {
    const char* name = nullptr;
    check(stablab_table_column_name(t, j, &name));
    names[j] = name;
    check(stablab_table_column_is_text(t, j, &text[j]));
  }
  for (long i = 0; i < rows; ++i) {
    os << (i ? ",\n    {" : "\n    {");
    for (long j = 0; j < cols; ++j) {
      const char* cell = nullptr;
      check(stablab_table_cell(t, i, j, &cell));
      os << (j ? ", " : "") << "\"" << json_escape(names[j]) << "\": ";
      if (!text[j] && numeric_token(cell)) {
        os << cell;
      } else {
        os << "\"" << json_escape(cell) << "\"";
      }
    }
    os << "}";
  }
  os << "\n  ]\n}\n";
}

void emit_table(const stablab_table* t, const OutputSpec& spec) {
  std::string path = spec.out;
  if (path.empty()) {
    const char* dir = std::getenv("STABLAB_OUT_DIR");
    if (dir != nullptr && *dir != '\0') {
      path = std::string(dir) + "/" + spec.subcommand + "." +
             (spec.format == "json" ? "json" : "csv");
    }
  }
  if (path.empty()) {
    if (spec.format == "json") {
      write_json(std::cout, t, spec);
    } else {
      write_csv(std::cout, t, spec);
    }
    return;
  }
  std::ofstream os(path);
  if (!os) {
    std::cerr << "stablab: cannot open output path: " << path << "\n";
    std::exit(1);
  }
  if (spec.format == "json") {
    write_json(os, t, spec);
  } else {
    write_csv(os, t, spec);
  }
  if (!os.good()) {
    std::cerr << "stablab: write failed: " << path << "\n";
    std::exit(1);
  }
}

// ---- shared flag groups ----------------------------------------------

struct CommonFlags {
  unsigned long long seed = 0;
  int jobs = 1;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, CommonFlags& c) {
  sub->add_option("--seed", c.seed, "base seed for stochastic parts");
  sub->add_option("--jobs", c.jobs, "worker threads for replica loops")
      ->check(CLI::Range(1, 256));
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "output file path (default stdout or $STABLAB_OUT_DIR)");
}

void echo_common(OutputSpec& spec, const CommonFlags& c) {
  spec.flags.emplace_back("seed", std::to_string(c.seed));
  spec.flags.emplace_back("jobs", std::to_string(c.jobs));
  spec.format = c.format;
  spec.out = c.out;
}

struct ProblemFlags {
  std::string kind = "quadratic";
  int d = 2;
  double curv_min = 1.0;
  double curv_max = 2.0;
  int m = 1;
  long rows = 4;
  long cols = 6;
  double c1 = 1.0;
  double c2 = 0.5;
  double lambda_g = 1.0;
  int depth = 2;
  long net_cols = 8;
  unsigned long long data_seed = 1;
  long n = 32;
};

void add_problem_flags(CLI::App* sub, ProblemFlags& pf) {
  sub->add_option("--problem", pf.kind, "loss family")
      ->check(CLI::IsMember({"quadratic", "quartic", "leaky-relu", "linnet"}));
  sub->add_option("--d", pf.d, "parameter dimension (quadratic) or matrix side (linnet)");
  sub->add_option("--curv-min", pf.curv_min, "smallest quadratic curvature");
  sub->add_option("--curv-max", pf.curv_max, "largest quadratic curvature");
  sub->add_option("--m", pf.m, "quartic parameter count");
  sub->add_option("--rows", pf.rows, "leaky-relu design rows");
  sub->add_option("--cols", pf.cols, "leaky-relu design cols / linnet sample count");
  sub->add_option("--c1", pf.c1, "leaky-relu slope for nonnegative inputs");
  sub->add_option("--c2", pf.c2, "leaky-relu slope for negative inputs");
  sub->add_option("--lambda-g", pf.lambda_g, "leaky-relu outer quadratic weight");
  sub->add_option("--depth", pf.depth, "linnet layer count");
  sub->add_option("--data-seed", pf.data_seed, "seed for generated problem data");
  sub->add_option("--n", pf.n, "dataset size for kinds without canonical data");
}

void echo_problem(OutputSpec& spec, const ProblemFlags& pf) {
  spec.flags.emplace_back("problem", pf.kind);
  if (pf.kind == "quadratic") {
    spec.flags.emplace_back("d", std::to_string(pf.d));
    spec.flags.emplace_back("curv-min", fmt17(pf.curv_min));
    spec.flags.emplace_back("curv-max", fmt17(pf.curv_max));
    spec.flags.emplace_back("n", std::to_string(pf.n));
  } else if (pf.kind == "quartic") {
    spec.flags.emplace_back("m", std::to_string(pf.m));
    spec.flags.emplace_back("n", std::to_string(pf.n));
  } else if (pf.kind == "leaky-relu") {
    spec.flags.emplace_back("rows", std::to_string(pf.rows));
    spec.flags.emplace_back("cols", std::to_string(pf.cols));
    spec.flags.emplace_back("c1", fmt17(pf.c1));
    spec.flags.emplace_back("c2", fmt17(pf.c2));
    spec.flags.emplace_back("lambda-g", fmt17(pf.lambda_g));
  } else {
    spec.flags.emplace_back("d", std::to_string(pf.d));
    spec.flags.emplace_back("cols", std::to_string(pf.net_cols));
    spec.flags.emplace_back("depth", std::to_string(pf.depth));
  }
  spec.flags.emplace_back("data-seed", std::to_string(pf.data_seed));
}

stablab_problem* build_problem(const ProblemFlags& pf) {
  stablab_problem* p = nullptr;
  if (pf.kind == "quadratic") {
    if (pf.d < 1) {
      std::cerr << "stablab: --d must be positive\n";
      std::exit(1);
    }
    std::vector<double> curv(pf.d);
    for (int k = 0; k < pf.d; ++k) {
      curv[k] = pf.d == 1 ? pf.curv_min
                          : pf.curv_min +
                                (pf.curv_max - pf.curv_min) * k / double(pf.d - 1);
    }
    check(stablab_problem_quadratic(curv.data(), pf.d, &p));
    return p;
  }
  if (pf.kind == "quartic") {
    check(stablab_problem_quartic(pf.m, &p));
    return p;
  }
  if (pf.kind == "leaky-relu") {
    std::mt19937_64 eng(pf.data_seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(pf.rows * pf.cols), y(pf.rows);
    for (auto& v : x) v = normal(eng);
    for (auto& v : y) v = normal(eng);
    check(stablab_problem_leaky_relu(x.data(), pf.rows, pf.cols, y.data(), pf.c1,
                                     pf.c2, pf.lambda_g, &p));
    return p;
  }
  // linnet: redraw until the data matrices pass conditioning checks
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 eng(pf.data_seed + attempt);
    std::normal_distribution<double> normal;
    std::vector<double> x(pf.d * pf.net_cols), y(pf.d * pf.net_cols);
    for (auto& v : x) v = normal(eng);
    for (auto& v : y) v = normal(eng);
    const int rc =
        stablab_problem_linnet(x.data(), pf.d, pf.net_cols, y.data(), pf.depth, &p);
    if (rc == STABLAB_OK) return p;
    if (rc != STABLAB_ERR_INVALID) die_api(rc);
  }
  std::cerr << "stablab: no well-conditioned linnet data after 64 draws\n";
  std::exit(1);
}

stablab_dataset* build_dataset(const stablab_problem* p, const ProblemFlags& pf) {
  stablab_dataset* d = nullptr;
  const int rc = stablab_dataset_canonical(p, &d);
  if (rc == STABLAB_OK) return d;
  if (rc != STABLAB_ERR_UNSUPPORTED) die_api(rc);
  check(stablab_dataset_random(p, pf.n, pf.data_seed, &d));
  return d;
}

struct RegionFlags {
  std::string kind = "ball";
  double radius = 2.0;
  double lo = -2.0;
  double hi = 3.0;
  bool grid = false;
};

void add_region_flags(CLI::App* sub, RegionFlags& rf) {
  sub->add_option("--region", rf.kind, "sampling region shape")
      ->check(CLI::IsMember({"ball", "interval"}));
  sub->add_option("--radius", rf.radius, "ball radius");
  sub->add_option("--lo", rf.lo, "interval lower end");
  sub->add_option("--hi", rf.hi, "interval upper end");
  sub->add_flag("--lattice", rf.grid, "lattice sampling on interval regions");
}

void echo_region(OutputSpec& spec, const RegionFlags& rf) {
  spec.flags.emplace_back("region", rf.kind);
  if (rf.kind == "ball") {
    spec.flags.emplace_back("radius", fmt17(rf.radius));
  } else {
    spec.flags.emplace_back("lo", fmt17(rf.lo));
    spec.flags.emplace_back("hi", fmt17(rf.hi));
    spec.flags.emplace_back("lattice", rf.grid ? "1" : "0");
  }
}

int region_id(const RegionFlags& rf) {
  return rf.kind == "ball" ? STABLAB_REGION_BALL : STABLAB_REGION_INTERVAL;
}

double region_a(const RegionFlags& rf) {
  return rf.kind == "ball" ? rf.radius : rf.lo;
}

double region_b(const RegionFlags& rf) { return rf.kind == "ball" ? 0.0 : rf.hi; }

int alg_id(const std::string& name) {
  if (name == "gd") return STABLAB_ALG_GD;
  if (name == "sgd") return STABLAB_ALG_SGD;
  if (name == "rcd") return STABLAB_ALG_RCD;
  return STABLAB_ALG_SVRG;
}

int setting_id(const std::string& name) {
  return name == "sc" ? STABLAB_SETTING_SC : STABLAB_SETTING_PL;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability laboratory for iterative learning algorithms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", stablab_version());

  const double nan = std::nan("");

  // rates ---------------------------------------------------------------
  auto* rates = app.add_subcommand(
      "rates", "closed-form suboptimality after T steps; single value with "
               "--alg and --setting, full table otherwise");
  CommonFlags rates_c;
  std::string rates_alg, rates_setting;
  double r_lambda = nan, r_mu = nan, r_L = nan, r_gamma = nan, r_d = nan,
         r_m = nan, r_n = nan;
  long rates_T = 10;
  rates->add_option("--alg", rates_alg)->check(CLI::IsMember({"gd", "sgd", "rcd", "svrg"}));
  rates->add_option("--setting", rates_setting)->check(CLI::IsMember({"sc", "pl"}));
  rates->add_option("--lambda", r_lambda, "strong convexity constant");
  rates->add_option("--mu", r_mu, "gradient-dominance constant");
  rates->add_option("--L", r_L, "smoothness constant");
  rates->add_option("--gamma", r_gamma, "step size (sgd, svrg)");
  rates->add_option("--d", r_d, "dimension (rcd)");
  rates->add_option("--m", r_m, "inner loop length (svrg)");
  rates->add_option("--n", r_n, "sample size");
  rates->add_option("--T", rates_T, "step count");
  add_common(rates, rates_c);

  // iters ---------------------------------------------------------------
  auto* iters = app.add_subcommand(
      "iters", "steps needed to reach the stability target; single value with "
               "--alg and --setting, full table otherwise");
  CommonFlags iters_c;
  std::string iters_alg, iters_setting;
  double i_lambda = nan, i_mu = nan, i_L = nan, i_gamma = nan, i_d = nan,
         i_m = nan, i_n = nan;
  iters->add_option("--alg", iters_alg)->check(CLI::IsMember({"gd", "sgd", "rcd", "svrg"}));
  iters->add_option("--setting", iters_setting)->check(CLI::IsMember({"sc", "pl"}));
  iters->add_option("--lambda", i_lambda, "strong convexity constant");
  iters->add_option("--mu", i_mu, "gradient-dominance constant");
  iters->add_option("--L", i_L, "smoothness constant");
  iters->add_option("--gamma", i_gamma, "step size (svrg)");
  iters->add_option("--d", i_d, "dimension (rcd)");
  iters->add_option("--m", i_m, "inner loop length (svrg)");
  iters->add_option("--n", i_n, "sample size");
  add_common(iters, iters_c);

  // pl-check / qg-check ---------------------------------------------------
  auto* plc = app.add_subcommand("pl-check",
                                 "sampled gradient-dominance ratio plus the "
                                 "gradient-norm and smoothness extremes");
  CommonFlags plc_c;
  ProblemFlags plc_p;
  RegionFlags plc_r;
  long plc_samples = 10000;
  double plc_fstar = nan;
  add_problem_flags(plc, plc_p);
  add_region_flags(plc, plc_r);
  plc->add_option("--samples", plc_samples, "sample count");
  plc->add_option("--f-star", plc_fstar, "known optimal value");
  add_common(plc, plc_c);

  auto* qgc = app.add_subcommand("qg-check",
                                 "sampled quadratic-growth and error-bound "
                                 "ratios (needs a projection oracle)");
  CommonFlags qgc_c;
  ProblemFlags qgc_p;
  RegionFlags qgc_r;
  long qgc_samples = 10000;
  double qgc_fstar = nan;
  add_problem_flags(qgc, qgc_p);
  add_region_flags(qgc, qgc_r);
  qgc->add_option("--samples", qgc_samples, "sample count");
  qgc->add_option("--f-star", qgc_fstar, "known optimal value");
  add_common(qgc, qgc_c);

  // grad-check -----------------------------------------------------------
  auto* gc = app.add_subcommand("grad-check",
                                "finite differences against the analytic gradient");
  CommonFlags gc_c;
  ProblemFlags gc_p;
  RegionFlags gc_r;
  long gc_samples = 100;
  double gc_tol = 1e-6;
  add_problem_flags(gc, gc_p);
  add_region_flags(gc, gc_r);
  gc->add_option("--samples", gc_samples, "sample count");
  gc->add_option("--tol", gc_tol, "relative error tolerance");
  add_common(gc, gc_c);

  // stability --------------------------------------------------------------
  auto* stab = app.add_subcommand("stability",
                                  "measured stability of exact minimizers on "
                                  "random strongly convex instances vs the bound");
  CommonFlags stab_c;
  std::string stab_mode = "pointwise";
  std::vector<long> stab_ns = {25, 50, 100, 200};
  int stab_d = 2;
  double stab_cmin = 1.0, stab_cmax = 2.0;
  long stab_reps = 100;
  stab->add_option("--mode", stab_mode)->check(CLI::IsMember({"uniform", "pointwise"}));
  stab->add_option("--ns", stab_ns, "sample sizes")->delimiter(',');
  stab->add_option("--d", stab_d, "parameter dimension");
  stab->add_option("--curv-min", stab_cmin, "smallest curvature");
  stab->add_option("--curv-max", stab_cmax, "largest curvature");
  stab->add_option("--replicas", stab_reps, "instances per n");
  add_common(stab, stab_c);

  // gen-gap ----------------------------------------------------------------
  auto* gg = app.add_subcommand("gen-gap",
                                "empirical generalization gap of exact "
                                "minimizers on random instances");
  CommonFlags gg_c;
  std::vector<long> gg_ns = {25, 50, 100, 200};
  int gg_d = 2;
  double gg_cmin = 1.0, gg_cmax = 2.0;
  long gg_trials = 50, gg_mc = 100000;
  gg->add_option("--ns", gg_ns, "sample sizes")->delimiter(',');
  gg->add_option("--d", gg_d, "parameter dimension");
  gg->add_option("--curv-min", gg_cmin, "smallest curvature");
  gg->add_option("--curv-max", gg_cmax, "largest curvature");
  gg->add_option("--trials", gg_trials, "independent samples per n");
  gg->add_option("--mc-samples", gg_mc, "Monte-Carlo draws for the population risk");
  add_common(gg, gg_c);

  // counterexample ---------------------------------------------------------
  auto* cx = app.add_subcommand("counterexample",
                                "paired runs on the scalar quartic family: "
                                "gradient descent per init, or --sgd for the "
                                "decreasing-step sweep");
  CommonFlags cx_c;
  long cx_n = 11, cx_inits = 64, cx_reps = 500;
  double cx_eps = 0.01, cx_gamma = 1.0;
  bool cx_sgd = false;
  std::vector<long> cx_ns = {11, 21, 41, 81};
  cx->add_option("--n", cx_n, "dataset size (odd, at least 3)");
  cx->add_option("--eps", cx_eps, "perturbation size");
  cx->add_option("--gamma", cx_gamma, "gd step size");
  cx->add_option("--inits", cx_inits, "gd starting points");
  cx->add_option("--replicas", cx_reps, "sgd replicas per n");
  cx->add_flag("--sgd", cx_sgd, "run the coupled sgd sweep instead of gd");
  cx->add_option("--ns", cx_ns, "sgd sweep sizes")->delimiter(',');
  add_common(cx, cx_c);

  // linnet -------------------------------------------------------------------
  auto* ln = app.add_subcommand("linnet",
                                "deep linear networks: inequality slacks and "
                                "critical-point classes on random instances");
  CommonFlags ln_c;
  int ln_d = 3, ln_depth = 2;
  long ln_cols = 8, ln_inst = 100;
  ln->add_option("--d", ln_d, "matrix side");
  ln->add_option("--cols", ln_cols, "sample count");
  ln->add_option("--depth", ln_depth, "layer count");
  ln->add_option("--instances", ln_inst, "random instances");
  add_common(ln, ln_c);

  // run -----------------------------------------------------------------------
  auto* runc = app.add_subcommand("run", "single optimizer run, one row per step");
  CommonFlags run_c;
  ProblemFlags run_p;
  std::string run_alg = "gd", run_step = "constant";
  long run_T = 100, run_inner = 0;
  double run_gamma = 0.1;
  std::vector<double> run_w0;
  add_problem_flags(runc, run_p);
  runc->add_option("--alg", run_alg)->check(CLI::IsMember({"gd", "sgd", "rcd", "svrg"}));
  runc->add_option("--T", run_T, "steps (epochs for svrg)");
  runc->add_option("--step", run_step)->check(CLI::IsMember({"constant", "inverse-t"}));
  runc->add_option("--gamma", run_gamma, "step value (constant) or numerator (inverse-t)");
  runc->add_option("--svrg-inner", run_inner, "inner steps per epoch, 0 for 2n");
  runc->add_option("--w0", run_w0, "start point coordinates")->delimiter(',');
  add_common(runc, run_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << stablab_version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (app.got_subcommand(rates)) {
    if (rates_alg.empty() != rates_setting.empty()) {
      std::cerr << "--alg and --setting go together\n\n" << rates->help();
      return 2;
    }
    OutputSpec spec;
    spec.subcommand = "rates";
    if (!rates_alg.empty()) spec.flags.emplace_back("alg", rates_alg);
    if (!rates_setting.empty()) spec.flags.emplace_back("setting", rates_setting);
    for (const auto& [k, v] :
         std::vector<std::pair<std::string, double>>{{"lambda", r_lambda},
                                                     {"mu", r_mu},
                                                     {"L", r_L},
                                                     {"gamma", r_gamma},
                                                     {"d", r_d},
                                                     {"m", r_m},
                                                     {"n", r_n}}) {
      if (!std::isnan(v)) spec.flags.emplace_back(k, fmt17(v));
    }
    spec.flags.emplace_back("T", std::to_string(rates_T));
    echo_common(spec, rates_c);
    TableHandle t;
    if (!rates_alg.empty()) {
      double value = 0.0;
      check(stablab_suboptimality(alg_id(rates_alg), setting_id(rates_setting),
                                  r_lambda, r_mu, r_L, r_gamma, r_d, r_m, r_n,
                                  rates_T, &value));
      std::string path = rates_c.out;
      std::ostream* osp = &std::cout;
      std::ofstream file;
      if (path.empty()) {
        const char* dir = std::getenv("STABLAB_OUT_DIR");
        if (dir != nullptr && *dir != '\0') {
          path = std::string(dir) + "/rates." +
                 (spec.format == "json" ? "json" : "csv");
        }
      }
      if (!path.empty()) {
        file.open(path);
        if (!file) {
          std::cerr << "stablab: cannot open output path: " << path << "\n";
          return 1;
        }
        osp = &file;
      }
      std::ostream& os = *osp;
      if (spec.format == "json") {
        os << "{\n  \"config\": {\n    \"tool\": \"stablab\",\n    \"version\": \""
           << json_escape(stablab_version()) << "\",\n    \"subcommand\": \"rates\",\n"
           << "    \"timestamp\": \"" << timestamp_utc() << "\",\n    \"flags\": {";
        for (std::size_t i = 0; i < spec.flags.size(); ++i) {
          os << (i ? ", " : "") << "\"" << json_escape(spec.flags[i].first)
             << "\": \"" << json_escape(spec.flags[i].second) << "\"";
        }
        os << "},\n    \"meta\": {}\n  },\n  \"rows\": [\n    {\"algorithm\": \""
           << rates_alg << "\", \"setting\": \"" << rates_setting
           << "\", \"T\": " << rates_T << ", \"value\": " << fmt17(value)
           << "}\n  ]\n}\n";
      } else {
        os << "# stablab " << stablab_version() << "\n# subcommand: rates\n# config:";
        for (const auto& [k, v] : spec.flags) os << " --" << k << "=" << v;
        os << "\n# timestamp: " << timestamp_utc() << "\n";
        os << "algorithm,setting,T,value\n";
        os << rates_alg << "," << rates_setting << "," << rates_T << ","
           << fmt17(value) << "\n";
      }
      return 0;
    }
    check(stablab_suboptimality_table(r_lambda, r_mu, r_L, r_gamma, r_d, r_m, r_n,
                                      rates_T, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(iters)) {
    if (iters_alg.empty() != iters_setting.empty()) {
      std::cerr << "--alg and --setting go together\n\n" << iters->help();
      return 2;
    }
    OutputSpec spec;
    spec.subcommand = "iters";
    if (!iters_alg.empty()) spec.flags.emplace_back("alg", iters_alg);
    if (!iters_setting.empty()) spec.flags.emplace_back("setting", iters_setting);
    for (const auto& [k, v] :
         std::vector<std::pair<std::string, double>>{{"lambda", i_lambda},
                                                     {"mu", i_mu},
                                                     {"L", i_L},
                                                     {"gamma", i_gamma},
                                                     {"d", i_d},
                                                     {"m", i_m},
                                                     {"n", i_n}}) {
      if (!std::isnan(v)) spec.flags.emplace_back(k, fmt17(v));
    }
    echo_common(spec, iters_c);
    if (!iters_alg.empty()) {
      long value = 0;
      check(stablab_iterations(alg_id(iters_alg), setting_id(iters_setting),
                               i_lambda, i_mu, i_L, i_gamma, i_d, i_m, i_n, &value));
      std::string path = iters_c.out;
      std::ostream* osp = &std::cout;
      std::ofstream file;
      if (path.empty()) {
        const char* dir = std::getenv("STABLAB_OUT_DIR");
        if (dir != nullptr && *dir != '\0') {
          path = std::string(dir) + "/iters." +
                 (spec.format == "json" ? "json" : "csv");
        }
      }
      if (!path.empty()) {
        file.open(path);
        if (!file) {
          std::cerr << "stablab: cannot open output path: " << path << "\n";
          return 1;
        }
        osp = &file;
      }
      std::ostream& os = *osp;
      if (spec.format == "json") {
        os << "{\n  \"config\": {\n    \"tool\": \"stablab\",\n    \"version\": \""
           << json_escape(stablab_version()) << "\",\n    \"subcommand\": \"iters\",\n"
           << "    \"timestamp\": \"" << timestamp_utc() << "\",\n    \"flags\": {";
        for (std::size_t i = 0; i < spec.flags.size(); ++i) {
          os << (i ? ", " : "") << "\"" << json_escape(spec.flags[i].first)
             << "\": \"" << json_escape(spec.flags[i].second) << "\"";
        }
        os << "},\n    \"meta\": {}\n  },\n  \"rows\": [\n    {\"algorithm\": \""
           << iters_alg << "\", \"setting\": \"" << iters_setting
           << "\", \"value\": " << value << "}\n  ]\n}\n";
      } else {
        os << "# stablab " << stablab_version() << "\n# subcommand: iters\n# config:";
        for (const auto& [k, v] : spec.flags) os << " --" << k << "=" << v;
        os << "\n# timestamp: " << timestamp_utc() << "\n";
        os << "algorithm,setting,value\n";
        os << iters_alg << "," << iters_setting << "," << value << "\n";
      }
      return 0;
    }
    TableHandle t;
    check(stablab_iteration_table(i_lambda, i_mu, i_L, i_gamma, i_d, i_m, i_n, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(plc) || app.got_subcommand(qgc)) {
    const bool is_pl = app.got_subcommand(plc);
    CommonFlags& c = is_pl ? plc_c : qgc_c;
    ProblemFlags& pf = is_pl ? plc_p : qgc_p;
    RegionFlags& rf = is_pl ? plc_r : qgc_r;
    const long samples = is_pl ? plc_samples : qgc_samples;
    const double fstar = is_pl ? plc_fstar : qgc_fstar;
    OutputSpec spec;
    spec.subcommand = is_pl ? "pl-check" : "qg-check";
    echo_problem(spec, pf);
    echo_region(spec, rf);
    spec.flags.emplace_back("samples", std::to_string(samples));
    if (!std::isnan(fstar)) spec.flags.emplace_back("f-star", fmt17(fstar));
    echo_common(spec, c);
    ProblemHandle p;
    p.p = build_problem(pf);
    DatasetHandle d;
    d.d = build_dataset(p.p, pf);
    TableHandle t;
    check(stablab_geometry_check(p.p, d.d, region_id(rf), region_a(rf), region_b(rf),
                                 samples, rf.grid ? 1 : 0, c.seed,
                                 is_pl ? "lipschitz,smoothness,pl" : "qg,error-bound",
                                 fstar, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(gc)) {
    OutputSpec spec;
    spec.subcommand = "grad-check";
    echo_problem(spec, gc_p);
    echo_region(spec, gc_r);
    spec.flags.emplace_back("samples", std::to_string(gc_samples));
    spec.flags.emplace_back("tol", fmt17(gc_tol));
    echo_common(spec, gc_c);
    ProblemHandle p;
    p.p = build_problem(gc_p);
    DatasetHandle d;
    d.d = build_dataset(p.p, gc_p);
    TableHandle t;
    check(stablab_grad_check(p.p, d.d, region_id(gc_r), region_a(gc_r),
                             region_b(gc_r), gc_samples, gc_r.grid ? 1 : 0,
                             gc_c.seed, gc_tol, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(stab)) {
    OutputSpec spec;
    spec.subcommand = "stability";
    spec.flags.emplace_back("mode", stab_mode);
    {
      std::string nss;
      for (std::size_t i = 0; i < stab_ns.size(); ++i)
        nss += (i ? "," : "") + std::to_string(stab_ns[i]);
      spec.flags.emplace_back("ns", nss);
    }
    spec.flags.emplace_back("d", std::to_string(stab_d));
    spec.flags.emplace_back("curv-min", fmt17(stab_cmin));
    spec.flags.emplace_back("curv-max", fmt17(stab_cmax));
    spec.flags.emplace_back("replicas", std::to_string(stab_reps));
    echo_common(spec, stab_c);
    TableHandle t;
    check(stablab_stability_sweep(
        stab_mode == "uniform" ? STABLAB_STABILITY_UNIFORM : STABLAB_STABILITY_POINTWISE,
        stab_ns.data(), static_cast<long>(stab_ns.size()), stab_d, stab_cmin,
        stab_cmax, stab_reps, stab_c.seed, stab_c.jobs, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(gg)) {
    OutputSpec spec;
    spec.subcommand = "gen-gap";
    {
      std::string nss;
      for (std::size_t i = 0; i < gg_ns.size(); ++i)
        nss += (i ? "," : "") + std::to_string(gg_ns[i]);
      spec.flags.emplace_back("ns", nss);
    }
    spec.flags.emplace_back("d", std::to_string(gg_d));
    spec.flags.emplace_back("curv-min", fmt17(gg_cmin));
    spec.flags.emplace_back("curv-max", fmt17(gg_cmax));
    spec.flags.emplace_back("trials", std::to_string(gg_trials));
    spec.flags.emplace_back("mc-samples", std::to_string(gg_mc));
    echo_common(spec, gg_c);
    TableHandle t;
    check(stablab_gen_gap_sweep(gg_ns.data(), static_cast<long>(gg_ns.size()), gg_d,
                                gg_cmin, gg_cmax, gg_trials, gg_mc, gg_c.seed,
                                gg_c.jobs, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(cx)) {
    OutputSpec spec;
    spec.subcommand = "counterexample";
    TableHandle t;
    if (cx_sgd) {
      spec.flags.emplace_back("sgd", "1");
      {
        std::string nss;
        for (std::size_t i = 0; i < cx_ns.size(); ++i)
          nss += (i ? "," : "") + std::to_string(cx_ns[i]);
        spec.flags.emplace_back("ns", nss);
      }
      spec.flags.emplace_back("eps", fmt17(cx_eps));
      spec.flags.emplace_back("replicas", std::to_string(cx_reps));
      echo_common(spec, cx_c);
      check(stablab_counterexample_sgd(cx_ns.data(), static_cast<long>(cx_ns.size()),
                                       cx_eps, cx_reps, cx_c.seed, cx_c.jobs, &t.t));
    } else {
      spec.flags.emplace_back("n", std::to_string(cx_n));
      spec.flags.emplace_back("eps", fmt17(cx_eps));
      spec.flags.emplace_back("gamma", fmt17(cx_gamma));
      spec.flags.emplace_back("inits", std::to_string(cx_inits));
      echo_common(spec, cx_c);
      check(stablab_counterexample_gd(cx_n, cx_eps, cx_gamma, cx_inits, cx_c.seed,
                                      cx_c.jobs, &t.t));
    }
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(ln)) {
    OutputSpec spec;
    spec.subcommand = "linnet";
    spec.flags.emplace_back("d", std::to_string(ln_d));
    spec.flags.emplace_back("cols", std::to_string(ln_cols));
    spec.flags.emplace_back("depth", std::to_string(ln_depth));
    spec.flags.emplace_back("instances", std::to_string(ln_inst));
    echo_common(spec, ln_c);
    TableHandle t;
    check(stablab_linnet_check(ln_d, ln_cols, ln_depth, ln_inst, ln_c.seed,
                               ln_c.jobs, &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  if (app.got_subcommand(runc)) {
    OutputSpec spec;
    spec.subcommand = "run";
    echo_problem(spec, run_p);
    spec.flags.emplace_back("alg", run_alg);
    spec.flags.emplace_back("T", std::to_string(run_T));
    spec.flags.emplace_back("step", run_step);
    spec.flags.emplace_back("gamma", fmt17(run_gamma));
    if (run_alg == "svrg") spec.flags.emplace_back("svrg-inner", std::to_string(run_inner));
    echo_common(spec, run_c);
    ProblemHandle p;
    p.p = build_problem(run_p);
    DatasetHandle d;
    d.d = build_dataset(p.p, run_p);
    TableHandle t;
    check(stablab_run(p.p, d.d, alg_id(run_alg), run_T,
                      run_step == "constant" ? STABLAB_STEP_CONSTANT
                                             : STABLAB_STEP_INVERSE_T,
                      run_gamma, run_c.seed, run_inner,
                      run_w0.empty() ? nullptr : run_w0.data(),
                      static_cast<long>(run_w0.size()), &t.t));
    emit_table(t.t, spec);
    return 0;
  }

  std::cerr << app.help();
  return 2;
}
