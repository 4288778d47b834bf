#ifndef STABLAB_H
#define STABLAB_H

/* C interface to the stability laboratory.  Every entry point returns a
 * status code; outputs travel through pointers.  On failure the thread-local
 * message from stablab_last_error() describes what was rejected. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(STABLAB_BUILDING)
#define STABLAB_API __attribute__((visibility("default")))
#else
#define STABLAB_API
#endif

typedef struct stablab_problem stablab_problem;
typedef struct stablab_dataset stablab_dataset;
typedef struct stablab_table stablab_table;

enum {
  STABLAB_OK = 0,
  STABLAB_ERR_INVALID = 1,     /* rejected argument or construction input */
  STABLAB_ERR_UNSUPPORTED = 2, /* the problem kind lacks a needed oracle */
  STABLAB_ERR_ILL_POSED = 3,   /* constants violate a well-posedness condition */
  STABLAB_ERR_RUNTIME = 4,     /* numerical failure, divergence, io */
  STABLAB_ERR_INTERNAL = 5
};

enum {
  STABLAB_ALG_GD = 0,
  STABLAB_ALG_SGD = 1,
  STABLAB_ALG_RCD = 2,
  STABLAB_ALG_SVRG = 3
};

enum { STABLAB_SETTING_SC = 0, STABLAB_SETTING_PL = 1 };

enum { STABLAB_STEP_CONSTANT = 0, STABLAB_STEP_INVERSE_T = 1 };

enum { STABLAB_REGION_BALL = 0, STABLAB_REGION_INTERVAL = 1 };

enum { STABLAB_STABILITY_UNIFORM = 0, STABLAB_STABILITY_POINTWISE = 1 };

enum {
  STABLAB_THM_PL_PTWISE = 0,
  STABLAB_THM_QG_PTWISE = 1,
  STABLAB_THM_PL_UNIFORM = 2,
  STABLAB_THM_QG_UNIFORM = 3
};

STABLAB_API const char* stablab_version(void);

/* Message for the most recent failure on this thread; empty string when the
 * last call succeeded. */
STABLAB_API const char* stablab_last_error(void);

/* ---- problems ------------------------------------------------------- */

/* l(w; z) = 1/2 (w - z)' diag(curv) (w - z) */
STABLAB_API int stablab_problem_quadratic(const double* curvatures, long d,
                                          stablab_problem** out);

/* l(w; (x, y)) = (<w,x>^2 + <w,x> - y)^2 on m parameters */
STABLAB_API int stablab_problem_quartic(int m, stablab_problem** out);

/* f(w) = (lambda_g/2) ||sigma(X w) - y||^2 with slopes c1 / c2; x is
 * column-major rows x cols, y has one entry per row */
STABLAB_API int stablab_problem_leaky_relu(const double* x, long rows, long cols,
                                           const double* y, double c1, double c2,
                                           double lambda_g, stablab_problem** out);

/* product of depth d-by-d layers fit to Y from X; both column-major d x cols */
STABLAB_API int stablab_problem_linnet(const double* x, long d, long cols,
                                       const double* y, int depth,
                                       stablab_problem** out);

STABLAB_API void stablab_problem_free(stablab_problem* p);

STABLAB_API int stablab_problem_kind(const stablab_problem* p, const char** out);
STABLAB_API int stablab_problem_dim(const stablab_problem* p, long* out);
STABLAB_API int stablab_problem_example_dim(const stablab_problem* p, long* out);

STABLAB_API int stablab_problem_loss(const stablab_problem* p, const double* w,
                                     long wd, const double* x, long xd, double y,
                                     double* out);
STABLAB_API int stablab_problem_grad(const stablab_problem* p, const double* w,
                                     long wd, const double* x, long xd, double y,
                                     double* out_grad);
STABLAB_API int stablab_problem_risk(const stablab_problem* p, const double* w,
                                     long wd, const stablab_dataset* s, double* out);

/* ---- datasets ------------------------------------------------------- */

STABLAB_API int stablab_dataset_new(stablab_dataset** out);
STABLAB_API int stablab_dataset_add(stablab_dataset* s, const double* x, long xd,
                                    double y);
STABLAB_API int stablab_dataset_size(const stablab_dataset* s, long* out);
STABLAB_API int stablab_dataset_example(const stablab_dataset* s, long i,
                                        double* x_out, long xd, double* y_out);

/* copy with slot i replaced */
STABLAB_API int stablab_dataset_neighbor(const stablab_dataset* s, long i,
                                         const double* x, long xd, double y,
                                         stablab_dataset** out);
/* copy with slot i removed */
STABLAB_API int stablab_dataset_drop(const stablab_dataset* s, long i,
                                     stablab_dataset** out);

/* n standard-normal examples shaped for the problem kind */
STABLAB_API int stablab_dataset_random(const stablab_problem* p, long n,
                                       unsigned long long seed,
                                       stablab_dataset** out);
/* the dataset a composite kind was built from */
STABLAB_API int stablab_dataset_canonical(const stablab_problem* p,
                                          stablab_dataset** out);

STABLAB_API void stablab_dataset_free(stablab_dataset* s);

/* ---- optimizer runs ------------------------------------------------- */

/* Per-step table: t, risk, grad_norm, drift.  w0 NULL starts at the origin;
 * svrg_inner 0 means 2n inner steps per epoch. */
STABLAB_API int stablab_run(const stablab_problem* p, const stablab_dataset* s,
                            int algorithm, long iters, int step_kind,
                            double step_value, unsigned long long seed,
                            long svrg_inner, const double* w0, long w0_len,
                            stablab_table** out);

/* Contraction-rate fit from replica runs: table of the fit summary.
 * f_star NaN means resolve it from the problem. */
STABLAB_API int stablab_fit_rate(const stablab_problem* p, const stablab_dataset* s,
                                 int algorithm, long iters, int step_kind,
                                 double step_value, unsigned long long seed,
                                 long svrg_inner, const double* w0, long w0_len,
                                 long replicas, double f_star, int jobs,
                                 stablab_table** out);

/* ---- closed-form rate arithmetic ------------------------------------ */

/* Constants pass as doubles; NaN marks a field as absent.  Fields not used
 * by the chosen algorithm and setting are ignored. */
STABLAB_API int stablab_suboptimality(int algorithm, int setting, double lambda,
                                      double mu, double L, double gamma, double d,
                                      double m, double n, long T, double* out);
STABLAB_API int stablab_suboptimality_table(double lambda, double mu, double L,
                                            double gamma, double d, double m,
                                            double n, long T, stablab_table** out);
STABLAB_API int stablab_iterations(int algorithm, int setting, double lambda,
                                   double mu, double L, double gamma, double d,
                                   double m, double n, long* out);
STABLAB_API int stablab_iteration_table(double lambda, double mu, double L,
                                        double gamma, double d, double m, double n,
                                        stablab_table** out);
STABLAB_API int stablab_svrg_rho(double rate_constant, double L, double gamma,
                                 double m, double* out);

/* ---- landscape geometry --------------------------------------------- */

/* quantities: comma list from lipschitz, smoothness, pl, qg, error-bound.
 * Ball regions use region_a as the radius; intervals use [region_a, region_b].
 * use_grid switches interval sampling to a lattice.  f_star NaN means
 * resolve it (oracle first, multistart descent otherwise). */
STABLAB_API int stablab_geometry_check(const stablab_problem* p,
                                       const stablab_dataset* s, int region_kind,
                                       double region_a, double region_b,
                                       long samples, int use_grid,
                                       unsigned long long seed,
                                       const char* quantities, double f_star,
                                       stablab_table** out);

/* Central finite differences against the analytic gradient. */
STABLAB_API int stablab_grad_check(const stablab_problem* p,
                                   const stablab_dataset* s, int region_kind,
                                   double region_a, double region_b, long samples,
                                   int use_grid, unsigned long long seed,
                                   double tol, stablab_table** out);

/* ---- stability ------------------------------------------------------ */

/* Random strongly convex quadratic instances, exact minimizers, measured
 * stability against the closed-form bound; one row per n. */
STABLAB_API int stablab_stability_sweep(int mode, const long* ns, long ns_count,
                                        int d, double curv_min, double curv_max,
                                        long replicas, unsigned long long seed,
                                        int jobs, stablab_table** out);

/* out_terms receives bound, convergence term, intrinsic term.  c and the
 * eps fields pass NaN when absent; exactly one eps field must be set and it
 * selects nothing (case_id does). */
STABLAB_API int stablab_blackbox_bound(int theorem, int case_id, double L,
                                       double mu, double c, long n,
                                       double eps_dist, double eps_val,
                                       double eps_grad, double out_terms[3]);

STABLAB_API int stablab_generalization_bound_uniform(double eps, double* out);
STABLAB_API int stablab_generalization_bound_pointwise(double M, long n,
                                                       double beta, double delta,
                                                       double* out);

/* Empirical generalization gap of exact minimizers on random quadratic
 * instances over a sweep of n; one row per n. */
STABLAB_API int stablab_gen_gap_sweep(const long* ns, long ns_count, int d,
                                      double curv_min, double curv_max,
                                      long trials, long mc_samples,
                                      unsigned long long seed, int jobs,
                                      stablab_table** out);

/* ---- scalar quartic counterexample ---------------------------------- */

/* Center of the unstable window plus the slopes of the two base losses
 * there; any output pointer may be NULL. */
STABLAB_API int stablab_counterexample_center(double* what, double* slope_first,
                                              double* slope_second);

/* Paired gradient descent from shared inits; one row per init. */
STABLAB_API int stablab_counterexample_gd(long n, double eps, double gamma,
                                          long inits, unsigned long long seed,
                                          int jobs, stablab_table** out);

/* Coupled decreasing-step sgd over a sweep of n; one row per n. */
STABLAB_API int stablab_counterexample_sgd(const long* ns, long ns_count,
                                           double eps, long replicas,
                                           unsigned long long seed, int jobs,
                                           stablab_table** out);

/* ---- deep linear networks ------------------------------------------- */

/* Random full-rank instances; per instance the projection and gradient
 * lower-bound slacks, the residual split mismatch, and the critical-point
 * class of the random start. */
STABLAB_API int stablab_linnet_check(int d, long cols, int depth, long instances,
                                     unsigned long long seed, int jobs,
                                     stablab_table** out);

/* ---- tables --------------------------------------------------------- */

STABLAB_API int stablab_table_rows(const stablab_table* t, long* out);
STABLAB_API int stablab_table_cols(const stablab_table* t, long* out);
STABLAB_API int stablab_table_column_name(const stablab_table* t, long j,
                                          const char** out);
STABLAB_API int stablab_table_column_is_text(const stablab_table* t, long j,
                                             int* out);
/* Cell pointers stay valid until the table is freed. */
STABLAB_API int stablab_table_cell(const stablab_table* t, long i, long j,
                                   const char** out);
STABLAB_API int stablab_table_cell_num(const stablab_table* t, long i, long j,
                                       double* out);
STABLAB_API int stablab_table_meta_count(const stablab_table* t, long* out);
STABLAB_API int stablab_table_meta(const stablab_table* t, long k,
                                   const char** key, const char** value,
                                   int* is_text);
STABLAB_API void stablab_table_free(stablab_table* t);

#ifdef __cplusplus
}
#endif

#endif /* STABLAB_H */
