#include "cfslab/cfslab.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cfslab/bessel.hpp"
#include "cfslab/core.hpp"
#include "cfslab/io.hpp"
#include "cfslab/minkowski.hpp"
#include "cfslab/observables.hpp"
#include "cfslab/sweep.hpp"

struct cfs_system {
  cfslab::DiscreteCFS cfs;
};

struct cfs_sweep_config {
  cfslab::SweepConfig cfg;
};

struct cfs_sweep_result {
  cfslab::SweepResult res;
};

namespace {

thread_local std::string g_last_error;

cfs_status set_error(cfs_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

cfs_status from_kind(cfslab::ErrorKind k) {
  using cfslab::ErrorKind;
  switch (k) {
    case ErrorKind::Structural: return CFS_ERR_STRUCTURAL;
    case ErrorKind::Numerical: return CFS_ERR_NUMERIC;
    case ErrorKind::Domain: return CFS_ERR_DOMAIN;
    case ErrorKind::Resource: return CFS_ERR_RESOURCE;
    case ErrorKind::Parse: return CFS_ERR_PARSE;
    case ErrorKind::Io: return CFS_ERR_IO;
  }
  return CFS_ERR_INTERNAL;
}

template <class F>
cfs_status guard(F&& f) {
  try {
    f();
    return CFS_OK;
  } catch (const cfslab::Error& e) {
    return set_error(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CFS_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CFS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CFS_ERR_INTERNAL, "unknown exception");
  }
}

#define CFS_NONNULL(p)                                              \
  do {                                                              \
    if (!(p)) return set_error(CFS_ERR_NULL, #p " is NULL");        \
  } while (0)

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

cfslab::Tolerances to_tol(const cfs_tolerances& t) { return {t.rel_eq, t.rel_real, t.tol_rank, t.tol_herm}; }

cfslab::CVector to_vec(const cfs_complex* u, std::size_t n) {
  cfslab::CVector v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(k)) = {u[k].re, u[k].im};
  return v;
}

cfs_complex to_c(cfslab::Complex z) { return {z.real(), z.imag()}; }

cfslab::Region to_region(const size_t* idx, size_t n) {
  return cfslab::Region(std::vector<std::size_t>(idx, idx + n));
}

int cls_code(cfslab::CausalClass c) {
  switch (c) {
    case cfslab::CausalClass::Spacelike: return CFS_SPACELIKE;
    case cfslab::CausalClass::Timelike: return CFS_TIMELIKE;
    case cfslab::CausalClass::Lightlike: return CFS_LIGHTLIKE;
  }
  return -1;
}

void check_index(const cfs_system* s, size_t i) {
  if (i >= s->cfs.size()) cfslab::fail(cfslab::ErrorKind::Structural, "point index out of range");
}

}  // namespace

extern "C" {

const char* cfs_last_error(void) { return g_last_error.c_str(); }

const char* cfs_version(void) { return "0.1.0"; }

void cfs_string_free(char* s) { std::free(s); }

cfs_tolerances cfs_default_tolerances(void) {
  cfslab::Tolerances t;
  return {t.rel_eq, t.rel_real, t.tol_rank, t.tol_herm};
}

const char* cfs_class_name(int cls) {
  switch (cls) {
    case CFS_SPACELIKE: return "spacelike";
    case CFS_TIMELIKE: return "timelike";
    case CFS_LIGHTLIKE: return "lightlike";
  }
  return "unknown";
}

cfs_status cfs_system_create(int n, int N, size_t npoints, const cfs_complex* psi, const double* weights,
                             const cfs_tolerances* tol, cfs_system** out) {
  CFS_NONNULL(out);
  CFS_NONNULL(psi);
  CFS_NONNULL(weights);
  return guard([&] {
    cfslab::require(n >= 1 && N >= 1 && npoints >= 1, "n, N and the point count must be positive");
    cfslab::SpinSignature sig(n);
    std::vector<cfslab::SpacetimePoint> pts;
    const std::size_t block = static_cast<std::size_t>(2 * n) * N;
    for (std::size_t p = 0; p < npoints; ++p) {
      cfslab::CMatrix m(2 * n, N);
      for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < N; ++c) {
          const cfs_complex& z = psi[p * block + static_cast<std::size_t>(r) * N + c];
          m(r, c) = {z.re, z.im};
        }
      pts.emplace_back(cfslab::WaveEval(std::move(m)), sig);
    }
    std::vector<double> w(weights, weights + npoints);
    cfslab::Tolerances t = tol ? to_tol(*tol) : cfslab::Tolerances{};
    *out = new cfs_system{cfslab::DiscreteCFS(std::move(pts), std::move(w), t)};
  });
}

cfs_status cfs_system_load(const char* path, cfs_system** out) {
  CFS_NONNULL(path);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_system{cfslab::load_cfs(path)}; });
}

cfs_status cfs_system_parse(const char* text, cfs_system** out) {
  CFS_NONNULL(text);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_system{cfslab::parse_cfs(text)}; });
}

cfs_status cfs_system_save(const cfs_system* sys, const char* path) {
  CFS_NONNULL(sys);
  CFS_NONNULL(path);
  return guard([&] { cfslab::save_cfs(path, sys->cfs); });
}

cfs_status cfs_system_format(const cfs_system* sys, char** out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  return guard([&] { *out = dup_string(cfslab::format_cfs(sys->cfs)); });
}

void cfs_system_free(cfs_system* sys) { delete sys; }

cfs_status cfs_system_info(const cfs_system* sys, int* n, int* N, size_t* npoints) {
  CFS_NONNULL(sys);
  if (n) *n = sys->cfs.spin_dim();
  if (N) *N = sys->cfs.hilbert_dim();
  if (npoints) *npoints = sys->cfs.size();
  return CFS_OK;
}

cfs_status cfs_system_weights(const cfs_system* sys, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  std::copy(sys->cfs.weights().begin(), sys->cfs.weights().end(), out);
  return CFS_OK;
}

cfs_status cfs_system_tolerances(const cfs_system* sys, cfs_tolerances* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  const auto& t = sys->cfs.tolerances();
  *out = {t.rel_eq, t.rel_real, t.tol_rank, t.tol_herm};
  return CFS_OK;
}

cfs_status cfs_system_with_tolerances(const cfs_system* sys, const cfs_tolerances* tol, cfs_system** out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(tol);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_system{sys->cfs.with_tolerances(to_tol(*tol))}; });
}

cfs_status cfs_system_with_weights(const cfs_system* sys, const double* weights, cfs_system** out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(weights);
  CFS_NONNULL(out);
  return guard([&] {
    *out = new cfs_system{sys->cfs.with_weights(std::vector<double>(weights, weights + sys->cfs.size()))};
  });
}

cfs_status cfs_point_inertia(const cfs_system* sys, size_t i, int* positive, int* negative) {
  CFS_NONNULL(sys);
  return guard([&] {
    check_index(sys, i);
    cfslab::Inertia in = cfslab::inertia(sys->cfs.point(i), sys->cfs.tolerances());
    if (positive) *positive = in.positive;
    if (negative) *negative = in.negative;
  });
}

cfs_status cfs_pair_spectrum(const cfs_system* sys, size_t i, size_t j, cfs_complex* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  return guard([&] {
    check_index(sys, i);
    check_index(sys, j);
    auto s = cfslab::product_spectrum(sys->cfs.point(i), sys->cfs.point(j));
    for (std::size_t k = 0; k < s.lambdas.size(); ++k) out[k] = to_c(s.lambdas[k]);
  });
}

cfs_status cfs_pair_classify(const cfs_system* sys, size_t i, size_t j, int* cls) {
  CFS_NONNULL(sys);
  CFS_NONNULL(cls);
  return guard([&] {
    check_index(sys, i);
    check_index(sys, j);
    *cls = cls_code(cfslab::pair_data(sys->cfs, i, j).cls);
  });
}

cfs_status cfs_pair_lagrangian(const cfs_system* sys, size_t i, size_t j, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  return guard([&] {
    check_index(sys, i);
    check_index(sys, j);
    *out = cfslab::pair_data(sys->cfs, i, j).lagrangian;
  });
}

cfs_status cfs_pair_table(const cfs_system* sys, unsigned threads, int* cls, double* lagrangian, double* b_total) {
  CFS_NONNULL(sys);
  return guard([&] {
    const auto& c = sys->cfs;
    const std::size_t m = c.size();
    auto table = cfslab::pair_table(c, {threads});
    for (std::size_t k = 0; k < m * m; ++k) {
      if (cls) cls[k] = cls_code(table[k].cls);
      if (lagrangian) lagrangian[k] = table[k].lagrangian;
      if (b_total) {
        // b = (1/2n) sum of chain eigenvalues, zero when spacelike
        cfslab::Complex s = 0.0;
        if (table[k].cls != cfslab::CausalClass::Spacelike)
          for (auto l : table[k].spectrum.lambdas) s += l;
        b_total[k] = s.real() / (2.0 * c.spin_dim());
      }
    }
  });
}

cfs_status cfs_action(const cfs_system* sys, unsigned threads, cfs_action_report* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  return guard([&] {
    auto r = cfslab::action(sys->cfs, {threads});
    *out = {r.action, r.volume, r.trace, r.boundedness};
  });
}

cfs_status cfs_el_function(const cfs_system* sys, size_t i, const cfs_el_params* p, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(p);
  CFS_NONNULL(out);
  return guard([&] { *out = cfslab::el_function(sys->cfs, i, {p->kappa, p->r_tr, p->s_vol}); });
}

cfs_status cfs_el_residuals(const cfs_system* sys, const cfs_el_params* p, unsigned threads, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(p);
  CFS_NONNULL(out);
  return guard([&] {
    auto r = cfslab::el_residuals(sys->cfs, {p->kappa, p->r_tr, p->s_vol}, {threads});
    std::copy(r.begin(), r.end(), out);
  });
}

cfs_status cfs_one_particle_measure(const cfs_system* sys, const cfs_complex* u, const size_t* region, size_t nreg,
                                    double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(u);
  CFS_NONNULL(out);
  if (nreg > 0) CFS_NONNULL(region);
  return guard([&] {
    auto v = to_vec(u, static_cast<std::size_t>(sys->cfs.hilbert_dim()));
    *out = cfslab::one_particle_measure(sys->cfs, v, to_region(region, nreg));
  });
}

cfs_status cfs_one_particle_support(const cfs_system* sys, const cfs_complex* u, unsigned char* mask) {
  CFS_NONNULL(sys);
  CFS_NONNULL(u);
  CFS_NONNULL(mask);
  return guard([&] {
    auto v = to_vec(u, static_cast<std::size_t>(sys->cfs.hilbert_dim()));
    auto reg = cfslab::one_particle_support(sys->cfs, v);
    std::fill(mask, mask + sys->cfs.size(), 0);
    for (std::size_t i : reg.indices()) mask[i] = 1;
  });
}

cfs_status cfs_is_localized(const cfs_system* sys, const cfs_complex* u, const size_t* region, size_t nreg, int* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(u);
  CFS_NONNULL(out);
  if (nreg > 0) CFS_NONNULL(region);
  return guard([&] {
    auto v = to_vec(u, static_cast<std::size_t>(sys->cfs.hilbert_dim()));
    *out = cfslab::is_localized(sys->cfs, v, to_region(region, nreg)) ? 1 : 0;
  });
}

cfs_status cfs_is_delocalized(const cfs_system* sys, const cfs_complex* u, int* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(u);
  CFS_NONNULL(out);
  return guard([&] {
    auto v = to_vec(u, static_cast<std::size_t>(sys->cfs.hilbert_dim()));
    *out = cfslab::is_delocalized(sys->cfs, v) ? 1 : 0;
  });
}

cfs_status cfs_region_expectation(const cfs_system* sys, const size_t* region, size_t nreg, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  if (nreg > 0) CFS_NONNULL(region);
  return guard([&] {
    auto o = cfslab::position_observable(sys->cfs, to_region(region, nreg));
    *out = cfslab::expectation(cfslab::Subsystem::total(sys->cfs.hilbert_dim()), o, sys->cfs.spin_dim());
  });
}

cfs_status cfs_occupation(const cfs_complex* u, size_t dim, const cfs_complex* basis, size_t N, size_t k,
                          double* out) {
  CFS_NONNULL(u);
  CFS_NONNULL(out);
  if (k > 0) CFS_NONNULL(basis);
  return guard([&] {
    cfslab::CMatrix b(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t r = 0; r < N; ++r) b(r, c) = {basis[c * N + r].re, basis[c * N + r].im};
    *out = cfslab::occupation(to_vec(u, dim), cfslab::Subsystem::from_orthonormal(b));
  });
}

cfs_status cfs_correlation_one(const cfs_system* sys, const cfs_complex* u, size_t i, size_t j, cfs_complex* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(u);
  CFS_NONNULL(out);
  return guard([&] {
    auto v = to_vec(u, static_cast<std::size_t>(sys->cfs.hilbert_dim()));
    *out = to_c(cfslab::correlation_strength_one(sys->cfs, v, i, j));
  });
}

cfs_status cfs_correlation_total(const cfs_system* sys, size_t i, size_t j, double* out) {
  CFS_NONNULL(sys);
  CFS_NONNULL(out);
  return guard([&] { *out = cfslab::correlation_strength_total(sys->cfs, i, j); });
}

cfs_status cfs_bessel_k(int nu, cfs_complex z, cfs_complex* out, int* underflow) {
  CFS_NONNULL(out);
  return guard([&] {
    bool uf = false;
    *out = to_c(cfslab::bessel_k(nu, {z.re, z.im}, &uf));
    if (underflow) *underflow = uf ? 1 : 0;
  });
}

cfs_status cfs_kernel_eval(double t, double r, double m, double eps, cfs_kernel_row* out) {
  CFS_NONNULL(out);
  return guard([&] {
    cfslab::require(r >= 0.0, "kernel_eval: r must be non-negative");
    auto w = cfslab::kernel_row(t, r, {m, eps});
    *out = {w.t, w.r, w.eps, to_c(w.alpha), to_c(w.beta), w.b, w.XX, cls_code(w.cls), w.lagrangian};
  });
}

const char* cfs_kernel_csv_header(void) {
  static const std::string h = cfslab::kernel_csv_header();
  return h.c_str();
}

cfs_status cfs_kernel_csv_line(const cfs_kernel_row* row, char** out) {
  CFS_NONNULL(row);
  CFS_NONNULL(out);
  return guard([&] {
    cfslab::CausalClass c = row->cls == CFS_TIMELIKE   ? cfslab::CausalClass::Timelike
                            : row->cls == CFS_LIGHTLIKE ? cfslab::CausalClass::Lightlike
                                                        : cfslab::CausalClass::Spacelike;
    cfslab::KernelRow w{row->t,  row->r,       row->eps, {row->alpha.re, row->alpha.im}, {row->beta.re, row->beta.im},
                        row->b, row->x_dot_x, c,        row->lagrangian};
    *out = dup_string(cfslab::kernel_csv_line(w));
  });
}

cfs_status cfs_count_sea_modes(double box_len, double k_cut, size_t* out) {
  CFS_NONNULL(out);
  return guard([&] { *out = cfslab::count_sea_modes(box_len, k_cut); });
}

cfs_status cfs_sea_sample(const char* config, cfs_system** out) {
  CFS_NONNULL(config);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_system{cfslab::dirac_sea_sample(cfslab::parse_sea_config(config))}; });
}

cfs_status cfs_sweep_config_default(cfs_sweep_config** out) {
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_sweep_config{}; });
}

cfs_status cfs_sweep_config_parse(const char* text, cfs_sweep_config** out) {
  CFS_NONNULL(text);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_sweep_config{cfslab::parse_sweep_config(text)}; });
}

cfs_status cfs_sweep_config_set_eps_list(cfs_sweep_config* cfg, const double* eps, size_t n) {
  CFS_NONNULL(cfg);
  if (n > 0) CFS_NONNULL(eps);
  return guard([&] {
    cfslab::SweepConfig c = cfg->cfg;
    c.eps_list.assign(eps, eps + n);
    c.validate();
    cfg->cfg = std::move(c);
  });
}

cfs_status cfs_sweep_config_set_box_len(cfs_sweep_config* cfg, double box_len) {
  CFS_NONNULL(cfg);
  return guard([&] {
    cfslab::SweepConfig c = cfg->cfg;
    c.box_len = box_len;
    c.validate();
    cfg->cfg = std::move(c);
  });
}

cfs_status cfs_sweep_config_set_threads(cfs_sweep_config* cfg, unsigned threads) {
  CFS_NONNULL(cfg);
  cfg->cfg.par.threads = threads;
  return CFS_OK;
}

cfs_status cfs_sweep_config_validate(const cfs_sweep_config* cfg) {
  CFS_NONNULL(cfg);
  return guard([&] { cfg->cfg.validate(); });
}

cfs_status cfs_sweep_config_format(const cfs_sweep_config* cfg, char** out) {
  CFS_NONNULL(cfg);
  CFS_NONNULL(out);
  return guard([&] { *out = dup_string(cfslab::format_sweep_config(cfg->cfg)); });
}

void cfs_sweep_config_free(cfs_sweep_config* cfg) { delete cfg; }

cfs_status cfs_sweep_run(const cfs_sweep_config* cfg, cfs_sweep_result** out) {
  CFS_NONNULL(cfg);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_sweep_result{cfslab::run_sweep(cfg->cfg)}; });
}

cfs_status cfs_sweep_result_parse_csv(const char* text, cfs_sweep_result** out) {
  CFS_NONNULL(text);
  CFS_NONNULL(out);
  return guard([&] { *out = new cfs_sweep_result{cfslab::parse_sweep_csv(text)}; });
}

size_t cfs_sweep_result_rows(const cfs_sweep_result* res) { return res ? res->res.rows.size() : 0; }

cfs_status cfs_sweep_result_row(const cfs_sweep_result* res, size_t k, cfs_sweep_row* out) {
  CFS_NONNULL(res);
  CFS_NONNULL(out);
  if (k >= res->res.rows.size()) return set_error(CFS_ERR_STRUCTURAL, "sweep row index out of range");
  const auto& r = res->res.rows[k];
  *out = {r.m_eps, r.l_eps, r.est_rel_err, r.n_evals, r.seconds, r.ok ? 1 : 0};
  return CFS_OK;
}

cfs_status cfs_sweep_result_csv(const cfs_sweep_result* res, int with_seconds, char** out) {
  CFS_NONNULL(res);
  CFS_NONNULL(out);
  return guard([&] { *out = dup_string(cfslab::sweep_csv(res->res, with_seconds != 0)); });
}

cfs_status cfs_sweep_fit(const cfs_sweep_result* res, cfs_fit* out) {
  CFS_NONNULL(res);
  CFS_NONNULL(out);
  return guard([&] {
    auto f = cfslab::power_fit(res->res);
    *out = {f.a, f.b, f.stderr_b, f.r2, f.used};
  });
}

cfs_status cfs_sweep_fit_json(const cfs_sweep_result* res, const cfs_sweep_config* cfg, char** out) {
  CFS_NONNULL(res);
  CFS_NONNULL(out);
  return guard([&] {
    auto f = cfslab::power_fit(res->res);
    *out = dup_string(cfslab::format_fit(f, res->res, cfg ? &cfg->cfg : nullptr));
  });
}

cfs_status cfs_sweep_svg(const cfs_sweep_result* res, int with_fit, char** out) {
  CFS_NONNULL(res);
  CFS_NONNULL(out);
  return guard([&] {
    if (with_fit) {
      auto f = cfslab::power_fit(res->res);
      *out = dup_string(cfslab::sweep_svg(res->res, &f));
    } else {
      *out = dup_string(cfslab::sweep_svg(res->res, nullptr));
    }
  });
}

void cfs_sweep_result_free(cfs_sweep_result* res) { delete res; }

}  // extern "C"
