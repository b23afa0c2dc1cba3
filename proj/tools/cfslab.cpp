// cfslab command-line driver. Talks to the library only through cfslab.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfslab/cfslab.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kNumeric = 3, kResource = 4, kIo = 5, kStructural = 6, kInternal = 7 };

struct Failure {
  int code;
  std::string msg;
};

int exit_for(cfs_status s) {
  switch (s) {
    case CFS_OK: return kOk;
    case CFS_ERR_PARSE: return kParse;
    case CFS_ERR_NUMERIC:
    case CFS_ERR_DOMAIN: return kNumeric;
    case CFS_ERR_RESOURCE: return kResource;
    case CFS_ERR_IO: return kIo;
    case CFS_ERR_STRUCTURAL:
    case CFS_ERR_NULL: return kStructural;
    default: return kInternal;
  }
}

void check(cfs_status s, const std::string& what) {
  if (s != CFS_OK) throw Failure{exit_for(s), what + ": " + cfs_last_error()};
}

struct SysDel {
  void operator()(cfs_system* s) const { cfs_system_free(s); }
};
struct CfgDel {
  void operator()(cfs_sweep_config* c) const { cfs_sweep_config_free(c); }
};
struct ResDel {
  void operator()(cfs_sweep_result* r) const { cfs_sweep_result_free(r); }
};
using Sys = std::unique_ptr<cfs_system, SysDel>;
using Cfg = std::unique_ptr<cfs_sweep_config, CfgDel>;
using Res = std::unique_ptr<cfs_sweep_result, ResDel>;

std::string take(char* s) {
  std::string r(s ? s : "");
  cfs_string_free(s);
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kIo, "cannot write '" + p.string() + "'"};
  out << text;
  if (!out.flush()) throw Failure{kIo, "write error on '" + p.string() + "'"};
}

fs::path out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kIo, "cannot create output directory '" + dir + "': " + ec.message()};
  return fs::path(dir);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Common {
  std::string config;
  std::string out = ".";
  unsigned threads = 1;
  double tol_eq = 0.0;
  double tol_real = 0.0;
};

void add_common(CLI::App* sub, Common& c, bool tolerances) {
  sub->add_option("--config,config", c.config, "input file")->required();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  if (tolerances) {
    sub->add_option("--tol-eq", c.tol_eq, "relative tolerance for equal moduli");
    sub->add_option("--tol-real", c.tol_real, "relative tolerance for real eigenvalues");
  }
}

Sys load_system(const Common& c) {
  cfs_system* raw = nullptr;
  check(cfs_system_load(c.config.c_str(), &raw), "loading " + c.config);
  Sys sys(raw);
  if (c.tol_eq > 0.0 || c.tol_real > 0.0) {
    cfs_tolerances t;
    cfs_system_tolerances(sys.get(), &t);
    if (c.tol_eq > 0.0) t.rel_eq = c.tol_eq;
    if (c.tol_real > 0.0) t.rel_real = c.tol_real;
    cfs_system* adj = nullptr;
    check(cfs_system_with_tolerances(sys.get(), &t, &adj), "tolerance override");
    sys.reset(adj);
  }
  return sys;
}

size_t point_count(const cfs_system* s, int* n = nullptr, int* N = nullptr) {
  size_t m = 0;
  cfs_system_info(s, n, N, &m);
  return m;
}

int cmd_classify(const Common& c) {
  Sys sys = load_system(c);
  size_t m = point_count(sys.get());
  std::vector<int> cls(m * m);
  std::vector<double> lag(m * m), b(m * m);
  check(cfs_pair_table(sys.get(), c.threads, cls.data(), lag.data(), b.data()), "classify");
  std::string csv = "i,j,class,lagrangian,b_total\n";
  size_t counts[3] = {0, 0, 0};
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      size_t k = i * m + j;
      ++counts[cls[k]];
      csv += std::to_string(i) + "," + std::to_string(j) + "," + cfs_class_name(cls[k]) + "," + fmt(lag[k]) + "," +
             fmt(b[k]) + "\n";
    }
  fs::path p = out_dir(c.out) / "classify.csv";
  write_file(p, csv);
  std::cout << m * m << " pairs: " << counts[CFS_SPACELIKE] << " spacelike, " << counts[CFS_TIMELIKE]
            << " timelike, " << counts[CFS_LIGHTLIKE] << " lightlike -> " << p.string() << "\n";
  return kOk;
}

int cmd_action(const Common& c, const cfs_el_params& el) {
  Sys sys = load_system(c);
  size_t m = point_count(sys.get());
  cfs_action_report rep;
  check(cfs_action(sys.get(), c.threads, &rep), "action");
  std::vector<double> res(m);
  check(cfs_el_residuals(sys.get(), &el, c.threads, res.data()), "EL residuals");
  json j;
  j["action"] = rep.action;
  j["volume"] = rep.volume;
  j["trace"] = rep.trace;
  j["boundedness"] = rep.boundedness;
  j["el_params"] = {{"kappa", el.kappa}, {"r_tr", el.r_tr}, {"s_vol", el.s_vol}};
  j["el_residuals"] = res;
  fs::path p = out_dir(c.out) / "action.json";
  write_file(p, j.dump(2) + "\n");
  std::cout << "action " << fmt(rep.action) << "  volume " << fmt(rep.volume) << "  trace " << fmt(rep.trace)
            << "  boundedness " << fmt(rep.boundedness) << " -> " << p.string() << "\n";
  return kOk;
}

int cmd_el(const Common& c, const cfs_el_params& el) {
  Sys sys = load_system(c);
  size_t m = point_count(sys.get());
  std::vector<double> res(m);
  check(cfs_el_residuals(sys.get(), &el, c.threads, res.data()), "EL residuals");
  std::string csv = "i,ell\n";
  double lo = INFINITY, hi = -INFINITY;
  for (size_t i = 0; i < m; ++i) {
    csv += std::to_string(i) + "," + fmt(res[i]) + "\n";
    lo = std::min(lo, res[i]);
    hi = std::max(hi, res[i]);
  }
  fs::path p = out_dir(c.out) / "el.csv";
  write_file(p, csv);
  std::cout << m << " points, ell in [" << fmt(lo) << ", " << fmt(hi) << "] -> " << p.string() << "\n";
  return kOk;
}

std::vector<cfs_complex> parse_state(const json& v, const std::string& path, int N) {
  if (!v.is_array() || static_cast<int>(v.size()) != N)
    throw Failure{kParse, path + ": expected " + std::to_string(N) + " [re, im] entries"};
  std::vector<cfs_complex> u(N);
  for (int k = 0; k < N; ++k) {
    const json& z = v[k];
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      throw Failure{kParse, path + "[" + std::to_string(k) + "]: expected [re, im]"};
    u[k] = {z[0].get<double>(), z[1].get<double>()};
  }
  return u;
}

int cmd_observables(const Common& c, const std::string& obs_path) {
  Sys sys = load_system(c);
  int n = 0, N = 0;
  size_t m = point_count(sys.get(), &n, &N);
  fs::path dir = out_dir(c.out);

  std::string csv = "i";
  for (size_t j = 0; j < m; ++j) csv += "," + std::to_string(j);
  csv += "\n";
  std::vector<double> b(m * m);
  check(cfs_pair_table(sys.get(), c.threads, nullptr, nullptr, b.data()), "correlation matrix");
  for (size_t i = 0; i < m; ++i) {
    csv += std::to_string(i);
    for (size_t j = 0; j < m; ++j) csv += "," + fmt(b[i * m + j]);
    csv += "\n";
  }
  write_file(dir / "correlation.csv", csv);
  std::cout << "correlation matrix " << m << "x" << m << " -> " << (dir / "correlation.csv").string() << "\n";
  if (obs_path.empty()) return kOk;

  json cfg;
  try {
    cfg = json::parse(read_file(obs_path));
  } catch (const json::parse_error& e) {
    throw Failure{kParse, obs_path + ": " + e.what()};
  }
  if (!cfg.is_object()) throw Failure{kParse, obs_path + ": expected an object"};
  std::vector<std::vector<size_t>> regions;
  if (cfg.contains("regions")) {
    for (size_t r = 0; r < cfg["regions"].size(); ++r) {
      const json& reg = cfg["regions"][r];
      if (!reg.is_array()) throw Failure{kParse, "$.regions[" + std::to_string(r) + "]: expected an index list"};
      std::vector<size_t> idx;
      for (const auto& x : reg) {
        if (!x.is_number_unsigned()) throw Failure{kParse, "$.regions[" + std::to_string(r) + "]: bad index"};
        idx.push_back(x.get<size_t>());
      }
      regions.push_back(std::move(idx));
    }
  }
  json report;
  json jr = json::array();
  for (const auto& reg : regions) {
    double v = 0.0;
    check(cfs_region_expectation(sys.get(), reg.data(), reg.size(), &v), "region expectation");
    jr.push_back({{"indices", reg}, {"expectation_total", v}});
  }
  report["regions"] = std::move(jr);
  json js = json::array();
  if (cfg.contains("states")) {
    for (size_t s = 0; s < cfg["states"].size(); ++s) {
      auto u = parse_state(cfg["states"][s], "$.states[" + std::to_string(s) + "]", N);
      json st;
      std::vector<unsigned char> mask(m);
      check(cfs_one_particle_support(sys.get(), u.data(), mask.data()), "one-particle support");
      std::vector<size_t> supp;
      for (size_t i = 0; i < m; ++i)
        if (mask[i]) supp.push_back(i);
      int deloc = 0;
      check(cfs_is_delocalized(sys.get(), u.data(), &deloc), "delocalization");
      st["support"] = supp;
      st["delocalized"] = deloc != 0;
      json meas = json::array(), loc = json::array();
      for (const auto& reg : regions) {
        double v = 0.0;
        int l = 0;
        check(cfs_one_particle_measure(sys.get(), u.data(), reg.data(), reg.size(), &v), "one-particle measure");
        check(cfs_is_localized(sys.get(), u.data(), reg.data(), reg.size(), &l), "localization");
        meas.push_back(v);
        loc.push_back(l != 0);
      }
      st["measure"] = std::move(meas);
      st["localized"] = std::move(loc);
      js.push_back(std::move(st));
    }
  }
  report["states"] = std::move(js);
  write_file(dir / "observables.json", report.dump(2) + "\n");
  std::cout << "observables -> " << (dir / "observables.json").string() << "\n";
  return kOk;
}

std::vector<double> num_list(const json& j, const char* key) {
  std::vector<double> v;
  if (!j.contains(key)) throw Failure{kParse, std::string("kernel config: missing '") + key + "'"};
  const json& a = j[key];
  if (a.is_number()) return {a.get<double>()};
  if (!a.is_array()) throw Failure{kParse, std::string("kernel config: '") + key + "' must be a list"};
  for (const auto& x : a) {
    if (!x.is_number()) throw Failure{kParse, std::string("kernel config: '") + key + "' has a non-number"};
    v.push_back(x.get<double>());
  }
  return v;
}

int cmd_kernel(const Common& c) {
  json j;
  try {
    j = json::parse(read_file(c.config));
  } catch (const json::parse_error& e) {
    throw Failure{kParse, c.config + ": " + e.what()};
  }
  double m = j.value("m", 1.0);
  auto eps = num_list(j, "eps");
  auto ts = num_list(j, "t");
  auto rs = num_list(j, "r");
  std::string csv = std::string(cfs_kernel_csv_header()) + "\n";
  size_t rows = 0;
  for (double e : eps)
    for (double t : ts)
      for (double r : rs) {
        cfs_kernel_row row;
        check(cfs_kernel_eval(t, r, m, e, &row), "kernel at t=" + fmt(t) + ", r=" + fmt(r));
        char* line = nullptr;
        check(cfs_kernel_csv_line(&row, &line), "kernel csv");
        csv += take(line) + "\n";
        ++rows;
      }
  fs::path p = out_dir(c.out) / "kernel.csv";
  write_file(p, csv);
  std::cout << rows << " kernel rows -> " << p.string() << "\n";
  return kOk;
}

int cmd_sea_sample(const Common& c) {
  std::string text = read_file(c.config);
  cfs_system* raw = nullptr;
  check(cfs_sea_sample(text.c_str(), &raw), "sea sample");
  Sys sys(raw);
  int n = 0, N = 0;
  size_t m = point_count(sys.get(), &n, &N);
  int rmin = 1 << 30, rmax = 0;
  for (size_t i = 0; i < m; ++i) {
    int pos = 0, neg = 0;
    check(cfs_point_inertia(sys.get(), i, &pos, &neg), "rank");
    rmin = std::min(rmin, pos + neg);
    rmax = std::max(rmax, pos + neg);
  }
  fs::path p = out_dir(c.out) / "sea.cfs.json";
  check(cfs_system_save(sys.get(), p.string().c_str()), "saving");
  std::cout << "N = " << N << " modes, " << m << " lattice points, rank in [" << rmin << ", " << rmax << "] -> "
            << p.string() << "\n";
  return kOk;
}

struct SweepFlags {
  std::vector<double> eps_list;
  double box_len = 0.0;
  bool dry_run = false;
  bool timings = false;
};

int cmd_sweep(const Common& c, const SweepFlags& f, bool threads_given) {
  std::string text = read_file(c.config);
  cfs_sweep_config* raw = nullptr;
  check(cfs_sweep_config_parse(text.c_str(), &raw), "sweep config");
  Cfg cfg(raw);
  if (!f.eps_list.empty()) check(cfs_sweep_config_set_eps_list(cfg.get(), f.eps_list.data(), f.eps_list.size()), "--eps-list");
  if (f.box_len > 0.0) check(cfs_sweep_config_set_box_len(cfg.get(), f.box_len), "--box-len");
  if (threads_given) check(cfs_sweep_config_set_threads(cfg.get(), c.threads), "--threads");
  check(cfs_sweep_config_validate(cfg.get()), "sweep config");
  if (f.dry_run) {
    char* s = nullptr;
    check(cfs_sweep_config_format(cfg.get(), &s), "format");
    std::cout << take(s);
    return kOk;
  }
  fs::path dir = out_dir(c.out);
  cfs_sweep_result* rr = nullptr;
  check(cfs_sweep_run(cfg.get(), &rr), "sweep");
  Res res(rr);
  char* s = nullptr;
  check(cfs_sweep_result_csv(res.get(), f.timings ? 1 : 0, &s), "csv");
  write_file(dir / "sweep.csv", take(s));
  size_t nrows = cfs_sweep_result_rows(res.get());
  for (size_t k = 0; k < nrows; ++k) {
    cfs_sweep_row row;
    cfs_sweep_result_row(res.get(), k, &row);
    std::printf("m_eps %-10g l_eps %-24.17g rel_err %.2e%s\n", row.m_eps, row.l_eps, row.est_rel_err,
                row.ok ? "" : "  (not converged)");
  }
  cfs_fit fit;
  cfs_status st = cfs_sweep_fit(res.get(), &fit);
  if (st != CFS_OK) {
    std::string msg = cfs_last_error();
    check(cfs_sweep_svg(res.get(), 0, &s), "svg");
    write_file(dir / "sweep.svg", take(s));
    throw Failure{exit_for(st), "fit: " + msg};
  }
  check(cfs_sweep_fit_json(res.get(), cfg.get(), &s), "fit summary");
  write_file(dir / "fit.json", take(s));
  check(cfs_sweep_svg(res.get(), 1, &s), "svg");
  write_file(dir / "sweep.svg", take(s));
  std::printf("fit: a = %.6g  b = %.6f +- %.2g  (r2 = %.8f, %zu rows) -> %s\n", fit.a, fit.b, fit.stderr_b, fit.r2,
              fit.used, dir.string().c_str());
  return kOk;
}

int cmd_fit(const Common& c) {
  std::string text = read_file(c.config);
  cfs_sweep_result* rr = nullptr;
  check(cfs_sweep_result_parse_csv(text.c_str(), &rr), "sweep csv");
  Res res(rr);
  cfs_fit fit;
  check(cfs_sweep_fit(res.get(), &fit), "fit");
  fs::path dir = out_dir(c.out);
  char* s = nullptr;
  check(cfs_sweep_fit_json(res.get(), nullptr, &s), "fit summary");
  write_file(dir / "fit.json", take(s));
  check(cfs_sweep_svg(res.get(), 1, &s), "svg");
  write_file(dir / "sweep.svg", take(s));
  std::printf("fit: a = %.6g  b = %.6f +- %.2g  (r2 = %.8f, %zu rows)\n", fit.a, fit.b, fit.stderr_b, fit.r2,
              fit.used);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfslab: causal fermion system laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cfs_version());

  Common c;
  cfs_el_params el{0.0, 0.0, 0.0};
  std::string obs_path;
  SweepFlags sf;

  auto* classify = app.add_subcommand("classify", "pairwise causal classification table");
  add_common(classify, c, true);
  auto* action = app.add_subcommand("action", "causal action, constraints and EL residuals");
  add_common(action, c, true);
  auto* elc = app.add_subcommand("el", "Euler-Lagrange residual per point");
  add_common(elc, c, true);
  for (auto* sub : {action, elc}) {
    sub->add_option("--kappa", el.kappa, "boundedness multiplier")->check(CLI::NonNegativeNumber);
    sub->add_option("--r-tr", el.r_tr, "trace multiplier");
    sub->add_option("--s-vol", el.s_vol, "volume multiplier");
  }
  auto* obs = app.add_subcommand("observables", "correlation matrix and one-particle observables");
  add_common(obs, c, true);
  obs->add_option("--obs", obs_path, "states and regions (JSON)");
  auto* kern = app.add_subcommand("kernel", "Minkowski kernel table");
  add_common(kern, c, false);
  auto* sea = app.add_subcommand("sea-sample", "sample a Dirac sea into a CFS file");
  add_common(sea, c, false);
  auto* sweep = app.add_subcommand("sweep", "l_eps sweep, power fit and plot");
  add_common(sweep, c, false);
  sweep->add_option("--eps-list", sf.eps_list, "m*eps values")->delimiter(',');
  sweep->add_option("--box-len", sf.box_len, "box size in units of 1/m")->check(CLI::PositiveNumber);
  sweep->add_flag("--dry-run", sf.dry_run, "print the resolved config and exit");
  sweep->add_flag("--timings", sf.timings, "fill the seconds column (makes the CSV machine dependent)");
  auto* fit = app.add_subcommand("fit", "power fit of an existing sweep CSV");
  add_common(fit, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*classify) return cmd_classify(c);
    if (*action) return cmd_action(c, el);
    if (*elc) return cmd_el(c, el);
    if (*obs) return cmd_observables(c, obs_path);
    if (*kern) return cmd_kernel(c);
    if (*sea) return cmd_sea_sample(c);
    if (*sweep) return cmd_sweep(c, sf, sweep->count("--threads") > 0);
    if (*fit) return cmd_fit(c);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.msg << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
