#include "cfslab/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cfslab {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(ErrorKind::Parse, path + ": " + what);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line and column
    std::size_t line = 1, col = 1;
    std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << what << ": syntax error at line " << line << ", column " << col << ": " << e.what();
    fail(ErrorKind::Parse, os.str());
  }
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) schema(path, "unknown key '" + it.key() + "'");
}

void check_header(const json& j, const char* format) {
  if (!j.is_object()) schema("$", "expected an object");
  if (!j.contains("format") || !j["format"].is_string() || j["format"].get<std::string>() != format)
    schema("$.format", std::string("expected \"") + format + "\"");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1)
    schema("$.version", "expected 1");
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) schema(path, "number is not finite");
  return v;
}

long get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema(path, "expected an integer");
  return j.get<long>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema(path, "expected true or false");
  return j.get<bool>();
}

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) schema(path, std::string("missing key '") + key + "'");
  return j[key];
}

Complex get_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema(path, "expected [re, im]");
  return {get_num(j[0], path + "[0]"), get_num(j[1], path + "[1]")};
}

json put_complex(Complex c) { return json::array({c.real(), c.imag()}); }

CMatrix get_matrix(const json& j, const std::string& path, long rows, long cols) {
  if (!j.is_array()) schema(path, "expected an array");
  CMatrix m(rows, cols);
  bool nested = !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array();
  if (nested) {
    if (static_cast<long>(j.size()) != rows) schema(path, "expected " + std::to_string(rows) + " rows");
    for (long r = 0; r < rows; ++r) {
      std::string pr = path + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols)
        schema(pr, "expected " + std::to_string(cols) + " entries");
      for (long c = 0; c < cols; ++c) m(r, c) = get_complex(j[r][c], pr + "[" + std::to_string(c) + "]");
    }
  } else {
    if (static_cast<long>(j.size()) != rows * cols)
      schema(path, "expected " + std::to_string(rows * cols) + " complex entries, got " + std::to_string(j.size()));
    for (long k = 0; k < rows * cols; ++k)
      m(k / cols, k % cols) = get_complex(j[k], path + "[" + std::to_string(k) + "]");
  }
  return m;
}

CVector get_vector(const json& j, const std::string& path, long n) {
  if (!j.is_array() || static_cast<long>(j.size()) != n)
    schema(path, "expected " + std::to_string(n) + " complex entries");
  CVector v(n);
  for (long k = 0; k < n; ++k) v(k) = get_complex(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "read error on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "write error on '" + path + "'");
}

DiscreteCFS parse_cfs(const std::string& text) {
  json j = parse_json(text, "cfs");
  check_header(j, "cfslab.cfs");
  check_keys(j, "$", {"format", "version", "n", "N", "weights", "points", "tolerances"});
  long n = get_int(member(j, "$", "n"), "$.n");
  long N = get_int(member(j, "$", "N"), "$.N");
  if (n < 1) schema("$.n", "must be positive");
  if (N < 1) schema("$.N", "must be positive");
  const json& w = member(j, "$", "weights");
  const json& pts = member(j, "$", "points");
  if (!w.is_array()) schema("$.weights", "expected an array");
  if (!pts.is_array()) schema("$.points", "expected an array");
  if (w.size() != pts.size()) schema("$", "weights and points have different lengths");
  Tolerances tol;
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, "$.tolerances", {"rel_eq", "rel_real", "tol_rank", "tol_herm"});
    if (t.contains("rel_eq")) tol.rel_eq = get_num(t["rel_eq"], "$.tolerances.rel_eq");
    if (t.contains("rel_real")) tol.rel_real = get_num(t["rel_real"], "$.tolerances.rel_real");
    if (t.contains("tol_rank")) tol.tol_rank = get_num(t["tol_rank"], "$.tolerances.tol_rank");
    if (t.contains("tol_herm")) tol.tol_herm = get_num(t["tol_herm"], "$.tolerances.tol_herm");
  }
  SpinSignature sig(static_cast<int>(n));
  std::vector<SpacetimePoint> points;
  std::vector<double> weights;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::string p = "$.points[" + std::to_string(k) + "]";
    points.emplace_back(WaveEval(get_matrix(pts[k], p, 2 * n, N)), sig);
    weights.push_back(get_num(w[k], "$.weights[" + std::to_string(k) + "]"));
  }
  return DiscreteCFS(std::move(points), std::move(weights), tol);
}

std::string format_cfs(const DiscreteCFS& cfs) {
  json j;
  j["format"] = "cfslab.cfs";
  j["version"] = 1;
  j["n"] = cfs.spin_dim();
  j["N"] = cfs.hilbert_dim();
  j["weights"] = cfs.weights();
  const Tolerances& t = cfs.tolerances();
  j["tolerances"] = {{"rel_eq", t.rel_eq}, {"rel_real", t.rel_real}, {"tol_rank", t.tol_rank}, {"tol_herm", t.tol_herm}};
  json pts = json::array();
  for (const auto& p : cfs.points()) {
    json m = json::array();
    const CMatrix& psi = p.psi();
    for (Eigen::Index r = 0; r < psi.rows(); ++r)
      for (Eigen::Index c = 0; c < psi.cols(); ++c) m.push_back(put_complex(psi(r, c)));
    pts.push_back(std::move(m));
  }
  j["points"] = std::move(pts);
  return j.dump() + "\n";
}

DiscreteCFS load_cfs(const std::string& path) { return parse_cfs(read_text_file(path)); }

void save_cfs(const std::string& path, const DiscreteCFS& cfs) { write_text_file(path, format_cfs(cfs)); }

Region parse_region(const std::string& text) {
  json j = parse_json(text, "region");
  check_header(j, "cfslab.region");
  check_keys(j, "$", {"format", "version", "indices"});
  const json& idx = member(j, "$", "indices");
  if (!idx.is_array()) schema("$.indices", "expected an array");
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    long i = get_int(idx[k], "$.indices[" + std::to_string(k) + "]");
    if (i < 0) schema("$.indices[" + std::to_string(k) + "]", "must be non-negative");
    v.push_back(static_cast<std::size_t>(i));
  }
  return Region(std::move(v));
}

std::string format_region(const Region& r) {
  json j;
  j["format"] = "cfslab.region";
  j["version"] = 1;
  j["indices"] = r.indices();
  return j.dump() + "\n";
}

Subsystem parse_subsystem(const std::string& text) {
  json j = parse_json(text, "subsystem");
  check_header(j, "cfslab.subsystem");
  check_keys(j, "$", {"format", "version", "N", "vectors", "orthonormalize"});
  long N = get_int(member(j, "$", "N"), "$.N");
  if (N < 1) schema("$.N", "must be positive");
  const json& vs = member(j, "$", "vectors");
  if (!vs.is_array()) schema("$.vectors", "expected an array");
  bool ortho = j.contains("orthonormalize") ? get_bool(j["orthonormalize"], "$.orthonormalize") : false;
  CMatrix b(N, static_cast<long>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k)
    b.col(static_cast<long>(k)) = get_vector(vs[k], "$.vectors[" + std::to_string(k) + "]", N);
  return ortho ? Subsystem::from_span(b) : Subsystem::from_orthonormal(b);
}

std::string format_subsystem(const Subsystem& s) {
  json j;
  j["format"] = "cfslab.subsystem";
  j["version"] = 1;
  j["N"] = s.hilbert_dim();
  json vs = json::array();
  for (int c = 0; c < s.particles(); ++c) {
    json v = json::array();
    for (int r = 0; r < s.hilbert_dim(); ++r) v.push_back(put_complex(s.basis()(r, c)));
    vs.push_back(std::move(v));
  }
  j["vectors"] = std::move(vs);
  j["orthonormalize"] = false;
  return j.dump() + "\n";
}

SweepConfig parse_sweep_config(const std::string& text) {
  json j = parse_json(text, "sweep config");
  check_keys(j, "$", {"m", "eps_list", "box_len", "sigma_mode", "integrand", "threads", "record_timing", "quad"});
  SweepConfig c;
  if (j.contains("m")) c.m = get_num(j["m"], "$.m");
  if (j.contains("box_len")) c.box_len = get_num(j["box_len"], "$.box_len");
  if (j.contains("sigma_mode")) c.sigma = get_bool(j["sigma_mode"], "$.sigma_mode");
  if (j.contains("record_timing")) c.record_timing = get_bool(j["record_timing"], "$.record_timing");
  if (j.contains("integrand")) {
    if (!j["integrand"].is_string()) schema("$.integrand", "expected a string");
    try {
      c.integrand = integrand_from_string(j["integrand"].get<std::string>());
    } catch (const Error& e) {
      schema("$.integrand", e.what());
    }
  }
  if (j.contains("threads")) {
    long t = get_int(j["threads"], "$.threads");
    if (t < 0) schema("$.threads", "must be non-negative");
    c.par.threads = static_cast<unsigned>(t);
  }
  if (j.contains("eps_list")) {
    const json& e = j["eps_list"];
    if (!e.is_array()) schema("$.eps_list", "expected an array");
    c.eps_list.clear();
    for (std::size_t k = 0; k < e.size(); ++k) c.eps_list.push_back(get_num(e[k], "$.eps_list[" + std::to_string(k) + "]"));
  }
  if (j.contains("quad")) {
    const json& q = j["quad"];
    check_keys(q, "$.quad", {"rel_tol", "inner_rel_tol", "base_panels", "max_depth", "max_panels"});
    if (q.contains("rel_tol")) c.quad.rel_tol = get_num(q["rel_tol"], "$.quad.rel_tol");
    if (q.contains("inner_rel_tol")) c.quad.inner_rel_tol = get_num(q["inner_rel_tol"], "$.quad.inner_rel_tol");
    if (q.contains("base_panels")) c.quad.base_panels = static_cast<int>(get_int(q["base_panels"], "$.quad.base_panels"));
    if (q.contains("max_depth")) c.quad.max_depth = static_cast<int>(get_int(q["max_depth"], "$.quad.max_depth"));
    if (q.contains("max_panels")) {
      long mp = get_int(q["max_panels"], "$.quad.max_panels");
      if (mp < 1) schema("$.quad.max_panels", "must be positive");
      c.quad.max_panels = static_cast<std::size_t>(mp);
    }
  }
  c.validate();
  return c;
}

std::string format_sweep_config(const SweepConfig& c) {
  json j;
  j["m"] = c.m;
  j["eps_list"] = c.eps_list;
  j["box_len"] = c.box_len;
  j["sigma_mode"] = c.sigma;
  j["integrand"] = to_string(c.integrand);
  j["threads"] = c.par.threads;
  j["record_timing"] = c.record_timing;
  j["quad"] = {{"rel_tol", c.quad.rel_tol},
               {"inner_rel_tol", c.quad.inner_rel_tol},
               {"base_panels", c.quad.base_panels},
               {"max_depth", c.quad.max_depth},
               {"max_panels", c.quad.max_panels}};
  return j.dump(2) + "\n";
}

SeaSampleConfig parse_sea_config(const std::string& text) {
  json j = parse_json(text, "sea config");
  check_keys(j, "$", {"box_len", "k_cut", "m", "eps_soft", "max_entries", "threads", "lattice", "grid"});
  SeaSampleConfig c;
  if (j.contains("box_len")) c.box_len = get_num(j["box_len"], "$.box_len");
  if (j.contains("k_cut")) c.k_cut = get_num(j["k_cut"], "$.k_cut");
  if (j.contains("m")) c.m = get_num(j["m"], "$.m");
  if (j.contains("eps_soft")) c.eps_soft = get_num(j["eps_soft"], "$.eps_soft");
  if (j.contains("max_entries")) c.max_entries = get_num(j["max_entries"], "$.max_entries");
  if (j.contains("threads")) {
    long t = get_int(j["threads"], "$.threads");
    if (t < 0) schema("$.threads", "must be non-negative");
    c.threads = static_cast<unsigned>(t);
  }
  if (j.contains("lattice") == j.contains("grid")) schema("$", "give exactly one of 'lattice' or 'grid'");
  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    if (!l.is_array()) schema("$.lattice", "expected an array");
    for (std::size_t k = 0; k < l.size(); ++k) {
      std::string p = "$.lattice[" + std::to_string(k) + "]";
      if (!l[k].is_array() || l[k].size() != 4) schema(p, "expected [t, x, y, z]");
      FourVector v;
      v.t = get_num(l[k][0], p + "[0]");
      for (int i = 0; i < 3; ++i) v.x[i] = get_num(l[k][i + 1], p + "[" + std::to_string(i + 1) + "]");
      c.lattice.push_back(v);
    }
  } else {
    const json& g = j["grid"];
    check_keys(g, "$.grid", {"origin", "spacing", "counts"});
    double o[4], s[4];
    long n[4];
    for (const char* key : {"origin", "spacing", "counts"}) {
      const json& a = member(g, "$.grid", key);
      std::string p = std::string("$.grid.") + key;
      if (!a.is_array() || a.size() != 4) schema(p, "expected 4 entries");
      for (int k = 0; k < 4; ++k) {
        std::string pk = p + "[" + std::to_string(k) + "]";
        if (key[0] == 'o') o[k] = get_num(a[k], pk);
        else if (key[0] == 's') s[k] = get_num(a[k], pk);
        else {
          n[k] = get_int(a[k], pk);
          if (n[k] < 1) schema(pk, "must be positive");
        }
      }
    }
    double total = double(n[0]) * n[1] * n[2] * n[3];
    if (total > 1e7) fail(ErrorKind::Resource, "sea config: grid has more than 1e7 points");
    for (long a = 0; a < n[0]; ++a)
      for (long b = 0; b < n[1]; ++b)
        for (long cc = 0; cc < n[2]; ++cc)
          for (long d = 0; d < n[3]; ++d) {
            FourVector v;
            v.t = o[0] + a * s[0];
            v.x = {o[1] + b * s[1], o[2] + cc * s[2], o[3] + d * s[3]};
            c.lattice.push_back(v);
          }
  }
  return c;
}

std::string format_fit(const FitResult& fit, const SweepResult& res, const SweepConfig* cfg) {
  json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["stderr_b"] = fit.stderr_b;
  j["r2"] = fit.r2;
  j["rows_used"] = fit.used;
  j["warnings"] = fit.warnings;
  json rows = json::array();
  for (const auto& r : res.rows) {
    json x;
    x["m_eps"] = r.m_eps;
    x["ok"] = r.ok;
    if (!r.ok) x["error"] = r.error;
    if (cfg && cfg->record_timing) x["seconds"] = r.seconds;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  if (cfg) {
    j["box_len"] = cfg->box_len;
    j["integrand"] = to_string(cfg->integrand);
    j["sigma_mode"] = cfg->sigma;
  }
  return j.dump(2) + "\n";
}

}  // namespace cfslab
