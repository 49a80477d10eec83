#ifndef HYPVOL_COMMANDS_HPP
#define HYPVOL_COMMANDS_HPP

// Batch commands behind the hypvol tool. Each command reads a resolved
// key/value configuration, writes a report (config header, human table,
// CSV block) and returns 0 on pass, 1 on a tolerance failure and 2 on a
// configuration error.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hypvol/domain.hpp"
#include "hypvol/equivariant_map.hpp"
#include "hypvol/error.hpp"
#include "hypvol/fibration.hpp"
#include "hypvol/haar.hpp"
#include "hypvol/mesh.hpp"
#include "hypvol/schlafli.hpp"
#include "hypvol/surface.hpp"
#include "hypvol/volume.hpp"

namespace hypvol {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Flat key/value configuration. Reads record their defaults so the
/// resolved configuration can be echoed into the report.
class RunConfig {
 public:
  RunConfig() = default;

  /// "key = value" lines; '#' starts a comment.
  static RunConfig parse(std::istream& is) {
    RunConfig c;
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("config line " + std::to_string(no) + ": expected key = value");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot read config " + path);
    return parse(is);
  }

  void set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ParseError("config: empty key");
    values_[key] = value;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? def : it->second;
    used_[key] = v;
    return v;
  }
  int integer(const std::string& key, int def) const {
    const std::string v = str(key, std::to_string(def));
    return detail::parse_int(v);
  }
  std::int64_t count(const std::string& key, std::int64_t def) const {
    const std::string v = str(key, std::to_string(def));
    const double d = detail::parse_double(v);  // accepts 1e5
    if (d < 0 || d != std::floor(d) || d > 9e15) throw ParseError("config: '" + key + "' must be a count");
    return static_cast<std::int64_t>(d);
  }
  std::uint64_t seed(const std::string& key, std::uint64_t def) const {
    return detail::parse_uint64(str(key, std::to_string(def)));
  }
  double real(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      used_[key] = detail::fmt17(def);
      return def;
    }
    used_[key] = it->second;
    return detail::parse_double(it->second);
  }

  /// Keys given but never read.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  void write_header(std::ostream& os, const std::string& command) const {
    os << "# hypvol " << command << '\n';
    for (const auto& [k, v] : used_) os << "# " << k << " = " << v << '\n';
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> used_;
};

namespace detail {

// Human table and CSV rows collected while a command runs.
class Report {
 public:
  void row(const std::string& label, const std::string& value) { rows_.emplace_back(label, value); }
  void row(const std::string& label, double value) { row(label, fmt17(value)); }
  void row(const std::string& label, long long value) { row(label, std::to_string(value)); }
  void row(const std::string& label, int value) { row(label, std::to_string(value)); }
  void csv_header(const std::string& h) { csv_header_ = h; }
  void csv(const std::string& line) { csv_.push_back(line); }

  void write(std::ostream& os, const RunConfig& cfg, const std::string& command, bool pass) const {
    cfg.write_header(os, command);
    std::size_t w = 0;
    for (const auto& [l, v] : rows_) w = std::max(w, l.size());
    for (const auto& [l, v] : rows_) os << l << std::string(w + 2 - l.size(), ' ') << v << '\n';
    os << "result" << std::string(w > 4 ? w - 4 : 2, ' ') << (pass ? "PASS" : "FAIL") << '\n';
    if (!csv_header_.empty()) {
      os << '\n' << csv_header_ << '\n';
      for (const auto& l : csv_) os << l << '\n';
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << csv_header_ << '\n';
    for (const auto& l : csv_) os << l << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
  std::string csv_header_;
  std::vector<std::string> csv_;
};

inline std::string join(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : ",") + p;
  return s;
}

// j, rho and the domain named by the config.
struct Setup {
  Surface surface;
  Representation<2> rho;
  std::string rho_kind;
};

inline Setup make_setup(const RunConfig& cfg) {
  const int punctures = cfg.integer("punctures", 0);
  const int genus = cfg.integer("genus", punctures > 0 ? 1 : 2);
  Surface s = standard_surface(genus, punctures);
  const Presentation p = s.j.presentation();
  const std::string rep = cfg.str("rep", "");
  std::string kind = rep.empty() ? cfg.str("rho", "trivial") : "file";
  if (kind == "file") {
    auto rho = load_representation<2>(rep);
    if (rho.presentation() != p) throw PreconditionViolation("representation file does not match genus/punctures");
    return {std::move(s), std::move(rho), kind};
  }
  if (kind == "trivial") return {std::move(s), trivial_representation<2>(p), kind};
  if (kind == "fuchsian") {
    Representation<2> j = s.j;
    return {std::move(s), std::move(j), kind};
  }
  if (kind == "reversed") {
    Mat<2> flip = Mat<2>::Identity();
    flip(1, 1) = -1.0;
    Representation<2> r = conjugate(s.j, flip);
    return {std::move(s), std::move(r), kind};
  }
  if (kind == "elliptic") {
    std::mt19937_64 rng(cfg.seed("rho-seed", 3));
    auto r = random_elliptic_representation<2>(p, rng, HPoint<2>::base());
    return {std::move(s), std::move(r), kind};
  }
  throw ParseError("unknown rho '" + kind + "' (trivial, elliptic, fuchsian, reversed or rep=<file>)");
}

inline int mesh_refine(const RunConfig& cfg, const FundamentalDomain& d) {
  if (cfg.has("mesh-h")) return refine_for_h(d, cfg.real("mesh-h", 0.4));
  return cfg.integer("refine", 3);
}

// f for the configured (j, rho): the identity for rho = j, else a constant
// or a relaxed map about the base point (cusp-pinned on punctured domains).
inline EquivariantMap make_map(const RunConfig& cfg, const Setup& s) {
  auto domain = std::make_shared<const FundamentalDomain>(s.surface.domain);
  auto mesh = std::make_shared<const Mesh>(build_mesh(*domain, mesh_refine(cfg, *domain)));
  if (s.rho_kind == "fuchsian") return identity_map(domain, mesh);
  const std::string kind = cfg.str("map", s.rho_kind == "trivial" ? "constant" : "relaxed");
  const HPoint<2> x0 = HPoint<2>::base();
  if (kind == "constant") return constant_map(domain, mesh, s.rho, x0);
  if (kind != "relaxed") throw ParseError("unknown map '" + kind + "' (constant or relaxed)");
  EquivariantMap f = random_map(domain, mesh, s.rho, x0, 1.0, cfg.seed("seed", 1));
  if (domain->has_cusps()) {
    std::vector<HPoint<2>> pins;
    for (const auto& c : domain->cycles())
      if (c.ideal) pins.push_back(x0);
    f = pin_cusps(f, pins);
  }
  return relax(f, cfg.integer("iterations", 60), cfg.real("step", 0.5));
}

inline EquivariantMap map_from(const RunConfig& cfg) {
  const std::string path = cfg.str("map-file", "");
  if (!path.empty()) return load_map(path).map;
  return make_map(cfg, make_setup(cfg));
}

inline Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return a;
}

}  // namespace detail

/// Haar determinant identity over a battery of random matrices.
inline int cmd_haar_check(const RunConfig& cfg, std::ostream& out) {
  const int only = cfg.integer("n", 0);
  const int count = cfg.integer("matrices", 100);
  const std::int64_t samples = cfg.count("samples", 100000);
  const std::uint64_t seed = cfg.seed("seed", 1);
  const double min_rate = cfg.real("tol", 0.95);
  if (only != 0 && (only < 2 || only > 4)) throw PreconditionViolation("haar-check: n must be 2, 3 or 4");
  detail::Report r;
  r.csv_header("n,index,exact,mc,stderr,pass");
  bool pass = true;
  std::mt19937_64 rng(seed);
  for (int n = 2; n <= 4; ++n) {
    if (only && n != only) continue;
    int hits = 0;
    for (int t = 0; t < count; ++t) {
      const Eigen::MatrixXd a = detail::random_matrix(n, rng);
      const double exact = 1.0 + (n % 2 ? -1.0 : 1.0) * a.determinant();
      const auto e = det_integral_mc(a, samples, seed * 1000003ULL + 1000ULL * n + t);
      const bool ok = std::abs(e.value - exact) < 3.0 * e.std_error;
      hits += ok;
      r.csv(detail::join({std::to_string(n), std::to_string(t), detail::fmt17(exact), detail::fmt17(e.value),
                          detail::fmt17(e.std_error), ok ? "1" : "0"}));
    }
    const double rate = count ? double(hits) / count : 1.0;
    r.row("n=" + std::to_string(n) + " within 3 stderr", std::to_string(hits) + "/" + std::to_string(count));
    pass = pass && rate >= min_rate;
  }
  const auto zero = det_integral_mc(Eigen::MatrixXd::Zero(2, 2), std::max<std::int64_t>(samples, 1000), seed);
  r.row("A=0 value", zero.value);
  pass = pass && zero.value == 1.0 && zero.std_error == 0.0;
  const Eigen::MatrixXd diag = Eigen::Vector2d(0.3, -0.5).asDiagonal();
  const auto cf = det_integral_mc(diag, std::max<std::int64_t>(samples, 1000), seed + 1);
  const bool cf_ok = std::abs(cf.value - 0.85) < 3.0 * cf.std_error;
  r.row("diag(0.3,-0.5) value", cf.value);
  r.row("diag(0.3,-0.5) stderr", cf.std_error);
  pass = pass && cf_ok;
  r.write(out, cfg, "haar-check", pass);
  if (cfg.has("out")) r.write_csv(cfg.str("out", ""));
  return pass ? kExitPass : kExitFail;
}

inline int cmd_vn(const RunConfig& cfg, std::ostream& out) {
  const int n = cfg.integer("n", 2);
  detail::Report r;
  r.row("n", n);
  r.row("V_n", vn(n));
  r.row("vol(S^" + std::to_string(n - 1) + ")", sphere_volume(n - 1));
  r.write(out, cfg, "vn", true);
  return kExitPass;
}

/// Builds the Fuchsian holonomy and checks its relator and domain.
inline int cmd_fuchsian(const RunConfig& cfg, std::ostream& out) {
  const int punctures = cfg.integer("punctures", 0);
  const int genus = cfg.integer("genus", punctures > 0 ? 1 : 2);
  const double tol = cfg.real("tol", 1e-9);
  const Surface s = standard_surface(genus, punctures);
  detail::Report r;
  r.row("generators", s.j.generator_count());
  r.row("relator residual", s.j.relator_residual());
  r.row("domain sides", s.domain.size());
  r.row("domain area", s.domain.area());
  r.csv_header("generator,translation_length");
  for (int i = 0; i < s.j.generator_count(); ++i)
    r.csv(std::to_string(i) + "," + detail::fmt17(translation_length(s.j.image(i))));
  const bool pass = s.j.relator_residual() < tol;
  r.write(out, cfg, "fuchsian", pass);
  if (cfg.has("out")) save_representation(cfg.str("out", ""), s.j);
  return pass ? kExitPass : kExitFail;
}

inline int cmd_euler(const RunConfig& cfg, std::ostream& out) {
  const auto s = detail::make_setup(cfg);
  const int e = euler_class(s.rho);
  const int g = s.rho.presentation().genus();
  detail::Report r;
  r.row("euler class", e);
  r.row("Milnor-Wood bound", 2 * g - 2);
  r.row("2 pi e", 2.0 * std::numbers::pi * e);
  bool pass = std::abs(e) <= 2 * g - 2;
  if (cfg.has("expect")) {
    const int want = cfg.integer("expect", 0);
    r.row("expected", want);
    pass = pass && want == e;
  }
  r.write(out, cfg, "euler", pass);
  return pass ? kExitPass : kExitFail;
}

/// Heuristic domination screen: length-spectrum ratio, plus the measured
/// Lipschitz constant of a relaxed map when rho fixes a point.
inline int cmd_dominate(const RunConfig& cfg, std::ostream& out) {
  const auto s = detail::make_setup(cfg);
  const int len = cfg.integer("L", 4);
  const double ratio = length_spectrum_ratio(s.surface.j, s.rho, len);
  detail::Report r;
  r.row("length spectrum ratio", ratio);
  r.row("words up to length", len);
  std::optional<double> lambda;
  if (s.rho_kind == "trivial" || s.rho_kind == "elliptic" || s.rho_kind == "fuchsian") {
    const EquivariantMap f = detail::make_map(cfg, s);
    lambda = measure_lipschitz(f, cfg.integer("lipschitz-refine", 2)).lambda;
    r.row("lambda (mesh estimate)", *lambda);
    r.row("mesh h", f.mesh().h);
  }
  const bool dominated = ratio < 1.0 && lambda && *lambda < 1.0;
  r.row("verdict", dominated ? "strictly dominated (heuristic)" : "not strictly dominated");
  r.write(out, cfg, "dominate", true);
  return kExitPass;
}

inline int cmd_build_map(const RunConfig& cfg, std::ostream& out) {
  const auto s = detail::make_setup(cfg);
  const EquivariantMap f = detail::make_map(cfg, s);
  detail::Report r;
  r.row("vertices", f.mesh().vertex_count());
  r.row("triangles", f.mesh().triangle_count());
  r.row("mesh h", f.mesh().h);
  r.row("energy", f.energy());
  r.row("equivariance residual", f.equivariance_residual());
  r.row("lambda (mesh estimate)", measure_lipschitz(f, 2).lambda);
  const bool pass = f.equivariance_residual() < 1e-9;
  r.write(out, cfg, "build-map", pass);
  if (cfg.has("out")) save_map(cfg.str("out", ""), f, cfg.seed("seed", 1));
  return pass ? kExitPass : kExitFail;
}

/// Fiber, equivariance and differential identities of pi on random samples.
inline int cmd_fibration_check(const RunConfig& cfg, std::ostream& out) {
  RunConfig c = cfg;
  if (!c.has("rho") && !c.has("rep") && !c.has("map-file")) c.set("rho", "elliptic");
  const EquivariantMap f = detail::map_from(c);
  const FibrationContext ctx = make_context(f);
  const int triples = c.integer("samples", 1000);
  const int fd_samples = c.integer("fd-samples", 200);
  const double tol = c.real("tol", 1e-9);
  const double fd_tol = c.real("fd-tol", 1e-5);
  std::mt19937_64 rng(c.seed("seed", 1));
  std::normal_distribution<double> gauss;
  auto algebra = [&]() {
    AlgebraVector<2>::Coeffs v;
    for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    return AlgebraVector<2>::from_coeffs(v);
  };
  const auto& j = ctx.j();
  const auto& rho = ctx.rho();
  double fiber = 0.0, equiv = 0.0, contraction = 0.0;
  int max_iter = 0;
  for (int t = 0; t < triples; ++t) {
    const Isometry<2> g = group_exp(algebra());
    const FixedPoint fp = pi_solve(ctx, g);
    max_iter = std::max(max_iter, fp.iterations);
    contraction = std::max(contraction, fp.residual);
    const Isometry<2> k = stabilizer_element(fp.point, haar_sample<2>(rng).matrix());
    fiber = std::max(fiber, dist(pi(ctx, k * g), fp.point));
    const int gen = t % j.generator_count();
    const Isometry<2> h = j.image(gen) * g * rho.image(gen).inverse();
    equiv = std::max(equiv, dist(pi(ctx, h), j.image(gen)(fp.point)));
  }
  double fd_err = 0.0;
  int resampled = 0;
  const double step = 1e-6;
  for (int t = 0; t < fd_samples;) {
    const Isometry<2> g = group_exp(algebra());
    const AlgebraVector<2> u = algebra();
    // central differences across a crease of the piecewise map are meaningless
    if (f.sample(pi(ctx, g)).min_barycentric < 1e-4) {
      ++resampled;
      continue;
    }
    const Vec<2> w = dpi(ctx, g, u).vector();
    const Vec<2> fd = (pi(ctx, group_exp(u * step) * g).coords() - pi(ctx, group_exp(u * -step) * g).coords()) /
                      (2.0 * step);
    fd_err = std::max(fd_err, (fd - w).norm() / w.norm());
    ++t;
  }
  detail::Report r;
  r.row("lambda", ctx.lambda);
  r.row("max iterations", max_iter);
  r.row("contraction residual", contraction);
  r.row("fiber residual", fiber);
  r.row("equivariance residual", equiv);
  r.row("dpi relative error", fd_err);
  r.row("near-edge resamples", resampled);
  r.csv_header("check,value,tolerance");
  r.csv("fiber," + detail::fmt17(fiber) + "," + detail::fmt17(tol));
  r.csv("equivariance," + detail::fmt17(equiv) + "," + detail::fmt17(tol));
  r.csv("dpi," + detail::fmt17(fd_err) + "," + detail::fmt17(fd_tol));
  const bool pass = fiber < tol && equiv < tol && fd_err < fd_tol;
  r.write(out, c, "fibration-check", pass);
  if (c.has("out")) r.write_csv(c.str("out", ""));
  return pass ? kExitPass : kExitFail;
}

inline int cmd_volume_rep(const RunConfig& cfg, std::ostream& out) {
  const EquivariantMap f = detail::map_from(cfg);
  QuadratureSpec area;
  area.refine = f.mesh().refine;
  detail::Report r;
  r.row("vol_rho", vol_representation(f));
  r.row("vol_j", hyperbolic_area(f.domain(), area).value);
  r.row("mesh h", f.mesh().h);
  r.write(out, cfg, "volume-rep", true);
  return kExitPass;
}

inline std::string volume_csv_header() { return "n,genus,punctures,vol_j,vol_rho,formula,fiberwise,stderr,lambda,h,seed"; }

inline std::string volume_csv_row(const VolumeReport& v) {
  return detail::join({std::to_string(v.n), std::to_string(v.genus), std::to_string(v.punctures),
                       detail::fmt17(v.vol_j), detail::fmt17(v.vol_rho), detail::fmt17(v.quotient_formula),
                       detail::fmt17(v.quotient_fiberwise.value), detail::fmt17(v.quotient_fiberwise.std_error),
                       detail::fmt17(v.lambda), detail::fmt17(v.h), std::to_string(v.seed)});
}

/// Formula and fiberwise quotient volumes for the configured pair.
inline int cmd_quotient_volume(const RunConfig& cfg, std::ostream& out) {
  const EquivariantMap f = detail::map_from(cfg);
  const FibrationContext ctx = make_context(f);
  QuadratureSpec q;
  q.refine = cfg.integer("quad-refine", 2);
  q.samples = cfg.count("samples", 20000);
  q.seed = cfg.seed("seed", 1);
  const VolumeReport v = quotient_volume(ctx, q);
  detail::Report r;
  r.row("vol_j", v.vol_j);
  r.row("vol_rho", v.vol_rho);
  r.row("formula", v.quotient_formula);
  r.row("fiberwise (quadrature)", v.quotient_deterministic);
  r.row("fiberwise (fiber MC)", v.quotient_fiberwise.value);
  r.row("fiber MC stderr", v.quotient_fiberwise.std_error);
  r.row("volume / 4 pi^2", v.quotient_formula / (4.0 * std::numbers::pi * std::numbers::pi));
  r.row("lambda", v.lambda);
  r.row("mesh h", v.h);
  r.row("jacobian bound violations", v.bound_violations);
  r.csv_header(volume_csv_header());
  r.csv(volume_csv_row(v));
  const bool pass = v.fiberwise_agrees() && v.paths_agree() && v.within_bounds() && v.bound_violations == 0;
  r.write(out, cfg, "quotient-volume", pass);
  if (cfg.has("out")) r.write_csv(cfg.str("out", ""));
  return pass ? kExitPass : kExitFail;
}

/// Schlafli constants from random paths in H^2 and H^3.
inline int cmd_schlafli_check(const RunConfig& cfg, std::ostream& out) {
  const int only = cfg.integer("n", 0);
  const int paths = cfg.integer("paths", 20);
  const double tol = cfg.real("tol", 1e-3);
  const double step = cfg.real("step", 0.01);
  if (only != 0 && only != 2 && only != 3) throw PreconditionViolation("schlafli-check: n must be 2 or 3");
  std::mt19937_64 rng(cfg.seed("seed", 1));
  detail::Report r;
  r.csv_header("n,path,c,residual,second_order");
  bool pass = true;
  auto run = [&](auto dim) {
    constexpr int N = decltype(dim)::value;
    double lo = 1e300, hi = -1e300;
    bool order = true;
    for (int p = 0; p < paths; ++p) {
      const auto path = random_simplex_path<N>(rng);
      const auto rep = schlafli_check(path, step, 3);
      lo = std::min(lo, rep.c);
      hi = std::max(hi, rep.c);
      order = order && rep.second_order;
      r.csv(detail::join({std::to_string(N), std::to_string(p), detail::fmt17(rep.c), detail::fmt17(rep.max_residual),
                          rep.second_order ? "1" : "0"}));
    }
    const double expected = schlafli_constant<N>();
    r.row("c_" + std::to_string(N) + " min", lo);
    r.row("c_" + std::to_string(N) + " max", hi);
    r.row("c_" + std::to_string(N) + " expected", expected);
    r.row("c_" + std::to_string(N) + " second order", order ? "yes" : "no");
    pass = pass && std::abs(lo - expected) < tol && std::abs(hi - expected) < tol && hi - lo < tol && order;
  };
  if (only == 0 || only == 2) run(std::integral_constant<int, 2>());
  if (only == 0 || only == 3) run(std::integral_constant<int, 3>());
  r.write(out, cfg, "schlafli-check", pass);
  if (cfg.has("out")) r.write_csv(cfg.str("out", ""));
  return pass ? kExitPass : kExitFail;
}

using Command = std::function<int(const RunConfig&, std::ostream&)>;

inline const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"haar-check", cmd_haar_check},       {"vn", cmd_vn},
      {"fuchsian", cmd_fuchsian},           {"euler", cmd_euler},
      {"dominate", cmd_dominate},           {"build-map", cmd_build_map},
      {"fibration-check", cmd_fibration_check}, {"volume-rep", cmd_volume_rep},
      {"quotient-volume", cmd_quotient_volume}, {"schlafli-check", cmd_schlafli_check},
  };
  return table;
}

/// Runs a command, mapping configuration errors to exit code 2 and
/// numerical failures to 1. Messages go to err.
inline int run_command(const std::string& verb, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(verb);
  if (it == commands().end()) {
    err << "hypvol: unknown command '" << verb << "'\n";
    return kExitConfig;
  }
  try {
    const int code = it->second(cfg, out);
    for (const auto& k : cfg.unused()) err << "hypvol: warning: unused key '" << k << "'\n";
    return code;
  } catch (const ParseError& e) {
    err << "hypvol: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionViolation& e) {
    err << "hypvol: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionMismatch& e) {
    err << "hypvol: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "hypvol: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace hypvol

#endif  // HYPVOL_COMMANDS_HPP
