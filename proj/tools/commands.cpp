#include "commands.hpp"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "zeitlin/basis.hpp"
#include "zeitlin/circulation.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/field_io.hpp"
#include "zeitlin/harmonics.hpp"
#include "zeitlin/measures.hpp"
#include "zeitlin/remainder.hpp"
#include "zeitlin/structure_table.hpp"
#include "zeitlin/wigner.hpp"
#include "zeitlin/wigner_exact.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zeitlin;

namespace {

constexpr double kVerifyTol = 1e-8;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json cjson(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json estimate_json(const measures::Estimate& e) { return {{"mean", e.mean}, {"se", e.se}}; }

void write_text(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
  f << text;
}

void emit(const json& j, const std::string& out) { write_text(out, j.dump(2) + "\n"); }

int verdict(bool pass) { return pass ? kOk : kCheckFailed; }

structconst::BracketScale scale_of(const GlobalOptions& g) { return structconst::parse_scale(g.scale); }

fs::path cache_dir(const GlobalOptions& g) {
  return g.cache_dir.empty() ? structconst::default_cache_dir() : fs::path(g.cache_dir);
}

// Output files must land in an existing directory.
const CLI::Validator kWritable(
    [](std::string& p) -> std::string {
      if (p.empty() || p == "-") return {};
      fs::path parent = fs::path(p).parent_path();
      if (parent.empty()) parent = ".";
      if (!fs::is_directory(parent)) return "directory '" + parent.string() + "' does not exist";
      return {};
    },
    "PATH", "writable");

template <class Opts>
std::shared_ptr<Opts> leaf(CLI::App* sub, const GlobalOptions& g, std::function<int()>& action,
                           int (*run)(const Opts&, const GlobalOptions&)) {
  auto o = std::make_shared<Opts>();
  sub->configurable();
  sub->callback([o, &g, &action, run] { action = [o, &g, run] { return run(*o, g); }; });
  return o;
}

// wigner eval

struct WignerOpts {
  bool threej = false, sixj = false, exact = false;
  std::vector<int> twice;
};

int run_wigner(const WignerOpts& o, const GlobalOptions&) {
  if (o.threej == o.sixj) throw std::invalid_argument("wigner eval: give exactly one of --threej, --sixj");
  if (o.twice.size() != 6) throw std::invalid_argument("wigner eval: expected six 2j values");
  std::array<wigner::HalfInt, 6> h;
  for (int i = 0; i < 6; ++i) h[i] = wigner::HalfInt::from_twice(o.twice[i]);
  json j{{"symbol", o.threej ? "3j" : "6j"}, {"twice", o.twice}};
  if (o.threej) {
    j["value"] = wigner::three_j(h[0], h[1], h[2], h[3], h[4], h[5]);
  } else {
    j["value"] = wigner::six_j(h[0], h[1], h[2], h[3], h[4], h[5]);
  }
  if (o.exact) {
    auto s = o.threej ? wigner::exact::three_j(h[0], h[1], h[2], h[3], h[4], h[5])
                      : wigner::exact::six_j(h[0], h[1], h[2], h[3], h[4], h[5]);
    j["exact"] = {{"coeff", s.coeff.get_str()}, {"radicand", s.radicand.get_str()}, {"value", s.to_double()}};
  }
  emit(j, "");
  return kOk;
}

// structconst build / verify

struct BuildOpts {
  int N = 5;
  std::string out;
};

int run_build(const BuildOpts& o, const GlobalOptions& g) {
  const auto s = scale_of(g);
  json j{{"N", o.N}, {"scale", std::string(structconst::scale_name(s))}};
  structconst::StructureTable t;
  if (o.out.empty()) {
    bool hit = false;
    t = structconst::StructureTable::cached(o.N, s, cache_dir(g), &hit);
    j["cache_dir"] = cache_dir(g).string();
    j["cache_hit"] = hit;
  } else {
    t = structconst::StructureTable::build(o.N, s);
    t.save(o.out);
    j["file"] = o.out;
  }
  j["entries"] = t.size();
  j["checksum"] = t.checksum();
  emit(j, "");
  return kOk;
}

struct VerifyOpts {
  int N = 5;
  int lmax_quadrature = 6;
  std::string out;
};

int run_verify(const VerifyOpts& o, const GlobalOptions& g) {
  const auto s = scale_of(g);
  const auto table = structconst::StructureTable::build(o.N, s);
  const double closure = basis::closure_residual(basis::shared_basis(o.N), table);

  // Continuous constants against the Poisson-bracket quadrature.
  const int L = std::min(o.N - 1, o.lmax_quadrature);
  double quad = 0.0, forms = 0.0;
  std::size_t quad_count = 0;
  for (int l = 1; l <= L; ++l)
    for (int lp = 1; lp <= L; ++lp)
      for (int lb = std::max(1, std::abs(l - lp)); lb <= std::min(L, l + lp); ++lb) {
        if ((l + lp + lb) % 2 == 0) continue;
        for (int m = -l; m <= l; ++m)
          for (int mp = -lp; mp <= lp; ++mp) {
            if (std::abs(m + mp) > lb) continue;
            structconst::TripleIndex t{l, m, lp, mp, lb, m + mp};
            quad = std::max(quad, std::fabs(structconst::continuous_C(t) - harmonics::quadrature_bracket_oracle(t)));
            ++quad_count;
          }
      }
  // 6j and expanded product forms of the discrete constant.
  table.for_each([&](const structconst::TripleIndex& t, double) {
    forms = std::max(forms, std::fabs(structconst::discrete_C_6j(o.N, t, s) - structconst::discrete_C_expanded(o.N, t, s)));
  });
  // A cached table reproduces the fresh build.
  const auto cached = structconst::StructureTable::cached(o.N, s, cache_dir(g));
  const bool cache_ok = cached == table;

  const bool pass = closure <= kVerifyTol && quad <= kVerifyTol && forms <= kVerifyTol && cache_ok;
  json j{{"N", o.N},
         {"scale", std::string(structconst::scale_name(s))},
         {"tolerance", kVerifyTol},
         {"entries", table.size()},
         {"closure_residual", closure},
         {"quadrature_residual", quad},
         {"quadrature_triples", quad_count},
         {"form_residual", forms},
         {"cache_matches_build", cache_ok},
         {"pass", pass}};
  emit(j, o.out);
  return verdict(pass);
}

// simulate

struct SimulateOpts {
  int N = 9;
  double dt = 1e-3, T = 1.0;
  std::string integrator = "isospectral4";
  std::uint64_t seed = 0;
  std::string init;
  bool raw = false;
  int stride = 1, kmax = 0;
  bool accelerate = false;
  double drift_tol = 1e-8;
  std::string out, csv, report;
};

int run_simulate(const SimulateOpts& o, const GlobalOptions& g) {
  dynamics::FlowConfig cfg;
  cfg.N = o.N;
  cfg.dt = o.dt;
  cfg.T_final = o.T;
  cfg.integrator = dynamics::parse_integrator(o.integrator);
  cfg.scale = scale_of(g);
  cfg.monitor_stride = o.stride;
  cfg.kmax = o.kmax;
  cfg.validate();

  basis::QuantizedField W0;
  if (!o.init.empty()) {
    W0 = io::load_field(o.init);
    if (W0.N() != o.N) throw std::invalid_argument("simulate: initial field has N=" + std::to_string(W0.N()));
  } else if (o.raw) {
    auto rng = make_rng(o.seed, streams::kInitialCondition, 0);
    W0 = measures::sample_field(o.N, rng);
  } else {
    W0 = dynamics::default_initial_condition(o.N, o.seed);
  }
  auto traj = dynamics::simulate(W0, cfg);
  const auto d = dynamics::drift(traj);
  if (o.accelerate) traj = dynamics::accelerate(traj, o.N);
  if (!o.out.empty()) io::write_trajectory(o.out, traj);

  if (!o.csv.empty()) {
    const std::size_t K = traj.diagnostics.front().C.size();
    std::ostringstream s;
    s << "t,H,M11_re,M11_im,M10_re,M10_im,M1m1_re,M1m1_im";
    for (std::size_t k = 0; k < K; ++k) s << ",C" << k + 2 << "_re,C" << k + 2 << "_im";
    s << ",spectral_radius,drift_H,drift_M";
    for (std::size_t k = 0; k < K; ++k) s << ",drift_C" << k + 2;
    s << ",drift_spectrum\n";
    for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) {
      const auto& x = traj.diagnostics[i];
      const auto f = dynamics::drift_at(traj, i);
      s << num(traj.times[i]) << ',' << num(x.H);
      for (auto m : x.M) s << ',' << num(m.real()) << ',' << num(m.imag());
      for (auto c : x.C) s << ',' << num(c.real()) << ',' << num(c.imag());
      s << ',' << num(x.spectral_radius) << ',' << num(f.H) << ',' << num(f.M);
      for (double c : f.casimir) s << ',' << num(c);
      s << ',' << num(f.spectrum) << '\n';
    }
    write_text(o.csv, s.str());
  }

  const bool pass = d.H <= o.drift_tol && d.M <= o.drift_tol && d.casimir_max <= o.drift_tol &&
                    d.spectrum <= o.drift_tol;
  json j{{"N", o.N},
         {"dt", o.dt},
         {"T", o.T},
         {"integrator", dynamics::integrator_name(cfg.integrator)},
         {"scale", std::string(structconst::scale_name(cfg.scale))},
         {"seed", o.seed},
         {"frames", traj.times.size()},
         {"fixed_point_iterations", traj.fixed_point_iterations},
         {"halvings", traj.halvings},
         {"drift",
          {{"H", d.H}, {"M", d.M}, {"casimir", d.casimir}, {"spectrum", d.spectrum}, {"skew", d.skew}, {"trace", d.trace}}},
         {"drift_tolerance", o.drift_tol},
         {"pass", pass}};
  emit(j, o.report);
  return verdict(pass);
}

// measure

struct SampleOpts {
  int N = 3, count = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleOpts& o, const GlobalOptions&) {
  auto ens = measures::sample_mu(o.N, o.count, o.seed);
  std::ostringstream s;
  const int d = mode_count(o.N - 1);
  for (int a = 0; a < d; ++a) {
    const auto h = from_flat(a);
    s << (a ? "," : "") << "g_" << h.l << '_' << h.m;
  }
  s << '\n';
  for (const auto& w : ens.samples) {
    const auto g = w.real_coordinates();
    for (int a = 0; a < d; ++a) s << (a ? "," : "") << num(g[a]);
    s << '\n';
  }
  write_text(o.out, s.str());
  return kOk;
}

struct CovOpts {
  int N = 3, count = 100000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_covariance(const CovOpts& o, const GlobalOptions&) {
  const auto r = measures::covariance_check(measures::sample_mu(o.N, o.count, o.seed));
  emit({{"N", r.N},
        {"dim", r.dim},
        {"count", r.count},
        {"seed", o.seed},
        {"max_dev", r.max_dev},
        {"max_diag_dev", r.max_diag_dev},
        {"max_offdiag_dev", r.max_offdiag_dev},
        {"clt_bound", r.clt_bound},
        {"max_z", r.max_z},
        {"mean_norm_sq", {{"mean", r.mean_norm_sq}, {"se", r.mean_norm_sq_se}, {"expected", o.N * o.N - 1}}},
        {"pass", r.pass}},
       o.out);
  return verdict(r.pass);
}

struct WickOpts {
  int N = 4, count = 20000, random = 30;
  std::uint64_t seed = 0;
  std::string out;
};

int run_wick(const WickOpts& o, const GlobalOptions&) {
  const auto r = measures::wick_check(measures::sample_mu(o.N, o.count, o.seed),
                                      measures::wick_quadruples(o.N, o.random, o.seed));
  json rows = json::array();
  for (const auto& w : r.rows) {
    auto idx = [](HarmonicIndex h) { return json::array({h.l, h.m}); };
    rows.push_back({{"a", idx(w.q.a)},
                    {"b", idx(w.q.b)},
                    {"c", idx(w.q.c)},
                    {"d", idx(w.q.d)},
                    {"expected", cjson(w.expected)},
                    {"estimate", cjson(w.estimate)},
                    {"se", {w.se_re, w.se_im}},
                    {"z", w.z}});
  }
  emit({{"N", o.N}, {"count", r.count}, {"seed", o.seed}, {"rows", rows}, {"max_z", r.max_z}, {"pass", r.pass}}, o.out);
  return verdict(r.pass);
}

struct GibbsOpts {
  int N = 5, count = 2000, pcas = 4;
  double gamma = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gibbs(const GibbsOpts& o, const GlobalOptions&) {
  auto ens = measures::sample_mu(o.N, o.count, o.seed);
  const auto r = measures::gibbs_reweight(ens, o.gamma, o.pcas);
  json modes = json::array();
  for (int l = 1; l <= std::min(3, o.N - 1); ++l)
    modes.push_back({{"l", l}, {"m", 0}, {"second_moment", estimate_json(measures::weighted_mode_moment(ens, l, 0))}});
  emit({{"N", o.N},
        {"count", o.count},
        {"seed", o.seed},
        {"gamma", r.gamma},
        {"pcas", r.pcas},
        {"Z", estimate_json(r.Z)},
        {"ess", r.ess},
        {"ess_fraction", r.ess_fraction},
        {"min_weight", r.min_weight},
        {"max_weight", r.max_weight},
        {"degenerate", r.degenerate},
        {"modes", modes}},
       o.out);
  return verdict(!r.degenerate);
}

struct StatOpts {
  int N = 5, count = 2000;
  std::vector<double> times{0.5, 1.0};
  double dt = 0.01;
  std::string integrator = "isospectral4";
  std::uint64_t seed = 0;
  std::string out;
};

int run_stationarity(const StatOpts& o, const GlobalOptions&) {
  const auto r = measures::stationarity_check(o.N, o.count, o.times, o.dt, o.seed, dynamics::parse_integrator(o.integrator));
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"l", x.l}, {"m", x.m}, {"t", x.t}, {"m0", x.m0}, {"mt", x.mt}, {"se", x.se}, {"z", x.z}});
  emit({{"N", r.N}, {"count", r.count}, {"seed", o.seed}, {"times", r.times}, {"rows", rows}, {"max_z", r.max_z},
        {"pass", r.pass}},
       o.out);
  return verdict(r.pass);
}

struct SpectralOpts {
  int N = 7, kmax = 6;
  std::uint64_t seed = 0;
  std::string field, out;
};

int run_spectral(const SpectralOpts& o, const GlobalOptions&) {
  basis::QuantizedField W;
  if (!o.field.empty()) {
    W = io::load_field(o.field);
  } else {
    auto rng = make_rng(o.seed, streams::kSampleMu, 0);
    W = measures::sample_field(o.N, rng);
  }
  const auto d = measures::spectral_circulations(W);
  const auto r = measures::spectral_check(W, o.kmax);
  json ev = json::array();
  for (auto l : d.eigenvalues) ev.push_back(l.imag());
  emit({{"N", W.N()},
        {"kmax", r.kmax},
        {"eigenvalues_imag", ev},
        {"power_sum", r.power_sum},
        {"orthogonality", r.orthogonality},
        {"recovery", r.recovery},
        {"completeness", r.completeness},
        {"real_part", r.real_part},
        {"trace_sum", r.trace_sum},
        {"pass", r.pass}},
       o.out);
  return verdict(r.pass);
}

struct CircOpts {
  std::string curve = "latitude:radius=1.0";
  int lmax = 16, count = 20000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_circulation(const CircOpts& o, const GlobalOptions&) {
  const auto c = circulation::parse_curve(o.curve);
  const auto r = circulation::circulation_variance(c, o.lmax);
  json j{{"curve", o.curve},
         {"family", circulation::curve_name(c.family)},
         {"lmax", r.lmax},
         {"nodes", r.nodes},
         {"variance", r.variance},
         {"tail_estimate", r.tail_estimate},
         {"quadrature_error", r.quadrature_error},
         {"shells", r.shells},
         {"area", r.area},
         {"full_variance", r.full_variance}};
  bool pass = true;
  if (o.count > 0) {
    const auto mc = circulation::circulation_mc(c, o.lmax, o.count, o.seed);
    j["mc"] = {{"count", mc.count}, {"seed", o.seed}, {"variance", estimate_json(mc.variance)}, {"z", mc.z},
               {"max_imag", mc.max_imag}, {"pass", mc.pass}};
    pass = mc.pass;
  }
  j["pass"] = pass;
  emit(j, o.out);
  return verdict(pass);
}

// remainder

struct RateOpts {
  std::vector<int> Ns{5, 9, 17, 33};
  double exponent = 4.0;
  int mc = 0;
  std::uint64_t seed = 0;
  std::string out, csv;
};

json rate_json(const remainder::RateReport& r) {
  return {{"Ns", r.Ns},
          {"values", r.values},
          {"fitted_exponent", r.fitted_exponent},
          {"envelope", r.envelope},
          {"C", r.C},
          {"C_max", r.C_max},
          {"bound_values", r.bound_values},
          {"decreasing", r.decreasing},
          {"below_envelope", r.below_envelope},
          {"pass", r.pass}};
}

void rate_csv(const remainder::RateReport& r, const std::string& out) {
  std::ostringstream s;
  s << "N,value,envelope,bound\n";
  for (std::size_t i = 0; i < r.Ns.size(); ++i)
    s << r.Ns[i] << ',' << num(r.values[i]) << ',' << num(r.envelope[i]) << ',' << num(r.bound_values[i]) << '\n';
  write_text(out, s.str());
}

int run_sphere(const RateOpts& o, const GlobalOptions& g) {
  const auto s = scale_of(g);
  const auto r = remainder::rate_check_sphere(o.Ns, o.exponent, s);
  json j = rate_json(r);
  j["kind"] = "sphere";
  j["kappa"] = o.exponent;
  j["scale"] = std::string(structconst::scale_name(s));
  j["partition"] = {{"far", r.far}, {"near", r.near}, {"far_below", r.far_below}, {"near_below", r.near_below}};
  json wick = json::array();
  for (int N : o.Ns) {
    const auto e = remainder::expected_remainder(N, o.exponent, s);
    wick.push_back({{"N", N}, {"first_term_max", e.first_term_max}, {"collapse_max", e.collapse_max}});
  }
  j["first_wick_term"] = wick;
  if (o.mc > 0) {
    json mc = json::array();
    for (std::size_t i = 0; i < o.Ns.size(); ++i) {
      const auto e = remainder::mc_remainder_sq(o.Ns[i], o.exponent, o.mc, o.seed, s);
      mc.push_back({{"N", o.Ns[i]}, {"mean", e.mean}, {"se", e.se}, {"z", (e.mean - r.values[i]) / e.se}});
    }
    j["mc"] = {{"count", o.mc}, {"seed", o.seed}, {"rows", mc}};
  }
  if (!o.csv.empty()) rate_csv(r, o.csv);
  emit(j, o.out);
  return verdict(r.pass);
}

int run_torus(const RateOpts& o, const GlobalOptions&) {
  const auto r = remainder::rate_check_torus(o.Ns, o.exponent);
  json j = rate_json(r);
  j["kind"] = "torus";
  j["s"] = o.exponent;
  if (o.mc > 0) {
    json mc = json::array();
    for (std::size_t i = 0; i < o.Ns.size(); ++i) {
      const auto e = remainder::torus_mc_remainder_sq(o.Ns[i], o.exponent, o.mc, o.seed);
      mc.push_back({{"N", o.Ns[i]}, {"mean", e.mean}, {"se", e.se}, {"z", (e.mean - r.values[i]) / e.se}});
    }
    j["mc"] = {{"count", o.mc}, {"seed", o.seed}, {"rows", mc}};
  }
  if (!o.csv.empty()) rate_csv(r, o.csv);
  emit(j, o.out);
  return verdict(r.pass);
}

struct PlotOpts {
  std::string in, out, image = "remainder.png";
};

int run_plot(const PlotOpts& o, const GlobalOptions&) {
  std::ifstream f(o.in);
  if (!f) throw std::runtime_error("plot: cannot read '" + o.in + "'");
  json j;
  f >> j;
  for (const char* key : {"Ns", "values", "bound_values"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("plot: report is missing '") + key + "'");
  std::ostringstream s;
  s << "# value against N on log-log axes\n";
  s << "set terminal pngcairo size 800,600\n";
  s << "set output '" << o.image << "'\n";
  s << "set logscale xy\nset xlabel 'N'\nset ylabel 'E|r^N|^2'\nset key top right\n";
  s << "$data << EOD\n";
  for (std::size_t i = 0; i < j["Ns"].size(); ++i)
    s << j["Ns"][i].get<int>() << ' ' << num(j["values"][i].get<double>()) << ' '
      << num(j["bound_values"][i].get<double>()) << '\n';
  s << "EOD\n";
  s << "plot $data using 1:2 with linespoints title '" << j.value("kind", std::string("remainder"))
    << "', \\\n     $data using 1:3 with lines dashtype 2 title 'C * envelope'\n";
  write_text(o.out, s.str());
  return kOk;
}

}  // namespace

void register_commands(CLI::App& app, const GlobalOptions& g, std::function<int()>& action) {
  auto* wig = app.add_subcommand("wigner", "Wigner 3j / 6j symbols")->configurable();
  {
    auto* c = wig->add_subcommand("eval", "Evaluate one symbol; arguments are 2j values");
    auto o = leaf<WignerOpts>(c, g, action, run_wigner);
    c->add_flag("--threej", o->threej, "j1 j2 j3 m1 m2 m3");
    c->add_flag("--sixj", o->sixj, "j1 j2 j3 j4 j5 j6");
    c->add_flag("--exact", o->exact, "Also print the exact rational form");
    c->add_option("twice", o->twice, "Six values of 2j")->required()->expected(6);
  }

  auto* sc = app.add_subcommand("structconst", "Structure constant tables")->configurable();
  {
    auto* c = sc->add_subcommand("build", "Build a table and store it (in the cache unless --out)");
    auto o = leaf<BuildOpts>(c, g, action, run_build);
    c->add_option("--N", o->N, "Matrix dimension")->check(CLI::Range(2, 257));
    c->add_option("--out", o->out, "Table file")->check(kWritable);
  }
  {
    auto* c = sc->add_subcommand("verify", "Check the table against the matrix and quadrature oracles");
    auto o = leaf<VerifyOpts>(c, g, action, run_verify);
    c->add_option("--N", o->N, "Matrix dimension")->check(CLI::Range(2, 65));
    c->add_option("--lmax-quadrature", o->lmax_quadrature, "Largest l in the quadrature sweep")->check(CLI::Range(1, 20));
    c->add_option("--out", o->out, "JSON report")->check(kWritable);
  }

  {
    auto* c = app.add_subcommand("simulate", "Integrate the quantized Euler equations");
    auto o = leaf<SimulateOpts>(c, g, action, run_simulate);
    c->add_option("--N", o->N, "Matrix dimension")->check(CLI::Range(2, 129));
    c->add_option("--dt", o->dt, "Time step")->check(CLI::PositiveNumber);
    c->add_option("--T", o->T, "Final time")->check(CLI::PositiveNumber);
    c->add_option("--integrator", o->integrator, "isospectral4 | isospectral | rk4")
        ->check(CLI::IsMember({"isospectral4", "isospectral", "isospectral-midpoint", "rk4"}));
    c->add_option("--seed", o->seed, "Seed for the initial condition");
    c->add_option("--init", o->init, "Initial field (.json or binary)")->check(CLI::ExistingFile);
    c->add_flag("--raw-sample", o->raw, "Start from a raw mu_N sample instead of a unit-norm one");
    c->add_option("--stride", o->stride, "Record every k-th step")->check(CLI::PositiveNumber);
    c->add_option("--kmax", o->kmax, "Largest Casimir order (0: min(6, N))")->check(CLI::NonNegativeNumber);
    c->add_flag("--accelerate", o->accelerate, "Relabel times t -> t / N^{3/2}");
    c->add_option("--drift-tol", o->drift_tol, "Relative drift allowed for H, M, C_k and the spectrum");
    c->add_option("--out", o->out, "Trajectory file")->check(kWritable);
    c->add_option("--csv", o->csv, "Diagnostics CSV")->check(kWritable);
    c->add_option("--report", o->report, "JSON summary (stdout if omitted)")->check(kWritable);
  }

  auto* ms = app.add_subcommand("measure", "Gaussian enstrophy measure checks")->configurable();
  {
    auto* c = ms->add_subcommand("sample", "Write mu_N samples as real coordinates (CSV)");
    auto o = leaf<SampleOpts>(c, g, action, run_sample);
    c->add_option("--N", o->N)->check(CLI::Range(2, 129));
    c->add_option("--count", o->count)->check(CLI::PositiveNumber);
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("covariance", "Empirical covariance against the identity");
    auto o = leaf<CovOpts>(c, g, action, run_covariance);
    c->add_option("--N", o->N)->check(CLI::Range(2, 33));
    c->add_option("--count", o->count)->check(CLI::Range(2, 100000000));
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("wick", "Fourth moments against the Isserlis-Wick expansion");
    auto o = leaf<WickOpts>(c, g, action, run_wick);
    c->add_option("--N", o->N)->check(CLI::Range(2, 33));
    c->add_option("--count", o->count)->check(CLI::Range(10000, 100000000));
    c->add_option("--random", o->random, "Random quadruples besides the structured ones")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("gibbs", "Importance weights exp(-gamma Tr W^p)");
    auto o = leaf<GibbsOpts>(c, g, action, run_gibbs);
    c->add_option("--N", o->N)->check(CLI::Range(2, 65));
    c->add_option("--count", o->count)->check(CLI::PositiveNumber);
    c->add_option("--gamma", o->gamma)->check(CLI::NonNegativeNumber);
    c->add_option("--pcas", o->pcas, "Casimir order, a positive multiple of 4");
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("stationarity", "Second moments along the flow");
    auto o = leaf<StatOpts>(c, g, action, run_stationarity);
    c->add_option("--N", o->N)->check(CLI::Range(2, 33));
    c->add_option("--count", o->count)->check(CLI::PositiveNumber);
    c->add_option("--times", o->times)->delimiter(',');
    c->add_option("--dt", o->dt)->check(CLI::PositiveNumber);
    c->add_option("--integrator", o->integrator)
        ->check(CLI::IsMember({"isospectral4", "isospectral", "isospectral-midpoint", "rk4"}));
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("spectral", "Eigen-decomposition and power sums of one field");
    auto o = leaf<SpectralOpts>(c, g, action, run_spectral);
    c->add_option("--N", o->N)->check(CLI::Range(2, 129));
    c->add_option("--kmax", o->kmax)->check(CLI::Range(1, 32));
    c->add_option("--seed", o->seed);
    c->add_option("--field", o->field, "Field file instead of a sample")->check(CLI::ExistingFile);
    c->add_option("--out", o->out)->check(kWritable);
  }
  {
    auto* c = ms->add_subcommand("circulation", "Circulation variance along a curve");
    auto o = leaf<CircOpts>(c, g, action, run_circulation);
    c->add_option("--curve", o->curve, "family:key=value,... (latitude, great_circle, small_circle, ellipse)");
    c->add_option("--lmax", o->lmax)->check(CLI::Range(2, 512));
    c->add_option("--count", o->count, "Monte Carlo samples (0: spectral only)")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out)->check(kWritable);
  }

  auto* rm = app.add_subcommand("remainder", "Quantization remainder and decay rates")->configurable();
  for (const char* kind : {"sphere", "torus"}) {
    const bool sphere = std::string(kind) == "sphere";
    auto* c = rm->add_subcommand(kind, sphere ? "E|r^N|^2 in H^-kappa on the sphere" : "E|r^N|^2 in H^-s on the torus");
    auto o = leaf<RateOpts>(c, g, action, sphere ? run_sphere : run_torus);
    if (!sphere) o->exponent = 5.0;
    c->add_option("--Ns", o->Ns, "Odd levels, increasing")->delimiter(',');
    c->add_option(sphere ? "--kappa" : "--s", o->exponent, "Sobolev exponent")->check(CLI::PositiveNumber);
    c->add_option("--mc", o->mc, "Monte Carlo samples per level (0: none)")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", o->seed);
    c->add_option("--out", o->out, "JSON report")->check(kWritable);
    c->add_option("--csv", o->csv, "CSV for plotting")->check(kWritable);
  }
  {
    auto* c = rm->add_subcommand("plot", "Gnuplot script for a rate report");
    auto o = leaf<PlotOpts>(c, g, action, run_plot);
    c->add_option("--in", o->in, "Report from remainder sphere|torus")->required()->check(CLI::ExistingFile);
    c->add_option("--out", o->out, "Script file (stdout if omitted)")->check(kWritable);
    c->add_option("--image", o->image, "PNG the script renders to");
  }

  for (auto* grp : {wig, sc, ms, rm}) grp->require_subcommand(1);
}
