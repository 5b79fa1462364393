// quermass: profiles, eta tables, surface measures, flows, inequality sweeps
// and the self-test, from the command line.

#include "quermass/acceptance.hpp"
#include "quermass/ballgeom.hpp"
#include "quermass/errors.hpp"
#include "quermass/flow.hpp"
#include "quermass/hypersurface.hpp"
#include "quermass/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace q = quermass;

enum Exit : int { ok = 0, verdict_failure = 1, usage_error = 2, runtime_failure = 3 };

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Collects output and writes it to a file, or to stdout for "-" / empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw q::domain_error("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Serializes a double as JSON, keeping full precision and mapping NaN to null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json jlist(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) {
    a.push_back(jnum(x));
  }
  return a;
}

/// Turns a flat JSON object into command-line tokens placed ahead of the real
/// arguments, so explicit flags still win.
std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw q::domain_error("config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) {
    throw q::domain_error("config '" + path + "': expected a JSON object");
  }
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      command = value.get<std::string>();
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) {
        tokens.push_back(flag);
      }
    } else if (value.is_number_integer()) {
      tokens.push_back(flag);
      tokens.push_back(std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      tokens.push_back(flag);
      tokens.push_back(num(value.get<double>()));
    } else if (value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.get<std::string>());
    } else {
      throw q::domain_error("config '" + path + "': value of '" + key + "' must be a scalar");
    }
  }
  return tokens;
}

unsigned thread_count(int flag) {
  if (flag >= 0) {
    return static_cast<unsigned>(flag);
  }
  if (const char* env = std::getenv("QUERMASS_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 0) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
    throw q::domain_error("QUERMASS_THREADS must be a nonnegative integer");
  }
  return 0;
}

struct Options {
  int n = 3;
  int k = 1;
  int grid = 100;
  int N = 400;
  double rho_min = 0.05;
  double rho_max = q::half_pi;
  double tol = -1.0;
  std::string shape = "perturbed:0.9,0.05,2";
  std::string in;
  std::string out;
  std::string csv;
  std::string summary;
  std::string family;
  double dt = 1e-5;
  double cfl = 0.4;
  double t_max = 50.0;
  double stop_tol = 2e-3;
  int record_every = 10;
  std::string scheme = "heun";
  bool fixed_dt = false;
  long max_steps = 20'000'000;
  int threads = -1;
  unsigned long long seed = 20261014ull;
  bool skip_flow = false;
  bool raw = false;
};

int cmd_profile(const Options& o) {
  if (o.grid < 2) {
    throw q::domain_error("profile: --grid must be at least 2");
  }
  std::string text = "rho,area,vol";
  for (int k = 0; k <= o.n; ++k) {
    text += ",sigma_int_" + std::to_string(k);
  }
  for (int k = -1; k <= o.n; ++k) {
    text += ",quermass_" + std::to_string(k);
  }
  text += "\n";
  for (int j = 0; j < o.grid; ++j) {
    const double rho = j == o.grid - 1 ? o.rho_max : o.rho_min + (o.rho_max - o.rho_min) * j / (o.grid - 1);
    const auto p = q::ball_profile(o.n, rho);
    text += num(p.rho) + "," + num(p.area) + "," + num(p.vol);
    for (double v : p.sigma_int) {
      text += "," + num(v);
    }
    for (double v : p.quermass.list()) {
      text += "," + num(v);
    }
    text += "\n";
  }
  emit(o.out, text);
  std::fprintf(stderr, "profile: n=%d, %d radii in [%s, %s]\n", o.n, o.grid, num(o.rho_min).c_str(),
               num(o.rho_max).c_str());
  return ok;
}

int cmd_eta(const Options& o) {
  if (o.grid < 2) {
    throw q::domain_error("eta: --grid must be at least 2");
  }
  if (o.k < 1 || o.k > o.n - 1) {
    throw q::domain_error("eta: need 1 <= k <= n-1");
  }
  const double top = q::hemisphere_quermass(o.n, o.k - 1);
  std::vector<double> s(static_cast<std::size_t>(o.grid));
  std::vector<double> param(s.size());
  for (int j = 0; j < o.grid; ++j) {
    s[static_cast<std::size_t>(j)] = top * (0.05 + 0.9 * j / (o.grid - 1));
    param[static_cast<std::size_t>(j)] = q::eta(o.n, o.k, s[static_cast<std::size_t>(j)]);
  }
  std::vector<double> ref(s.size());
  if (o.k == 1) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      ref[j] = q::eta1_closed(o.n, s[j]);
    }
  } else {
    const auto ys = q::eta_ode_integrate(o.n, o.k, s[0], param[0], std::span<const double>(s).subspan(1), 16);
    std::copy(ys.begin(), ys.end(), ref.begin());
  }
  const double tol = o.tol > 0.0 ? o.tol : (o.k == 1 ? 1e-8 : 1e-4);
  std::string text = std::string("s,eta_parametric,") + (o.k == 1 ? "eta_closed" : "eta_ode") + ",rel_diff\n";
  double worst = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double r = std::abs(param[j] - ref[j]) / std::max(std::abs(param[j]), std::abs(ref[j]));
    worst = std::max(worst, r);
    text += num(s[j]) + "," + num(param[j]) + "," + num(ref[j]) + "," + num(r) + "\n";
  }
  emit(o.out, text);
  const bool pass = worst < tol;
  std::fprintf(stderr, "eta: n=%d k=%d max rel diff %.3e (tol %.1e) %s\n", o.n, o.k, worst, tol,
               pass ? "pass" : "FAIL");
  return pass ? ok : verdict_failure;
}

q::AxiSurface read_surface_csv(const std::string& path, int n) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw q::domain_error("surface: '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "theta,rho") {
    throw q::domain_error("surface: expected header 'theta,rho', got '" + line + "'");
  }
  std::vector<double> theta;
  std::vector<double> rho;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) {
        throw std::invalid_argument("missing comma");
      }
      std::size_t used = 0;
      theta.push_back(std::stod(line.substr(0, comma), &used));
      rho.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw q::domain_error("surface: malformed row " + std::to_string(row) + ": '" + line + "'");
    }
  }
  const std::size_t count = rho.size();
  if (count < 5) {
    throw q::domain_error("surface: need at least 5 rows");
  }
  const double h = q::pi / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(theta[i] - h * static_cast<double>(i)) > 1e-9) {
      throw q::domain_error("surface: theta must be the uniform grid i*pi/N (row " + std::to_string(i + 2) + ")");
    }
  }
  return q::AxiSurface(n, std::move(rho));
}

json measures_json(const q::SurfaceMeasures& m, int N) {
  return json{{"n", m.n},
              {"N", N},
              {"strictly_convex", m.convexity.strictly_convex},
              {"convexity_margin", jnum(m.convexity.margin)},
              {"volume", jnum(m.volume)},
              {"sigma_int", jlist(m.sigma_int)},
              {"quermass", jlist(m.quermass.list())}};
}

int cmd_surface(const Options& o) {
  if (o.in.empty()) {
    throw q::domain_error("surface: --in is required");
  }
  const auto surf = read_surface_csv(o.in, o.n);
  const auto m = q::measure(surf);
  emit(o.out, measures_json(m, surf.intervals()).dump(2) + "\n");
  std::fprintf(stderr, "surface: N=%d strictly convex %s, margin %.6g\n", surf.intervals(),
               m.convexity.strictly_convex ? "yes" : "no", m.convexity.margin);
  return ok;
}

int cmd_flow(const Options& o) {
  q::FlowConfig c;
  c.n = o.n;
  c.k = o.k;
  c.dt_init = o.dt;
  c.cfl = o.cfl;
  c.t_max = o.t_max;
  c.stop_rho_tol = o.stop_tol;
  c.record_every = o.record_every;
  c.adaptive = !o.fixed_dt;
  c.max_steps = o.max_steps;
  if (o.scheme == "heun") {
    c.scheme = q::TimeScheme::heun;
  } else if (o.scheme == "euler") {
    c.scheme = q::TimeScheme::euler;
  } else {
    throw q::domain_error("flow: --scheme must be heun or euler");
  }
  c.validate();
  const auto initial = q::ShapeSpec::parse(o.shape).build(o.n, o.N);
  const auto trace = q::run(c, initial);

  std::string text = "t,rho_min,rho_max,kappa_min";
  for (int l = 0; l <= o.n; ++l) {
    text += ",sigma_int_" + std::to_string(l);
  }
  for (int l = -1; l <= o.n; ++l) {
    text += ",quermass_" + std::to_string(l);
  }
  text += ",q_value,resid_sigma_max,resid_A_max\n";
  for (const auto& r : trace.records) {
    text += num(r.t) + "," + num(r.rho_min) + "," + num(r.rho_max) + "," + num(r.kappa_min);
    for (double v : r.sigma_int) {
      text += "," + num(v);
    }
    for (double v : r.quermass.list()) {
      text += "," + num(v);
    }
    text += "," + num(r.q_value) + "," + num(r.resid_sigma) + "," + num(r.resid_A) + "\n";
  }
  emit(o.out, text);

  const bool mono = trace.q_monotone();
  const auto& first = trace.records.front();
  const auto& last = trace.records.back();
  json summary{{"q_monotone", mono},
               {"stop", q::to_string(trace.stop)},
               {"failed", trace.failed},
               {"message", trace.message},
               {"steps_accepted", trace.steps_accepted},
               {"steps_rejected", trace.steps_rejected},
               {"records", trace.records.size()},
               {"t_final", jnum(last.t)},
               {"q_initial", jnum(first.q_value)},
               {"q_final", jnum(last.q_value)},
               {"sigma_k_decay", jnum(first.sigma_int[static_cast<std::size_t>(o.k)] /
                                      last.sigma_int[static_cast<std::size_t>(o.k)])},
               {"final_quermass", jlist(last.quermass.list())},
               {"config",
                {{"n", c.n},
                 {"k", c.k},
                 {"N", o.N},
                 {"shape", o.shape},
                 {"dt", jnum(c.dt_init)},
                 {"cfl", jnum(c.cfl)},
                 {"t_max", jnum(c.t_max)},
                 {"stop_tol", jnum(c.stop_rho_tol)},
                 {"record_every", c.record_every},
                 {"scheme", q::to_string(c.scheme)},
                 {"fixed_dt", !c.adaptive}}}};
  const std::string js = summary.dump(2) + "\n";
  if (!o.summary.empty()) {
    emit(o.summary, js);
  }
  if (!o.out.empty() && o.out != "-") {
    std::cout << js;
  }
  std::fprintf(stderr, "flow: n=%d k=%d stop=%s t=%.6g records=%zu q_monotone=%s\n", c.n, c.k,
               q::to_string(trace.stop), last.t, trace.records.size(), mono ? "true" : "false");
  return mono && !trace.failed ? ok : verdict_failure;
}

int cmd_verify(const Options& o) {
  if (o.family.empty()) {
    throw q::domain_error("verify: --family is required");
  }
  json fam;
  try {
    fam = json::parse(read_file(o.family));
  } catch (const json::exception& e) {
    throw q::domain_error("family '" + o.family + "': " + e.what());
  }
  std::vector<q::ShapeSpec> shapes;
  std::vector<int> dims;
  int N = 800;
  bool refine = !o.raw;
  try {
    for (const auto& s : fam.at("shapes")) {
      shapes.push_back(q::ShapeSpec::parse(s.get<std::string>()));
    }
    for (const auto& n : fam.at("n")) {
      dims.push_back(n.get<int>());
    }
    N = fam.value("N", N);
    refine = fam.value("refine", refine) && !o.raw;
  } catch (const json::exception& e) {
    throw q::domain_error("family '" + o.family + "': " + e.what());
  }
  if (shapes.empty() || dims.empty()) {
    throw q::domain_error("family: need at least one shape and one dimension");
  }
  auto members = q::shape_family(shapes, dims, N);
  std::vector<q::FamilyOutcome> outcomes;
  if (refine) {
    outcomes = q::verify_family(members, thread_count(o.threads));
  } else {
    for (const auto& m : members) {
      q::FamilyOutcome fo;
      fo.shape_id = m.id();
      if (m.surface) {
        fo.report = q::verify_surface(*m.surface, m.id(), false);
      } else {
        fo.error = "excluded: " + m.excluded;
      }
      outcomes.push_back(std::move(fo));
    }
  }

  json reports = json::array();
  std::string csv = "shape_id,n,N,check,k,lhs,rhs,margin,rel_margin,verdict,equality,rhs_literal,margin_literal\n";
  bool all_pass = true;
  int excluded = 0;
  int rows = 0;
  for (const auto& fo : outcomes) {
    if (!fo.report) {
      ++excluded;
      reports.push_back({{"shape_id", fo.shape_id}, {"excluded", fo.error}});
      continue;
    }
    const auto& rep = *fo.report;
    all_pass = all_pass && rep.all_pass();
    json jr = json::array();
    for (const auto& r : rep.rows) {
      ++rows;
      jr.push_back({{"check", r.check},
                    {"k", r.k},
                    {"lhs", jnum(r.lhs)},
                    {"rhs", jnum(r.rhs)},
                    {"margin", jnum(r.margin)},
                    {"rel_margin", jnum(r.rel_margin)},
                    {"verdict", q::to_string(r.verdict)},
                    {"equality", r.equality},
                    {"rhs_literal", jnum(r.rhs_literal)},
                    {"margin_literal", jnum(r.margin_literal)}});
      csv += rep.shape_id + "," + std::to_string(rep.n) + "," + std::to_string(rep.N) + "," + r.check + "," +
             std::to_string(r.k) + "," + num(r.lhs) + "," + num(r.rhs) + "," + num(r.margin) + "," +
             num(r.rel_margin) + "," + q::to_string(r.verdict) + "," + (r.equality ? "true" : "false") + "," +
             num(r.rhs_literal) + "," + num(r.margin_literal) + "\n";
    }
    reports.push_back({{"shape_id", rep.shape_id}, {"n", rep.n}, {"N", rep.N}, {"all_pass", rep.all_pass()},
                       {"rows", jr}});
  }
  const json doc{{"all_pass", all_pass}, {"refined", refine}, {"reports", reports}};
  emit(o.out, doc.dump(2) + "\n");
  if (!o.csv.empty()) {
    emit(o.csv, csv);
  }
  std::fprintf(stderr, "verify: %zu shapes (%d excluded), %d rows, all verdict-bearing checks %s\n",
               outcomes.size(), excluded, rows, all_pass ? "pass" : "FAIL");
  return all_pass ? ok : verdict_failure;
}

int cmd_selftest(const Options& o) {
  namespace a = q::acceptance;
  std::vector<a::CriterionResult> results{a::eta1_closed_form(), a::eta_ode(),
                                          a::newton_maclaurin(static_cast<unsigned>(o.seed)),
                                          a::curvature_convergence(), a::ineq_corpus()};
  if (!o.skip_flow) {
    results.push_back(a::flow_monotonicity());
  }
  results.push_back(a::evolution_identities());
  results.push_back(a::isoperimetric_case());
  bool all = true;
  for (const auto& r : results) {
    std::cout << a::format_line(r) << "\n";
    all = all && r.pass;
  }
  std::cout << (all ? "selftest: all criteria pass" : "selftest: FAILED") << "\n";
  return all ? ok : verdict_failure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quermassintegral inequalities on convex hypersurfaces of the sphere", "quermass"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file of option values (flags on the command line override)");

  Options o;
  auto dims = [&](CLI::App* s) {
    s->add_option("--n", o.n, "Hypersurface dimension (ambient sphere S^{n+1})")->check(CLI::Range(2, 64));
  };
  auto order = [&](CLI::App* s) { s->add_option("--k", o.k, "Curvature order k"); };

  auto* profile = app.add_subcommand("profile", "Ball quantities over a range of radii (CSV)");
  dims(profile);
  profile->add_option("--grid", o.grid, "Number of radii");
  profile->add_option("--rho-min", o.rho_min, "Smallest radius");
  profile->add_option("--rho-max", o.rho_max, "Largest radius (at most pi/2)");
  profile->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* eta = app.add_subcommand("eta", "eta_k parametric vs closed form (k=1) or ODE (k>=2), CSV");
  dims(eta);
  order(eta);
  eta->add_option("--grid", o.grid, "Number of s values in (0.05, 0.95) s_{k-1}");
  eta->add_option("--tol", o.tol, "Pass threshold on the max relative difference");
  eta->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* surface = app.add_subcommand("surface", "Measure a theta,rho CSV surface (JSON)");
  dims(surface);
  surface->add_option("--in", o.in, "Input CSV with header theta,rho")->required();
  surface->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* flow = app.add_subcommand("flow", "Run the curvature flow and write the trace (CSV) and summary (JSON)");
  dims(flow);
  order(flow);
  flow->add_option("--shape", o.shape, "centered:rho0 | offcenter:r,d | perturbed:rho0,eps,m");
  flow->add_option("--N", o.N, "Polar intervals (even)");
  flow->add_option("--dt", o.dt, "Initial (or fixed) time step");
  flow->add_option("--cfl", o.cfl, "Fraction of the parabolic stability limit");
  flow->add_option("--t-max", o.t_max, "Final time");
  flow->add_option("--stop-tol", o.stop_tol, "Equator proximity that ends the run");
  flow->add_option("--record-every", o.record_every, "Accepted steps between trace records");
  flow->add_option("--scheme", o.scheme, "heun | euler");
  flow->add_flag("--fixed-dt", o.fixed_dt, "Hold dt fixed (no adaptivity, no stability cap)");
  flow->add_option("--max-steps", o.max_steps, "Step limit");
  flow->add_option("--out", o.out, "Trace CSV (default stdout)");
  flow->add_option("--summary", o.summary, "Summary JSON file");

  auto* verify = app.add_subcommand("verify", "Check the inequalities over a shape family (JSON + CSV)");
  verify->add_option("--family", o.family, "Family JSON: {\"n\": [...], \"shapes\": [...], \"N\": 800}")->required();
  verify->add_option("--out", o.out, "Report JSON (default stdout)");
  verify->add_option("--csv", o.csv, "Flat CSV report");
  verify->add_option("--threads", o.threads, "Worker threads (0 = auto; default QUERMASS_THREADS)");
  verify->add_flag("--raw", o.raw, "Use resolution-N integrals without extrapolation");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks");
  selftest->add_option("--seed", o.seed, "Seed for the randomized checks");
  selftest->add_flag("--skip-flow", o.skip_flow, "Skip the long flow runs");

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) {
        config_path = argv[++i];
      } else if (a.rfind("--config=", 0) == 0) {
        config_path = a.substr(9);
      } else {
        args.push_back(a);
      }
    }
    if (!config_path.empty()) {
      std::string command;
      auto extra = config_tokens(config_path, command);
      auto is_sub = [&](const std::string& a) {
        const auto subs = app.get_subcommands({});
        return std::any_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return a == s->get_name(); });
      };
      const auto sub = std::find_if(args.begin(), args.end(), is_sub);
      std::vector<std::string> merged;
      auto rest = args.begin();
      if (sub != args.end()) {
        rest = sub + 1;
        merged.assign(args.begin(), rest);
      } else if (!command.empty()) {
        merged.push_back(command);
      }
      merged.insert(merged.end(), extra.begin(), extra.end());
      merged.insert(merged.end(), rest, args.end());
      args = std::move(merged);
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_error;
  } catch (const q::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage_error;
  }

  try {
    if (profile->parsed()) {
      return cmd_profile(o);
    }
    if (eta->parsed()) {
      return cmd_eta(o);
    }
    if (surface->parsed()) {
      return cmd_surface(o);
    }
    if (flow->parsed()) {
      return cmd_flow(o);
    }
    if (verify->parsed()) {
      return cmd_verify(o);
    }
    if (selftest->parsed()) {
      return cmd_selftest(o);
    }
  } catch (const q::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage_error;
  } catch (const q::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return runtime_failure;
  }
  return usage_error;
}
