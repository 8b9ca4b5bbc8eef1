#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dictid/bgmodel.hpp"
#include "dictid/conditions.hpp"
#include "dictid/errors.hpp"
#include "dictid/experiments.hpp"
#include "dictid/io.hpp"
#include "dictid/localmin.hpp"
#include "dictid/model.hpp"
#include "dictid/rng.hpp"
#include "dictid/threads.hpp"
#include "dictid/version.hpp"
#include "json.hpp"

namespace dictid::cli {

namespace {

using nlohmann::json;

// Arguments that do not influence artifact payloads are dropped from the
// embedded config so reruns with a different worker count or output path
// stay byte-identical.
std::vector<std::string> canonical_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--threads" || a == "-o" || a == "--output") {
      ++i;  // skip the value too
      continue;
    }
    if (a.rfind("--threads=", 0) == 0 || a.rfind("-o=", 0) == 0 ||
        a.rfind("--output=", 0) == 0)
      continue;
    out.push_back(a);
  }
  return out;
}

json make_meta(const std::vector<std::string>& args, std::uint64_t seed) {
  json meta;
  meta["tool_version"] = kToolVersion;
  meta["rng"] = kRngAlgorithm;
  meta["seed"] = seed;
  meta["config"] = {{"argv", canonical_config(args)}};
  return meta;
}

// Writes a finished artifact; JSON payloads fall back to stdout when no
// output path was given.
void emit_json(const std::string& path, const json& payload, std::ostream& out) {
  const std::string text = payload.dump(2) + "\n";
  if (path.empty())
    out << text;
  else
    io::write_text_file(path, text);
}

void emit_csv(const std::string& path, const std::string& payload, const json& meta) {
  io::write_text_file(path, payload + "# meta " + meta.dump() + "\n");
}

Dictionary load_dictionary(const std::string& path) {
  return Dictionary::from_columns(io::read_matrix_csv(path));
}

CoefficientMatrix load_coefficients(const std::string& path) {
  return CoefficientMatrix::from_matrix(io::read_matrix_csv(path));
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) fail(errc::kDomainError, "empty grid specification '" + csv + "'");
  return out;
}

json tail_json(const bg::TailBound& t) {
  return {{"threshold", t.threshold}, {"prob_bound", t.prob_bound}};
}

json validation_json(const bg::ValidationResult& r) {
  return json::parse(r.to_json());
}

struct Options {
  // shared
  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  // sample / landscape / phase
  double p = 0.5;
  int K = 2;
  long N = 100;
  double mu = 0.0;
  int resolution = 180;
  int trials = 100;
  double sin_tol = 0.0;  // <= 0 means the documented default sin(1 deg)/2
  std::string mu_grid, p_grid;
  // check / snapshot / verify-localmin
  std::string dict_path, coeff_path;
  double p_norm = 2.0;
  double tol_strict = 1e-7;
  double radius_eps = 0.05;
  std::uint64_t radius_seed = 0;
  int k_index = 0;
  int directions = 1000;
  // bounds
  std::string which;
  long L = 2, M = 100;
  double eps = 0.1;
  double mu2 = 0.0;
  bool validate = false;
  long vtrials = 10000;
};

int cmd_sample(const Options& o, const std::vector<std::string>& args) {
  const auto x = bg::sample({o.p, o.K, o.N, o.seed});
  emit_csv(o.output, io::matrix_to_csv(x.X), make_meta(args, o.seed));
  return 0;
}

int cmd_check(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  const Dictionary d = load_dictionary(o.dict_path);
  const CoefficientMatrix x = load_coefficients(o.coeff_path);
  const RadiusMode mode = (o.p_norm == 2.0 && d.natoms() - 1 <= 3)
                              ? RadiusMode::exact_facets()
                              : RadiusMode::eps_cover(o.radius_eps, o.radius_seed);
  json j;
  try {
    j = json::parse(full_report(d, x, o.p_norm, o.tol_strict, mode).to_json());
  } catch (const Error& e) {
    if (std::string(e.code()) != errc::kUnsupportedMode) throw;
    // radius evaluation infeasible at this dimension/eps; report the LP
    // verdicts without alpha / theorem3
    j = json::parse(check_conditions(d, x, o.tol_strict).to_json());
    j["radius_unavailable"] = e.what();
    j["mu"] = coherence(d, o.p_norm);
    j["beta"] = beta(x, d, o.p_norm);
    j["p"] = std::isinf(o.p_norm) ? json("inf") : json(o.p_norm);
  }
  j["meta"] = make_meta(args, o.seed);
  emit_json(o.output, j, out);
  return 0;
}

int cmd_bounds(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  json j;
  j["which"] = o.which;
  if (o.which == "gamma") {
    j["evaluation"] = tail_json(bg::bound_gamma(o.p, o.N, o.eps));
    j["evaluation"]["union_prob_bound"] = bg::bound_gamma_union(o.p, o.N, o.K, o.eps);
    if (o.validate)
      j["validation"] = {validation_json(
          bg::validate_bound(bg::BoundId::Gamma, {o.p, 1, o.N, o.eps}, o.vtrials, o.seed, o.threads))};
  } else if (o.which == "support") {
    const auto bi = bg::BoundInputs::from(o.p, std::max(o.K, 2), o.N, o.eps);
    j["evaluation"] = {{"M_l", bi.M_l},
                       {"M_u", bi.M_u},
                       {"prob_bound", bg::bound_support_size(o.p, o.N, o.eps).prob_bound}};
    if (o.validate)
      j["validation"] = {validation_json(bg::validate_bound(
          bg::BoundId::Support, {o.p, 1, o.N, o.eps}, o.vtrials, o.seed, o.threads))};
  } else if (o.which == "ball") {
    const auto b = bg::bound_operator_and_ray(o.p, o.L, o.M, o.eps);
    j["evaluation"] = {{"op", tail_json(b.op)}, {"ray", tail_json(b.ray)}};
    if (o.validate) {
      j["validation"] = {
          validation_json(bg::validate_bound(bg::BoundId::BallOp, {o.p, o.L, o.M, o.eps},
                                             o.vtrials, o.seed, o.threads)),
          validation_json(bg::validate_bound(bg::BoundId::BallRay, {o.p, o.L, o.M, o.eps},
                                             o.vtrials, derive_seed(o.seed, 1), o.threads))};
    }
  } else if (o.which == "beta") {
    const auto b = bg::bound_beta(o.p, o.K, o.N, o.eps);
    j["evaluation"] = {{"beta_n", b.beta_n}, {"prob_bound", b.prob_bound}};
    if (o.validate)
      j["validation"] = {validation_json(
          bg::validate_bound(bg::BoundId::Beta, {o.p, o.K - 1, o.N, o.eps}, o.vtrials,
                             o.seed, o.threads))};
  } else if (o.which == "theorem4") {
    const auto r = bg::theorem4(o.p, o.K, o.N, o.mu2);
    j["evaluation"] = {{"identifiable_whp", r.identifiable_whp},
                       {"failure_prob_bound", r.failure_prob_bound}};
    j["evaluation"]["eps_star"] = r.eps_star ? json(*r.eps_star) : json(nullptr);
    if (!r.reason.empty()) j["evaluation"]["reason"] = r.reason;
  } else {
    fail(errc::kUnknownBoundId, "unknown bound '" + o.which + "'");
  }
  j["meta"] = make_meta(args, o.seed);
  emit_json(o.output, j, out);
  return 0;
}

int cmd_landscape(const Options& o, const std::vector<std::string>& args) {
  const auto [t0, t1] = experiments::planted_angles(o.mu);
  const Dictionary d0 = experiments::dictionary_from_angles(t0, t1);
  const auto x = bg::sample({o.p, 2, o.N, o.seed});
  const Eigen::MatrixXd Y = d0.atoms * x.X;
  const double sin_tol = o.sin_tol > 0 ? o.sin_tol : experiments::default_sin_tol();
  const auto grid =
      experiments::landscape2d(Y, {t0, t1}, o.resolution, sin_tol, o.threads);
  const auto minima = experiments::find_local_minima(grid);

  std::string payload = "theta0,theta1,cost,neg_inv_cost\n";
  payload.reserve(static_cast<size_t>(o.resolution) * o.resolution * 48);
  for (int i = 0; i < o.resolution; ++i) {
    for (int jx = 0; jx < o.resolution; ++jx) {
      const double c = grid.values(i, jx);
      payload += io::format_double(grid.theta_at(i));
      payload += ',';
      payload += io::format_double(grid.theta_at(jx));
      payload += ',';
      payload += io::format_double(c);
      payload += ',';
      payload += io::format_double(std::isinf(c) ? 0.0 : -1.0 / c);
      payload += '\n';
    }
  }
  json meta = make_meta(args, o.seed);
  meta["theta_star"] = {t0, t1};
  meta["minima"] = json::array();
  for (const auto& cell : minima.cells) meta["minima"].push_back({cell.i, cell.j});
  meta["plateau"] = minima.plateau;
  emit_csv(o.output, payload, meta);
  return 0;
}

int cmd_phase(const Options& o, const std::vector<std::string>& args) {
  experiments::PhaseConfig cfg;
  cfg.mu_grid = parse_grid(o.mu_grid);
  cfg.p_grid = parse_grid(o.p_grid);
  cfg.trials = o.trials;
  cfg.N = o.N;
  cfg.resolution = o.resolution;
  cfg.sin_tol = o.sin_tol;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto cells = experiments::phase_experiment(cfg);

  std::string payload = "mu,p,trials,missed,spurious,wrong_global,error_rate\n";
  for (const auto& c : cells) {
    payload += io::format_double(c.mu);
    payload += ',';
    payload += io::format_double(c.p);
    payload += ',';
    payload += std::to_string(c.trials);
    payload += ',';
    payload += std::to_string(c.missed_min);
    payload += ',';
    payload += std::to_string(c.spurious_min);
    payload += ',';
    payload += std::to_string(c.wrong_global);
    payload += ',';
    payload += io::format_double(c.error_rate());
    payload += '\n';
  }
  emit_csv(o.output, payload, make_meta(args, o.seed));
  return 0;
}

int cmd_snapshot(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  const Dictionary d = load_dictionary(o.dict_path);
  const CoefficientMatrix x = load_coefficients(o.coeff_path);
  const auto snap = experiments::zonotope_snapshot(x, d, o.k_index);
  emit_json(o.output, json::parse(snap.to_json(make_meta(args, o.seed).dump())), out);
  return 0;
}

int cmd_verify_localmin(const Options& o, const std::vector<std::string>& args,
                        std::ostream& out) {
  const Dictionary d = load_dictionary(o.dict_path);
  const CoefficientMatrix x = load_coefficients(o.coeff_path);
  const auto rep = check_conditions(d, x, o.tol_strict);

  int satisfied = 0, degenerate = 0;
  json counterexample = nullptr;
  for (int s = 0; s < o.directions; ++s) {
    const Eigen::MatrixXd Z =
        random_zero_diag(d.natoms(), derive_seed(o.seed, static_cast<std::uint64_t>(s)));
    const auto t = make_direction(d, x, Z, Eigen::MatrixXd::Zero(x.rows(), x.cols()));
    try {
      const auto r = nsc_check(d, x, t);
      if (r.satisfied) {
        ++satisfied;
      } else if (counterexample.is_null()) {
        counterexample = {{"direction_index", s}, {"lhs", r.lhs}, {"rhs", r.rhs}};
        json zrows = json::array();
        for (int i = 0; i < Z.rows(); ++i) {
          json row = json::array();
          for (int jx = 0; jx < Z.cols(); ++jx) row.push_back(Z(i, jx));
          zrows.push_back(row);
        }
        counterexample["Z"] = zrows;
      }
    } catch (const Error& e) {
      if (std::string(e.code()) == errc::kDegenerateDirection)
        ++degenerate;
      else
        throw;
    }
  }

  json j;
  j["directions"] = o.directions;
  j["satisfied"] = satisfied;
  j["degenerate"] = degenerate;
  j["all_satisfied"] = (satisfied + degenerate == o.directions);
  j["sc"] = tristate_name(rep.sc);
  j["nc"] = tristate_name(rep.nc);
  j["counterexample"] = counterexample;
  j["meta"] = make_meta(args, o.seed);
  emit_json(o.output, j, out);
  return 0;
}

int run_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Re-executes the config embedded in an artifact and byte-compares payloads.
int cmd_replay(const std::string& replay_path, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const std::string original = io::read_text_file(replay_path);

  json meta;
  if (!original.empty() && original[0] == '{') {
    meta = json::parse(original).at("meta");
  } else {
    std::istringstream ss(original);
    std::string line;
    bool found = false;
    while (std::getline(ss, line)) {
      if (line.rfind("# meta ", 0) == 0) {
        meta = json::parse(line.substr(7));
        found = true;
      }
    }
    if (!found) fail(errc::kIoError, "no embedded meta found in '" + replay_path + "'");
  }

  std::vector<std::string> argv = meta.at("config").at("argv").get<std::vector<std::string>>();
  std::string target = out_path;
  if (target.empty())
    target = (std::filesystem::temp_directory_path() /
              ("dictid_replay_" + std::to_string(mix64(std::hash<std::string>{}(original)))))
                 .string();
  argv.push_back("-o");
  argv.push_back(target);

  std::ostringstream sink;
  const int rc = run_dispatch(argv, sink, err);
  if (rc != 0) return rc;

  const std::string replayed = io::read_text_file(target);
  if (replayed == original) {
    out << "replay: byte-identical (" << replay_path << ")\n";
    return 0;
  }
  err << json({{"error", "ReplayMismatch"},
               {"detail", "replayed payload differs from '" + replay_path + "'"}})
             .dump()
      << "\n";
  return 2;
}

int run_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"local identifiability toolkit for l1 dictionary learning"};
  app.require_subcommand(0, 1);

  Options o;
  std::string replay_path;
  app.add_option("--replay", replay_path, "re-execute an artifact's embedded config and verify bytes");
  app.add_option("-o,--output", o.output, "output artifact path");

  const auto add_threads = [&](CLI::App* c) {
    c->add_option("--threads", o.threads, "worker cap (default: DICTID_THREADS or all cores)");
  };
  const auto add_seed = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--seed", o.seed, "64-bit RNG seed");
    if (required) opt->required();
  };
  const auto add_output = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("-o,--output", o.output, "output artifact path");
    if (required) opt->required();
  };

  CLI::App* sample = app.add_subcommand("sample", "draw a Bernoulli-Gaussian coefficient matrix");
  sample->add_option("--p", o.p, "activation probability in (0,1)")->required();
  sample->add_option("--K", o.K, "rows (atoms)")->required();
  sample->add_option("--N", o.N, "columns (training samples)")->required();
  add_seed(sample, true);
  add_output(sample, true);
  add_threads(sample);

  CLI::App* check = app.add_subcommand("check", "evaluate NC/SC and the coherence test for a pair");
  check->add_option("--dict", o.dict_path, "dictionary CSV")->required();
  check->add_option("--coeff", o.coeff_path, "coefficient CSV")->required();
  check->add_option("--p-norm", o.p_norm, "norm exponent for alpha/beta/mu (default 2)");
  check->add_option("--tol", o.tol_strict, "strictness band half-width (default 1e-7)");
  check->add_option("--radius-eps", o.radius_eps, "eps-cover radius when ExactFacets is unavailable");
  check->add_option("--radius-seed", o.radius_seed, "extra random probes for the eps-cover");
  add_seed(check, false);
  add_output(check, false);
  add_threads(check);

  CLI::App* bounds = app.add_subcommand("bounds", "evaluate / validate the concentration bounds");
  bounds->add_option("--which", o.which, "gamma | support | ball | beta | theorem4")->required();
  bounds->add_option("--p", o.p, "activation probability")->required();
  bounds->add_option("--K", o.K, "atoms");
  bounds->add_option("--N", o.N, "samples");
  bounds->add_option("--L", o.L, "matrix rows (ball)");
  bounds->add_option("--M", o.M, "matrix columns (ball)");
  bounds->add_option("--eps", o.eps, "deviation parameter");
  bounds->add_option("--mu2", o.mu2, "basis coherence (theorem4)");
  bounds->add_flag("--validate", o.validate, "run the Monte Carlo validator");
  bounds->add_option("--trials", o.vtrials, "validator trials (default 10000)");
  add_seed(bounds, false);
  add_output(bounds, false);
  add_threads(bounds);

  CLI::App* landscape = app.add_subcommand("landscape", "angle-parameterized cost landscape (d = 2)");
  landscape->add_option("--p", o.p, "BG activation probability")->required();
  landscape->add_option("--N", o.N, "training samples")->required();
  landscape->add_option("--mu", o.mu, "planted coherence in [0,1)")->required();
  landscape->add_option("--resolution", o.resolution, "grid cells per axis (default 180)");
  landscape->add_option("--sin-tol", o.sin_tol, "singularity mask half-width (default sin(1deg)/2)");
  add_seed(landscape, true);
  add_output(landscape, true);
  add_threads(landscape);

  CLI::App* phase = app.add_subcommand("phase", "(mu, p) phase-transition Monte Carlo");
  phase->add_option("--mu-grid", o.mu_grid, "comma-separated mu values")->required();
  phase->add_option("--p-grid", o.p_grid, "comma-separated p values")->required();
  phase->add_option("--trials", o.trials, "trials per cell (default 100)");
  phase->add_option("--N", o.N, "training samples")->required();
  phase->add_option("--resolution", o.resolution, "grid cells per axis (default 180)");
  phase->add_option("--sin-tol", o.sin_tol, "singularity mask half-width (default sin(1deg)/2)");
  add_seed(phase, true);
  add_output(phase, true);
  add_threads(phase);

  CLI::App* snapshot = app.add_subcommand("snapshot", "zonotope polygon for one row (K = 3)");
  snapshot->add_option("--dict", o.dict_path, "dictionary CSV")->required();
  snapshot->add_option("--coeff", o.coeff_path, "coefficient CSV")->required();
  snapshot->add_option("--k", o.k_index, "row index (0-based)")->required();
  add_seed(snapshot, false);
  add_output(snapshot, false);

  CLI::App* verify = app.add_subcommand("verify-localmin", "random tangent-direction battery");
  verify->add_option("--dict", o.dict_path, "dictionary CSV")->required();
  verify->add_option("--coeff", o.coeff_path, "coefficient CSV")->required();
  verify->add_option("--directions", o.directions, "number of directions (default 1000)");
  verify->add_option("--tol", o.tol_strict, "strictness band half-width");
  add_seed(verify, true);
  add_output(verify, false);
  add_threads(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << json({{"error", "Usage"}, {"detail", e.what()}}).dump() << "\n";
    return 1;
  }

  try {
    if (!replay_path.empty()) return cmd_replay(replay_path, o.output, out, err);
    if (sample->parsed()) return cmd_sample(o, args);
    if (check->parsed()) return cmd_check(o, args, out);
    if (bounds->parsed()) return cmd_bounds(o, args, out);
    if (landscape->parsed()) return cmd_landscape(o, args);
    if (phase->parsed()) return cmd_phase(o, args);
    if (snapshot->parsed()) return cmd_snapshot(o, args, out);
    if (verify->parsed()) return cmd_verify_localmin(o, args, out);
    out << app.help();
    return 1;
  } catch (const Error& e) {
    err << json({{"error", e.code()}, {"detail", e.what()}}).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << json({{"error", "Internal"}, {"detail", e.what()}}).dump() << "\n";
    return 2;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_dispatch(args, out, err);
}

}  // namespace dictid::cli
