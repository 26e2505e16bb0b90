#include "sospec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sospec/matpoly.hpp"
#include "sospec/oracle.hpp"

namespace sospec {
namespace cli {

namespace fs = std::filesystem;
using matpoly::cxd;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ConfigError("missing or non-numeric \"" + std::string(key) + "\" in " + where);
  }
  return obj[key].get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw ConfigError("missing or non-integer \"" + std::string(key) + "\" in " + where);
  }
  return obj[key].get<int>();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(doc,
                      {"version", "model", "n", "n_sweep", "targets", "imag_cut",
                       "grid", "pseudospectrum", "perturbation", "fd", "seed"},
                      "config root");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    throw ConfigError("config requires \"version\": 1");
  }

  RunConfig cfg;
  if (!doc.contains("model") || !doc["model"].is_object()) {
    throw ConfigError("config requires a \"model\" object");
  }
  const json& m = doc["model"];
  reject_unknown_keys(m, {"kind", "potential", "quadrature_order"}, "model");
  if (!m.contains("kind") || !m["kind"].is_string()) {
    throw ConfigError("model requires a string \"kind\"");
  }
  std::string kind = m["kind"].get<std::string>();
  bool is_schrodinger = kind == "schrodinger_hermite";
  if (!is_schrodinger && (m.contains("potential") || m.contains("quadrature_order"))) {
    throw ConfigError("model \"" + kind + "\" takes no potential parameters");
  }
  if (kind == "fourier_b1") {
    cfg.model = operators::OperatorModel::fourier_b1();
  } else if (kind == "direct_sum_b2") {
    cfg.model = operators::OperatorModel::direct_sum_b2();
  } else if (kind == "schrodinger_hermite") {
    std::string pot = "demo";
    if (m.contains("potential")) {
      if (!m["potential"].is_string()) throw ConfigError("model.potential must be a string");
      pot = m["potential"].get<std::string>();
    }
    try {
      cfg.model = operators::OperatorModel::schrodinger(pot);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (m.contains("quadrature_order")) {
      int q = require_int(m, "quadrature_order", "model");
      if (q < 1) throw ConfigError("model.quadrature_order must be >= 1");
      cfg.model.quadrature_order_hint = q;
    }
  } else if (kind == "harmonic_sanity") {
    cfg.model = operators::OperatorModel::harmonic_sanity();
  } else if (kind == "shift_fixture") {
    cfg.model = operators::OperatorModel::shift_fixture();
  } else {
    throw ConfigError("unknown model kind \"" + kind + "\"");
  }
  cfg.model_key = m.dump();

  if (doc.contains("n") && doc.contains("n_sweep")) {
    throw ConfigError("config must not set both \"n\" and \"n_sweep\"");
  }
  if (doc.contains("n")) {
    int n = require_int(doc, "n", "config");
    if (n < 0) throw ConfigError("\"n\" must be nonnegative");
    cfg.n = n;
  }
  if (doc.contains("n_sweep")) {
    const json& s = doc["n_sweep"];
    if (!s.is_object()) throw ConfigError("\"n_sweep\" must be an object");
    reject_unknown_keys(s, {"start", "stop", "step"}, "n_sweep");
    SweepSpec sw{require_int(s, "start", "n_sweep"), require_int(s, "stop", "n_sweep"),
                 require_int(s, "step", "n_sweep")};
    if (sw.step < 1 || sw.stop < sw.start || sw.start < 0) {
      throw ConfigError("n_sweep requires 0 <= start <= stop and step >= 1");
    }
    cfg.sweep = sw;
  }

  if (doc.contains("targets")) {
    if (!doc["targets"].is_array()) throw ConfigError("\"targets\" must be an array");
    for (const json& t : doc["targets"]) {
      Target tgt;
      if (t.is_number()) {
        tgt.kind = Target::Kind::Number;
        tgt.value = t.get<double>();
      } else if (t.is_string()) {
        std::string s = t.get<std::string>();
        if (s == "lambda_minus") tgt.kind = Target::Kind::LambdaMinus;
        else if (s == "lambda_plus") tgt.kind = Target::Kind::LambdaPlus;
        else if (s == "fd_ground") tgt.kind = Target::Kind::FdGround;
        else throw ConfigError("unknown target \"" + s + "\"");
      } else {
        throw ConfigError("targets must be numbers or known names");
      }
      cfg.targets.push_back(tgt);
    }
  }

  if (doc.contains("imag_cut")) {
    cfg.imag_cut = require_number(doc, "imag_cut", "config");
    if (cfg.imag_cut < 0.0) throw ConfigError("\"imag_cut\" must be >= 0");
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) throw ConfigError("\"grid\" must be an object");
    reject_unknown_keys(g, {"re_min", "re_max", "im_min", "im_max", "nx", "ny"}, "grid");
    GridSpec gs;
    gs.rect = {require_number(g, "re_min", "grid"), require_number(g, "re_max", "grid"),
               require_number(g, "im_min", "grid"), require_number(g, "im_max", "grid")};
    gs.nx = require_int(g, "nx", "grid");
    gs.ny = require_int(g, "ny", "grid");
    if (!(gs.rect.re_max > gs.rect.re_min) || !(gs.rect.im_max > gs.rect.im_min)) {
      throw ConfigError("grid rectangle is degenerate");
    }
    if (gs.nx < 2 || gs.ny < 2) throw ConfigError("grid resolution must be >= 2");
    cfg.grid = gs;
  }

  if (doc.contains("pseudospectrum")) {
    const json& p = doc["pseudospectrum"];
    if (!p.is_object()) throw ConfigError("\"pseudospectrum\" must be an object");
    reject_unknown_keys(p, {"eps", "weights"}, "pseudospectrum");
    PseudoSpec ps;
    ps.eps = require_number(p, "eps", "pseudospectrum");
    if (ps.eps < 0.0) throw ConfigError("pseudospectrum.eps must be >= 0");
    if (!p.contains("weights") || !p["weights"].is_array()) {
      throw ConfigError("pseudospectrum requires a \"weights\" array");
    }
    bool any = false;
    for (const json& w : p["weights"]) {
      if (!w.is_number()) throw ConfigError("pseudospectrum.weights must be numbers");
      double v = w.get<double>();
      if (v < 0.0) throw ConfigError("pseudospectrum.weights must be >= 0");
      if (v > 0.0) any = true;
      ps.weights.push_back(v);
    }
    if (ps.eps > 0.0 && !any) {
      throw ConfigError("pseudospectrum.weights must not be all zero with eps > 0");
    }
    cfg.pseudo = ps;
  }

  if (doc.contains("perturbation")) {
    const json& p = doc["perturbation"];
    if (!p.is_object()) throw ConfigError("\"perturbation\" must be an object");
    reject_unknown_keys(p, {"delta", "w0", "w1", "trials", "target"}, "perturbation");
    PerturbSpec ps;
    ps.delta = require_number(p, "delta", "perturbation");
    ps.w0 = require_number(p, "w0", "perturbation");
    ps.w1 = require_number(p, "w1", "perturbation");
    ps.trials = require_int(p, "trials", "perturbation");
    if (ps.delta <= 0.0) throw ConfigError("perturbation.delta must be > 0");
    if (ps.w0 < 0.0 || ps.w1 < 0.0 || (ps.w0 == 0.0 && ps.w1 == 0.0)) {
      throw ConfigError("perturbation weights must be >= 0 and not both zero");
    }
    if (ps.trials < 1) throw ConfigError("perturbation.trials must be >= 1");
    ps.target = "lambda_minus";
    if (p.contains("target")) {
      if (!p["target"].is_string()) throw ConfigError("perturbation.target must be a string");
      ps.target = p["target"].get<std::string>();
    }
    cfg.perturb = ps;
  }

  if (doc.contains("fd")) {
    const json& f = doc["fd"];
    if (!f.is_object()) throw ConfigError("\"fd\" must be an object");
    reject_unknown_keys(f, {"halfwidth", "points", "count"}, "fd");
    if (f.contains("halfwidth")) cfg.fd.halfwidth = require_number(f, "halfwidth", "fd");
    if (f.contains("points")) cfg.fd.points = require_int(f, "points", "fd");
    if (f.contains("count")) cfg.fd.count = require_int(f, "count", "fd");
    if (cfg.fd.halfwidth <= 0.0 || cfg.fd.points < 100 || cfg.fd.count < 1) {
      throw ConfigError("fd requires halfwidth > 0, points >= 100, count >= 1");
    }
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw ConfigError("\"seed\" must be a nonnegative integer");
    }
    auto s = doc["seed"].get<std::int64_t>();
    if (s < 0) throw ConfigError("\"seed\" must be a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

struct OracleValues {
  json doc;  // serialized oracle output for this model
};

// Computes (or loads from the out-dir sidecar) the oracle values for the
// model: secular roots for the multiplication models, FD eigenvalues for the
// Schrodinger ones.
OracleValues oracle_values(const RunConfig& cfg, const std::string& out_dir) {
  using operators::ModelKind;
  std::string key_src = cfg.model_key;
  json fd_doc;
  bool needs_fd = cfg.model.kind == ModelKind::SchrodingerHermite ||
                  cfg.model.kind == ModelKind::HarmonicSanity;
  if (needs_fd) {
    fd_doc = {{"halfwidth", cfg.fd.halfwidth}, {"points", cfg.fd.points},
              {"count", cfg.fd.count}};
    key_src += "|fd=" + fd_doc.dump();
  }
  fs::path cache = fs::path(out_dir) / ("oracle-" + hex64(fnv1a64(key_src)) + ".json");
  if (fs::exists(cache)) {
    OracleValues v;
    v.doc = json::parse(read_file(cache));
    return v;
  }

  json doc;
  doc["model"] = json::parse(cfg.model_key);
  if (cfg.model.kind == ModelKind::FourierB1 || cfg.model.kind == ModelKind::DirectSumB2) {
    auto sol = oracle::secular_roots();
    doc["secular"] = {
        {"lambda_minus", sol.lambda_minus},
        {"lambda_plus", sol.lambda_plus},
        {"residual_minus", sol.residual_minus},
        {"residual_plus", sol.residual_plus},
        {"bracket_minus", {{"lo", sol.bracket_minus.lo},
                           {"hi", sol.bracket_minus.hi},
                           {"f_lo", sol.bracket_minus.f_lo},
                           {"f_hi", sol.bracket_minus.f_hi}}},
        {"bracket_plus", {{"lo", sol.bracket_plus.lo},
                          {"hi", sol.bracket_plus.hi},
                          {"f_lo", sol.bracket_plus.f_lo},
                          {"f_hi", sol.bracket_plus.f_hi}}},
    };
  } else if (needs_fd) {
    auto fd = oracle::schrodinger_fd(cfg.model.potential, cfg.fd.halfwidth,
                                     cfg.fd.points, cfg.fd.count);
    if (!fd.converged) {
      throw std::runtime_error("FD oracle did not converge for the requested grid");
    }
    doc["fd"] = {{"params", fd_doc},
                 {"values", fd.values},
                 {"converged", fd.converged},
                 {"L_final", fd.L_final},
                 {"N_final", fd.N_final}};
  } else {
    doc["note"] = "shift fixture spectrum is {0}";
  }
  write_file(cache, doc.dump(2) + "\n");
  OracleValues v;
  v.doc = std::move(doc);
  return v;
}

double resolve_target(const Target& t, const RunConfig& cfg, const std::string& out_dir) {
  if (t.kind == Target::Kind::Number) return t.value;
  try {
    auto v = oracle_values(cfg, out_dir);
    switch (t.kind) {
      case Target::Kind::LambdaMinus:
        return v.doc.at("secular").at("lambda_minus").get<double>();
      case Target::Kind::LambdaPlus:
        return v.doc.at("secular").at("lambda_plus").get<double>();
      case Target::Kind::FdGround:
        return v.doc.at("fd").at("values").at(0).get<double>();
      default:
        break;
    }
  } catch (const json::out_of_range&) {
    throw ConfigError("the requested named target is not defined for this model kind");
  }
  throw std::logic_error("resolve_target: unreachable");
}

Target parse_named_target(const std::string& s) {
  Target t;
  if (s == "lambda_minus") t.kind = Target::Kind::LambdaMinus;
  else if (s == "lambda_plus") t.kind = Target::Kind::LambdaPlus;
  else if (s == "fd_ground") t.kind = Target::Kind::FdGround;
  else {
    try {
      t.kind = Target::Kind::Number;
      t.value = std::stod(s);
    } catch (...) {
      throw ConfigError("unknown target \"" + s + "\"");
    }
  }
  return t;
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out directory is required");
  fs::create_directories(dir);
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int run_solve(const RunConfig& cfg, const CommandOptions& opt) {
  return guarded([&] {
    if (!cfg.n) throw ConfigError("solve requires \"n\"");
    ensure_out_dir(opt.out_dir);
    std::vector<double> targets;
    for (const Target& t : cfg.targets) targets.push_back(resolve_target(t, cfg, opt.out_dir));
    auto res = pipeline::method_pipeline(cfg.model, *cfg.n, targets, cfg.imag_cut);

    std::vector<std::size_t> order(res.spectrum.eigenvalues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      cxd za = res.spectrum.eigenvalues[a], zb = res.spectrum.eigenvalues[b];
      if (za.real() != zb.real()) return za.real() < zb.real();
      return za.imag() < zb.imag();
    });
    std::string spectrum_csv = "re,im,residual\n";
    for (std::size_t i : order) {
      cxd z = res.spectrum.eigenvalues[i];
      spectrum_csv += format_double(z.real()) + "," + format_double(z.imag()) + "," +
                      format_double(res.spectrum.residuals[i]) + "\n";
    }
    std::string encl_csv = "lo,hi,witness_re,witness_im\n";
    for (const auto& e : res.encl) {
      encl_csv += format_double(e.lo) + "," + format_double(e.hi) + "," +
                  format_double(e.witness.real()) + "," +
                  format_double(e.witness.imag()) + "\n";
    }
    std::string nearest_csv;
    if (!targets.empty()) {
      nearest_csv = "target,re,im,abs_err\n";
      for (std::size_t i = 0; i < targets.size(); ++i) {
        cxd z = res.nearest[i];
        nearest_csv += format_double(targets[i]) + "," + format_double(z.real()) + "," +
                       format_double(z.imag()) + "," +
                       format_double(std::abs(z - targets[i])) + "\n";
      }
    }
    write_file(fs::path(opt.out_dir) / "spectrum.csv", spectrum_csv);
    write_file(fs::path(opt.out_dir) / "enclosures.csv", encl_csv);
    if (!nearest_csv.empty()) {
      write_file(fs::path(opt.out_dir) / "nearest.csv", nearest_csv);
    }
  });
}

int run_converge(const RunConfig& cfg, const CommandOptions& opt) {
  return guarded([&] {
    if (!cfg.sweep) throw ConfigError("converge requires \"n_sweep\"");
    if (cfg.targets.size() != 1) {
      throw ConfigError("converge requires exactly one target (the reference eigenvalue)");
    }
    ensure_out_dir(opt.out_dir);
    double lambda_ref = resolve_target(cfg.targets[0], cfg, opt.out_dir);
    std::vector<int> ns;
    for (int n = cfg.sweep->start; n <= cfg.sweep->stop; n += cfg.sweep->step) {
      ns.push_back(n);
    }
    auto recs = pipeline::convergence_study(cfg.model, lambda_ref, ns, opt.threads);
    std::string csv = "n,err,log_err,log_n,slope\n";
    for (const auto& r : recs) {
      csv += std::to_string(r.n) + "," + format_double(r.err) + "," +
             format_double(r.log_err) + "," + format_double(r.log_n) + ",";
      if (r.slope) csv += format_double(*r.slope);
      csv += "\n";
    }
    write_file(fs::path(opt.out_dir) / "convergence.csv", csv);
  });
}

int run_pseudospec(const RunConfig& cfg, const CommandOptions& opt) {
  return guarded([&] {
    if (!cfg.n) throw ConfigError("pseudospec requires \"n\"");
    if (!cfg.grid) throw ConfigError("pseudospec requires a \"grid\" block");
    ensure_out_dir(opt.out_dir);
    auto pencil = operators::pencil_for(cfg.model, *cfg.n);
    matpoly::GeneralPencil gp(pencil);
    const auto& g = *cfg.grid;
    auto values = matpoly::grid_sample(gp, g.rect, g.nx, g.ny, opt.threads);

    auto grid_csv = [&](const std::function<std::string(std::size_t)>& cell) {
      std::string csv = "re_min,re_max,im_min,im_max,nx,ny\n";
      csv += format_double(g.rect.re_min) + "," + format_double(g.rect.re_max) + "," +
             format_double(g.rect.im_min) + "," + format_double(g.rect.im_max) + "," +
             std::to_string(g.nx) + "," + std::to_string(g.ny) + "\n";
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          csv += cell(static_cast<std::size_t>(iy) * g.nx + ix);
          csv += (ix + 1 < g.nx) ? "," : "\n";
        }
      }
      return csv;
    };

    write_file(fs::path(opt.out_dir) / "sigma_grid.csv",
               grid_csv([&](std::size_t i) { return format_double(values[i]); }));

    if (cfg.pseudo) {
      if (static_cast<int>(cfg.pseudo->weights.size()) != gp.degree() + 1) {
        throw ConfigError("pseudospectrum.weights must have degree+1 entries");
      }
      const double dre = (g.rect.re_max - g.rect.re_min) / g.nx;
      const double dim = (g.rect.im_max - g.rect.im_min) / g.ny;
      write_file(fs::path(opt.out_dir) / "membership.csv",
                 grid_csv([&](std::size_t i) -> std::string {
                   int iy = static_cast<int>(i) / g.nx;
                   int ix = static_cast<int>(i) % g.nx;
                   cxd z(g.rect.re_min + (ix + 0.5) * dre,
                         g.rect.im_min + (iy + 0.5) * dim);
                   double wsum = 0.0, p = 1.0;
                   for (double w : cfg.pseudo->weights) {
                     wsum += w * p;
                     p *= std::abs(z);
                   }
                   return values[i] <= cfg.pseudo->eps * wsum ? "1" : "0";
                 }));
    }
  });
}

int run_perturb(const RunConfig& cfg, const CommandOptions& opt) {
  return guarded([&] {
    if (!cfg.n) throw ConfigError("perturb requires \"n\"");
    if (!cfg.perturb) throw ConfigError("perturb requires a \"perturbation\" block");
    ensure_out_dir(opt.out_dir);

    Target t = parse_named_target(cfg.perturb->target);
    double lambda = resolve_target(t, cfg, opt.out_dir);
    auto info = cfg.model.spectrum_info();
    std::vector<double> discrete = info.discrete_eigenvalues;
    if (info.discrete_from_oracle &&
        (cfg.model.kind == operators::ModelKind::FourierB1 ||
         cfg.model.kind == operators::ModelKind::DirectSumB2)) {
      auto ov = oracle_values(cfg, opt.out_dir);
      discrete.push_back(ov.doc.at("secular").at("lambda_minus").get<double>());
      discrete.push_back(ov.doc.at("secular").at("lambda_plus").get<double>());
    }
    double mu = pipeline::gap_distance(lambda, info.essential_bands, discrete);
    if (!(cfg.perturb->delta < mu / 4.0)) {
      throw ConfigError("perturbation.delta must be below mu/4 = " +
                        format_double(mu / 4.0));
    }

    pipeline::PerturbationParams params;
    params.delta = cfg.perturb->delta;
    params.w0 = cfg.perturb->w0;
    params.w1 = cfg.perturb->w1;
    params.trials = cfg.perturb->trials;
    params.seed = opt.seed_override.value_or(cfg.seed);
    auto rep = pipeline::perturbation_experiment(cfg.model, *cfg.n, lambda, mu, params,
                                                 opt.threads);

    json doc;
    doc["n"] = rep.n;
    doc["lambda"] = rep.lambda;
    doc["delta"] = rep.delta;
    doc["mu"] = rep.mu;
    doc["w0"] = rep.w0;
    doc["w1"] = rep.w1;
    doc["eps_bound"] = rep.eps_bound;
    doc["eps"] = rep.eps;
    doc["seed"] = rep.seed;
    doc["count_unperturbed"] = rep.count_unperturbed;
    doc["annulus_clear_unperturbed"] = rep.annulus_clear_unperturbed;
    doc["all_counts_match"] = rep.all_counts_match;
    doc["all_annuli_clear"] = rep.all_annuli_clear;
    json trials = json::array();
    for (const auto& tr : rep.trials) {
      trials.push_back({{"counts_match", tr.counts_match},
                        {"annulus_clear", tr.annulus_clear},
                        {"count_perturbed", tr.count_perturbed}});
    }
    doc["trials"] = trials;
    write_file(fs::path(opt.out_dir) / "report.json", doc.dump(2) + "\n");
  });
}

int run_oracle(const RunConfig& cfg, const CommandOptions& opt) {
  return guarded([&] {
    ensure_out_dir(opt.out_dir);
    auto v = oracle_values(cfg, opt.out_dir);
    write_file(fs::path(opt.out_dir) / "oracle.json", v.doc.dump(2) + "\n");
  });
}

int main_with_args(int argc, const char* const* argv) {
  CLI::App app{"second-order spectral projection toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* solve = app.add_subcommand("solve", "spectrum, enclosures, nearest");
  CLI::App* converge = app.add_subcommand("converge", "convergence study over an n-sweep");
  CLI::App* pseudospec = app.add_subcommand("pseudospec", "sigma grid and membership");
  CLI::App* perturb = app.add_subcommand("perturb", "perturbation-stability experiment");
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "reference eigenvalues");
  for (CLI::App* sub : {solve, converge, pseudospec, perturb, oracle_cmd}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  CommandOptions opt;
  opt.out_dir = out_dir;
  opt.threads = threads;
  if (seed_set) opt.seed_override = seed;

  if (solve->parsed()) return run_solve(cfg, opt);
  if (converge->parsed()) return run_converge(cfg, opt);
  if (pseudospec->parsed()) return run_pseudospec(cfg, opt);
  if (perturb->parsed()) return run_perturb(cfg, opt);
  if (oracle_cmd->parsed()) return run_oracle(cfg, opt);
  return 2;
}

}  // namespace cli
}  // namespace sospec
