// Command line surface: experiments over the library, emitting CSV/SVG/JSON
// artifacts. Identical configuration and seed produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "bmolab/io.hpp"
#include "bmolab/parallel.hpp"

using namespace bmo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string command;
  std::string domain;        // path or inline JSON
  std::string function;      // path or inline JSON
  std::string config_path;
  double resolution = 1.0 / 128;
  double lambda = 0.25;
  std::string window;        // "x,y,side" override
  std::string out = "out";
  uint64_t seed = 1;
  std::string scheme = "lipschitz";
  std::string indices = "1,2,4,8";
  double eps = 0.1;
  double delta = 1.0;
  int64_t pairs = 64;
  int workers = 0;
  std::string mode = "smooth";       // extend
  std::string functional = "bmo-total";
  std::string variant = "at-least-lambda";
  double t_min = 0, t_max = 0;
  int steps = 6;
  double beta_max = 0;
  int which = 1;
  std::string ln = "constant";
  int count = 8;
  int min_level = 12;
  int pitch_divisor = 4;
};

json options_json(const Options& o) {
  json j;
  j["command"] = o.command;
  j["domain"] = o.domain;
  j["function"] = o.function;
  j["resolution"] = o.resolution;
  j["lambda"] = o.lambda;
  j["window"] = o.window;
  j["out"] = o.out;
  j["seed"] = o.seed;
  j["scheme"] = o.scheme;
  j["indices"] = o.indices;
  j["eps"] = o.eps;
  j["delta"] = o.delta;
  j["pairs"] = o.pairs;
  j["workers"] = o.workers;
  j["mode"] = o.mode;
  j["functional"] = o.functional;
  j["variant"] = o.variant;
  j["t_min"] = o.t_min;
  j["t_max"] = o.t_max;
  j["steps"] = o.steps;
  j["beta_max"] = o.beta_max;
  j["which"] = o.which;
  j["ln"] = o.ln;
  j["count"] = o.count;
  j["min_level"] = o.min_level;
  j["pitch_divisor"] = o.pitch_divisor;
  return j;
}

json parse_json_or_file(const std::string& text, const char* what) {
  if (text.empty()) throw ValidationError(what, std::string("missing ") + what);
  if (!text.empty() && (text[0] == '{' || text[0] == '[')) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError(what, std::string(what) + ": inline JSON parse error: " + e.what());
    }
  }
  std::ifstream in(text);
  if (!in) throw ValidationError(what, std::string(what) + ": cannot open " + text);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(what, std::string(what) + ": parse error: " + e.what());
  }
}

DomainModel load_domain(const Options& o) {
  DomainDocument doc = parse_domain_document(parse_json_or_file(o.domain, "domain"));
  if (!o.window.empty()) {
    double x, y, s;
    if (std::sscanf(o.window.c_str(), "%lf,%lf,%lf", &x, &y, &s) != 3)
      throw ValidationError("window", "window override must be x,y,side");
    doc.window = cube2(x, y, s);
    doc.window.validate("window");
  }
  return build_domain(doc.spec, doc.window);
}

TestFunctionSpec load_function(const Options& o) {
  if (o.function.empty()) {
    TestFunctionSpec spec;
    spec.kind = TestFunctionKind::constant;
    spec.value = 1;
    return spec;
  }
  // shorthand: a bare kind name
  if (o.function[0] != '{' && !fs::exists(o.function)) {
    TestFunctionSpec spec;
    spec.kind = test_function_kind_from_string(o.function);
    spec.seed = o.seed;
    return spec;
  }
  TestFunctionSpec spec = parse_function_document(parse_json_or_file(o.function, "function"));
  return spec;
}

std::vector<double> parse_indices(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else
      cur += c;
  }
  if (!cur.empty()) out.push_back(std::stod(cur));
  if (out.empty()) throw ValidationError("indices", "no indices given");
  return out;
}

NormParams norm_params(const Options& o, double /*h*/) {
  NormParams p;
  p.lambda = o.lambda;
  p.pitch_divisor = o.pitch_divisor;
  p.variant = o.variant == "exactly-lambda" ? AverageVariant::exactly_lambda
                                            : AverageVariant::at_least_lambda;
  return p;
}

void echo_config(const Options& o) {
  fs::create_directories(o.out);
  std::ofstream out(fs::path(o.out) / "config.json");
  out << options_json(o).dump(2) << "\n";
}

void write_json(const Options& o, const char* name, const json& j) {
  std::ofstream out(fs::path(o.out) / name);
  out << j.dump(2) << "\n";
}

int cmd_whitney(const Options& o) {
  DomainModel dom = load_domain(o);
  WhitneyDecomposition e = whitney_decompose(dom, Owner::domain, dom.window, o.min_level);
  WhitneyDecomposition ep = whitney_decompose(dom, Owner::complement, dom.window, o.min_level);
  CubeMatching m = match_cubes(ep, e, o.lambda);
  write_whitney_svg((fs::path(o.out) / "whitney.svg").string(), dom, {&e, &ep}, &ep, &e, &m);
  json j;
  j["domain_cubes"] = static_cast<int64_t>(e.cubes.size());
  j["complement_cubes"] = static_cast<int64_t>(ep.cubes.size());
  j["domain_residue_volume"] = e.residue_volume;
  j["complement_residue_volume"] = ep.residue_volume;
  j["matched"] = m.matched_count;
  j["unmatched"] = static_cast<int64_t>(m.unmatched.size());
  j["distance_constant"] = m.distance_constant;
  write_json(o, "whitney.json", j);
  return exit_ok;
}

int cmd_norm(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  NormReport rep = bmo_norm(f, dom, norm_params(o, o.resolution));
  write_json(o, "norm.json", norm_report_json(rep));
  std::cout << format_double(rep.total) << "\n";
  return exit_ok;
}

int cmd_omega(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  double t_lo = o.t_min > 0 ? o.t_min : 8 * o.resolution;
  double t_hi = o.t_max > 0 ? o.t_max : o.lambda;
  if (!(t_lo < t_hi)) throw ValidationError("t", "need t_min < t_max");
  std::vector<double> ts, oms;
  for (int s = 0; s < o.steps; ++s) {
    double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(s) / std::max(1, o.steps - 1));
    CubeFamily fam = enumerate_cubes(dom, 4 * o.resolution, t, o.pitch_divisor, o.resolution / 8);
    ts.push_back(t);
    oms.push_back(omega(f, dom, t, fam));
  }
  write_omega_csv((fs::path(o.out) / "omega.csv").string(), ts, oms);
  return exit_ok;
}

int cmd_gamma(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  NormParams p = norm_params(o, o.resolution);
  double beta_hi = o.beta_max > 0 ? o.beta_max : dom.window.side / 2;
  std::vector<double> betas, gammas;
  for (int s = 0; s < o.steps; ++s) {
    double beta = beta_hi * static_cast<double>(s) / std::max(1, o.steps - 1);
    auto g = gamma_functional(f, dom, beta, p);
    if (!g) continue;  // not evaluable at this beta
    betas.push_back(beta);
    gammas.push_back(*g);
  }
  if (betas.empty()) throw NotEvaluableError("gamma: no beta in the window produced qualifying cubes");
  write_gamma_csv((fs::path(o.out) / "gamma.csv").string(), betas, gammas);
  return exit_ok;
}

int cmd_extend(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  ExtensionParams p;
  p.lambda = o.lambda;
  p.min_level = o.min_level;
  ExtensionResult res = o.mode == "step" ? extend_step(f, dom, p) : extend_smooth(f, dom, p);
  double r = support_radius(res.extended);
  dump_grid(res.extended, (fs::path(o.out) / "extension.bin").string());
  write_json(o, "extension.json", extension_sidecar_json(res, r));
  write_heatmap_svg((fs::path(o.out) / "extension.svg").string(), res.extended,
                    &res.whitney_complement);
  return exit_ok;
}

int cmd_approximate(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  ApproxCurve curve = approximation_driver(f, dom, norm_params(o, o.resolution),
                                           approx_scheme_from_string(o.scheme), parse_indices(o.indices));
  write_approx_csv((fs::path(o.out) / "approx.csv").string(), curve);
  return exit_ok;
}

int cmd_check_eps_delta(const Options& o) {
  DomainModel dom = load_domain(o);
  ScanResult res = scan_domain(dom, o.eps, o.delta, o.pairs, o.seed, o.resolution);
  write_witness_csv((fs::path(o.out) / "witnesses.csv").string(), res.witnesses);
  write_cigar_svg((fs::path(o.out) / "cigars.svg").string(), dom, o.resolution, res.witnesses);
  json j;
  j["pairs"] = res.pairs;
  j["failures"] = res.failures;
  j["resolution_limited"] = res.resolution_limited;
  j["failure_rate"] = res.failure_rate;
  write_json(o, "scan.json", j);
  std::cout << format_double(res.failure_rate) << "\n";
  return exit_ok;
}

int cmd_oracle_compare(const Options& o) {
  DomainModel dom = load_domain(o);
  GridFunction f = sample(load_function(o), dom, o.resolution);
  OracleFunctional fn = OracleFunctional::bmo_total;
  if (o.functional == "omega") fn = OracleFunctional::omega_at;
  else if (o.functional == "bmo-total") fn = OracleFunctional::bmo_total;
  else if (o.functional == "bmo-oscillation") fn = OracleFunctional::bmo_oscillation_part;
  else if (o.functional == "bmo-average") fn = OracleFunctional::bmo_average_part;
  else throw ValidationError("functional", "unknown functional: " + o.functional);
  OracleReport rep = exhaustive_sup(f, dom, fn, norm_params(o, o.resolution));
  write_json(o, "oracle.json", oracle_report_json(rep));
  std::cout << format_double(rep.ratio) << "\n";
  return exit_ok;
}

// canned pipelines for the two strip constructions
int cmd_example(const Options& o) {
  if (o.which == 1) {
    DomainSpec spec;
    spec.kind = DomainKind::strips_example_1;
    spec.strip_count = o.count;
    for (int n = 1; n <= o.count; ++n)
      spec.strip_lengths.push_back(o.ln == "log" ? std::log(n + 1.0) / (n + 1.0) : 1.0);
    double top = 0, max_len = 0;
    {
      DomainModel probe = build_domain(spec, cube2(-2, -1, 8));
      const Strip& last = probe.strips.back();
      top = last.base + last.width;
      for (const Strip& st : probe.strips) max_len = std::max(max_len, st.length);
    }
    // half-plane slab wide enough for lambda-size cubes, strips fully visible
    double slab = o.lambda + 2;
    double side = std::ceil(std::max(top + 3, slab + max_len + 2));
    DomainModel dom = build_domain(spec, cube2(-slab, -1.5, side));
    double h = side / std::pow(2.0, std::ceil(std::log2(side / o.resolution)));
    GridFunction f = sample([&] {
      TestFunctionSpec s;
      s.kind = TestFunctionKind::example_1;
      return s;
    }(), dom, h);
    NormParams p = norm_params(o, h);
    auto curve = log_average_probe(f, dom, p);
    write_probe_csv((fs::path(o.out) / "probe.csv").string(), curve);
    WhitneyDecomposition e = whitney_decompose(dom, Owner::domain, dom.window, o.min_level);
    WhitneyDecomposition ep = whitney_decompose(dom, Owner::complement, dom.window, o.min_level);
    CubeMatching m = match_cubes(ep, e, 0.5);
    json j;
    j["lengths"] = o.ln;
    j["count"] = o.count;
    j["unmatched"] = static_cast<int64_t>(m.unmatched.size());
    j["distance_constant"] = m.distance_constant;
    // growth of the normalized tip averages across two octaves of scale
    if (!curve.empty()) {
      double fine = curve.front().ratio;
      double coarse = 0;
      for (const ProbePoint& pt : curve)
        if (pt.side == 4 * curve.front().side) coarse = pt.ratio;
      j["probe_scale_fine"] = curve.front().side;
      j["probe_ratio_fine"] = fine;
      j["probe_ratio_coarse"] = coarse;
      j["probe_growth"] = coarse > 0 ? fine / coarse : 0.0;
    }
    write_json(o, "example1.json", j);
    return exit_ok;
  }
  if (o.which == 2) {
    DomainSpec spec;
    spec.kind = DomainKind::strips_example_2;
    spec.strip_count = o.count;
    double top = 0, max_len = 0;
    {
      DomainModel probe = build_domain(spec, cube2(-2, -1, 8));
      const Strip& last = probe.strips.back();
      top = last.base + last.width;
      for (const Strip& st : probe.strips) max_len = std::max(max_len, st.length);
    }
    double slab = o.lambda + 2;
    double side = std::ceil(std::max(top + 3, slab + max_len + 2));
    DomainModel dom = build_domain(spec, cube2(-slab, -1.5, side));
    double h = side / std::pow(2.0, std::ceil(std::log2(side / o.resolution)));
    GridFunction f = sample([&] {
      TestFunctionSpec s;
      s.kind = TestFunctionKind::example_2;
      return s;
    }(), dom, h);
    NormParams p = norm_params(o, h);
    std::vector<double> betas, gammas;
    for (int s = 0; s < o.steps; ++s) {
      double beta = (side / 2 - 2) * static_cast<double>(s) / std::max(1, o.steps - 1);
      auto g = gamma_functional(f, dom, beta, p);
      if (!g) continue;
      betas.push_back(beta);
      gammas.push_back(*g);
    }
    if (!betas.empty()) write_gamma_csv((fs::path(o.out) / "gamma.csv").string(), betas, gammas);
    NormReport rep = bmo_norm(f, dom, p);
    write_json(o, "example2.json", norm_report_json(rep));
    return exit_ok;
  }
  throw ValidationError("which", "example: --which must be 1 or 2");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"bmo-type oscillation functionals, whitney machinery and extensions on planar domains"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--domain", o.domain, "domain JSON (path or inline)");
    cmd->add_option("--function", o.function, "function JSON (path, inline, or kind name)");
    cmd->add_option("--config", o.config_path, "config JSON; flags take precedence");
    cmd->add_option("--resolution", o.resolution, "grid spacing h");
    cmd->add_option("--lambda", o.lambda, "norm scale");
    cmd->add_option("--window", o.window, "window override: x,y,side");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_option("--pitch-divisor", o.pitch_divisor, "family lattice divisor (2, 4 or 8)");
    cmd->add_option("--min-level", o.min_level, "whitney recursion depth");
    cmd->add_option("--variant", o.variant, "average part: at-least-lambda | exactly-lambda");
  };

  CLI::App* c;
  c = app.add_subcommand("whitney", "whitney decomposition and matching, SVG output");
  add_common(c);
  c = app.add_subcommand("norm", "bmo norm report");
  add_common(c);
  c = app.add_subcommand("omega", "oscillation modulus curve");
  add_common(c);
  c->add_option("--t-min", o.t_min, "smallest scale");
  c->add_option("--t-max", o.t_max, "largest scale");
  c->add_option("--steps", o.steps, "curve points");
  c = app.add_subcommand("gamma", "vanishing-at-infinity curve");
  add_common(c);
  c->add_option("--beta-max", o.beta_max, "largest distance from the origin");
  c->add_option("--steps", o.steps, "curve points");
  c = app.add_subcommand("extend", "extension across the boundary");
  add_common(c);
  c->add_option("--mode", o.mode, "step | smooth");
  c = app.add_subcommand("approximate", "approximation scheme error curve");
  add_common(c);
  c->add_option("--scheme", o.scheme, "boundary | infinity | bounded | lipschitz | compact");
  c->add_option("--indices", o.indices, "comma-separated scheme indices");
  c = app.add_subcommand("check-eps-delta", "sampled verification of the cigar condition");
  add_common(c);
  c->add_option("--eps", o.eps, "cigar eps");
  c->add_option("--delta", o.delta, "pair distance bound");
  c->add_option("--pairs", o.pairs, "sample count");
  c = app.add_subcommand("example", "canned strip-construction pipelines");
  add_common(c);
  c->add_option("--which", o.which, "1 or 2");
  c->add_option("--Ln", o.ln, "strip lengths for example 1: constant | log");
  c->add_option("--count", o.count, "strip or group count");
  c->add_option("--steps", o.steps, "curve points");
  c = app.add_subcommand("oracle-compare", "exhaustive vs sampled functional");
  add_common(c);
  c->add_option("--functional", o.functional, "omega | bmo-total | bmo-oscillation | bmo-average");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  o.command = app.get_subcommands().front()->get_name();

  try {
    // config file fills anything the flags left at defaults
    if (!o.config_path.empty()) {
      json cfg = parse_json_or_file(o.config_path, "config");
      CLI::App* sub = app.get_subcommands().front();
      auto fill = [&](const char* key, auto& slot) {
        if (cfg.contains(key)) {
          bool flag_given = false;
          for (const CLI::Option* opt : sub->get_options())
            if (opt->get_name() == std::string("--") + key && opt->count() > 0) flag_given = true;
          if (!flag_given) cfg.at(key).get_to(slot);
        }
      };
      fill("domain", o.domain);
      fill("function", o.function);
      fill("resolution", o.resolution);
      fill("lambda", o.lambda);
      fill("window", o.window);
      fill("out", o.out);
      fill("seed", o.seed);
      fill("scheme", o.scheme);
      fill("indices", o.indices);
      fill("eps", o.eps);
      fill("delta", o.delta);
      fill("pairs", o.pairs);
      fill("workers", o.workers);
    }
    set_workers(o.workers);
    echo_config(o);

    if (o.command == "whitney") return cmd_whitney(o);
    if (o.command == "norm") return cmd_norm(o);
    if (o.command == "omega") return cmd_omega(o);
    if (o.command == "gamma") return cmd_gamma(o);
    if (o.command == "extend") return cmd_extend(o);
    if (o.command == "approximate") return cmd_approximate(o);
    if (o.command == "check-eps-delta") return cmd_check_eps_delta(o);
    if (o.command == "example") return cmd_example(o);
    if (o.command == "oracle-compare") return cmd_oracle_compare(o);
    throw ValidationError("command", "unknown command " + o.command);
  } catch (const ValidationError& e) {
    json err = {{"error", {{"type", "validation"}, {"field", e.field()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return exit_validation;
  } catch (const ResolutionError& e) {
    json err = {{"error", {{"type", "resolution"}, {"message", e.what()}, {"suggested_spacing", e.suggested_spacing()}}}};
    std::cerr << err.dump() << "\n";
    return exit_resolution;
  } catch (const ComponentError& e) {
    json err = {{"error", {{"type", "component"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return exit_resolution;
  } catch (const NotEvaluableError& e) {
    json err = {{"error", {{"type", "not-evaluable"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return exit_not_evaluable;
  } catch (const std::exception& e) {
    json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
