#include "bmolab/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

namespace bmo {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError(it.key(), where + ": unknown field '" + it.key() + "'");
}

double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(key, where + ": missing field '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(key, where + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

Vec2 vec_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
    throw ValidationError(key, where + ": field '" + key + "' must be [x, y]");
  return vec2(j.at(key)[0].get<double>(), j.at(key)[1].get<double>());
}

}  // namespace

DomainDocument parse_domain_document(const json& j) {
  reject_unknown(j, {"kind", "params", "window"}, "domain");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("kind", "domain: missing or non-string 'kind'");
  DomainDocument doc;
  doc.spec.kind = domain_kind_from_string(j.at("kind").get<std::string>());

  json params = j.contains("params") ? j.at("params") : json::object();
  switch (doc.spec.kind) {
    case DomainKind::square:
      reject_unknown(params, {"corner", "side"}, "square params");
      if (params.contains("corner")) doc.spec.sq_corner = vec_at(params, "corner", "square");
      if (params.contains("side")) doc.spec.sq_side = number_at(params, "side", "square");
      break;
    case DomainKind::disk:
      reject_unknown(params, {"center", "radius"}, "disk params");
      if (params.contains("center")) doc.spec.disk_center = vec_at(params, "center", "disk");
      if (params.contains("radius")) doc.spec.disk_radius = number_at(params, "radius", "disk");
      break;
    case DomainKind::half_plane:
      reject_unknown(params, {}, "half-plane params");
      break;
    case DomainKind::rect_union: {
      reject_unknown(params, {"rects"}, "rect-union params");
      if (!params.contains("rects") || !params.at("rects").is_array())
        throw ValidationError("rects", "rect-union: missing 'rects' array");
      for (const json& rj : params.at("rects")) {
        reject_unknown(rj, {"corner", "width", "height"}, "rect");
        Vec2 c = vec_at(rj, "corner", "rect");
        doc.spec.rects.push_back({c[0], c[1], number_at(rj, "width", "rect"), number_at(rj, "height", "rect")});
      }
      break;
    }
    case DomainKind::strips_example_1: {
      reject_unknown(params, {"count", "lengths"}, "strips-example-1 params");
      doc.spec.strip_count = static_cast<int>(number_at(params, "count", "strips-example-1"));
      if (!params.contains("lengths") || !params.at("lengths").is_array())
        throw ValidationError("lengths", "strips-example-1: missing 'lengths' array");
      for (const json& lj : params.at("lengths")) doc.spec.strip_lengths.push_back(lj.get<double>());
      break;
    }
    case DomainKind::strips_example_2: {
      reject_unknown(params, {"count", "slopes"}, "strips-example-2 params");
      doc.spec.strip_count = static_cast<int>(number_at(params, "count", "strips-example-2"));
      if (params.contains("slopes")) {
        if (!params.at("slopes").is_array())
          throw ValidationError("slopes", "strips-example-2: 'slopes' must be an array");
        for (const json& sj : params.at("slopes")) doc.spec.slopes.push_back(sj.get<double>());
      }
      break;
    }
  }

  if (!j.contains("window")) throw ValidationError("window", "domain: missing 'window'");
  const json& wj = j.at("window");
  reject_unknown(wj, {"corner", "side"}, "window");
  doc.window.corner = vec_at(wj, "corner", "window");
  doc.window.side = number_at(wj, "side", "window");
  doc.window.validate("window");
  doc.spec.validate();
  return doc;
}

DomainDocument load_domain_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("path", "cannot open domain file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("json", std::string("domain file parse error: ") + e.what());
  }
  return parse_domain_document(j);
}

json domain_document_json(const DomainSpec& spec, const Cube2& window) {
  json j;
  j["kind"] = to_string(spec.kind);
  json p = json::object();
  switch (spec.kind) {
    case DomainKind::square:
      p["corner"] = {spec.sq_corner[0], spec.sq_corner[1]};
      p["side"] = spec.sq_side;
      break;
    case DomainKind::disk:
      p["center"] = {spec.disk_center[0], spec.disk_center[1]};
      p["radius"] = spec.disk_radius;
      break;
    case DomainKind::half_plane:
      break;
    case DomainKind::rect_union:
      p["rects"] = json::array();
      for (const Rect& r : spec.rects)
        p["rects"].push_back({{"corner", {r.x0, r.y0}}, {"width", r.width}, {"height", r.height}});
      break;
    case DomainKind::strips_example_1:
      p["count"] = spec.strip_count;
      p["lengths"] = spec.strip_lengths;
      break;
    case DomainKind::strips_example_2:
      p["count"] = spec.strip_count;
      if (!spec.slopes.empty()) p["slopes"] = spec.slopes;
      break;
  }
  j["params"] = p;
  j["window"] = {{"corner", {window.corner[0], window.corner[1]}}, {"side", window.side}};
  return j;
}

TestFunctionSpec parse_function_document(const json& j) {
  reject_unknown(j, {"kind", "value", "axis", "slopes", "zero_scale", "seed", "amplitude", "whitney_min_level"},
                 "function");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("kind", "function: missing or non-string 'kind'");
  TestFunctionSpec spec;
  spec.kind = test_function_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("value")) spec.value = number_at(j, "value", "function");
  if (j.contains("axis")) spec.axis = static_cast<int>(number_at(j, "axis", "function"));
  if (j.contains("zero_scale")) spec.zero_scale = number_at(j, "zero_scale", "function");
  if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
  if (j.contains("amplitude")) spec.amplitude = number_at(j, "amplitude", "function");
  if (j.contains("whitney_min_level"))
    spec.whitney_min_level = static_cast<int>(number_at(j, "whitney_min_level", "function"));
  if (j.contains("slopes"))
    for (const json& sj : j.at("slopes")) spec.slopes.push_back(sj.get<double>());
  spec.validate();
  return spec;
}

namespace {

constexpr char kGridMagic[8] = {'B', 'M', 'O', 'G', 'R', 'I', 'D', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

static_assert(std::endian::native == std::endian::little, "grid format is little-endian");

}  // namespace

void dump_grid(const GridFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("path", "cannot open for writing: " + path);
  out.write(kGridMagic, 8);
  put<uint32_t>(out, 2);
  put<uint32_t>(out, 0);
  put<double>(out, f.h);
  put<double>(out, f.origin[0]);
  put<double>(out, f.origin[1]);
  put<uint64_t>(out, static_cast<uint64_t>(f.nx));
  put<uint64_t>(out, static_cast<uint64_t>(f.ny));

  // run-length encode the mask, alternating starting with unmasked cells
  std::vector<uint64_t> runs;
  uint8_t cur = 0;
  uint64_t len = 0;
  for (size_t k = 0; k < f.mask.size(); ++k) {
    if (f.mask[k] == cur) ++len;
    else {
      runs.push_back(len);
      cur = f.mask[k];
      len = 1;
    }
  }
  runs.push_back(len);
  put<uint64_t>(out, static_cast<uint64_t>(runs.size()));
  for (uint64_t r : runs) put<uint64_t>(out, r);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw ValidationError("path", "write failed: " + path);
}

GridFunction load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("path", "cannot open grid file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kGridMagic, 8) != 0) throw ValidationError("magic", "not a grid file: " + path);
  uint32_t dim = get<uint32_t>(in);
  get<uint32_t>(in);
  if (dim != 2) throw ValidationError("dim", "grid file dimension must be 2");
  GridFunction f;
  f.h = get<double>(in);
  f.origin = vec2(get<double>(in), get<double>(in));
  f.nx = static_cast<int64_t>(get<uint64_t>(in));
  f.ny = static_cast<int64_t>(get<uint64_t>(in));
  if (f.nx <= 0 || f.ny <= 0 || f.nx * f.ny > (int64_t(1) << 34))
    throw ValidationError("dims", "grid file dimensions out of range");
  uint64_t run_count = get<uint64_t>(in);
  f.mask.assign(static_cast<size_t>(f.cells()), 0);
  uint8_t cur = 0;
  size_t at = 0;
  for (uint64_t r = 0; r < run_count; ++r) {
    uint64_t len = get<uint64_t>(in);
    if (at + len > f.mask.size()) throw ValidationError("mask", "grid file mask overruns the cell count");
    std::fill(f.mask.begin() + static_cast<long>(at), f.mask.begin() + static_cast<long>(at + len), cur);
    at += len;
    cur = cur ? 0 : 1;
  }
  if (at != f.mask.size()) throw ValidationError("mask", "grid file mask does not cover the cells");
  f.values.assign(static_cast<size_t>(f.cells()), 0.0);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) throw ValidationError("values", "grid file truncated");
  f.finalize();
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char t[40];
    std::snprintf(t, sizeof(t), "%.*g", prec, v);
    double back = std::strtod(t, nullptr);
    if (back == v) return t;
  }
  return buf;
}

namespace {

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("path", "cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_omega_csv(const std::string& path, const std::vector<double>& t,
                     const std::vector<double>& omega) {
  std::ofstream out = open_text(path);
  out << "t,omega\n";
  for (size_t k = 0; k < t.size(); ++k)
    out << format_double(t[k]) << "," << format_double(omega[k]) << "\n";
}

void write_probe_csv(const std::string& path, const std::vector<ProbePoint>& curve) {
  std::ofstream out = open_text(path);
  out << "ell,ratio\n";
  for (const ProbePoint& p : curve) out << format_double(p.side) << "," << format_double(p.ratio) << "\n";
}

void write_gamma_csv(const std::string& path, const std::vector<double>& beta,
                     const std::vector<double>& gamma) {
  std::ofstream out = open_text(path);
  out << "beta,gamma\n";
  for (size_t k = 0; k < beta.size(); ++k)
    out << format_double(beta[k]) << "," << format_double(gamma[k]) << "\n";
}

void write_approx_csv(const std::string& path, const ApproxCurve& curve) {
  std::ofstream out = open_text(path);
  out << "scheme,index_or_param,bmo_error,sup_norm,lip_const\n";
  for (size_t k = 0; k < curve.params.size(); ++k)
    out << to_string(curve.scheme) << "," << format_double(curve.params[k]) << ","
        << format_double(curve.errors[k]) << "," << format_double(curve.sup_norms[k]) << ","
        << format_double(curve.lip_consts[k]) << "\n";
}

void write_witness_csv(const std::string& path, const std::vector<ScanWitness>& witnesses) {
  std::ofstream out = open_text(path);
  out << "x0,y0,x1,y1,result,arclength,bound,clearance_margin\n";
  for (const ScanWitness& w : witnesses)
    out << format_double(w.x[0]) << "," << format_double(w.x[1]) << "," << format_double(w.y[0]) << ","
        << format_double(w.y[1]) << "," << (w.success ? "ok" : w.failure) << ","
        << format_double(w.arclength) << "," << format_double(w.length_bound) << ","
        << format_double(w.clearance_margin) << "\n";
}

json norm_report_json(const NormReport& rep) {
  json j;
  j["oscillation_part"] = rep.oscillation_part;
  j["average_part"] = rep.average_part;
  j["total"] = rep.total;
  j["variant"] = rep.variant == AverageVariant::at_least_lambda ? "at-least-lambda" : "exactly-lambda";
  if (rep.argmax_osc.valid)
    j["argmax_oscillation"] = {{"corner", {rep.argmax_osc.cube.corner[0], rep.argmax_osc.cube.corner[1]}},
                               {"side", rep.argmax_osc.cube.side}};
  if (rep.argmax_avg.valid)
    j["argmax_average"] = {{"corner", {rep.argmax_avg.cube.corner[0], rep.argmax_avg.cube.corner[1]}},
                           {"side", rep.argmax_avg.cube.side}};
  j["small_family"] = {{"count", rep.small_family.count},
                       {"scale_min", rep.small_family.scale_min},
                       {"scale_max", rep.small_family.scale_max}};
  j["large_family"] = {{"count", rep.large_family.count},
                       {"scale_min", rep.large_family.scale_min},
                       {"scale_max", rep.large_family.scale_max}};
  return j;
}

json oracle_report_json(const OracleReport& rep) {
  json j;
  j["functional"] = rep.functional;
  j["parameter"] = rep.parameter;
  j["oracle_value"] = rep.oracle_value;
  j["sampled_value"] = rep.sampled_value;
  j["ratio"] = rep.ratio;
  j["oracle_cubes"] = rep.oracle_cubes;
  j["sampled_cubes"] = rep.sampled_cubes;
  return j;
}

json extension_sidecar_json(const ExtensionResult& res, double support_r) {
  json j;
  j["lambda"] = res.lambda;
  j["c_n"] = res.c_n;
  j["halvings"] = res.halvings;
  j["matched"] = res.matching.matched_count;
  j["unmatched"] = json::array();
  for (int32_t id : res.matching.unmatched) {
    const WhitneyCube& c = res.whitney_complement.cubes[static_cast<size_t>(id)];
    j["unmatched"].push_back({{"corner", {c.box.corner[0], c.box.corner[1]}}, {"side", c.box.side}});
  }
  j["distance_constant"] = res.matching.distance_constant;
  j["zero_cubes"] = static_cast<int64_t>(res.zero_cubes.size());
  j["boundary_cells"] = res.boundary_cells;
  j["fallback_means"] = res.fallback_means;
  j["unaveraged_cells"] = res.unaveraged_cells;
  j["scale_warning"] = res.scale_warning;
  j["cubes_below_lambda_over_40sqrtn"] = res.cubes_below_lambda_over_40sqrtn;
  j["cubes_above_lambda_over_4"] = res.cubes_above_lambda_over_4;
  if (support_r > 0) j["support_radius"] = support_r;
  return j;
}

namespace {

struct SvgMapper {
  Cube2 window;
  double size = 1000;

  double x(double wx) const { return (wx - window.corner[0]) / window.side * size; }
  double y(double wy) const { return (window.corner[1] + window.side - wy) / window.side * size; }
  double len(double wl) const { return wl / window.side * size; }
};

}  // namespace

void write_whitney_svg(const std::string& path, const DomainModel& dom,
                       const std::vector<const WhitneyDecomposition*>& decomps,
                       const WhitneyDecomposition* eprime, const WhitneyDecomposition* e,
                       const CubeMatching* matching) {
  std::ofstream out = open_text(path);
  SvgMapper m{dom.window, 1000};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" "
         "width=\"1000\" height=\"1000\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";
  for (const WhitneyDecomposition* wd : decomps) {
    if (!wd) continue;
    const char* fill = wd->owner == Owner::domain ? "#cfe8cf" : "#e8cfcf";
    for (const WhitneyCube& c : wd->cubes) {
      const char* stroke = (c.dc.level % 2 == 0) ? "#335533" : "#553333";
      out << "<rect x=\"" << m.x(c.box.corner[0]) << "\" y=\"" << m.y(c.box.corner[1] + c.box.side)
          << "\" width=\"" << m.len(c.box.side) << "\" height=\"" << m.len(c.box.side) << "\" fill=\""
          << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"0.4\"/>\n";
    }
  }
  if (matching && eprime && e) {
    for (int32_t qid = 0; qid < static_cast<int32_t>(matching->match.size()); ++qid) {
      int32_t star = matching->match[static_cast<size_t>(qid)];
      if (star < 0) continue;
      Vec2 a = eprime->cubes[static_cast<size_t>(qid)].box.center();
      Vec2 b = e->cubes[static_cast<size_t>(star)].box.center();
      out << "<line x1=\"" << m.x(a[0]) << "\" y1=\"" << m.y(a[1]) << "\" x2=\"" << m.x(b[0])
          << "\" y2=\"" << m.y(b[1]) << "\" stroke=\"#4444cc\" stroke-width=\"0.3\" opacity=\"0.5\"/>\n";
    }
    for (int32_t qid : matching->unmatched) {
      const Cube2& b = eprime->cubes[static_cast<size_t>(qid)].box;
      out << "<rect x=\"" << m.x(b.corner[0]) << "\" y=\"" << m.y(b.corner[1] + b.side) << "\" width=\""
          << m.len(b.side) << "\" height=\"" << m.len(b.side)
          << "\" fill=\"none\" stroke=\"#cc2222\" stroke-width=\"1.2\"/>\n";
    }
  }
  out << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const GridFunction& f,
                       const WhitneyDecomposition* overlay) {
  std::ofstream out = open_text(path);
  SvgMapper m{f.window(), 1000};
  double lo = 0, hi = 0;
  for (size_t k = 0; k < f.values.size(); ++k) {
    lo = std::min(lo, f.values[k]);
    hi = std::max(hi, f.values[k]);
  }
  double span = hi > lo ? hi - lo : 1;
  // coarse pixels: cap the emitted rect count
  int64_t stride = std::max<int64_t>(1, f.nx / 256);
  double cell = m.len(f.h * static_cast<double>(stride));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" "
         "width=\"1000\" height=\"1000\">\n";
  for (int64_t j = 0; j < f.ny; j += stride)
    for (int64_t i = 0; i < f.nx; i += stride) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      double t = (f.values[k] - lo) / span;
      int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
      Vec2 p = f.cell_center(i, j);
      out << "<rect x=\"" << m.x(p[0] - f.h / 2) << "\" y=\"" << m.y(p[1] - f.h / 2) - cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ",60," << b
          << ")\"" << (f.mask[k] ? "" : " opacity=\"0.25\"") << "/>\n";
    }
  if (overlay)
    for (const WhitneyCube& c : overlay->cubes)
      out << "<rect x=\"" << m.x(c.box.corner[0]) << "\" y=\"" << m.y(c.box.corner[1] + c.box.side)
          << "\" width=\"" << m.len(c.box.side) << "\" height=\"" << m.len(c.box.side)
          << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"0.3\"/>\n";
  out << "</svg>\n";
}

void write_cigar_svg(const std::string& path, const DomainModel& dom, double h,
                     const std::vector<ScanWitness>& witnesses) {
  std::ofstream out = open_text(path);
  SvgMapper m{dom.window, 1000};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" "
         "width=\"1000\" height=\"1000\">\n";
  int64_t n = std::max<int64_t>(32, std::min<int64_t>(256, std::llround(dom.window.side / h)));
  double pitch = dom.window.side / static_cast<double>(n);
  double cell = m.len(pitch);
  for (int64_t j = 0; j < n; ++j)
    for (int64_t i = 0; i < n; ++i) {
      Vec2 p = vec2(dom.window.corner[0] + (i + 0.5) * pitch, dom.window.corner[1] + (j + 0.5) * pitch);
      if (!dom.inside(p)) continue;
      out << "<rect x=\"" << m.x(p[0] - pitch / 2) << "\" y=\"" << m.y(p[1] + pitch / 2) << "\" width=\""
          << cell << "\" height=\"" << cell << "\" fill=\"#dde8dd\"/>\n";
    }
  for (const ScanWitness& w : witnesses) {
    const char* color = w.success ? "#44aa44" : "#cc2222";
    out << "<line x1=\"" << m.x(w.x[0]) << "\" y1=\"" << m.y(w.x[1]) << "\" x2=\"" << m.x(w.y[0])
        << "\" y2=\"" << m.y(w.y[1]) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<circle cx=\"" << m.x(w.x[0]) << "\" cy=\"" << m.y(w.x[1]) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n<circle cx=\"" << m.x(w.y[0]) << "\" cy=\"" << m.y(w.y[1]) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace bmo
