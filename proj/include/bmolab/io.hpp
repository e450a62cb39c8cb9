#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bmolab/approximation.hpp"
#include "bmolab/domain.hpp"
#include "bmolab/epsdelta.hpp"
#include "bmolab/extension.hpp"
#include "bmolab/grid.hpp"
#include "bmolab/oracle.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/testfunc.hpp"
#include "bmolab/whitney.hpp"

namespace bmo {

/// Domain document: {"kind": "...", "params": {...}, "window":
/// {"corner":[x,y], "side": s}}. Unknown fields anywhere are rejected.
struct DomainDocument {
  DomainSpec spec;
  Cube2 window;
};

DomainDocument parse_domain_document(const nlohmann::json& j);
DomainDocument load_domain_document(const std::string& path);
nlohmann::json domain_document_json(const DomainSpec& spec, const Cube2& window);

/// Function document: {"kind": "...", ...kind parameters}.
TestFunctionSpec parse_function_document(const nlohmann::json& j);

/// Flat binary grid format (documented in the README):
///   magic "BMOGRID1" (8 bytes)
///   u32 dim (=2), u32 reserved (=0)
///   f64 h, f64 origin[2], u64 dims[2]
///   u64 run_count, then run_count u64 mask run lengths in row-major order,
///     alternating starting with unmasked cells
///   dims[0]*dims[1] f64 cell values, row-major
/// All fields little-endian.
void dump_grid(const GridFunction& f, const std::string& path);
GridFunction load_grid(const std::string& path);

// CSV emitters (schemas pinned; one header row each)
void write_omega_csv(const std::string& path, const std::vector<double>& t,
                     const std::vector<double>& omega);
void write_probe_csv(const std::string& path, const std::vector<ProbePoint>& curve);
void write_gamma_csv(const std::string& path, const std::vector<double>& beta,
                     const std::vector<double>& gamma);
void write_approx_csv(const std::string& path, const ApproxCurve& curve);
void write_witness_csv(const std::string& path, const std::vector<ScanWitness>& witnesses);

nlohmann::json norm_report_json(const NormReport& rep);
nlohmann::json oracle_report_json(const OracleReport& rep);
nlohmann::json extension_sidecar_json(const ExtensionResult& res, double support_r = 0);

/// SVG: one rectangle per Whitney cube, stroke by level parity, fill by
/// owner; optional matching arrows from E' cubes to their matches.
void write_whitney_svg(const std::string& path, const DomainModel& dom,
                       const std::vector<const WhitneyDecomposition*>& decomps,
                       const WhitneyDecomposition* eprime = nullptr,
                       const WhitneyDecomposition* e = nullptr,
                       const CubeMatching* matching = nullptr);

/// SVG heatmap of a grid function with an optional Whitney overlay.
void write_heatmap_svg(const std::string& path, const GridFunction& f,
                       const WhitneyDecomposition* overlay = nullptr);

/// SVG of failed cigar pairs drawn over the domain mask.
void write_cigar_svg(const std::string& path, const DomainModel& dom, double h,
                     const std::vector<ScanWitness>& witnesses);

std::string format_double(double v);  // shortest round-trip, deterministic

}  // namespace bmo
