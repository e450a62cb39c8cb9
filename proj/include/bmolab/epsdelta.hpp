#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmolab/domain.hpp"

namespace bmo {

struct CigarQuery {
  Vec2 x, y;
  double eps = 0.1;
  double delta = 1;

  void validate(const DomainModel& dom) const;
};

/// Path certificate for one pair: a polyline through grid nodes restricted to
/// the cigar clearance set, with its exact arclength and the worst clearance
/// margin along it. Certificates re-verify from the polyline alone.
struct CigarCertificate {
  bool success = false;
  std::string failure;  // "", "no-admissible-path", "path-too-long"
  std::vector<Vec2> path;
  double arclength = 0;
  double length_bound = 0;      // |x-y|/eps + 4h
  double clearance_margin = 0;  // min over nodes of d(z) - eps|z-x||z-y|/|x-y|
};

/// Shortest 8-connected grid path (exact Euclidean edge weights) through
/// nodes with d(z) >= eps |z-x||z-y|/|x-y| - 2h; succeeds when its length
/// meets |x-y|/eps + 4h. Throws ComponentError when the endpoints are not
/// grid-connected inside the domain at this pitch.
CigarCertificate check_pair(const CigarQuery& q, const DomainModel& dom, double h);

struct ScanWitness {
  Vec2 x, y;
  bool success = false;
  std::string failure;
  double arclength = 0;
  double length_bound = 0;
  double clearance_margin = 0;
};

struct ScanResult {
  int64_t pairs = 0;
  int64_t failures = 0;
  int64_t resolution_limited = 0;  // component check failed at this pitch
  double failure_rate = 0;
  std::vector<ScanWitness> witnesses;  // failures first, then worst margins
};

/// Seeded random pair sampling with a per-pair check.
ScanResult scan_domain(const DomainModel& dom, double eps, double delta, int64_t samples,
                       uint64_t seed, double h, int64_t max_witnesses = 32);

}  // namespace bmo
