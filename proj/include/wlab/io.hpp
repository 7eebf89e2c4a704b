#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlab/alexandrov.hpp"
#include "wlab/bounds.hpp"
#include "wlab/flux.hpp"
#include "wlab/profile.hpp"
#include "wlab/weingarten.hpp"

namespace wlab {

using Json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// {"kind": "linear", "a": .., "b": ..}, {"kind": "cmc", "H": ..} or
/// {"kind": "table", "t": [..], "f": [..]}. Throws DomainError.
WeingartenRelation relation_from_json(const Json& j);
Json relation_to_json(const WeingartenRelation& rel);

/// Header s,y,z,psi,I. I is left empty for relations without a first integral.
void write_profile_csv(std::ostream& os, const ProfileCurve& curve);
std::vector<ProfileState> read_profile_csv(std::istream& is);

void write_extrema_csv(std::ostream& os, const ExtremaResult& ex);
void write_alpha_csv(std::ostream& os, const AlphaTable& table);
void write_parity_csv(std::ostream& os, const std::vector<ParityTrial>& trials);

Json scan_to_json(const ScanOutcome& scan);
Json symmetry_to_json(const SymmetryResult& sym);
Json balance_to_json(const BalanceReport& rep);

struct FluxReport {
  Parallel parallel;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rel_err = 0.0;
};
Json flux_to_json(const FluxReport& rep);

/// Worker count: WLAB_THREADS when set to a positive integer, else the
/// hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. The first
/// exception thrown (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wlab
