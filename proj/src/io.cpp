#include "wlab/io.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "wlab/errors.hpp"

namespace wlab {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw DomainError(std::string("relation: missing number '") + key + "'");
  }
  return j[key].get<double>();
}

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw DomainError(std::string("relation: missing array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw DomainError(std::string("relation: non-numeric entry in ") + key);
    out.push_back(v.get<double>());
  }
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DomainError("bad number in CSV: '" + s + "'");
  }
  return x;
}

}  // namespace

WeingartenRelation relation_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw DomainError("relation: expected an object with a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "linear") return WeingartenRelation::linear(number(j, "a"), number(j, "b"));
  if (kind == "cmc") return WeingartenRelation::cmc(number(j, "H"));
  if (kind == "table") return WeingartenRelation::table(numbers(j, "t"), numbers(j, "f"));
  throw DomainError("relation: unknown kind '" + kind + "'");
}

Json relation_to_json(const WeingartenRelation& rel) {
  if (rel.is_cmc()) return Json{{"kind", "cmc"}, {"H", std::get<CmcParams>(rel.kind()).H}};
  if (rel.is_linear()) {
    const auto p = rel.linear_params();
    return Json{{"kind", "linear"}, {"a", p.a}, {"b", p.b}};
  }
  return Json{{"kind", "general"}, {"label", std::get<GeneralParams>(rel.kind()).label}};
}

void write_profile_csv(std::ostream& os, const ProfileCurve& curve) {
  os << "s,y,z,psi,I\r\n";
  const bool with_i = curve.first_integral_values.size() == curve.samples.size();
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const auto& p = curve.samples[i];
    os << format_double(p.s) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
       << format_double(p.psi) << ',';
    if (with_i) os << format_double(curve.first_integral_values[i]);
    os << "\r\n";
  }
}

std::vector<ProfileState> read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("profile CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,y,z,psi,I") throw DomainError("profile CSV: unexpected header '" + line + "'");
  std::vector<ProfileState> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw DomainError("profile CSV: short row");
    out.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]),
                   parse_double(cells[3])});
  }
  return out;
}

void write_extrema_csv(std::ostream& os, const ExtremaResult& ex) {
  os << "kind,s,y,z,psi\r\n";
  for (const auto& e : ex.extrema) {
    os << (e.kind == ExtremumKind::kNeck ? "neck" : "bulge") << ',' << format_double(e.state.s)
       << ',' << format_double(e.state.y) << ',' << format_double(e.state.z) << ','
       << format_double(e.state.psi) << "\r\n";
  }
}

void write_alpha_csv(std::ostream& os, const AlphaTable& table) {
  os << "t,alpha\r\n";
  for (std::size_t i = 0; i < table.heights.size(); ++i) {
    os << format_double(table.heights[i]) << ',';
    if (table.alpha[i]) os << format_double(*table.alpha[i]);
    os << "\r\n";
  }
}

void write_parity_csv(std::ostream& os, const std::vector<ParityTrial>& trials) {
  os << "seed,loop_count,nonzero_winding,verdict\r\n";
  for (const auto& t : trials) {
    os << t.seed << ',' << t.loop_count << ',' << t.nonzero_winding << ','
       << (t.pass ? "PASS" : "FAIL") << "\r\n";
  }
}

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Json scan_to_json(const ScanOutcome& scan) {
  Json j{{"first_touch", scan.first_touch},
         {"stop_t", scan.stop_t},
         {"contact", to_string(scan.contact)},
         {"surface_tol", scan.surface_tol}};
  j["contact_point"] = scan.contact_point ? vec_json(*scan.contact_point) : Json(nullptr);
  return j;
}

Json symmetry_to_json(const SymmetryResult& sym) {
  Json j;
  if (sym.plane) {
    j["plane"] = Json{{"normal", vec_json(sym.plane->normal)},
                      {"offset", sym.plane->offset + sym.plane->base.dot(sym.plane->normal)}};
  } else {
    j["plane"] = nullptr;
  }
  j["forward"] = scan_to_json(sym.forward);
  j["backward"] = scan_to_json(sym.backward);
  j["mismatch"] = sym.mismatch;
  j["hausdorff"] = sym.hausdorff;
  return j;
}

Json balance_to_json(const BalanceReport& rep) {
  return Json{{"disk_area", rep.disk_area},
              {"positive_mass_sum", rep.positive_mass_sum},
              {"negative_mass_sum", rep.negative_mass_sum},
              {"balance", rep.balance},
              {"verdict", to_string(rep.verdict)},
              {"min_positive_ends", rep.min_positive_ends}};
}

Json flux_to_json(const FluxReport& rep) {
  return Json{{"parallel", {{"y", rep.parallel.y}, {"psi", rep.parallel.psi}, {"z", rep.parallel.z}}},
              {"closed_form", rep.closed_form},
              {"quadrature", rep.quadrature},
              {"rel_err", rep.rel_err}};
}

int worker_count() {
  if (const char* env = std::getenv("WLAB_THREADS")) {
    int n = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec == std::errc() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace wlab
