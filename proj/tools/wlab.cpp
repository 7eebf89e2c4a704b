// wlab: batch front end. Every command reads an optional JSON config, applies
// flag overrides on top, writes the merged config next to its outputs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wlab/alexandrov.hpp"
#include "wlab/bounds.hpp"
#include "wlab/errors.hpp"
#include "wlab/flux.hpp"
#include "wlab/io.hpp"
#include "wlab/profile.hpp"

namespace fs = std::filesystem;
using wlab::DomainError;
using wlab::Json;

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out = ".";
  Json overrides = Json::object();
  Json cfg;
};

template <class T>
void flag(Command& c, const std::string& name, const std::string& key, const std::string& help) {
  c.app->add_option_function<T>(name, [&c, key](const T& v) { c.overrides[key] = v; }, help);
}

void load(Command& c) {
  c.cfg = Json::object();
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw DomainError("cannot open config " + c.config_path);
    try {
      c.cfg = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DomainError(std::string("bad config JSON: ") + e.what());
    }
    if (!c.cfg.is_object()) throw DomainError("config must be a JSON object");
  }
  for (const auto& [k, v] : c.overrides.items()) c.cfg[k] = v;
  fs::create_directories(c.out);
  std::ofstream(fs::path(c.out) / "config.json") << c.cfg.dump(2) << '\n';
}

template <class T>
T get(const Json& cfg, const std::string& key, const T& fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    throw DomainError("config key '" + key + "' has the wrong type");
  }
}

template <class T>
T need(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw DomainError("missing config key '" + key + "'");
  return get<T>(cfg, key, T{});
}

wlab::WeingartenRelation relation(const Json& cfg) {
  Json r = cfg.contains("relation") ? cfg["relation"] : Json::object();
  if (!r.is_object()) throw DomainError("'relation' must be an object");
  for (const char* k : {"a", "b", "H"}) {
    if (cfg.contains(k)) r[k] = cfg[k];
  }
  if (!r.contains("kind")) r["kind"] = r.contains("H") ? "cmc" : "linear";
  return wlab::relation_from_json(r);
}

std::ofstream open_out(const Command& c, const std::string& name) {
  std::ofstream os(fs::path(c.out) / name, std::ios::binary);
  if (!os) throw DomainError("cannot write " + name);
  return os;
}

void write_json(const Command& c, const std::string& name, const Json& j) {
  auto os = open_out(c, name);
  os << j.dump(2) << '\n';
}

int n_theta_of(const Json& cfg, int fallback) {
  const int n = get<int>(cfg, "n_theta", fallback);
  if (n < 3) throw DomainError("empty mesh: n_theta must be at least 3");
  return n;
}

void cmd_profile(Command& c) {
  const auto rel = relation(c.cfg);
  Json summary;
  const auto curve = [&] {
    if (get<bool>(c.cfg, "sphere", false)) {
      auto sp = wlab::sphere_profile(rel, get<double>(c.cfg, "eps_fraction", 1e-3));
      summary = Json{{"radius", sp.radius}, {"closure_y", sp.closure_y}, {"closure_psi", sp.closure_psi}};
      return sp.curve;
    }
    const double neck = need<double>(c.cfg, "neck_r");
    const auto fam = wlab::delaunay_family(rel, neck);
    summary = Json{{"R", fam.R}, {"r", fam.r}, {"period", fam.period}, {"z_period", fam.z_period},
                   {"I0", fam.I0}, {"cylinder", fam.cylinder}};
    const int periods = get<int>(c.cfg, "periods", 1);
    return periods == 1 ? fam.curve : wlab::delaunay_periods(rel, neck, periods);
  }();
  summary["first_integral_drift"] = curve.first_integral_drift();
  {
    auto os = open_out(c, "profile.csv");
    wlab::write_profile_csv(os, curve);
  }
  {
    auto os = open_out(c, "extrema.csv");
    wlab::write_extrema_csv(os, wlab::detect_extrema(curve));
  }
  if (c.cfg.contains("n_theta")) {
    const int n = n_theta_of(c.cfg, 64);
    auto os = open_out(c, "profile.obj");
    wlab::write_obj(os, wlab::revolve(curve, n).mesh);
  }
  write_json(c, "summary.json", summary);
  std::cout << summary.dump() << '\n';
}

void cmd_sweep(Command& c) {
  const auto rel = relation(c.cfg);
  const auto p = rel.linear_params();
  std::vector<double> necks;
  if (c.cfg.contains("neck_r")) {
    necks = get<std::vector<double>>(c.cfg, "neck_r", {});
  } else {
    const int n = get<int>(c.cfg, "count", 9);
    if (n < 1) throw DomainError("count must be positive");
    for (int k = 1; k <= n; ++k) necks.push_back(p.a * k / (n + 1));
  }
  std::vector<std::optional<wlab::DelaunayProfile>> fams(necks.size());
  wlab::parallel_for(necks.size(), [&](std::size_t i) { fams[i] = wlab::delaunay_family(rel, necks[i]); });
  auto os = open_out(c, "sweep.csv");
  os << "neck_r,R,r,radii_defect,period,z_period,I0,drift,mass\r\n";
  for (std::size_t i = 0; i < necks.size(); ++i) {
    const auto& f = *fams[i];
    using wlab::format_double;
    os << format_double(necks[i]) << ',' << format_double(f.R) << ',' << format_double(f.r) << ','
       << format_double(f.R + f.r - 2.0 * p.a) << ',' << format_double(f.period) << ','
       << format_double(f.z_period) << ',' << format_double(f.I0) << ','
       << format_double(f.curve.first_integral_drift()) << ','
       << format_double(std::numbers::pi * (f.R * f.r + p.b)) << "\r\n";
  }
  std::cout << "sweep: " << necks.size() << " profiles\n";
}

void cmd_flux(Command& c) {
  const auto rel = relation(c.cfg);
  const auto p = rel.linear_params();
  const int n = n_theta_of(c.cfg, 512);
  const auto fam = wlab::delaunay_family(rel, need<double>(c.cfg, "neck_r"));
  const auto& smp = fam.curve.samples;
  std::size_t bulge = 0;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    if (smp[i].y > smp[bulge].y) bulge = i;
  }
  const std::vector<std::pair<std::string, wlab::ProfileState>> where{
      {"neck", smp.front()}, {"bulge", smp[bulge]}, {"generic", fam.curve.interpolate(0.3 * fam.period)}};
  Json rows = Json::array();
  double q_lo = 1e300, q_hi = -1e300;
  for (const auto& [name, st] : where) {
    wlab::FluxReport rep;
    rep.parallel = wlab::Parallel{st.y, st.psi, st.z, 1};
    rep.closed_form = wlab::flux_at_parallel(rep.parallel, p.a, p.b);
    rep.quadrature = wlab::parallel_flux(st, rel, n).value;
    rep.rel_err = std::abs(rep.quadrature - rep.closed_form) / std::abs(rep.closed_form);
    q_lo = std::min(q_lo, rep.quadrature);
    q_hi = std::max(q_hi, rep.quadrature);
    Json j = wlab::flux_to_json(rep);
    j["where"] = name;
    rows.push_back(j);
  }
  // the parallels are homotopic, so the quadratures should agree
  const Json out{{"n_theta", n},
                 {"mass", std::numbers::pi * (fam.R * fam.r + p.b)},
                 {"homotopy_spread", (q_hi - q_lo) / std::abs(q_hi)},
                 {"parallels", rows}};
  write_json(c, "flux.json", out);
  std::cout << out.dump() << '\n';
}

wlab::EndSpec end_from(const Json& e) {
  wlab::EndSpec s;
  const auto sign = get<std::string>(e, "sign", "+");
  if (sign != "+" && sign != "-") throw DomainError("end sign must be '+' or '-'");
  s.sign = sign == "+" ? wlab::EndSign::kPositive : wlab::EndSign::kNegative;
  s.r = need<double>(e, "r");
  if (e.contains("H")) {
    s.H = need<double>(e, "H");
  } else {
    s.R = need<double>(e, "R");
    s.b = need<double>(e, "b");
  }
  return s;
}

std::vector<wlab::EndSpec> ends_from(const Json& cfg) {
  std::vector<wlab::EndSpec> ends;
  if (cfg.contains("ends")) {
    if (!cfg["ends"].is_array()) throw DomainError("'ends' must be an array");
    for (const auto& e : cfg["ends"]) ends.push_back(end_from(e));
  } else if (cfg.contains("r")) {
    ends.push_back(end_from(cfg));
  }
  return ends;
}

void cmd_mass(Command& c) {
  Json rows = Json::array();
  for (const auto& e : ends_from(c.cfg)) {
    const double m = e.H != 0.0 ? wlab::cmc_mass(e.r, e.H) : wlab::mass_of_end(e);
    rows.push_back(Json{{"sign", e.sign == wlab::EndSign::kPositive ? "+" : "-"}, {"mass", m}});
  }
  if (rows.empty()) throw DomainError("no ends given");
  const Json out{{"ends", rows}};
  write_json(c, "mass.json", out);
  std::cout << out.dump() << '\n';
}

wlab::TriMesh shape_mesh(const Json& cfg) {
  if (cfg.contains("mesh")) {
    std::ifstream in(get<std::string>(cfg, "mesh", ""));
    if (!in) throw DomainError("cannot open mesh");
    return wlab::read_obj(in);
  }
  const auto shape = get<std::string>(cfg, "shape", "sphere");
  if (shape == "sphere") {
    const double radius = get<double>(cfg, "radius", 1.0);
    if (!(radius > 0.0)) throw DomainError("radius must be positive");
    return wlab::icosphere(get<int>(cfg, "level", 4), radius);
  }
  if (shape == "delaunay") {
    const auto rel = relation(cfg);
    const auto fam = wlab::delaunay_family(rel, need<double>(cfg, "neck_r"));
    return wlab::revolve(fam.curve, n_theta_of(cfg, 96), wlab::CapMode::kBoth).mesh;
  }
  if (shape == "tilted-cylinder") {
    return wlab::tilted_cylinder_mesh(get<double>(cfg, "radius", 1.0), get<double>(cfg, "tilt", 0.3),
                                      get<double>(cfg, "height", 2.0), n_theta_of(cfg, 96),
                                      get<int>(cfg, "n_z", 16));
  }
  throw DomainError("unknown shape '" + shape + "'");
}

void cmd_alexandrov(Command& c) {
  const auto mesh = shape_mesh(c.cfg);
  if (mesh.empty()) throw DomainError("empty mesh");
  std::vector<wlab::Vec3> dirs;
  if (c.cfg.contains("directions")) {
    for (const auto& d : get<std::vector<std::vector<double>>>(c.cfg, "directions", {})) {
      if (d.size() != 3) throw DomainError("directions must be 3-vectors");
      dirs.emplace_back(d[0], d[1], d[2]);
    }
  } else {
    dirs = wlab::grid_directions();
  }
  wlab::ScanOptions opt;
  opt.tol = get<double>(c.cfg, "tol", opt.tol);
  opt.normal_tol = get<double>(c.cfg, "normal_tol", opt.normal_tol);
  if (!(opt.tol > 0.0) || !(opt.normal_tol > 0.0)) throw DomainError("tolerances must be positive");
  const wlab::TriangleBvh bvh(mesh);
  Json rows = Json::array();
  int found = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto sym = wlab::alexandrov_symmetry(bvh, dirs[i], opt.tol, opt);
    opt.check_input = false;
    Json j = wlab::symmetry_to_json(sym);
    j["direction"] = Json::array({dirs[i].x(), dirs[i].y(), dirs[i].z()});
    rows.push_back(j);
    found += sym.plane.has_value();
  }
  write_json(c, "symmetry.json", Json{{"directions", rows}});
  {
    auto os = open_out(c, "mesh.obj");
    wlab::write_obj(os, mesh);
  }

  if (c.cfg.contains("alpha_d")) {
    // alpha of the uncapped profile surface with its axis moved to x = d
    const double d = get<double>(c.cfg, "alpha_d", 0.0);
    const auto rel = relation(c.cfg);
    const auto fam = wlab::delaunay_periods(rel, need<double>(c.cfg, "neck_r"), get<int>(c.cfg, "periods", 2));
    auto tube = wlab::revolve(fam, n_theta_of(c.cfg, 256)).mesh;
    tube = wlab::transformed(tube, Eigen::Matrix3d::Identity(), wlab::Vec3(d, 0.0, 0.0));
    const wlab::MeshSurface surf(tube);
    const auto plane = wlab::make_plane(wlab::Vec3::Zero(), wlab::Vec3::UnitX());
    const double z_lo = fam.samples.front().z, z_hi = fam.samples.back().z;
    std::vector<double> heights;
    const int nh = get<int>(c.cfg, "n_heights", 20);
    for (int k = 0; k < nh; ++k) heights.push_back(z_lo + (z_hi - z_lo) * (k + 0.5) / nh);
    auto os = open_out(c, "alpha.csv");
    wlab::write_alpha_csv(os, wlab::alpha_table(surf, plane, heights, get<int>(c.cfg, "n_rays", 64)));
  }
  std::cout << "alexandrov: " << found << " of " << dirs.size() << " directions symmetric\n";
}

void cmd_bounds(Command& c) {
  double area = 0.0;
  if (c.cfg.contains("radius")) {
    const double r = get<double>(c.cfg, "radius", 0.0);
    if (!(r > 0.0)) throw DomainError("boundary radius must be positive");
    area = std::numbers::pi * r * r;
  } else {
    area = need<double>(c.cfg, "disk_area");
  }
  std::optional<wlab::LinearParams> params;
  if (c.cfg.contains("a") || c.cfg.contains("b")) {
    params = wlab::LinearParams{need<double>(c.cfg, "a"), need<double>(c.cfg, "b")};
  }
  const auto rep = wlab::theorem_two_verdict(area, ends_from(c.cfg), params);
  Json j = wlab::balance_to_json(rep);
  if (params) {
    j["min_positive_ends_sharp"] =
        wlab::min_positive_ends(std::sqrt(area / std::numbers::pi), params->a, params->b, true);
  }
  write_json(c, "bounds.json", j);
  std::cout << j.dump() << '\n';
}

void cmd_parity(Command& c) {
  const auto seed = get<std::uint64_t>(c.cfg, "seed", 1);
  const int trials = get<int>(c.cfg, "trials", 1000);
  const auto rows = wlab::parity_harness(seed, trials);
  auto os = open_out(c, "parity.csv");
  wlab::write_parity_csv(os, rows);
  int failed = 0;
  for (const auto& r : rows) failed += !r.pass;
  std::cout << "parity: " << rows.size() << " trials, " << failed << " failed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotational Weingarten surface toolkit"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> cmds;
  auto add = [&](const std::string& name, const std::string& help) -> Command& {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->app->add_option("--config", c->config_path, "JSON config file");
    c->app->add_option("--out", c->out, "output directory");
    cmds.push_back(std::move(c));
    return *cmds.back();
  };
  auto relation_flags = [](Command& c) {
    flag<double>(c, "--a", "a", "linear relation a");
    flag<double>(c, "--b", "b", "linear relation b");
    flag<double>(c, "--H", "H", "cmc mean curvature");
  };

  auto& profile = add("profile", "integrate a profile curve");
  relation_flags(profile);
  flag<double>(profile, "--neck-r", "neck_r", "neck radius");
  flag<int>(profile, "--periods", "periods", "number of periods");
  flag<bool>(profile, "--sphere", "sphere", "integrate the sphere-type profile");
  flag<int>(profile, "--n-theta", "n_theta", "also write the revolved OBJ");

  auto& sweep = add("sweep", "sweep the neck radius");
  relation_flags(sweep);
  flag<int>(sweep, "--count", "count", "number of neck radii in (0, a)");

  auto& flux = add("flux", "closed-form vs quadrature flux");
  relation_flags(flux);
  flag<double>(flux, "--neck-r", "neck_r", "neck radius");
  flag<int>(flux, "--n-theta", "n_theta", "samples per parallel");

  auto& mass = add("mass", "end masses");
  flag<double>(mass, "--R", "R", "bulge radius");
  flag<double>(mass, "--r", "r", "neck radius");
  flag<double>(mass, "--b", "b", "relation b");
  flag<double>(mass, "--H", "H", "cmc end");
  flag<std::string>(mass, "--sign", "sign", "+ or -");

  auto& alex = add("alexandrov", "moving-plane scans and symmetry detection");
  relation_flags(alex);
  flag<std::string>(alex, "--shape", "shape", "sphere, delaunay or tilted-cylinder");
  flag<std::string>(alex, "--mesh", "mesh", "closed OBJ mesh");
  flag<double>(alex, "--neck-r", "neck_r", "neck radius");
  flag<int>(alex, "--n-theta", "n_theta", "angular resolution");
  flag<int>(alex, "--level", "level", "icosphere level");
  flag<double>(alex, "--radius", "radius", "sphere or cylinder radius");
  flag<double>(alex, "--alpha-d", "alpha_d", "write alpha.csv with the axis at x = d");

  auto& bnd = add("bounds", "balance, area inequality and end count");
  flag<double>(bnd, "--radius", "radius", "boundary circle radius");
  flag<double>(bnd, "--disk-area", "disk_area", "|D|");
  flag<double>(bnd, "--a", "a", "relation a");
  flag<double>(bnd, "--b", "b", "relation b");

  auto& par = add("parity", "randomized loop parity harness");
  flag<std::uint64_t>(par, "--seed", "seed", "seed");
  flag<int>(par, "--trials", "trials", "number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::vector<std::pair<Command*, void (*)(Command&)>> table{
      {&profile, cmd_profile}, {&sweep, cmd_sweep}, {&flux, cmd_flux},       {&mass, cmd_mass},
      {&alex, cmd_alexandrov}, {&bnd, cmd_bounds},  {&par, cmd_parity}};
  try {
    for (auto& [c, run] : table) {
      if (c->app->parsed()) {
        load(*c);
        run(*c);
      }
    }
  } catch (const wlab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const wlab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
