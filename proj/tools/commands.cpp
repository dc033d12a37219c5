#include "commands.hpp"

#include <cmath>
#include <cstdint>
#include <optional>

#include <fmt/core.h>

#include "knds/acceptance.hpp"
#include "knds/errors.hpp"
#include "knds/initdata.hpp"
#include "knds/perturbation.hpp"
#include "knds/sampling.hpp"
#include "knds/subprincipal.hpp"

namespace knds::cli {

double RunConfig::num(const std::string& key) const {
  if (!has(key) || !values.at(key).is_number()) throw UsageError("--" + key + " must be a number");
  return values.at(key).get<double>();
}
int RunConfig::integer(const std::string& key) const {
  if (!has(key) || !values.at(key).is_number_integer()) throw UsageError("--" + key + " must be an integer");
  return values.at(key).get<int>();
}
std::string RunConfig::str(const std::string& key) const {
  if (!has(key) || !values.at(key).is_string()) throw UsageError("--" + key + " must be a string");
  return values.at(key).get<std::string>();
}
std::vector<double> RunConfig::list(const std::string& key) const {
  if (!has(key) || !values.at(key).is_array()) throw UsageError("--" + key + " must be a list of numbers");
  std::vector<double> v;
  for (const auto& x : values.at(key)) {
    if (!x.is_number()) throw UsageError("--" + key + " must be a list of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

BlackHoleParams RunConfig::params() const {
  const double a = num("spin");
  if (a != 0.0 && command != "classify")
    throw UsageError("--spin is only used by classify; the master equations are for the nonrotating family");
  return BlackHoleParams(num("lambda"), num("mass"), num("charge-e"), num("charge-m"), {0.0, 0.0, a});
}

std::string RunConfig::hash() const {
  const std::string s = ojson{{"command", command}, {"values", values}, {"format", format}}.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ull;
  return fmt::format("{:016x}", h);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string csv_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

namespace {

std::string csv_value(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return csv_real(v.get<double>());
  if (v.is_string()) return csv_cell(v.get<std::string>());
  return csv_cell(v.dump());
}

using Row = std::vector<ojson>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

ojson header(const RunConfig& c, const std::string& provenance) {
  return {{"knds_version", version()}, {"command", c.command}, {"config_hash", c.hash()},
          {"config", c.values}, {"provenance", provenance}};
}

// CSV: '#' preamble carrying version, hash and config, then RFC-4180 rows
std::string csv_preamble(const RunConfig& c) {
  return fmt::format("# knds {} {}\r\n# config_hash {}\r\n# config {}\r\n", version(), c.command, c.hash(), c.values.dump());
}

std::string render(const RunConfig& c, const Table& t, const std::string& provenance, ojson extra = nullptr) {
  if (c.format == "json") {
    ojson j = header(c, provenance);
    if (!extra.is_null())
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    ojson rows = ojson::array();
    for (const auto& r : t.rows) {
      ojson o;
      for (size_t k = 0; k < t.columns.size(); ++k) o[t.columns[k]] = r[k];
      rows.push_back(o);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
  }
  std::string s = csv_preamble(c);
  for (size_t k = 0; k < t.columns.size(); ++k) s += (k ? "," : "") + csv_cell(t.columns[k]);
  s += "\r\n";
  for (const auto& r : t.rows) {
    for (size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + csv_value(r[k]);
    s += "\r\n";
  }
  return s;
}

std::string render_json(const RunConfig& c, const std::string& provenance, const ojson& body) {
  if (c.format != "json") throw UsageError(c.command + " writes JSON only (--format json)");
  ojson j = header(c, provenance);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

void require_nondegenerate(const BlackHoleParams& p) {
  const Verdict v = classify_nondegenerate(p.lambda, p.mass, p.Q());
  if (!v.nondegenerate) throw DegenerateError(v.reason);
}

ModeSector sector_of(const std::string& name, int l) {
  const SectorKind k = parse_sector_kind(name);
  if (l < 0) throw UsageError("--l must be nonnegative");
  if (k == SectorKind::ScalarHigh) {
    if (l == 0) throw UsageError("scalar sector needs l >= 1");
    return ModeSector::scalar(l);
  }
  if (k == SectorKind::VectorHigh) {
    if (l == 0) throw UsageError("vector sector needs l >= 1");
    return ModeSector::vector(l);
  }
  return ModeSector(k, l);
}

ojson opt_real(std::optional<double> x) { return x ? ojson(*x) : ojson(nullptr); }

}  // namespace

// ---- classify ----

Output cmd_classify(const RunConfig& c) {
  const int n = c.integer("grid");
  if (n < 0) throw UsageError("--grid must be nonnegative");
  const auto lr = c.list("lambda-range"), qr = c.list("charge-range");
  if (lr.size() != 2 || qr.size() != 2) throw UsageError("--lambda-range and --charge-range take lo,hi");
  if (!(lr[0] >= 0.0 && lr[1] > lr[0]) || !(qr[0] >= 0.0 && qr[1] > qr[0]))
    throw UsageError("grid bounds must be nonnegative and increasing");
  const double M = c.num("mass"), a = c.num("spin");
  if (!(M > 0.0)) throw DomainError("mass must be positive");

  Table t{{"lambda", "Q", "verdict", "r_minus", "r_plus", "r_P", "kappa_minus", "kappa_plus", "reason"}, {}};
  if (a != 0.0) {
    t.columns.push_back("r_minus_rotating");
    t.columns.push_back("r_plus_rotating");
  }
  t.columns.push_back("provenance");
  t.rows.resize(std::size_t(n) * n);
  // Lambda outer, Q inner; Lambda_i = lo + (hi - lo)(i+1)/n, Q_j = lo + (hi - lo) j/n
  parallel_for(n, c.jobs, [&](int i) {
    const double L = lr[0] + (lr[1] - lr[0]) * (i + 1) / n;
    for (int j = 0; j < n; ++j) {
      const double Q = qr[0] + (qr[1] - qr[0]) * j / n;
      const Verdict v = classify_nondegenerate(L, M, Q);
      Row r{L, Q, v.nondegenerate ? "nondegenerate" : "degenerate"};
      std::string prov = "closed-form Lambda bounds";
      if (v.nondegenerate) {
        const auto h = horizons(BlackHoleParams(L, M, Q));
        for (double x : {h.r_minus, h.r_plus, h.r_photon(), h.kappa_minus, h.kappa_plus}) r.push_back(x);
        prov += "; polished quartic roots";
      } else {
        for (int k = 0; k < 5; ++k) r.push_back(nullptr);
      }
      r.push_back(v.reason);
      if (a != 0.0) {
        std::optional<double> rm, rp;
        if (v.nondegenerate) try {
            const auto kh = knds_horizons(BlackHoleParams(L, M, Q, 0.0, {0.0, 0.0, a}));
            rm = kh.first;
            rp = kh.second;
            prov += "; rotating horizons by continuation in a";
          } catch (const SpinTooLarge& e) {
            prov += std::string("; rotating horizons unavailable: ") + e.what();
          }
        r.push_back(opt_real(rm));
        r.push_back(opt_real(rp));
      }
      r.push_back(prov);
      t.rows[std::size_t(i) * n + j] = std::move(r);
    }
  });
  return {render(c, t, "classify_nondegenerate over a (Lambda, Q) grid"), 0};
}

// ---- potentials ----

Output cmd_potentials(const RunConfig& c) {
  const auto p = c.params();
  require_nondegenerate(p);
  const ModeSector sec = sector_of(c.str("sector"), c.integer("l"));
  const int n = c.integer("grid");
  if (n < 1) throw UsageError("--grid must be positive");

  std::vector<Branch> branches;
  if (c.has("branch")) {
    branches.push_back(parse_branch(c.str("branch")));
  } else if (sec.is_scalar()) {
    branches = {{BranchKind::Plus}, {BranchKind::Minus}, {BranchKind::MaxwellAux}};
  } else if (sec.kind == SectorKind::VectorHigh) {
    branches = {{BranchKind::Plus}, {BranchKind::Minus}, {BranchKind::VectorEigenPlus}, {BranchKind::VectorEigenMinus}};
  } else if (sec.kind == SectorKind::VectorDipole) {
    branches = {{BranchKind::Plus}};
  } else {
    branches = {{BranchKind::ScalarWaveControl}};
  }
  std::vector<MasterEquation> eqs;
  for (const auto& b : branches) {
    if (b.kind == BranchKind::ConstraintDamping) throw UsageError("the damping branch has no potential; use the damping command");
    eqs.emplace_back(p, sec, b);
  }

  Table t{{"r"}, {}};
  for (const auto& b : branches) t.columns.push_back("V_" + b.name());
  std::optional<ScalarMasterData> sd;
  if (sec.is_scalar()) {
    sd.emplace(p, sec.l, false);
    t.columns.push_back("Vt_plus");
    t.columns.push_back("Vt_minus");
  }
  t.columns.push_back("provenance");
  const auto h = horizons(p);
  // interior Chebyshev points of (r-, r+)
  const auto pts = chebyshev_points(h.r_minus, h.r_plus, n + 2);
  const std::string prov = "master potentials " + sec.name() + " l=" + std::to_string(sec.l);
  for (int k = 1; k <= n; ++k) {
    const double r = pts[k];
    Row row{r};
    for (const auto& e : eqs) row.push_back(e.V(r));
    if (sd) {
      row.push_back(sd->Vt_plus(r));
      row.push_back(sd->Vt_minus(r));
    }
    row.push_back(prov);
    t.rows.push_back(std::move(row));
  }
  return {render(c, t, "master-equation potentials on the interior of (r-, r+)", {{"params", params_json(p)}}), 0};
}

// ---- qnm-scan ----

Output cmd_qnm_scan(const RunConfig& c) {
  const auto p = c.params();
  require_nondegenerate(p);
  Window w = default_scan_window(p);
  if (c.has("window")) {
    const auto v = c.list("window");
    if (v.size() != 4) throw UsageError("--window takes reLo,reHi,imLo,imHi");
    w = {v[0], v[1], v[2], v[3]};
  }
  ContourOptions opt;
  opt.jobs = c.jobs;
  const int pts = c.integer("grid");
  const int l = c.integer("l");
  const std::string sector = c.str("sector");

  ScanResult scan;
  if (c.has("branch")) {
    const ModeSector sec = sector_of(sector, l);
    const Branch b = parse_branch(c.str("branch"));
    if (b.kind == BranchKind::ConstraintDamping) throw UsageError("the damping branch is scanned by the damping command");
    MasterEquation eq(p, sec, b);
    scan.entries.push_back({sec.name(), l, b.name(), count_resonances(eq, w, pts, opt)});
  } else {
    std::vector<SectorKind> kinds;
    if (sector == "all") kinds = {SectorKind::ScalarHigh, SectorKind::VectorHigh};
    else kinds = {parse_sector_kind(sector)};
    scan = mode_stability_scan(p, kinds, l, w, pts, opt);
  }
  ojson body{{"params", params_json(p)},
             {"window", {w.re_lo, w.re_hi, w.im_lo, w.im_hi}},
             {"stable", scan.stable()},
             {"reports", scan.to_json(p)}};
  return {render_json(c, "argument-principle winding of the horizon-matched Wronskian", body), 0};
}

// ---- damping ----

Output cmd_damping(const RunConfig& c) {
  const auto p = c.params();
  require_nondegenerate(p);
  const auto gs = c.list("gammas");
  std::vector<DampingResult> res(gs.size());
  parallel_for(int(gs.size()), c.jobs, [&](int k) { res[k] = constraint_damping_resonance_detail(p, gs[k]); });
  Table t{{"gamma3", "sigma_re", "sigma_im", "slope", "iterations", "residual", "provenance"}, {}};
  for (size_t k = 0; k < gs.size(); ++k) {
    const auto& d = res[k];
    t.rows.push_back({gs[k], d.sigma.real(), d.sigma.imag(), gs[k] != 0.0 ? ojson(d.sigma.imag() / gs[k]) : ojson(nullptr),
                      d.iterations, d.residual, "secant continuation from sigma(0) = 0"});
  }
  const auto h = horizons(p);
  ojson extra{{"params", params_json(p)},
              {"horizon_integral", box_tstar_horizon_integral(p)},
              {"horizon_integral_reference", -4.0 * M_PI * (h.r_plus * h.r_plus + h.r_minus * h.r_minus)}};
  return {render(c, t, "zero of the damped l=0 Wronskian continued in gamma3", extra), 0};
}

// ---- subpr ----

Output cmd_subpr(const RunConfig& c) {
  const int n = c.integer("draws");
  if (n < 0) throw UsageError("--draws must be nonnegative");
  const double tol = c.num("tol");
  ParamSampler S(c.values.at("rng-seed").get<std::uint64_t>());
  std::vector<TrappedSetParams> tp(n);
  std::vector<RadialSetParams> rp(n);
  for (auto& t : tp) t = {S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-3, 3)};
  for (auto& r : rp) r = {S.uniform(0.01, 1), S.uniform(-3, 3), S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-3, 3)};

  std::vector<Row> rows(3 * std::size_t(n));
  std::vector<int> bad(3 * std::size_t(n), 0);
  auto audit = [&](std::size_t slot, int i, const char* set, const char* side, const std::function<SpectrumCheck()>& f) {
    try {
      const auto s = f();
      rows[slot] = {i, set, side, "ok", s.max_deviation, s.max_spread, s.min_real, s.nonnegative, ""};
    } catch (const LemmaMismatchError& e) {
      bad[slot] = 1;
      rows[slot] = {i, set, side, "LemmaMismatch", nullptr, nullptr, nullptr, nullptr, e.what()};
    }
  };
  parallel_for(n, c.jobs, [&](int i) {
    audit(3 * i, i, "trapped", "", [&] { return eig_trapped(tp[i], tol); });
    auto r = rp[i];
    r.side = RadialSide::Event;
    audit(3 * i + 1, i, "radial", "event", [&] { return eig_radial(r, tol); });
    auto q = rp[i];
    q.side = RadialSide::Cosmological;
    audit(3 * i + 2, i, "radial", "cosmological", [&] { return eig_radial(q, tol); });
  });
  Table t{{"draw", "set", "side", "status", "max_deviation", "max_spread", "min_real", "nonnegative", "message", "provenance"}, {}};
  int mismatches = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    mismatches += bad[k];
    rows[k].push_back(k % 3 == 0 ? "eigenvalues vs closed-form 14x14 spectrum" : "eigenvalues vs closed-form 10x10 spectrum");
    t.rows.push_back(std::move(rows[k]));
  }
  return {render(c, t, "subprincipal spectra audit", {{"mismatches", mismatches}}), mismatches ? exit_code::numerical : 0};
}

// ---- initdata ----

Output cmd_initdata(const RunConfig& c) {
  const auto p = c.params();
  require_nondegenerate(p);
  const auto bg = rnds_slice(p, c.integer("grid"));
  const double a = bg.grid.front(), b = bg.grid.back(), amp = c.num("seed-amp");
  const std::string kind = c.str("seed-kind");
  ConformalSeed seed;
  if (kind == "bump" || kind == "mixed") seed.Htilde_fn = ConformalSeed::bump(amp, 0.5 * (a + b), 0.45 * (b - a));
  if (kind == "charge" || kind == "mixed") seed.with_charge_shift(amp, 0.0);
  if (kind == "mixed") seed.Qtilde_amp = amp;
  if (kind != "zero" && kind != "bump" && kind != "charge" && kind != "mixed")
    throw UsageError("--seed-kind must be zero, bump, charge or mixed");
  SolveOptions opt;
  opt.tol = c.num("tol");
  const auto sol = solve_conformal(bg, seed, p.lambda, opt);
  const double rm = 0.5 * (a + b);
  const auto q0 = charges(bg, rm), q1 = charges(sol.data, rm);
  ojson body{{"params", params_json(p)},
             {"seed", {{"kind", kind}, {"amplitude", amp}}},
             {"background_charges", {{"Qe", q0.Qe}, {"Qm", q0.Qm}}},
             {"charges", {{"Qe", q1.Qe}, {"Qm", q1.Qm}, {"r", rm}}},
             {"background_residuals", residual_json(constraint_residual(bg, p.lambda))},
             {"solution", sol.to_json()}};
  return {render_json(c, "conformal-method solve on an RNdS slice", body), 0};
}

// ---- verify ----

Output cmd_verify(const RunConfig& c) {
  AcceptanceOptions o;
  o.rng_seed = c.values.at("rng-seed").get<std::uint64_t>();
  o.jobs = c.jobs;
  const auto rs = run_acceptance(o);
  bool all = true;
  for (const auto& r : rs) all = all && r.pass;
  std::string s;
  if (c.format == "json") {
    ojson j = header(c, "identity suite, criteria 1-9");
    ojson arr = ojson::array();
    for (const auto& r : rs)
      arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"metrics", r.metrics}});
    j["results"] = arr;
    j["pass"] = all;
    s = j.dump(2) + "\n";
  } else if (c.format == "csv") {
    Table t{{"id", "title", "pass", "detail", "provenance"}, {}};
    for (const auto& r : rs) t.rows.push_back({r.id, r.title, r.pass, r.detail, "in-process acceptance check"});
    s = render(c, t, "");
  } else {
    s = fmt::format("# knds {} verify\n# config_hash {}\n", version(), c.hash()) + format_report(rs) +
        (all ? "ALL PASS\n" : "FAILURES\n");
  }
  return {s, all ? 0 : exit_code::numerical};
}

}  // namespace knds::cli
