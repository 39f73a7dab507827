#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "macroreal/conditions.hpp"
#include "macroreal/mach_zehnder.hpp"
#include "macroreal/overlap.hpp"

namespace macroreal::cli {

namespace {

using OrderedJson = nlohmann::ordered_json;

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw UsageError("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw UsageError("empty range");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw UsageError("range must look like start:stop:step, got '" + t + "'");
    const double a = parse_number(trim(parts[0]));
    const double b = parse_number(trim(parts[1]));
    const double h = parse_number(trim(parts[2]));
    if (!(h > 0.0) || b < a) throw UsageError("range needs step > 0 and stop >= start: '" + t + "'");
    const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (n > 10000000) throw UsageError("range too long: '" + t + "'");
    std::vector<double> v;
    for (long i = 0; i <= n; ++i) v.push_back(a + h * static_cast<double>(i));
    return v;
  }
  std::vector<double> v;
  for (const auto& p : split(t, ',')) v.push_back(parse_number(trim(p)));
  return v;
}

std::complex<double> parse_complex(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty()) throw UsageError("empty complex number");
  if (t.back() != 'i' && t.back() != 'j') return {parse_number(t), 0.0};
  t.pop_back();
  // Split at the last sign that is not an exponent sign and not leading.
  std::size_t cut = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;)
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      cut = k;
      break;
    }
  const std::string re = cut == std::string::npos ? "" : t.substr(0, cut);
  std::string im = cut == std::string::npos ? t : t.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_number(re), parse_number(im)};
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

// ---------------------------------------------------------------------------
// Output

using Cell = std::variant<double, long, std::string, bool>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& os) const {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf << std::setprecision(17);
    for (std::size_t k = 0; k < header.size(); ++k) buf << (k ? "," : "") << header[k];
    buf << '\n';
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) buf << ',';
        std::visit(
            [&buf](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, bool>)
                buf << (v ? 1 : 0);
              else
                buf << v;
            },
            row[k]);
      }
      buf << '\n';
    }
    os << buf.str();
  }

  OrderedJson to_json() const {
    OrderedJson arr = OrderedJson::array();
    for (const auto& row : rows) {
      OrderedJson o;
      for (std::size_t k = 0; k < row.size(); ++k)
        std::visit([&](const auto& v) { o[header[k]] = v; }, row[k]);
      arr.push_back(o);
    }
    return arr;
  }
};

struct Common {
  std::string out;
  std::string format;  // empty: the subcommand's default
  double tol = kExactThreshold;
  std::size_t dim = 0;
  double grid = 0.0;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output file (default: standard output)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--tol", c.tol, "Condition threshold (env MACROREAL_DEFAULT_TOL)");
  app->add_option("--dim", c.dim, "Fock truncation (0: automatic)");
  app->add_option("--grid", c.grid, "Grid resolution: lattice step, or point count for quadrature runs");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Seed for randomized sweeps");
}

/// Writes to --out when given, else to `out`.
void emit(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (c.out.empty()) {
    write(out);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + c.out + "'");
  write(f);
}

void emit_table(const Common& c, std::ostream& out, const Table& t, const OrderedJson& meta) {
  emit(c, out, [&](std::ostream& os) {
    if (c.format == "csv") {
      t.write_csv(os);
    } else {
      OrderedJson j = meta;
      j["rows"] = t.to_json();
      os << j.dump(2) << '\n';
    }
  });
}

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(6) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// mz-scan

struct MzScanArgs {
  std::string state = "both";
  std::string q = "0,0.3,0.5";
  std::vector<std::string> c{"0.2", "0.2i", "0.1+0.1i"};
  double q_sup = 0.5;
  std::string r1 = "0:1:0.1";
  std::string r2 = "0:1:0.1";
  int phi_count = 12;
  std::string convention = "default";
};

MzConvention convention_from_string(const std::string& s) {
  for (auto c : all_conventions())
    if (s == to_string(c)) return c;
  throw UsageError("unknown convention '" + s + "'");
}

int cmd_mz_scan(const MzScanArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  Table1Lattice lat;
  lat.r1 = parse_range(a.r1);
  lat.r2 = parse_range(a.r2);
  if (a.phi_count < 1) throw UsageError("--phi-count must be positive");
  for (int k = 0; k < a.phi_count; ++k) lat.phi.push_back(2.0 * std::numbers::pi * k / a.phi_count);
  if (a.state == "mix" || a.state == "both") lat.q_mix = parse_range(a.q);
  if (a.state == "sup" || a.state == "both")
    for (const auto& s : a.c) lat.c_sup.push_back(parse_complex(s));
  lat.q_sup = a.q_sup;
  const auto points = lat.points();
  if (points.empty()) throw UsageError("empty parameter lattice");
  for (const auto& p : points) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  OrderedJson resolution;
  MzConvention conv = kDefaultConvention;
  if (a.convention == "auto") {
    const auto r = resolve_convention(points, c.tol);
    for (const auto& [cv, n] : r.mismatches) resolution[to_string(cv)] = n;
    conv = r.chosen;
  } else if (a.convention != "default") {
    conv = convention_from_string(a.convention);
  }

  // Per-point verification in parallel, assembled in lattice order.
  std::vector<Table1Report> parts(points.size());
  parallel_for(points.size(), c.jobs, [&](std::size_t i) { parts[i] = verify_table1({points[i]}, c.tol, conv); });
  Table1Report rep;
  rep.convention = conv;
  rep.threshold = c.tol;
  for (auto& p : parts) {
    rep.points += p.points;
    rep.checks += p.checks;
    rep.guarded += p.guarded;
    rep.mismatches += p.mismatches;
    for (auto& row : p.rows) rep.rows.push_back(std::move(row));
  }
  Json summary = rep.summary();
  if (!resolution.empty()) summary["convention_trials"] = Json::parse(resolution.dump());
  std::size_t violations = 0;
  for (const auto& r : rep.rows) violations += r.numeric ? 0 : 1;
  summary["violated_rows"] = violations;

  if (c.out.empty()) {
    if (c.format == "csv")
      rep.write_csv(out);
    else
      out << summary.dump(2) << '\n';
  } else {
    std::string stem = c.out;
    for (const char* ext : {".csv", ".json"})
      if (stem.size() > 5 && stem.ends_with(ext)) stem.erase(stem.size() - std::string(ext).size());
    std::ofstream csv(stem + ".csv", std::ios::binary);
    std::ofstream js(stem + ".json", std::ios::binary);
    if (!csv || !js) throw UsageError("cannot open output files at '" + stem + "'");
    rep.write_csv(csv);
    js << summary.dump(2) << '\n';
  }
  err << "mz-scan: " << rep.points << " points, " << rep.checks << " checks, " << rep.guarded << " guarded, "
      << rep.mismatches << " mismatches (convention " << to_string(conv) << ")\n";
  return rep.mismatches == 0 ? kOk : kViolation;
}

// ---------------------------------------------------------------------------
// mz-scenario

struct MzScenarioArgs {
  double r1 = 0.5, r2 = 0.5, phi = 0.0, q = 0.5;
  std::string state = "mix";
  std::string c = "0";
};

int cmd_mz_scenario(const MzScenarioArgs& a, const Common& c, std::ostream& out) {
  MzParams p = a.state == "sup" ? MzParams::sup(a.r1, a.r2, a.phi, a.q, parse_complex(a.c))
                                : MzParams::mix(a.r1, a.r2, a.phi, a.q);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Json j = scenario_to_json(mz_scenario(p));
  j["description"] = "Mach-Zehnder which-path scenario";
  j["parameters"] = p.to_json();
  emit(c, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

// ---------------------------------------------------------------------------
// nsit-check

int cmd_nsit_check(const std::string& path, const Common& c, std::ostream& out, std::ostream& err) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read scenario file '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  Scenario s = [&] {
    try {
      return scenario_from_json(j);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();

  std::vector<ConditionReport> reports;
  OrderedJson notices = OrderedJson::array();
  const std::size_t n = s.slot_count();
  for (std::size_t i = 0; i < n; ++i)
    if (!s.slots()[i].instrument) throw UsageError("slot " + std::to_string(i) + " has no instrument");
  for (std::size_t j2 = 1; j2 < n; ++j2)
    for (std::size_t i = 0; i < j2; ++i) {
      reports.push_back(nsit_two_time(s, i, j2, c.tol));
      reports.push_back(aot_check(s, i, j2, c.tol));
    }
  OrderedJson bundle;
  if (n == 3) {
    reports.push_back(nsit_sandwich(s, c.tol));
    reports.push_back(nsit_leading(s, c.tol));
    try {
      reports.push_back(lgi_012(s, c.tol));
      reports.push_back(nic_012(s, c.tol));
    } catch (const ScenarioError& e) {
      notices.push_back(std::string("LGI/NIC skipped: ") + e.what());
    }
    const auto b = mr012_check(s, c.tol);
    reports.push_back(b.verdict);
    bundle = OrderedJson::parse(b.to_json().dump());
  } else {
    notices.push_back("MR_012 bundle skipped: it needs exactly three slots, scenario has " + std::to_string(n));
  }

  bool violated = false;
  Table t{{"condition", "residual", "threshold", "holds", "total_variation"}, {}};
  for (const auto& r : reports) {
    violated = violated || !r.holds;
    t.rows.push_back({r.name, r.residual, r.threshold, r.holds, r.total_variation});
  }
  for (const auto& note : notices) err << "notice: " << note.get<std::string>() << '\n';
  OrderedJson meta;
  meta["scenario"] = path;
  meta["notices"] = notices;
  if (!bundle.is_null()) meta["mr012"] = bundle;
  emit_table(c, out, t, meta);
  return violated ? kViolation : kOk;
}

// ---------------------------------------------------------------------------
// mr-sweep

int cmd_mr_sweep(std::size_t count, const Common& c, std::ostream& out, std::ostream& err) {
  SweepOptions o;
  o.count = count;
  o.seed = c.seed;
  const auto sum = random_scenario_sweep(o);
  emit(c, out, [&](std::ostream& os) { os << sum.to_json().dump(2) << '\n'; });
  const bool fail = sum.eq16_forward_failures || sum.eq16_converse_failures || sum.eq9_failures || sum.nic_failures;
  err << "mr-sweep: " << sum.scenarios << " scenarios, " << (fail ? "relation violated" : "all relations hold")
      << '\n';
  return fail ? kViolation : kOk;
}

// ---------------------------------------------------------------------------
// overlap

struct OverlapArgs {
  // quadrature
  std::string kase = "XX";
  double delta = 1.0, kappa = 1.0, sigma = 1.0, m = 1.0;
  std::string t = "0:10:0.5";
  // coherent / ring / fock
  std::string gamma;
  std::string delta_sq;
  std::string d = "0.5:8:0.25";
  std::string gamma_mode = "border";
  std::vector<std::string> g;
};

int cmd_overlap_quadrature(const OverlapArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  std::vector<QuadratureCase> cases;
  if (a.kase == "all")
    cases = {QuadratureCase::XX, QuadratureCase::PX, QuadratureCase::XP, QuadratureCase::PP};
  else
    try {
      cases = {quadrature_case_from_string(a.kase)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  const auto ts = parse_range(a.t);
  QuadratureGridOptions go;
  if (c.grid > 0) go.points = static_cast<std::size_t>(c.grid);
  struct Job {
    QuadratureParams p;
  };
  std::vector<Job> jobs;
  for (auto k : cases)
    for (double t : ts) {
      QuadratureParams p;
      p.kase = k;
      p.delta = a.delta;
      p.kappa = a.kappa;
      p.sigma = a.sigma;
      p.m = a.m;
      p.t = t;
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      jobs.push_back({p});
    }
  std::vector<std::vector<Cell>> rows(jobs.size());
  std::vector<double> diffs(jobs.size());
  parallel_for(jobs.size(), c.jobs, [&](std::size_t i) {
    const auto& p = jobs[i].p;
    const double an = quadrature_overlap_analytic(p);
    const auto num = quadrature_overlap_numeric(p, go);
    diffs[i] = std::abs(an - num.value);
    rows[i] = {std::string(to_string(p.kase)), p.t, an, num.value, num.error_estimate, diffs[i],
               "points=" + std::to_string(go.points)};
  });
  Table t{{"case", "t", "V_analytic", "V_numeric", "error_estimate", "abs_diff", "grid"}, std::move(rows)};
  const double worst = diffs.empty() ? 0.0 : *std::max_element(diffs.begin(), diffs.end());
  OrderedJson meta{{"delta", a.delta}, {"kappa", a.kappa}, {"sigma", a.sigma}, {"m", a.m},
                   {"max_abs_diff", worst}};
  emit_table(c, out, t, meta);
  err << "overlap quadrature: max |analytic - numeric| = " << fmt(worst) << '\n';
  return kOk;
}

LatticeOptions lattice_options(const Common& c) {
  LatticeOptions o;
  if (c.grid > 0) o.step = c.grid;
  o.dim = c.dim;
  return o;
}

std::string lattice_tag(const Json& disc, double step) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "step=" << step;
  if (disc.contains("dim")) os << ";dim=" << disc["dim"].get<std::size_t>();
  return os.str();
}

int cmd_overlap_coherent(const OverlapArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  const auto gammas = parse_range(a.gamma.empty() ? "0,1" : a.gamma);
  const LatticeOptions lo = lattice_options(c);
  Table t;
  if (a.delta_sq.empty()) {
    t.header = {"gamma", "V", "error_estimate", "grid"};
    t.rows.resize(gammas.size());
    parallel_for(gammas.size(), c.jobs, [&](std::size_t i) {
      const auto r = coherent_delta_overlap(gammas[i], lo);
      t.rows[i] = {gammas[i], r.value, r.error_estimate, lattice_tag(r.discretization, lo.step)};
    });
  } else {
    const auto ds = parse_range(a.delta_sq);
    for (double d : ds)
      if (!(d > 0.0)) throw UsageError("--delta-sq values must be positive");
    XGridOptions xo;
    xo.step = lo.step;
    t.header = {"delta_sq", "gamma", "V", "error_estimate", "grid"};
    t.rows.resize(ds.size() * gammas.size());
    parallel_for(t.rows.size(), c.jobs, [&](std::size_t i) {
      const double d = ds[i / gammas.size()];
      const double g = gammas[i % gammas.size()];
      const auto r = coherent_x_overlap(d, g, xo);
      std::ostringstream tag;
      tag.imbue(std::locale::classic());
      tag << "step=" << xo.step << ";h=" << r.discretization["position_spacing"].get<double>();
      t.rows[i] = {d, g, r.value, r.error_estimate, tag.str()};
    });
  }
  emit_table(c, out, t, {{"family", "coherent"}});
  return kOk;
}

int cmd_overlap_ring(const OverlapArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  const auto ds = parse_range(a.d);
  for (double d : ds)
    if (!(d > 0.0)) throw UsageError("--d values must be positive");
  if (a.gamma_mode != "border" && a.gamma_mode != "center" && a.gamma_mode != "fixed")
    throw UsageError("--gamma-mode must be border, center or fixed");
  double fixed = 0.0;
  if (a.gamma_mode == "fixed") {
    if (a.gamma.empty()) throw UsageError("--gamma-mode fixed needs --gamma");
    fixed = parse_number(a.gamma);
  }
  const LatticeOptions lo = lattice_options(c);
  Table t{{"d", "gamma", "V", "error_estimate", "grid"}, {}};
  t.rows.resize(ds.size());
  parallel_for(ds.size(), c.jobs, [&](std::size_t i) {
    const double d = ds[i];
    const double g = a.gamma_mode == "border" ? d : a.gamma_mode == "center" ? 1.5 * d : fixed;
    const auto r = ring_overlap(d, g, lo);
    t.rows[i] = {d, g, r.value, r.error_estimate, lattice_tag(r.discretization, lo.step)};
  });
  emit_table(c, out, t, {{"family", "rings"}, {"gamma_mode", a.gamma_mode}});
  return kOk;
}

int cmd_overlap_fock(const OverlapArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  std::vector<BorderFunction> gs;
  for (const auto& s : a.g.empty() ? std::vector<std::string>{"m"} : a.g) {
    try {
      gs.push_back(BorderFunction::parse(s));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto gammas = parse_range(a.gamma.empty() ? "0:6:0.1" : a.gamma);
  const LatticeOptions lo = lattice_options(c);
  Table t{{"g", "gamma", "V", "error_estimate", "grid"}, {}};
  t.rows.resize(gs.size() * gammas.size());
  parallel_for(t.rows.size(), c.jobs, [&](std::size_t i) {
    const auto& g = gs[i / gammas.size()];
    const double gamma = gammas[i % gammas.size()];
    const auto r = fock_overlap(g, gamma, lo);
    t.rows[i] = {g.to_string(), gamma, r.value, r.error_estimate, lattice_tag(r.discretization, lo.step)};
  });
  emit_table(c, out, t, {{"family", "fock_bins"}});
  return kOk;
}

double default_tol() {
  if (const char* env = std::getenv("MACROREAL_DEFAULT_TOL")) {
    try {
      const double v = parse_number(env);
      if (v > 0.0) return v;
    } catch (const UsageError&) {
    }
    throw UsageError(std::string("MACROREAL_DEFAULT_TOL is not a positive number: '") + env + "'");
  }
  return kExactThreshold;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential-measurement laboratory: macrorealism conditions and invasiveness overlaps", "macroreal"};
  app.require_subcommand(1);
  Common common;
  try {
    common.tol = default_tol();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  MzScanArgs mz;
  auto* scan = app.add_subcommand("mz-scan", "Verify the Mach-Zehnder condition table on a parameter lattice");
  add_common(scan, common);
  scan->add_option("--state", mz.state, "mix, sup or both")->check(CLI::IsMember({"mix", "sup", "both"}));
  scan->add_option("--q", mz.q, "Populations of mixed states (range)");
  scan->add_option("--c", mz.c, "Coherences of sup states, e.g. 0.3i");
  scan->add_option("--q-sup", mz.q_sup, "Population of sup states");
  scan->add_option("--r1", mz.r1, "First reflectivity range");
  scan->add_option("--r2", mz.r2, "Second reflectivity range");
  scan->add_option("--phi-count", mz.phi_count, "Phases 2 pi k / n, k < n");
  scan->add_option("--convention", mz.convention, "default, auto, or a convention name");

  MzScenarioArgs mzs;
  auto* msc = app.add_subcommand("mz-scenario", "Write a Mach-Zehnder scenario file");
  add_common(msc, common);
  msc->add_option("--r1", mzs.r1);
  msc->add_option("--r2", mzs.r2);
  msc->add_option("--phi", mzs.phi);
  msc->add_option("--q", mzs.q);
  msc->add_option("--state", mzs.state)->check(CLI::IsMember({"mix", "sup"}));
  msc->add_option("--c", mzs.c);

  std::string scenario_path;
  auto* nsit = app.add_subcommand("nsit-check", "Evaluate all conditions on a scenario file");
  add_common(nsit, common);
  nsit->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  std::size_t sweep_count = 10000;
  auto* sweep = app.add_subcommand("mr-sweep", "Randomized qubit/qutrit sweep of the sufficiency relations");
  add_common(sweep, common);
  sweep->add_option("--count", sweep_count, "Number of scenarios");

  OverlapArgs ov;
  auto* overlap = app.add_subcommand("overlap", "Invasiveness overlaps (plot data)");
  overlap->require_subcommand(1);
  auto* quad = overlap->add_subcommand("quadrature", "Gaussian wave packet, quadrature measurements");
  add_common(quad, common);
  quad->add_option("--case", ov.kase, "XX, PX, XP, PP or all");
  quad->add_option("--delta", ov.delta);
  quad->add_option("--kappa", ov.kappa);
  quad->add_option("--sigma", ov.sigma);
  quad->add_option("--m", ov.m);
  quad->add_option("--t", ov.t, "Time range");
  auto* coh = overlap->add_subcommand("coherent", "Coherent-state projectors, or X measurements with --delta-sq");
  add_common(coh, common);
  coh->add_option("--gamma", ov.gamma, "Coherent amplitudes (real range)");
  coh->add_option("--delta-sq", ov.delta_sq, "X unsharpness values delta^2");
  auto* ring = overlap->add_subcommand("ring", "Ring coarse-graining of coherent projectors");
  add_common(ring, common);
  ring->add_option("--d", ov.d, "Ring widths (range)");
  ring->add_option("--gamma-mode", ov.gamma_mode, "border (gamma = d), center (3d/2) or fixed");
  ring->add_option("--gamma", ov.gamma, "Amplitude for --gamma-mode fixed");
  auto* fock = overlap->add_subcommand("fock", "Fock-bin coarse-graining");
  add_common(fock, common);
  fock->add_option("--g", ov.g, "Border functions such as 2m^2 (repeatable)");
  fock->add_option("--gamma", ov.gamma, "Coherent amplitudes (real range)");

  // CLI11 reports a stray word after `overlap` as a missing subcommand; name it instead.
  if (args.size() > 2 && args[1] == "overlap" && !args[2].starts_with("-") && 
      overlap->get_subcommands([&](CLI::App* a) { return a->check_name(args[2]); }).empty()) {
    err << "error: unknown overlap family '" << args[2] << "' (quadrature, coherent, ring or fock)\n";
    return kUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsage;
  }

  if (common.format.empty()) common.format = (*msc || *nsit || *sweep) ? "json" : "csv";
  try {
    if (*scan) return cmd_mz_scan(mz, common, out, err);
    if (*msc) return cmd_mz_scenario(mzs, common, out);
    if (*nsit) return cmd_nsit_check(scenario_path, common, out, err);
    if (*sweep) return cmd_mr_sweep(sweep_count, common, out, err);
    if (*quad) return cmd_overlap_quadrature(ov, common, out, err);
    if (*coh) return cmd_overlap_coherent(ov, common, out, err);
    if (*ring) return cmd_overlap_ring(ov, common, out, err);
    if (*fock) return cmd_overlap_fock(ov, common, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace macroreal::cli
