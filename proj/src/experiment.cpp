#include "carlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "carlab/errors.hpp"
#include "carlab/partition.hpp"
#include "carlab/quadrature.hpp"
#include "carlab/transport.hpp"
#include "carlab/verify.hpp"
#include "carlab/weight.hpp"

namespace carlab {

namespace {

using nlohmann::json;

constexpr double kSqrt2Inv = 0.70710678118654752440;

void reject_unknown(const json& block, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : block.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end())
      throw ParseError("unknown key '" + prefix + "." + item.key() + "'");
  }
}

Vec read_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(what + " must be a two-entry array");
  return Vec(j[0].get<double>(), j[1].get<double>());
}

Domain parse_domain(const json& block) {
  reject_unknown(block, "domain",
                 {"kind", "center", "radius", "a", "b", "lo", "hi", "vertices"});
  const std::string kind = block.at("kind").get<std::string>();
  if (kind == "disk") {
    const Vec c = block.contains("center") ? read_vec(block["center"], "domain.center")
                                           : Vec(Vec::Zero());
    return Domain::disk(c, block.at("radius").get<double>());
  }
  if (kind == "interval")
    return Domain::interval(block.at("a").get<double>(), block.at("b").get<double>());
  if (kind == "box")
    return Domain::axis_box(read_vec(block.at("lo"), "domain.lo"),
                            read_vec(block.at("hi"), "domain.hi"));
  if (kind == "polygon") {
    std::vector<Vec> verts;
    for (const auto& v : block.at("vertices")) verts.push_back(read_vec(v, "domain.vertices"));
    return Domain::convex_polygon(verts);
  }
  throw ValidationError("domain.kind must be one of disk, interval, box, polygon");
}

VelocityField parse_field(const json& block, const std::string& base_dir) {
  reject_unknown(block, "field",
                 {"kind", "vector", "radius", "rate", "phase", "horizon", "table",
                  "base", "harmonics"});
  const std::string kind = block.at("kind").get<std::string>();
  if (kind == "constant")
    return VelocityField::constant(read_vec(block.at("vector"), "field.vector"),
                                   block.at("horizon").get<double>());
  if (kind == "rotation")
    return VelocityField::rotation(block.at("radius").get<double>(),
                                   block.at("rate").get<double>(),
                                   block.value("phase", 0.0),
                                   block.at("horizon").get<double>());
  if (kind == "composite") {
    std::vector<Harmonic> hs;
    for (const auto& h : block.at("harmonics")) {
      if (!h.is_array() || h.size() != 3)
        throw ParseError("field.harmonics entries must be [amplitude, rate, phase]");
      hs.push_back({h[0].get<double>(), h[1].get<double>(), h[2].get<double>()});
    }
    const Vec base = block.contains("base") ? read_vec(block["base"], "field.base")
                                            : Vec(Vec::Zero());
    return VelocityField::composite(base, hs, block.at("horizon").get<double>());
  }
  if (kind == "tabulated") {
    std::filesystem::path p = block.at("table").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p);
    if (!in) throw ParseError("field.table: cannot open '" + p.string() + "'");
    std::vector<double> ts;
    std::vector<Vec> vs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (cells.size() != 3) throw ParseError("field.table: rows must be t,h1,h2");
      try {
        ts.push_back(std::stod(cells[0]));
        vs.emplace_back(std::stod(cells[1]), std::stod(cells[2]));
      } catch (const std::exception&) {
        if (ts.empty() && vs.empty()) continue;  // header row
        throw ParseError("field.table: non-numeric row '" + line + "'");
      }
    }
    Eigen::VectorXd times(static_cast<Eigen::Index>(ts.size()));
    Eigen::Matrix2Xd values(2, static_cast<Eigen::Index>(ts.size()));
    for (size_t i = 0; i < ts.size(); ++i) {
      times[static_cast<Eigen::Index>(i)] = ts[i];
      values.col(static_cast<Eigen::Index>(i)) = vs[i];
    }
    return VelocityField::tabulated(times, values);
  }
  throw ValidationError(
      "field.kind must be one of constant, rotation, tabulated, composite");
}

int env_thread_cap() {
  const char* v = std::getenv("CARLEMAN_LAB_THREADS");
  if (!v) return 0;
  const int n = std::atoi(v);
  return n > 0 ? n : 0;
}

// index-sharded parallel map; results land in caller-owned slots so the
// output is identical for any worker count
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const int cap = env_thread_cap(); cap > 0)
    workers = std::min<std::size_t>(workers, static_cast<std::size_t>(cap));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header)
      : path_(path.string()), out_(path) {
    if (!out_) throw ValidationError("cannot open output file '" + path_ + "'");
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string fmt(double v) { return format_g17(v); }

Eigen::VectorXd uniform_times(double T, int slices) {
  return Eigen::VectorXd::LinSpaced(std::max(slices, 2), 0.0, T);
}

SpaceFn fixture_profile(const ExperimentConfig& cfg) {
  const Domain& dom = *cfg.domain;
  const Vec center = cfg.profile_center ? *cfg.profile_center : dom.centroid();
  const double width =
      cfg.profile_width > 0.0 ? cfg.profile_width : 0.3 * dom.diameter();
  if (cfg.fixture == "gaussian") return gaussian_profile(center, width);
  if (cfg.fixture == "bump") return smooth_bump(center, width);
  if (cfg.fixture == "trig")
    return trig_product(2.0 / dom.diameter(), 3.0 / dom.diameter());
  if (cfg.fixture == "linear") return linear_profile(Vec(1.0, 0.5), 1.0);
  if (cfg.fixture == "zero") return [](const Vec&) { return 0.0; };
  throw ValidationError(
      "solve.fixture must be one of gaussian, bump, trig, linear, zero");
}

ConePartition build_partition(const ExperimentConfig& cfg) {
  if (cfg.partition_mode == "uniform")
    return uniform_partition(*cfg.field, cfg.sstar, cfg.cert_samples);
  if (cfg.partition_mode == "greedy")
    return greedy_partition(*cfg.field, cfg.sstar, cfg.scan_samples,
                            cfg.greedy_margin, cfg.cert_samples);
  throw ValidationError("partition.mode must be uniform or greedy");
}

void require_blocks(const ExperimentConfig& cfg, bool need_domain, bool need_field,
                    const std::string& sub) {
  if (need_domain && !cfg.domain)
    throw ValidationError("subcommand '" + sub + "' needs a domain block");
  if (need_field && !cfg.field)
    throw ValidationError("subcommand '" + sub + "' needs a field block");
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ExperimentConfig::resolved_r() const {
  if (slack_r > 0.0) return slack_r;
  if (!domain) throw ValidationError("slack default needs a domain block");
  return domain->diameter();
}

double ExperimentConfig::resolved_h() const {
  if (grid_h > 0.0) return grid_h;
  if (!domain) throw ValidationError("grid default needs a domain block");
  return 0.02 * domain->diameter();
}

double ExperimentConfig::resolved_boundary_h() const {
  return boundary_h > 0.0 ? boundary_h : resolved_h();
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config: top level must be an object");
  reject_unknown(root, "config",
                 {"domain", "field", "partition", "weight", "solve", "verify",
                  "counterexample", "output"});

  ExperimentConfig cfg;
  if (root.contains("domain")) cfg.domain = parse_domain(root["domain"]);
  if (root.contains("field")) cfg.field = parse_field(root["field"], base_dir);

  if (root.contains("partition")) {
    const json& b = root["partition"];
    reject_unknown(b, "partition", {"mode", "sstar", "samples", "margin", "scan_samples"});
    cfg.partition_mode = b.value("mode", cfg.partition_mode);
    cfg.sstar = b.value("sstar", cfg.sstar);
    cfg.cert_samples = b.value("samples", cfg.cert_samples);
    cfg.greedy_margin = b.value("margin", cfg.greedy_margin);
    cfg.scan_samples = b.value("scan_samples", cfg.scan_samples);
  }
  if (root.contains("weight")) {
    const json& b = root["weight"];
    reject_unknown(b, "weight", {"r", "sstar"});
    if (b.contains("r")) cfg.slack_r = b["r"].get<double>();
    if (b.contains("sstar")) {
      const double ws = b["sstar"].get<double>();
      if (root.contains("partition") && root["partition"].contains("sstar") &&
          std::abs(ws - cfg.sstar) > 1e-15)
        throw ValidationError("weight.sstar and partition.sstar disagree");
      cfg.sstar = ws;
    }
  }
  if (root.contains("solve")) {
    const json& b = root["solve"];
    reject_unknown(b, "solve",
                   {"fixture", "h", "boundary_h", "time_slices", "center", "width"});
    cfg.fixture = b.value("fixture", cfg.fixture);
    cfg.grid_h = b.value("h", cfg.grid_h);
    cfg.boundary_h = b.value("boundary_h", cfg.boundary_h);
    cfg.time_slices = b.value("time_slices", cfg.time_slices);
    if (b.contains("center")) cfg.profile_center = read_vec(b["center"], "solve.center");
    cfg.profile_width = b.value("width", cfg.profile_width);
  }
  if (root.contains("verify")) {
    const json& b = root["verify"];
    reject_unknown(b, "verify",
                   {"s_count", "c0", "family", "time_subdivisions", "T"});
    cfg.s_count = b.value("s_count", cfg.s_count);
    cfg.c0 = b.value("c0", cfg.c0);
    cfg.family = b.value("family", cfg.family);
    cfg.time_subdivisions = b.value("time_subdivisions", cfg.time_subdivisions);
    if (b.contains("T")) {
      if (!cfg.field) throw ValidationError("verify.T given without a field block");
      if (std::abs(b["T"].get<double>() - cfg.field->horizon()) >
          1e-9 * std::max(1.0, cfg.field->horizon()))
        throw ValidationError("verify.T and field.horizon disagree");
    }
  }
  if (root.contains("counterexample")) {
    const json& b = root["counterexample"];
    reject_unknown(b, "counterexample", {"sigma", "rho"});
    cfg.sigma = b.value("sigma", cfg.sigma);
    cfg.rho = b.value("rho", cfg.rho);
  }
  if (root.contains("output")) {
    const json& b = root["output"];
    reject_unknown(b, "output", {"dir"});
    cfg.out_dir = b.value("dir", cfg.out_dir);
  }

  if (!(cfg.sstar > kSqrt2Inv && cfg.sstar < 1.0))
    throw ValidationError("aperture must exceed 1/sqrt(2) (about 0.7071) and stay below 1");
  if (cfg.grid_h < 0.0) throw ValidationError("solve.h must be positive");
  if (cfg.time_slices < 2) throw ValidationError("solve.time_slices must be >= 2");
  if (cfg.field && !(cfg.field->horizon() > 0.0))
    throw ValidationError("field horizon must be positive");
  if (cfg.s_count < 2) throw ValidationError("verify.s_count must be >= 2");
  if (cfg.family < 1) throw ValidationError("verify.family must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

RunArtifact run_experiment(const ExperimentConfig& config,
                           const std::string& subcommand,
                           unsigned long long seed, bool require_observability,
                           const std::string& out_override) {
  RunArtifact art;
  const std::filesystem::path out_dir =
      out_override.empty() ? config.out_dir : out_override;
  std::filesystem::create_directories(out_dir);

  const auto add_check = [&](const std::string& name, bool hard, bool pass,
                             double value, const std::string& note = "") {
    art.checks.push_back({name, hard, pass, value, note});
  };

  if (subcommand == "partition") {
    require_blocks(config, false, true, subcommand);
    const ConePartition p = build_partition(config);
    CsvWriter csv(out_dir / "partition.csv", "j,t_start,t_end,axis_x,axis_y");
    for (Eigen::Index j = 0; j < p.intervals(); ++j)
      csv.row({std::to_string(j), fmt(p.times[j]), fmt(p.times[j + 1]),
               fmt(p.axes(0, j)), fmt(p.axes(1, j))});
    art.csv_paths.push_back(csv.path());
    add_check("cone condition margin", true, p.certificate.margin >= 0.0,
              p.certificate.margin,
              "worst time " + fmt(p.certificate.worst_time) + ", sampling gap " +
                  fmt(p.certificate.sampling_gap));
  } else if (subcommand == "weight") {
    require_blocks(config, true, true, subcommand);
    const ConePartition p = build_partition(config);
    const CarlemanWeight w =
        build_weight(*config.domain, *config.field, p, config.resolved_r());
    CsvWriter csv(out_dir / "weight.csv",
                  "j,t_j,eta_x,eta_y,radius,apex_x,apex_y,mu,upper");
    for (Eigen::Index j = 0; j < w.intervals(); ++j)
      csv.row({std::to_string(j), fmt(p.times[j]), fmt(p.axes(0, j)),
               fmt(p.axes(1, j)), fmt(w.radii[j]), fmt(w.apexes(0, j)),
               fmt(w.apexes(1, j)), fmt(w.mu[j]), fmt(w.upper[j])});
    art.csv_paths.push_back(csv.path());

    const ObservabilityCondition oc = observability_condition(w, *config.field);
    const double tstar = w.upper[0] * w.upper[0] / (w.mu[0] * w.h0 * w.cstar);
    CsvWriter scal(out_dir / "weight_scalars.csv", "name,value");
    scal.row({"beta", fmt(w.beta)});
    scal.row({"cstar", fmt(w.cstar)});
    scal.row({"h0", fmt(w.h0)});
    scal.row({"slack_r", fmt(w.slack_r)});
    scal.row({"sstar", fmt(p.sstar)});
    scal.row({"first_interval_time_threshold", fmt(tstar)});
    scal.row({"time_condition_threshold", fmt(oc.threshold)});
    art.csv_paths.push_back(scal.path());

    const QuadratureGrid grid = config.domain->interior_grid(config.resolved_h());
    const double apex_margin = check_apex_cone(w, *config.domain, grid);
    const SeparationReport sep = check_separation(w);
    const double pphi_margin =
        check_pphi_lower_bound(w, *config.field, grid, 200);
    add_check("apex cone margin", true, apex_margin >= 0.0, apex_margin);
    add_check("separation gaps", true, sep.ok,
              sep.gaps.size() > 0 ? sep.gaps.minCoeff() : 0.0,
              sep.gaps.size() == 0 ? "single interval" : "");
    add_check("distance extremes at end intervals", true, sep.extremes_at_ends,
              0.0);
    add_check("drift lower bound margin", true, pphi_margin >= 0.0, pphi_margin);
    add_check("time condition", require_observability, oc.holds,
              oc.q.maxCoeff(), "threshold " + fmt(oc.threshold));
  } else if (subcommand == "solve") {
    require_blocks(config, true, true, subcommand);
    const QuadratureGrid grid = config.domain->interior_grid(config.resolved_h());
    const BoundaryGrid boundary =
        config.domain->boundary_grid(config.resolved_boundary_h());
    const Eigen::VectorXd times =
        uniform_times(config.field->horizon(), config.time_slices);
    const SpaceFn profile = fixture_profile(config);
    VelocityField f = *config.field;
    const SpaceTimeFn g = [profile, f](const Vec& x, double t) {
      return profile(x - f.displacement(t));
    };
    const SolutionField sol = solve_characteristics(
        *config.domain, *config.field, profile, g, grid, boundary, times);

    CsvWriter slices(out_dir / "slices.csv", "t,x,y,u");
    for (Eigen::Index k = 0; k < times.size(); ++k)
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        slices.row({fmt(times[k]), fmt(grid.nodes(0, i)), fmt(grid.nodes(1, i)),
                    fmt(sol.interior_values(i, k))});
    art.csv_paths.push_back(slices.path());

    const TraceField trace = boundary_trace(sol);
    CsvWriter tr(out_dir / "trace.csv", "node,t,x,y,g,flow_normal_dot,exit");
    for (Eigen::Index k = 0; k < times.size(); ++k)
      for (Eigen::Index b = 0; b < boundary.size(); ++b)
        tr.row({std::to_string(b), fmt(times[k]), fmt(boundary.nodes(0, b)),
                fmt(boundary.nodes(1, b)), fmt(trace.values(b, k)),
                fmt(trace.flow_normal_dot(b, k)),
                trace.exit_mask(b, k) ? "1" : "0"});
    art.csv_paths.push_back(tr.path());

    add_check("inflow data compatibility", false,
              sol.compatibility_gap <= 1e-9, sol.compatibility_gap);
  } else if (subcommand == "verify-carleman" ||
             subcommand == "verify-observability") {
    require_blocks(config, true, true, subcommand);
    const QuadratureGrid grid = config.domain->interior_grid(config.resolved_h());
    const BoundaryGrid boundary =
        config.domain->boundary_grid(config.resolved_boundary_h());
    const Eigen::VectorXd times =
        uniform_times(config.field->horizon(), config.time_slices);
    const ConePartition p = build_partition(config);
    const CarlemanWeight w =
        build_weight(*config.domain, *config.field, p, config.resolved_r());

    if (subcommand == "verify-carleman") {
      const std::vector<SolutionField> family =
          manufactured_family(*config.domain, *config.field, grid, boundary,
                              times, config.family, seed, false);
      const std::vector<double> s_grid =
          default_s_grid(w, *config.field, grid, config.s_count);
      std::vector<CarlemanReport> reports(family.size());
      parallel_for_index(family.size(), [&](std::size_t i) {
        reports[i] = carleman_report(family[i], w, s_grid, config.c0,
                                     config.time_subdivisions);
      });
      CsvWriter csv(out_dir / "carleman.csv",
                    "solution,s,bulk_scaled,slice_sum,residual_scaled,exit_term,"
                    "final_term,c_min,phi_max");
      for (size_t i = 0; i < reports.size(); ++i) {
        const CarlemanReport& r = reports[i];
        for (size_t k = 0; k < r.s_values.size(); ++k)
          csv.row({std::to_string(i), fmt(r.s_values[k]),
                   fmt(r.bulk_scaled[static_cast<Eigen::Index>(k)]), fmt(r.slices),
                   fmt(r.residual_scaled[static_cast<Eigen::Index>(k)]),
                   fmt(r.sigma_term), fmt(r.final_term),
                   fmt(r.c_of_s[static_cast<Eigen::Index>(k)]), fmt(r.phi_max)});
      }
      art.csv_paths.push_back(csv.path());

      const size_t half = (family.size() + 1) / 2;
      const std::vector<CarlemanReport> fit(reports.begin(),
                                            reports.begin() + static_cast<long>(half));
      const std::vector<CarlemanReport> holdout(
          reports.begin() + static_cast<long>(half), reports.end());
      bool finite = true;
      for (const auto& r : reports)
        if (!r.c_of_s.allFinite()) finite = false;
      add_check("minimal constants finite", true, finite, 0.0);
      if (!holdout.empty()) {
        const FitResult res = fit_constants(fit, holdout);
        add_check("estimate closes on holdout", true, res.valid_on_holdout,
                  res.c_uniform);
      }
    } else {
      const std::vector<SolutionField> family =
          manufactured_family(*config.domain, *config.field, grid, boundary,
                              times, config.family, seed, true);
      const ObservabilityReport rep = observability_ratio(family, w, *config.field);
      CsvWriter csv(out_dir / "observability.csv",
                    "solution,ratio,peak_norm,trace_norm");
      for (Eigen::Index i = 0; i < rep.ratios.size(); ++i)
        csv.row({std::to_string(i), fmt(rep.ratios[i]), fmt(rep.peak_norms[i]),
                 fmt(rep.trace_norms[i])});
      art.csv_paths.push_back(csv.path());
      add_check("time condition", require_observability, rep.certificate.holds,
                rep.certificate.q.size() > 0 ? rep.certificate.q.maxCoeff() : 0.0,
                "threshold " + fmt(rep.certificate.threshold) + ", verdict: " +
                    rep.verdict);
      add_check("ratios finite", false, rep.ratios.allFinite(), rep.family_sup,
                "family sup");
    }
  } else if (subcommand == "counterexample") {
    const CounterexampleScenario sc =
        rotating_bump_counterexample(config.sigma, config.rho);
    const QuadratureGrid grid = sc.domain.interior_grid(
        config.grid_h > 0.0 ? config.grid_h : 0.02 * sc.domain.diameter());
    const BoundaryGrid boundary = sc.domain.boundary_grid(
        config.boundary_h > 0.0 ? config.boundary_h
                                : (config.grid_h > 0.0 ? config.grid_h
                                                       : 0.02 * sc.domain.diameter()));
    const Eigen::VectorXd times = uniform_times(sc.horizon, config.time_slices);
    const SolutionField sol = solve_characteristics(sc.domain, sc.field, sc.u0,
                                                    sc.g, grid, boundary, times);
    const EnergyProfile prof = energy_profile(sol);

    CsvWriter csv(out_dir / "counterexample.csv", "t,energy,boundary_flux");
    for (Eigen::Index k = 0; k < times.size(); ++k)
      csv.row({fmt(times[k]), fmt(prof.energy[k]), fmt(prof.flux[k])});
    art.csv_paths.push_back(csv.path());

    const double u0_norm = std::sqrt(prof.energy[0]);
    const double trace_norm = std::sqrt(prof.g_norm2);
    const double energy_dev =
        (prof.energy.array() - prof.energy[0]).abs().maxCoeff();
    const auto b = sc.field.bounds();
    add_check("boundary trace vanishes", true,
              trace_norm <= 1e-12 * u0_norm, trace_norm);
    add_check("interior energy constant", true,
              energy_dev <= std::max(prof.tau_q, 1e-12), energy_dev,
              "tolerance " + fmt(prof.tau_q));
    add_check("field speed equals orbit speed", true,
              std::abs(b.h0 - config.rho) <= 1e-9 &&
                  std::abs(b.hstar - config.rho) <= 1e-9,
              b.hstar);
    add_check("verdict", false, true, 0.0, "observability fails");
  } else {
    throw ValidationError("unknown subcommand '" + subcommand + "'");
  }

  CsvWriter summary(out_dir / "summary.csv", "check,hard,pass,value,note");
  for (const CheckRecord& c : art.checks)
    summary.row({c.name, c.hard ? "1" : "0", c.pass ? "1" : "0", fmt(c.value),
                 c.note});
  art.csv_paths.push_back(summary.path());

  art.exit_code = 0;
  for (const CheckRecord& c : art.checks)
    if (c.hard && !c.pass) art.exit_code = 1;
  return art;
}

}  // namespace carlab
