// capgeo command-line front end.
//
// Exit status: 0 success, 1 an asserted inequality failed, 2 bad input,
// 3 numerical failure.
#include "capgeo/capgeo.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace capgeo;
using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

const std::vector<std::string> kCorpus = {
    "ball:r=0.5",      "ball:r=1",        "ball:r=2",
    "ellipsoid:1,1,2", "ellipsoid:1,1,1.5", "ellipsoid:1.5,1.5,1",
    "superellipsoid:1,1,1;e=4", "roundedbox:1,1,1;r=0.3"};

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad p value '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() != 3) throw ParseError("p range must be start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || b < a) throw ParseError("p range needs start <= stop and step > 0");
    const long count = std::lround(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(round12(a + k * step));
  } else {
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ',');)
      if (!s.empty()) out.push_back(num(s));
  }
  if (out.empty()) throw ParseError("empty p list");
  return out;
}

void check_solver_p_list(int n, const std::vector<double>& ps) {
  for (const double p : ps)
    if (!(p >= 1.05 - 1e-12 && p <= n - 0.05 + 1e-12))
      throw InvalidArgument("p = " + format_number(p) + " outside [1.05, n - 0.05]");
}

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CAPGEO_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw ParseError("CAPGEO_THREADS must be a positive integer");
    }
  }
  return hw;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  try {
    json j;
    in >> j;
    if (!j.is_object()) throw ParseError("config file must hold a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
}

std::string p_list_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + format_number(x.get<double>());
    return s;
  }
  throw ParseError("p lists must be numbers, arrays or strings");
}

/// Options shared by the solver-backed subcommands; config-file keys override flags.
struct Options {
  std::string config_path;
  std::string body;
  std::vector<std::string> bodies;
  std::string p_text = "2";
  double q = 2.0;
  std::string format = "json";
  std::string out;
  std::string out_dir = "sweep_out";
  std::string export_field;
  int mesh_resolution = 192;
  bool no_riesz = false;
  bool no_flow = false;
  bool no_richardson = false;
  double dt = 1e-3;
  double T = 1.0;
  int samples = 0;
  SolverConfig solver;

  void apply_config() {
    if (config_path.empty()) return;
    const json j = read_config_file(config_path);
    try {
      if (j.contains("body")) body = j.at("body").get<std::string>();
      if (j.contains("bodies")) bodies = j.at("bodies").get<std::vector<std::string>>();
      if (j.contains("p")) p_text = p_list_text(j.at("p"));
      if (j.contains("p_list")) p_text = p_list_text(j.at("p_list"));
      if (j.contains("q")) q = j.at("q").get<double>();
      if (j.contains("format")) format = j.at("format").get<std::string>();
      if (j.contains("out")) out = j.at("out").get<std::string>();
      if (j.contains("out_dir")) out_dir = j.at("out_dir").get<std::string>();
      if (j.contains("mesh_resolution")) mesh_resolution = j.at("mesh_resolution").get<int>();
      if (j.contains("riesz")) no_riesz = !j.at("riesz").get<bool>();
      if (j.contains("flow")) no_flow = !j.at("flow").get<bool>();
      if (j.contains("dt")) dt = j.at("dt").get<double>();
      if (j.contains("T")) T = j.at("T").get<double>();
      if (j.contains("samples")) samples = j.at("samples").get<int>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("config file: ") + e.what());
    }
    apply_solver_json(j.contains("solver") ? j.at("solver") : j, solver);
  }

  json solver_json() const { return to_json(solver); }
};

void add_solver_flags(CLI::App* app, Options& o) {
  app->add_option("--grid", o.solver.grid, "Cells per axis of the finest grid (multiple of 4)");
  app->add_option("--box-radius", o.solver.box_radius, "Outer Dirichlet radius R (0: 5 circumradii)");
  app->add_option("--box-factor", o.solver.box_factor, "R as a multiple of the circumradius when --box-radius is 0");
  app->add_option("--tol", o.solver.tol, "Relative energy change stopping tolerance");
  app->add_option("--max-iter", o.solver.max_iter, "Iteration limit per grid");
  app->add_flag("--no-richardson", o.no_richardson, "Solve on the finest grid only");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw InvalidArgument("cannot write " + path);
  return file;
}

void write_csv_metadata(std::ostream& out, const json& meta) {
  out << "# tool " << meta.at("tool").get<std::string>() << ' ' << meta.at("version").get<std::string>() << '\n';
  out << "# command " << meta.at("command").get<std::string>() << '\n';
  out << "# config_hash " << meta.at("config_hash").get<std::string>() << '\n';
  out << "# date " << meta.at("date").get<std::string>() << '\n';
}

std::string file_stem(const std::string& descriptor) {
  std::string s;
  for (const char c : descriptor) s += std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_';
  return s;
}

HarnessConfig harness_config(const Options& o) {
  HarnessConfig h;
  h.solver = o.solver;
  h.mesh_resolution = o.mesh_resolution;
  h.q = o.q;
  h.riesz = !o.no_riesz;
  h.flow = !o.no_flow;
  return h;
}

json harness_config_json(const Options& o, const std::vector<std::string>& bodies, const std::vector<double>& ps) {
  return {{"bodies", bodies}, {"p", ps}, {"q", o.q}, {"mesh_resolution", o.mesh_resolution}, {"riesz", !o.no_riesz},
          {"flow", !o.no_flow}, {"solver", o.solver_json()}};
}

int run_constants(const Options& o) {
  const json meta = run_metadata("constants", json::object());
  std::ofstream file;
  std::ostream& out = open_output(o.out, file);
  out << round_json({{"metadata", meta}, {"constants", to_json(polya_szego_constants())}}).dump(2) << '\n';
  return 0;
}

int run_capacity(const Options& o) {
  const Body body = parse_body(o.body);
  const auto ps = parse_p_list(o.p_text);
  if (ps.size() != 1) throw InvalidArgument("capacity takes a single --p");
  check_solver_p_list(body.dim(), ps);
  const json config = {{"body", body.descriptor()}, {"p", ps[0]}, {"solver", o.solver_json()}};
  const CapacitySolve solve = solve_p_capacity_with_field(body, ps[0], o.solver, !o.export_field.empty());
  if (!o.export_field.empty()) {
    std::filesystem::create_directories(o.export_field);
    export_field(*solve.field, o.export_field, file_stem(body.descriptor()) + "_p" + format_number(ps[0]));
  }
  std::ofstream file;
  std::ostream& out = open_output(o.out, file);
  out << round_json({{"metadata", run_metadata("capacity", config)}, {"estimate", to_json(solve.estimate)}}).dump(2) << '\n';
  return 0;
}

int run_verify(const Options& o) {
  const Body body = parse_body(o.body);
  const auto ps = parse_p_list(o.p_text);
  check_solver_p_list(body.dim(), ps);
  const json config = harness_config_json(o, {body.descriptor()}, ps);
  const Ingredients ing = gather_ingredients(body, ps, harness_config(o));
  const auto reports = evaluate_all(ing, ps, o.q);
  const bool ok = all_asserted_pass(reports);
  const json meta = run_metadata("verify", config);
  std::ofstream file;
  std::ostream& out = open_output(o.out, file);
  if (o.format == "csv") {
    write_csv_metadata(out, meta);
    write_report_csv_header(out);
    for (const auto& r : reports) write_report_csv_row(out, r);
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r);
    out << round_json({{"metadata", meta}, {"all_asserted_pass", ok}, {"reports", arr}}).dump(2) << '\n';
  }
  for (const auto& r : reports)
    if (r.asserted && !r.pass) std::cerr << "FAIL " << r.id << " p=" << (r.p ? format_number(*r.p) : "-") << " slack=" << format_number(r.slack) << " tol=" << format_number(r.tol) << '\n';
  return ok ? 0 : kExitFail;
}

int run_sweep(const Options& o) {
  const std::vector<std::string> texts = o.bodies.empty() ? kCorpus : o.bodies;
  std::vector<Body> bodies;
  for (const auto& t : texts) bodies.push_back(parse_body(t));
  const auto ps = parse_p_list(o.p_text);
  for (const auto& b : bodies) check_solver_p_list(b.dim(), ps);
  std::vector<std::string> descriptors;
  for (const auto& b : bodies) descriptors.push_back(b.descriptor());
  const json config = harness_config_json(o, descriptors, ps);
  const json meta = run_metadata("sweep", config);
  const HarnessConfig hc = harness_config(o);

  // bodies are evaluated concurrently up to CAPGEO_THREADS; results keep corpus order
  std::vector<Ingredients> ings(bodies.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < bodies.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      ings[i] = gather_ingredients(bodies[i], ps, hc);
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(log_mutex);
      std::cerr << "sweep: " << descriptors[i] << " done in " << format_number(round12(sec)) << " s\n";
    }
  };
  const unsigned threads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(bodies.size()));
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, worker));
  for (auto& j : jobs) j.get();

  std::filesystem::create_directories(o.out_dir);
  std::ofstream summary(o.out_dir + "/summary.csv");
  write_csv_metadata(summary, meta);
  write_report_csv_header(summary);
  json all = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const auto& ing = ings[i];
    const auto reports = evaluate_all(ing, ps, o.q);
    ok = ok && all_asserted_pass(reports);
    for (const auto& r : reports) {
      write_report_csv_row(summary, r);
      all.push_back(r);
      if (r.asserted && !r.pass)
        std::cerr << "FAIL " << r.body << ' ' << r.id << " p=" << (r.p ? format_number(*r.p) : "-") << " slack=" << format_number(r.slack) << " tol=" << format_number(r.tol) << '\n';
    }
    std::ofstream plot(o.out_dir + "/plot_" + file_stem(descriptors[i]) + ".csv");
    write_csv_metadata(plot, meta);
    plot << "p,normalized_capacity,normalized_capacity_lower,normalized_capacity_upper,ratio,lower_constant,upper_bound,cap_over_area\n";
    const int n = ing.n;
    for (const double p : ps) {
      const auto& c = ing.capacity(p);
      const double area_term = std::pow(ing.area_ratio(), (n - p) / (n - 1.0));
      plot << format_number(p) << ',' << format_number(normalized_capacity(n, p, c.value)) << ','
           << format_number(normalized_capacity(n, p, c.lower)) << ',' << format_number(normalized_capacity(n, p, c.upper)) << ','
           << format_number(normalized_capacity(n, p, c.value) / area_term) << ','
           << format_number(std::pow(n * (p - 1.0) / (p * (n - 1.0)), p - 1.0)) << ','
           << format_number(std::pow(ing.geo.willmore_at(n), (p - 1.0) / (n - 1.0))) << ','
           << format_number(c.value / ing.geo.area) << '\n';
    }
  }
  std::ofstream rj(o.out_dir + "/reports.json");
  rj << round_json({{"metadata", meta}, {"all_asserted_pass", ok}, {"reports", all}}).dump(2) << '\n';
  std::cout << "sweep: " << all.size() << " reports over " << bodies.size() << " bodies, "
            << (ok ? "all asserted inequalities pass" : "asserted failures present") << "; output in " << o.out_dir << '\n';
  return ok ? 0 : kExitFail;
}

int run_flow(const Options& o) {
  const Body body = parse_body(o.body);
  const auto ps = parse_p_list(o.p_text);
  FlowConfig fc;
  fc.dt = o.dt;
  fc.samples = o.samples;
  const json config = {{"body", body.descriptor()}, {"dt", o.dt}, {"T", o.T}, {"p_list", ps}, {"samples", o.samples}};
  const FlowTrace trace = evolve(body.translated(-body.center()), o.T, ps, fc);
  std::ofstream file;
  std::ostream& out = open_output(o.out, file);
  write_csv_metadata(out, run_metadata("flow", config));
  write_flow_csv(out, trace);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational p-capacity, geometric functionals and their inequalities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto* constants = app.add_subcommand("constants", "Print the capacity/area constants and their differences");
  constants->add_option("--out", o.out, "Output file (default stdout)");

  auto* capacity = app.add_subcommand("capacity", "Estimate cap_p of one body with a bracket");
  capacity->add_option("--body", o.body, "Body descriptor, e.g. ellipsoid:1,1,2");
  capacity->add_option("--p", o.p_text, "Exponent p");
  capacity->add_option("--out", o.out, "Output JSON file (default stdout)");
  capacity->add_option("--export-field", o.export_field, "Directory for the binary potential field and its JSON sidecar");
  capacity->add_option("--config", o.config_path, "JSON config file; its keys override flags");
  add_solver_flags(capacity, o);

  auto* verify = app.add_subcommand("verify", "Evaluate every inequality on one body");
  verify->add_option("--body", o.body, "Body descriptor");
  verify->add_option("--p", o.p_text, "p values: 2 | 1.3,2,2.5 | start:stop:step");
  verify->add_option("--q", o.q, "Exponent q of the second Willmore branches");
  verify->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--out", o.out, "Output file (default stdout)");
  verify->add_option("--mesh-resolution", o.mesh_resolution, "Boundary mesh resolution");
  verify->add_flag("--no-riesz", o.no_riesz, "Skip single-layer quantities");
  verify->add_flag("--no-flow", o.no_flow, "Skip flow capacity bounds");
  verify->add_option("--config", o.config_path, "JSON config file; its keys override flags");
  add_solver_flags(verify, o);

  auto* sweep = app.add_subcommand("sweep", "Run the harness over a body corpus and a p grid");
  sweep->add_option("--body", o.bodies, "Body descriptor (repeatable; default: built-in corpus)");
  sweep->add_option("--p", o.p_text, "p values (default 1.05,1.3,2,2.5,2.95)");
  sweep->add_option("--q", o.q, "Exponent q of the second Willmore branches");
  sweep->add_option("--out-dir", o.out_dir, "Output directory");
  sweep->add_option("--mesh-resolution", o.mesh_resolution, "Boundary mesh resolution");
  sweep->add_flag("--no-riesz", o.no_riesz, "Skip single-layer quantities");
  sweep->add_flag("--no-flow", o.no_flow, "Skip flow capacity bounds");
  sweep->add_option("--config", o.config_path, "JSON config file; its keys override flags");
  add_solver_flags(sweep, o);

  auto* flow = app.add_subcommand("flow", "Inverse mean curvature flow trace as CSV");
  flow->add_option("--body", o.body, "Body descriptor (n = 2, or axisymmetric about z in n = 3)");
  flow->add_option("--dt", o.dt, "Recording time step");
  flow->add_option("--T", o.T, "Final time");
  flow->add_option("--p-list", o.p_text, "p values for the U_p columns");
  flow->add_option("--samples", o.samples, "Angular samples (0: default)");
  flow->add_option("--out", o.out, "Output CSV file (default stdout)");
  flow->add_option("--config", o.config_path, "JSON config file; its keys override flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (sweep->parsed() && sweep->count("--p") == 0) o.p_text = "1.05,1.3,2,2.5,2.95";
    o.apply_config();
    o.solver.richardson = o.solver.richardson && !o.no_richardson;
    if ((capacity->parsed() || verify->parsed() || flow->parsed()) && o.body.empty())
      throw ParseError("--body is required");
    if (constants->parsed()) return run_constants(o);
    if (capacity->parsed()) return run_capacity(o);
    if (verify->parsed()) return run_verify(o);
    if (sweep->parsed()) return run_sweep(o);
    if (flow->parsed()) return run_flow(o);
  } catch (const ParseError& e) {
    std::cerr << "capgeo: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "capgeo: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "capgeo: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
