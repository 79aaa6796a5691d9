#include "hvi/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hvi/problems.hpp"

namespace hvi {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& file, long line, const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& file, long line, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(file, line, "not a number: '" + v + "'");
  }
}

long parse_long(const std::string& file, long line, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(file, line, "not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& file, long line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(file, line, "not a boolean: '" + v + "'");
}

std::vector<double> parse_vector(const std::string& file, long line, const std::string& v) {
  std::istringstream ss(v);
  std::vector<double> out;
  double x;
  while (ss >> x) out.push_back(x);
  if (!ss.eof()) fail(file, line, "not a numeric vector: '" + v + "'");
  if (out.empty()) fail(file, line, "empty vector value");
  return out;
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& filename) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(filename, lineno, "malformed section header");
      section = s.substr(1, s.size() - 2);
      if (section != "problem" && section != "run" && section != "schedule" &&
          section != "anchors" && section != "output")
        fail(filename, lineno, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(filename, lineno, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    size_t hash = val.find(" #");
    if (hash != std::string::npos) val = trim(val.substr(0, hash));
    if (val.empty()) fail(filename, lineno, "empty value for key '" + key + "'");

    auto unknown = [&]() { fail(filename, lineno, "unknown key '" + key + "' in section [" + section + "]"); };
    if (section == "problem") {
      if (key == "name") c.problem = val;
      else if (key == "n") c.n = (int)parse_long(filename, lineno, val);
      else if (key == "normalize") c.normalize = parse_bool(filename, lineno, val);
      else unknown();
    } else if (section == "run") {
      if (key == "variant") c.variant = variant_from_name(val);
      else if (key == "iterations") c.iterations = parse_long(filename, lineno, val);
      else if (key == "log_every") c.log_every = parse_long(filename, lineno, val);
      else if (key == "seed") c.seed = (uint64_t)parse_long(filename, lineno, val);
      else if (key == "energy_ref") c.energy_ref = val;
      else if (key == "stop_tol_step") c.stop_tol_step = parse_double(filename, lineno, val);
      else if (key == "stop_tol_gap") c.stop_tol_gap = parse_double(filename, lineno, val);
      else if (key == "z1") c.z1 = parse_vector(filename, lineno, val);
      else unknown();
    } else if (section == "schedule") {
      if (key == "a") c.a = parse_double(filename, lineno, val);
      else if (key == "b") c.b = parse_double(filename, lineno, val);
      else if (key == "delta") c.delta = parse_double(filename, lineno, val);
      else if (key == "mu") c.mu = parse_double(filename, lineno, val);
      else if (key == "step_mode") c.step_mode = val;
      else if (key == "explicit_t") c.explicit_t = parse_double(filename, lineno, val);
      else unknown();
    } else if (section == "anchors") {
      if (key == "default") c.anchors_default = parse_bool(filename, lineno, val);
      else if (key == "file") c.anchors_file = val;
      else if (key == "segment_samples") c.anchor_segment_samples = (int)parse_long(filename, lineno, val);
      else unknown();
    } else if (section == "output") {
      if (key == "dir") c.out_dir = val;
      else unknown();
    } else {
      fail(filename, lineno, "key '" + key + "' outside any section");
    }
  }
  c.validate();
  return c;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Config c = parse_config_text(buf.str(), path);
  // relative anchor paths resolve against the config file's directory
  if (!c.anchors_file.empty()) {
    std::filesystem::path ap(c.anchors_file);
    if (ap.is_relative())
      c.anchors_file = (std::filesystem::path(path).parent_path() / ap).string();
  }
  return c;
}

void Config::validate() const {
  if (iterations < 0) throw ConfigError("run.iterations must be >= 0");
  if (log_every <= 0) throw ConfigError("run.log_every must be positive");
  if (energy_ref != "none" && energy_ref != "truth")
    throw ConfigError("run.energy_ref must be 'none' or 'truth'");
  if (step_mode != "constant_monotone" && step_mode != "strong_mono")
    throw ConfigError("schedule.step_mode must be constant_monotone or strong_mono");
  if (!(a > 0) || !(b > 0)) throw ConfigError("schedule.a and schedule.b must be positive");
  if (!(delta > 0) || delta > 1) throw ConfigError("schedule.delta must lie in (0, 1]");
  if (problem == "gave" && n < 5) throw ConfigError("problem.n must be >= 5 for gave");
  if (anchor_segment_samples < 1) throw ConfigError("anchors.segment_samples must be >= 1");
}

std::string serialize_config(const Config& c) {
  std::ostringstream o;
  o.precision(17);
  o << "# hvi config v1\n";
  o << "[problem]\n";
  o << "name = " << c.problem << "\n";
  o << "n = " << c.n << "\n";
  o << "normalize = " << (c.normalize ? "true" : "false") << "\n";
  o << "[run]\n";
  o << "variant = " << variant_name(c.variant) << "\n";
  o << "iterations = " << c.iterations << "\n";
  o << "log_every = " << c.log_every << "\n";
  o << "seed = " << c.seed << "\n";
  o << "energy_ref = " << c.energy_ref << "\n";
  if (c.stop_tol_step) o << "stop_tol_step = " << *c.stop_tol_step << "\n";
  if (c.stop_tol_gap) o << "stop_tol_gap = " << *c.stop_tol_gap << "\n";
  if (c.z1) {
    o << "z1 =";
    for (double v : *c.z1) o << " " << v;
    o << "\n";
  }
  o << "[schedule]\n";
  o << "a = " << c.a << "\n";
  o << "b = " << c.b << "\n";
  o << "delta = " << c.delta << "\n";
  o << "mu = " << c.mu << "\n";
  o << "step_mode = " << c.step_mode << "\n";
  if (c.explicit_t) o << "explicit_t = " << *c.explicit_t << "\n";
  o << "[anchors]\n";
  o << "default = " << (c.anchors_default ? "true" : "false") << "\n";
  if (!c.anchors_file.empty()) o << "file = " << c.anchors_file << "\n";
  o << "segment_samples = " << c.anchor_segment_samples << "\n";
  o << "[output]\n";
  o << "dir = " << c.out_dir << "\n";
  return o.str();
}

bool config_equal(const Config& a, const Config& b) {
  return serialize_config(a) == serialize_config(b);
}

namespace {
std::map<std::string, std::function<HierarchicalProblem(const Config&)>>& registry() {
  static std::map<std::string, std::function<HierarchicalProblem(const Config&)>> r;
  return r;
}
}  // namespace

void register_problem(const std::string& name,
                      std::function<HierarchicalProblem(const Config&)> builder) {
  registry()[name] = std::move(builder);
}

namespace {

// F2(z) = z, F1(z) = z - 3: strongly monotone at both levels, S2 = {0}.
HierarchicalProblem build_toy_strong() {
  HierarchicalProblem p;
  p.name = "toy_strong";
  p.dim = 1;
  p.data.f2 = affine_operator(Matrix::Identity(1, 1), Vector::Zero(1));
  p.data.f1 = affine_operator(Matrix::Identity(1, 1), Vector::Constant(1, -3.0));
  p.data.g1 = zero_prox_term();
  p.data.g2 = zero_prox_term();
  p.solution_point = Vector::Zero(1);
  SegmentSet seg;
  seg.base = Vector::Zero(1);
  seg.direction = Vector::Ones(1);
  seg.lo = seg.hi = 0.0;
  p.lower_set = seg;
  p.sample_lo = Vector::Constant(1, -10.0);
  p.sample_hi = Vector::Constant(1, 10.0);
  return p;
}

// F2 == 0 with declared L_F2 = 1 (the strong schedule divides by it),
// F1(z) = z - 3: pure Tikhonov selection with unique solution 3.
HierarchicalProblem build_toy_sm() {
  HierarchicalProblem p;
  p.name = "toy_sm";
  p.dim = 1;
  p.data.f2 = zero_operator(1);
  p.data.f2.lipschitz = 1.0;
  p.data.f1 = affine_operator(Matrix::Identity(1, 1), Vector::Constant(1, -3.0));
  p.data.g1 = zero_prox_term();
  p.data.g2 = zero_prox_term();
  p.solution_point = Vector::Constant(1, 3.0);
  SegmentSet seg;
  seg.base = Vector::Constant(1, 3.0);
  seg.direction = Vector::Ones(1);
  seg.lo = seg.hi = 0.0;
  p.lower_set = seg;
  p.sample_lo = Vector::Constant(1, -10.0);
  p.sample_hi = Vector::Constant(1, 10.0);
  return p;
}

// small coupled min-max demo: quadratic payoffs over x_i + y_i = 1
HierarchicalProblem build_minmax_demo() {
  MinMaxSpec spec;
  spec.nx = spec.ny = 2;
  spec.grad_f1 = affine_operator(Matrix::Identity(2, 2), Vector::Zero(2));
  spec.grad_f2 = affine_operator(Matrix::Identity(2, 2), Vector::Zero(2));
  spec.A = Matrix::Identity(2, 2);
  spec.B = Matrix::Identity(2, 2);
  spec.c = Vector::Ones(2);
  HierarchicalProblem p = build_minmax(spec);
  p.solution_point = Vector::Constant(4, 0.5);
  return p;
}

// simple bilevel demo: f2 = |x - c|^2/2, f1 = |x|^2/2, solution c
HierarchicalProblem build_bilevel_demo() {
  Vector c = (Vector(2) << 2.0, -1.0).finished();
  HierarchicalProblem p = build_simple_bilevel(
      affine_operator(Matrix::Identity(2, 2), Vector::Zero(2)), zero_prox_term(),
      affine_operator(Matrix::Identity(2, 2), -c), zero_prox_term(), 2);
  p.solution_point = c;
  return p;
}

}  // namespace

HierarchicalProblem build_problem(const Config& c) {
  auto it = registry().find(c.problem);
  if (it != registry().end()) return it->second(c);
  if (c.problem == "gnep") return build_gnep();
  if (c.problem == "gave") return build_gave(c.n, c.normalize);
  if (c.problem == "toy_strong") return build_toy_strong();
  if (c.problem == "toy_sm") return build_toy_sm();
  if (c.problem == "minmax") return build_minmax_demo();
  if (c.problem == "bilevel") return build_bilevel_demo();
  throw ConfigError("unknown problem '" + c.problem +
                    "' (builtin: gnep, gave, minmax, bilevel, toy_strong, toy_sm; "
                    "custom problems via register_problem)");
}

SolverConfig solver_config_from(const Config& c, const HierarchicalProblem& p) {
  SolverConfig sc;
  sc.variant = c.variant;
  sc.schedule.a = c.a;
  sc.schedule.b = c.b;
  sc.schedule.delta = c.delta;
  sc.schedule.mu = c.mu;
  sc.schedule.step_mode =
      c.step_mode == "strong_mono" ? StepMode::strong_mono : StepMode::constant_monotone;
  sc.schedule.explicit_t = c.explicit_t;
  sc.iterations = c.iterations;
  sc.log_every = c.log_every;
  sc.stop_tol_step = c.stop_tol_step;
  sc.stop_tol_gap = c.stop_tol_gap;
  if (c.z1) {
    if ((Eigen::Index)c.z1->size() != p.dim)
      throw ConfigError("run.z1 has wrong dimension for problem " + p.name);
    sc.z1 = Eigen::Map<const Vector>(c.z1->data(), p.dim);
  }
  if (!c.anchors_file.empty()) {
    AnchorSet a = load_anchors(c.anchors_file, AnchorLabel::feasibility);
    for (const Vector& pt : a.points)
      if (pt.size() != p.dim)
        throw ConfigError("anchors in " + c.anchors_file + " have wrong dimension");
    sc.feas_anchors = a;
  } else if (c.anchors_default && (p.lower_set || p.solution_point)) {
    sc.feas_anchors = default_anchors(p, c.anchor_segment_samples);
  }
  if (p.lower_set && sc.feas_anchors) {
    // optimality anchors must lie inside the descriptor; reuse the segment part
    sc.opt_anchors = default_anchors(p, c.anchor_segment_samples, AnchorLabel::optimality);
  }
  if (c.energy_ref == "truth") {
    if (!p.solution_point)
      throw ConfigError("energy_ref = truth requires a problem with a known solution");
    sc.energy_ref = p.solution_point;
  }
  return sc;
}

}  // namespace hvi
