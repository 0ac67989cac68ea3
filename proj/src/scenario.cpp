#include "mtobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mtobs {

namespace {

const std::map<std::string, int> kNcvComponents = {{"position", 0}, {"velocity", 1}};
const std::map<std::string, int> kNcaComponents = {{"ax", 0}, {"ay", 1}, {"vx", 2},
                                                   {"vy", 3}, {"px", 4}, {"py", 5}};

const std::map<std::string, int>& component_table(ModelKind kind) {
  return kind == ModelKind::ncv ? kNcvComponents : kNcaComponents;
}

std::string component_name(ModelKind kind, int local_index) {
  for (const auto& [name, idx] : component_table(kind))
    if (idx == local_index) return name;
  return "?";
}

bool parse_named_int(const std::string& s, long long& out) {
  try {
    size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

DirectedGraph named_topology(const std::string& text) {
  auto open = text.find('(');
  auto close = text.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("expected name(args)");
  const std::string name = text.substr(0, open);
  std::vector<int> args;
  std::istringstream as(text.substr(open + 1, close - open - 1));
  std::string piece;
  while (std::getline(as, piece, ',')) {
    long long v;
    if (!parse_named_int(piece, v))
      throw std::invalid_argument("bad argument '" + piece + "'");
    args.push_back(static_cast<int>(v));
  }
  if (name == "complete" && args.size() == 1) return DirectedGraph::complete(args[0]);
  if (name == "cycle" && args.size() == 1) return DirectedGraph::cycle(args[0]);
  if (name == "star" && args.size() == 1) return DirectedGraph::star(args[0]);
  if (name == "path" && args.size() == 1) return DirectedGraph::path(args[0]);
  if (name == "ring" && args.size() == 2) return DirectedGraph::ring(args[0], args[1]);
  throw std::invalid_argument("unknown topology '" + text + "'");
}

ObserverModel Scenario::observer_model() const {
  return build_observer_model(model, hdv_count(), sample_time);
}

SensorPlacement Scenario::placement() const {
  const int m = model == ModelKind::ncv ? 2 : 6;
  SensorPlacement p;
  p.cav_count = cav_count();
  p.measured.assign(p.cav_count, {});
  for (const auto& s : sensors) {
    const auto& table = component_table(model);
    p.measured[s.cav].push_back(s.hdv * m + table.at(s.component));
  }
  return p;
}

StructuredMatrix Scenario::dynamics_pattern() const {
  const ObserverModel om = observer_model();
  return StructuredMatrix::from_dense(om.global);
}

namespace {

struct Parser {
  std::vector<std::string> errors;
  Scenario sc;

  // raw collected pieces
  int hdv_count = -1;
  bool saw_named_topology = false;
  bool saw_inline_topology = false;
  int inline_nodes = -1;
  std::vector<std::tuple<int, int, std::optional<double>>> inline_links;
  std::vector<std::tuple<int, int, double>> vd_lines;  // hdv, step, value
  std::optional<bool> per_second;

  void error(int lineno, const std::string& msg) {
    errors.push_back("line " + std::to_string(lineno) + ": " + msg);
  }
  void semantic(const std::string& field, const std::string& msg) {
    errors.push_back(field + ": " + msg);
  }
};

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, long long& out) {
  try {
    size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

// "key = value" with arbitrary spacing
bool split_assignment(const std::string& line, std::string& key, std::string& value) {
  auto eq = line.find('=');
  if (eq == std::string::npos) return false;
  auto trim = [](std::string s) {
    const char* ws = " \t";
    auto b = s.find_first_not_of(ws);
    auto e = s.find_last_not_of(ws);
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  key = trim(line.substr(0, eq));
  value = trim(line.substr(eq + 1));
  return !key.empty() && !value.empty();
}

void handle_observer_line(Parser& p, int lineno, const std::string& key,
                          const std::string& value) {
  double d;
  long long i;
  if (key == "model") {
    if (value == "ncv")
      p.sc.model = ModelKind::ncv;
    else if (value == "nca")
      p.sc.model = ModelKind::nca;
    else
      p.error(lineno, "observer.model must be ncv or nca");
  } else if (key == "sample_time") {
    if (parse_double(value, d) && d > 0)
      p.sc.sample_time = d;
    else
      p.error(lineno, "observer.sample_time must be a positive real");
  } else if (key == "horizon") {
    if (parse_int(value, i) && i >= 0)
      p.sc.horizon = static_cast<int>(i);
    else
      p.error(lineno, "observer.horizon must be a nonnegative integer");
  } else if (key == "seed") {
    if (parse_int(value, i) && i >= 0)
      p.sc.seed = static_cast<std::uint64_t>(i);
    else
      p.error(lineno, "observer.seed must be a nonnegative integer");
  } else if (key == "measurement_variance") {
    if (parse_double(value, d) && d >= 0)
      p.sc.measurement_variance = d;
    else
      p.error(lineno, "observer.measurement_variance must be >= 0");
  } else if (key == "process_variance") {
    if (parse_double(value, d) && d >= 0)
      p.sc.process_variance = d;
    else
      p.error(lineno, "observer.process_variance must be >= 0");
  } else if (key == "rank_tol_factor") {
    if (parse_double(value, d) && d >= 0)
      p.sc.rank_tol_factor = d;
    else
      p.error(lineno, "observer.rank_tol_factor must be >= 0");
  } else if (key == "gain_method") {
    try {
      p.sc.synthesis.method = gain_method_from_string(value);
    } catch (const std::exception& e) {
      p.error(lineno, e.what());
    }
  } else if (key == "gain_margin") {
    if (parse_double(value, d) && d > 0 && d < 1)
      p.sc.synthesis.margin = d;
    else
      p.error(lineno, "observer.gain_margin must be in (0, 1)");
  } else {
    p.error(lineno, "unknown observer key '" + key + "'");
  }
}

void handle_hdv_line(Parser& p, int lineno, std::istringstream& rest,
                     const std::string& first, const std::string& line) {
  if (first == "coefficients") {
    std::string key, value;
    if (!split_assignment(line, key, value) ||
        (value != "per_second" && value != "per_step")) {
      p.error(lineno, "expected coefficients = per_second|per_step");
      return;
    }
    p.per_second = (value == "per_second");
    return;
  }
  if (first == "count") {
    // accept both "count = 4" and "count 4"
    std::string token;
    long long n = -1;
    while (rest >> token)
      if (token != "=") {
        if (!parse_int(token, n)) n = -1;
        break;
      }
    if (n < 1)
      p.error(lineno, "hdv.count must be a positive integer");
    else {
      p.hdv_count = static_cast<int>(n);
      p.sc.hdvs.assign(p.hdv_count, HdvSpec{});
    }
    return;
  }
  if (first == "hdv") {
    long long idx;
    std::string idx_str;
    if (!(rest >> idx_str) || !parse_int(idx_str, idx)) {
      p.error(lineno, "expected 'hdv <index> key=value ...'");
      return;
    }
    if (p.hdv_count < 0 || idx < 0 || idx >= p.hdv_count) {
      p.error(lineno, "hdv index " + std::to_string(idx) +
                          " out of range (declare count first)");
      return;
    }
    HdvSpec& spec = p.sc.hdvs[static_cast<size_t>(idx)];
    std::string kv;
    while (rest >> kv) {
      std::string key, value;
      if (!split_assignment(kv, key, value)) {
        p.error(lineno, "expected key=value, got '" + kv + "'");
        continue;
      }
      double d;
      long long i;
      if (key == "lambda" && parse_double(value, d))
        spec.params.lambda_gain = d;
      else if (key == "tau" && parse_int(value, i) && i >= 0)
        spec.params.reaction_delay = static_cast<int>(i);
      else if (key == "alpha1" && parse_double(value, d))
        spec.params.alpha1 = d;
      else if (key == "alpha2" && parse_double(value, d))
        spec.params.alpha2 = d;
      else if (key == "beta1" && parse_double(value, d))
        spec.params.beta1 = d;
      else if (key == "beta2" && parse_double(value, d))
        spec.params.beta2 = d;
      else if (key == "sigma" && parse_double(value, d) && d >= 0)
        spec.params.noise_std = d;
      else if (key == "threshold" && parse_double(value, d) && d > 0)
        spec.params.distance_threshold = d;
      else if (key == "p0" && parse_double(value, d))
        spec.initial_position = d;
      else if (key == "v0" && parse_double(value, d))
        spec.initial_velocity = d;
      else
        p.error(lineno, "bad hdv assignment '" + kv + "'");
    }
    return;
  }
  if (first == "vd") {
    long long idx, step;
    double value;
    std::string a, b, c;
    if (!(rest >> a >> b >> c) || !parse_int(a, idx) || !parse_int(b, step) ||
        !parse_double(c, value)) {
      p.error(lineno, "expected 'vd <hdv> <step> <mps>'");
      return;
    }
    p.vd_lines.emplace_back(static_cast<int>(idx), static_cast<int>(step), value);
    return;
  }
  p.error(lineno, "unknown hdv directive '" + first + "'");
}

void handle_network_line(Parser& p, int lineno, const std::string& line,
                         std::istringstream& rest, const std::string& first) {
  if (first == "topology") {
    std::string key, value;
    if (!split_assignment(line, key, value)) {
      p.error(lineno, "expected topology = name(args)");
      return;
    }
    try {
      p.sc.cav_graph = named_topology(value);
      p.sc.topology_source = value;
      p.saw_named_topology = true;
    } catch (const std::exception& e) {
      p.error(lineno, e.what());
    }
    return;
  }
  if (first == "nodes") {
    long long n;
    std::string n_str;
    if (!(rest >> n_str) || !parse_int(n_str, n) || n < 1) {
      p.error(lineno, "expected 'nodes N'");
      return;
    }
    p.inline_nodes = static_cast<int>(n);
    p.saw_inline_topology = true;
    return;
  }
  if (first == "link") {
    long long i, j;
    std::string a, b, w_str;
    if (!(rest >> a >> b) || !parse_int(a, i) || !parse_int(b, j)) {
      p.error(lineno, "expected 'link i j [w]'");
      return;
    }
    std::optional<double> w;
    if (rest >> w_str) {
      double d;
      if (!parse_double(w_str, d)) {
        p.error(lineno, "bad link weight '" + w_str + "'");
        return;
      }
      w = d;
    }
    p.inline_links.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
    p.saw_inline_topology = true;
    return;
  }
  p.error(lineno, "unknown network directive '" + first + "'");
}

void handle_sensor_line(Parser& p, int lineno, std::istringstream& rest,
                        const std::string& first) {
  if (first != "sensor") {
    p.error(lineno, "unknown sensors directive '" + first + "'");
    return;
  }
  std::string a, b, comp;
  long long cav, hdv;
  if (!(rest >> a >> b >> comp) || !parse_int(a, cav) || !parse_int(b, hdv)) {
    p.error(lineno, "expected 'sensor <cav> <hdv> <component>'");
    return;
  }
  p.sc.sensors.push_back({static_cast<int>(cav), static_cast<int>(hdv), comp});
}

void handle_fault_line(Parser& p, int lineno, std::istringstream& rest,
                       const std::string& first) {
  if (first != "at") {
    p.error(lineno, "unknown faults directive '" + first + "'");
    return;
  }
  std::string step_str, kind;
  long long step;
  if (!(rest >> step_str >> kind) || !parse_int(step_str, step) || step < 1) {
    p.error(lineno, "expected 'at <step> ...' with step >= 1 (faults apply on the transition into <step>)");
    return;
  }
  FaultEvent ev;
  ev.trigger_step = static_cast<int>(step);
  if (kind == "remove_link") {
    std::string a, b;
    long long i, j;
    if (!(rest >> a >> b) || !parse_int(a, i) || !parse_int(b, j)) {
      p.error(lineno, "expected 'remove_link <src> <dst>'");
      return;
    }
    ev.kind = FaultKind::remove_link;
    ev.node = static_cast<int>(i);
    ev.target = static_cast<int>(j);
  } else if (kind == "remove_node") {
    std::string a;
    long long i;
    if (!(rest >> a) || !parse_int(a, i)) {
      p.error(lineno, "expected 'remove_node <node>'");
      return;
    }
    ev.kind = FaultKind::remove_node;
    ev.node = static_cast<int>(i);
  } else {
    p.error(lineno, "unknown fault kind '" + kind + "'");
    return;
  }
  std::string flag;
  if (rest >> flag) {
    if (flag == "redesign")
      ev.redesign_gain = true;
    else
      p.error(lineno, "unknown fault flag '" + flag + "'");
  }
  p.sc.faults.push_back(ev);
}

void validate(Parser& p) {
  Scenario& sc = p.sc;
  if (p.hdv_count < 1) p.semantic("hdv.count", "missing or not positive");
  if (p.saw_named_topology && p.saw_inline_topology)
    p.semantic("network", "exactly one topology source allowed, found both");
  if (!p.saw_named_topology && !p.saw_inline_topology)
    p.semantic("network", "missing topology");
  if (p.saw_inline_topology && !p.saw_named_topology) {
    if (p.inline_nodes < 1) {
      p.semantic("network.nodes", "missing 'nodes N' for inline links");
    } else {
      DirectedGraph g(p.inline_nodes);
      for (const auto& [i, j, w] : p.inline_links) {
        try {
          if (w)
            g.add_link(i, j, *w);
          else
            g.add_link(i, j);
        } catch (const std::exception& e) {
          p.semantic("network.link", e.what());
        }
      }
      sc.cav_graph = g;
      sc.topology_source = "inline";
    }
  }
  // consensus needs every CAV to use its own estimate
  if (sc.cav_graph.node_count() > 0) sc.cav_graph = sc.cav_graph.with_self_loops();

  for (const auto& [idx, step, value] : p.vd_lines) {
    if (idx < 0 || idx >= p.hdv_count) {
      p.semantic("hdv.vd", "hdv index " + std::to_string(idx) + " out of range");
      continue;
    }
    sc.hdvs[static_cast<size_t>(idx)].params.desired_velocity.add(step, value);
  }
  if (p.per_second)
    for (auto& spec : sc.hdvs) spec.params.rate_coefficients = *p.per_second;
  // default desired velocity: hold the initial velocity from step 0
  for (auto& spec : sc.hdvs) {
    auto& changes = spec.params.desired_velocity.changes;
    if (changes.empty() || changes.front().first > 0)
      spec.params.desired_velocity.add(0, spec.initial_velocity);
  }

  const auto& table = component_table(sc.model);
  for (size_t s = 0; s < sc.sensors.size(); ++s) {
    const auto& sensor = sc.sensors[s];
    const std::string field = "sensors[" + std::to_string(s) + "]";
    if (sensor.cav < 0 || sensor.cav >= sc.cav_count())
      p.semantic(field + ".cav", "CAV " + std::to_string(sensor.cav) + " does not exist");
    if (sensor.hdv < 0 || sensor.hdv >= p.hdv_count)
      p.semantic(field + ".hdv", "HDV " + std::to_string(sensor.hdv) + " does not exist");
    if (!table.count(sensor.component))
      p.semantic(field + ".component",
                 "'" + sensor.component + "' not valid for this observer model");
  }

  for (size_t f = 0; f < sc.faults.size(); ++f) {
    const auto& ev = sc.faults[f];
    const std::string field = "faults[" + std::to_string(f) + "]";
    if (ev.kind == FaultKind::remove_node) {
      if (ev.node < 0 || ev.node >= sc.cav_count())
        p.semantic(field, "node " + std::to_string(ev.node) + " does not exist");
    } else {
      if (ev.node < 0 || ev.node >= sc.cav_count() || ev.target < 0 ||
          ev.target >= sc.cav_count() || !sc.cav_graph.has_link(ev.node, ev.target))
        p.semantic(field, "link (" + std::to_string(ev.node) + ", " +
                              std::to_string(ev.target) + ") does not exist");
      else if (ev.node == ev.target)
        p.semantic(field, "cannot remove a self-loop");
    }
  }
}

}  // namespace

ScenarioParseResult parse_scenario_text(const std::string& text) {
  Parser p;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream probe(line);
    std::string first;
    if (!(probe >> first)) continue;

    if (first.front() == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) {
        p.error(lineno, "unterminated section header");
        continue;
      }
      section = line.substr(line.find('[') + 1, close - line.find('[') - 1);
      if (section != "observer" && section != "hdv" && section != "network" &&
          section != "sensors" && section != "faults")
        p.error(lineno, "unknown section [" + section + "]");
      continue;
    }
    if (section.empty()) {
      p.error(lineno, "directive before any section header");
      continue;
    }
    if (section == "observer") {
      std::string key, value;
      if (split_assignment(line, key, value))
        handle_observer_line(p, lineno, key, value);
      else
        p.error(lineno, "expected key = value");
    } else if (section == "hdv") {
      std::istringstream rest(line);
      rest >> first;
      handle_hdv_line(p, lineno, rest, first, line);
    } else if (section == "network") {
      std::istringstream rest(line);
      rest >> first;
      handle_network_line(p, lineno, line, rest, first);
    } else if (section == "sensors") {
      std::istringstream rest(line);
      rest >> first;
      handle_sensor_line(p, lineno, rest, first);
    } else if (section == "faults") {
      std::istringstream rest(line);
      rest >> first;
      handle_fault_line(p, lineno, rest, first);
    }
  }
  validate(p);

  ScenarioParseResult result;
  result.errors = p.errors;
  if (result.errors.empty()) result.scenario = std::move(p.sc);
  return result;
}

ScenarioParseResult parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ScenarioParseResult r;
    r.errors.push_back("cannot open scenario file '" + path + "'");
    return r;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

Scenario load_scenario(const std::string& path) {
  auto result = parse_scenario(path);
  if (!result.ok()) {
    std::string all;
    for (const auto& e : result.errors) all += (all.empty() ? "" : "\n") + e;
    throw std::runtime_error("scenario validation failed:\n" + all);
  }
  return *result.scenario;
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  out.precision(17);
  out << "[observer]\n";
  out << "model = " << (sc.model == ModelKind::ncv ? "ncv" : "nca") << "\n";
  out << "sample_time = " << sc.sample_time << "\n";
  out << "horizon = " << sc.horizon << "\n";
  out << "seed = " << sc.seed << "\n";
  out << "measurement_variance = " << sc.measurement_variance << "\n";
  out << "process_variance = " << sc.process_variance << "\n";
  if (sc.rank_tol_factor > 0) out << "rank_tol_factor = " << sc.rank_tol_factor << "\n";
  out << "gain_method = " << to_string(sc.synthesis.method) << "\n";
  out << "gain_margin = " << sc.synthesis.margin << "\n";

  out << "\n[hdv]\n";
  out << "count = " << sc.hdv_count() << "\n";
  if (!sc.hdvs.empty() && sc.hdvs.front().params.rate_coefficients)
    out << "coefficients = per_second\n";
  for (int h = 0; h < sc.hdv_count(); ++h) {
    const auto& spec = sc.hdvs[static_cast<size_t>(h)];
    out << "hdv " << h << " lambda=" << spec.params.lambda_gain
        << " tau=" << spec.params.reaction_delay << " alpha1=" << spec.params.alpha1
        << " alpha2=" << spec.params.alpha2 << " beta1=" << spec.params.beta1
        << " beta2=" << spec.params.beta2 << " sigma=" << spec.params.noise_std
        << " threshold=" << spec.params.distance_threshold
        << " p0=" << spec.initial_position << " v0=" << spec.initial_velocity << "\n";
    for (const auto& [step, value] : spec.params.desired_velocity.changes)
      out << "vd " << h << " " << step << " " << value << "\n";
  }

  out << "\n[network]\n";
  if (sc.topology_source != "inline" && !sc.topology_source.empty()) {
    out << "topology = " << sc.topology_source << "\n";
  } else {
    out << "nodes " << sc.cav_count() << "\n";
    for (const auto& [i, j] : sc.cav_graph.links()) {
      auto w = sc.cav_graph.weight(i, j);
      if (i == j && !w) continue;  // loader reinserts bare self-loops
      out << "link " << i << " " << j;
      if (w) out << " " << *w;
      out << "\n";
    }
  }

  out << "\n[sensors]\n";
  for (const auto& s : sc.sensors)
    out << "sensor " << s.cav << " " << s.hdv << " " << s.component << "\n";

  if (!sc.faults.empty()) {
    out << "\n[faults]\n";
    for (const auto& ev : sc.faults) {
      out << "at " << ev.trigger_step << " ";
      if (ev.kind == FaultKind::remove_link)
        out << "remove_link " << ev.node << " " << ev.target;
      else
        out << "remove_node " << ev.node;
      if (ev.redesign_gain) out << " redesign";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace mtobs
