#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadnet/balance.hpp"
#include "roadnet/errors.hpp"
#include "roadnet/fem.hpp"
#include "roadnet/graphspace.hpp"
#include "roadnet/mesh.hpp"
#include "roadnet/pattern.hpp"
#include "roadnet/pattern_io.hpp"
#include "roadnet/render.hpp"
#include "roadnet/tensor.hpp"

namespace {

using namespace roadnet;

constexpr double kAngleTol = 1e-3;

const char* defaults_header() {
  return "# defaults: h=0.02 rtol=1e-10 grid_n=16 quality_floor_deg=20\n";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": cannot parse \"" + item + "\" as a number");
    }
  }
  if (values.empty()) throw UsageError(flag + ": empty list");
  return values;
}

Vec2 parse_offset(const std::string& text) {
  auto v = parse_list(text, "--offset");
  if (v.size() != 2) throw UsageError("--offset: expected \"x,y\"");
  return wrap01(Vec2{v[0], v[1]});
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  out << content;
  if (!out) throw UsageError("failed writing output file: " + path);
}

std::string format_vec(Vec2 v) { return "(" + num(v.x) + ", " + num(v.y) + ")"; }

int cmd_validate(const std::string& path) {
  TorusPattern pattern = load_pattern(path);
  ValidationReport report = validate_regularity(pattern, kAngleTol);
  std::ostringstream os;
  os << defaults_header();
  os << "pattern: " << pattern.name() << " (" << pattern.arcs().size() << " arcs, "
     << pattern.nodes().size() << " junctions)\n";
  for (const auto& node : report.nodes) {
    os << "junction " << format_vec(node.position) << ": " << node.pairwise_angles.size()
       << " direction pairs, min angle " << num(node.min_angle) << " rad "
       << (node.pass ? "[ok]" : "[tangential]") << "\n";
  }
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  os << "result: " << (report.pass ? "regular" : "NOT regular") << "\n";
  write_output("", os.str());
  return report.pass ? 0 : 1;
}

int cmd_balance(const std::string& path, const std::string& format) {
  TorusPattern pattern = load_pattern(path);
  BalanceReport report = check_balance(pattern);
  std::ostringstream os;
  os << defaults_header();
  if (format == "csv") {
    os << "node_x,node_y,distinct_arcs,residual_x,residual_y,residual_norm\n";
    for (const auto& n : report.nodes)
      os << num(n.position.x) << "," << num(n.position.y) << "," << n.distinct_arcs << ","
         << num(n.residual.x) << "," << num(n.residual.y) << "," << num(n.residual_norm) << "\n";
    os << "# straight_ok=" << report.straight_ok << " node_degree_ok=" << report.node_degree_ok
       << " balance_ok=" << report.balance_ok << " balanced=" << report.is_balanced
       << " max_residual=" << num(report.max_residual) << "\n";
  } else {
    os << "pattern: " << pattern.name() << "\n";
    os << "arcs straight:          " << (report.straight_ok ? "yes" : "no");
    if (!report.non_straight_arcs.empty()) {
      os << " (curved:";
      for (int i : report.non_straight_arcs) os << " " << i;
      os << ")";
    }
    os << "\n";
    os << "junction degrees >= 2:  " << (report.node_degree_ok ? "yes" : "no") << "\n";
    os << "tangents in balance:    " << (report.balance_ok ? "yes" : "no")
       << " (max residual " << num(report.max_residual) << ")\n";
    for (const auto& n : report.nodes)
      os << "junction " << format_vec(n.position) << "  arcs " << n.distinct_arcs
         << "  residual " << format_vec(n.residual) << "  |r| " << num(n.residual_norm) << "\n";
    os << "balanced: " << (report.is_balanced ? "yes" : "no") << "\n";
  }
  write_output("", os.str());
  return report.is_balanced ? 0 : 1;
}

std::string tensor_text_report(const std::string& name, const std::string& kind, double a,
                               std::optional<double> delta, double h, const TensorResult& r,
                               const QualityReport& q) {
  std::ostringstream os;
  os << defaults_header();
  os << "pattern: " << name << "  kind: " << kind << "  a=" << num(a);
  if (delta) os << "  delta=" << num(*delta);
  os << "  h=" << num(h) << "\n";
  os << "sigma        = [" << num(r.sigma.s11) << ", " << num(r.sigma.s12) << "; "
     << num(r.sigma.s12) << ", " << num(r.sigma.s22) << "]\n";
  os << "sigma_energy = [" << num(r.sigma_energy.s11) << ", " << num(r.sigma_energy.s12) << "; "
     << num(r.sigma_energy.s12) << ", " << num(r.sigma_energy.s22) << "]\n";
  auto eig = r.sigma.eigenvalues();
  os << "trace = " << num(r.sigma.trace()) << "  eigenvalues = [" << num(eig.first) << ", "
     << num(eig.second) << "]  admissible range = [1, " << num(1.0 + a * r.pattern_length)
     << "]\n";
  os << "pattern length = " << num(r.pattern_length) << "  energies = " << num(r.energy1) << ", "
     << num(r.energy2) << "\n";
  os << "trace identity defect = " << num(r.trace_identity_defect)
     << "  symmetry defect = " << num(r.sigma.symmetry_defect) << "\n";
  os << "solver: " << r.iterations << " iterations, residual " << num(r.residual) << "\n";
  os << "mesh: " << q.n_vertices << " vertices, " << q.n_triangles << " triangles, min angle "
     << num(q.min_angle_deg) << " deg, area " << num(q.total_area);
  if (q.road_area > 0.0) os << ", road area " << num(q.road_area);
  os << "\n";
  return os.str();
}

int cmd_solve(const std::string& path, double a, double h, std::optional<double> delta,
              const std::string& offset_str, const std::string& out,
              const std::string& dump_path, const std::string& format) {
  TorusPattern pattern = load_pattern(path);
  Vec2 offset = parse_offset(offset_str);
  double geom_h = delta ? std::min(h, *delta / 2.0) : h;
  UnfoldedPattern unfolded = unfold(pattern, offset, geom_h);
  PeriodicMesh mesh = build_mesh(unfolded, h, delta);
  std::array<CorrectorField, 2> fields;
  TensorResult result =
      delta ? delta_tensor(mesh, a, {}, &fields) : effective_tensor(mesh, a, {}, &fields);
  std::string kind = delta ? "delta" : "effective";
  std::string text;
  if (format == "csv")
    text = tensor_csv_header() + tensor_csv_row(pattern.name(), kind, a, delta, h, result);
  else
    text = tensor_text_report(pattern.name(), kind, a, delta, h, result, quality_report(mesh));
  write_output(out, text);
  if (!dump_path.empty())
    write_output(dump_path,
                 dump_mesh(mesh, {{"w1", fields[0].values}, {"w2", fields[1].values}}));
  return 0;
}

int cmd_sweep_delta(const TorusPattern& pattern, double a, const std::vector<double>& deltas,
                    double h, const std::string& out) {
  CommutationReport report = commutation_sweep(pattern, a, deltas, h);
  std::ostringstream os;
  os << tensor_csv_header();
  os << tensor_csv_row(pattern.name(), "effective", a, std::nullopt, h, report.reference.coarse);
  os << tensor_csv_row(pattern.name(), "effective", a, std::nullopt, h / 2.0,
                       report.reference.fine);
  const EffectiveTensor& ex = report.reference.extrapolated;
  os << "# extrapolated: S11=" << num(ex.s11) << " S12=" << num(ex.s12) << " S22=" << num(ex.s22)
     << " trace=" << num(ex.trace()) << " frobenius=" << num(frobenius_norm(ex)) << "\n";
  int ok = 0;
  for (size_t i = 0; i < report.rows.size(); ++i) {
    const SweepRow& row = report.rows[i];
    if (!row.error.empty()) {
      os << "# delta=" << num(deltas[i]) << ": " << row.error << "\n";
      continue;
    }
    ++ok;
    os << tensor_csv_row(pattern.name(), "delta", a, row.delta, row.h, row.result);
    os << "# gap delta=" << num(deltas[i]) << ": " << num(report.gaps[i]) << "\n";
  }
  os << "# empirical_order = " << num(report.empirical_order) << "\n";
  write_output(out, os.str());
  return ok > 0 ? 0 : 3;
}

int cmd_sweep_small_a(const TorusPattern& pattern, const std::vector<double>& a_values, double h,
                      const std::string& out) {
  SmallAReport report = small_a_sweep(pattern, a_values, h);
  std::ostringstream os;
  os << defaults_header() << "a,ratio\n";
  for (size_t i = 0; i < report.a_values.size(); ++i)
    os << num(report.a_values[i]) << "," << num(report.ratios[i]) << "\n";
  write_output(out, os.str());
  return 0;
}

int cmd_sweep_large_a(const TorusPattern& pattern, const std::vector<double>& a_values, double h,
                      int grid_n, const std::string& out) {
  DReport dr = compute_d(pattern, grid_n, h / 2.0);
  LargeABoundReport report = large_a_bound_check(pattern, a_values, dr.d * dr.d, h);
  std::ostringstream os;
  os << defaults_header();
  os << "# d = " << num(dr.d) << "  d_squared = " << num(report.d_squared) << "  at offset "
     << format_vec(dr.argmax_offset) << "\n";
  os << "# pattern_length = " << num(report.pattern_length) << "\n";
  os << "a,trace,eps_h,lower,upper,lower_ok,upper_ok\n";
  bool all_ok = true;
  for (const auto& row : report.rows) {
    os << num(row.a) << "," << num(row.trace) << "," << num(row.eps_h) << "," << num(row.lower)
       << "," << num(row.upper) << "," << row.lower_ok << "," << row.upper_ok << "\n";
    all_ok = all_ok && row.lower_ok && row.upper_ok;
  }
  write_output(out, os.str());
  return all_ok ? 0 : 1;
}

int cmd_compute_d(const std::string& path, int grid_n, double h, const std::string& out) {
  TorusPattern pattern = load_pattern(path);
  DReport report = compute_d(pattern, grid_n, h);
  std::ostringstream os;
  os << defaults_header() << "offset_x,offset_y,d1sq,d2sq,sum\n";
  for (const auto& s : report.table)
    os << num(s.offset.x) << "," << num(s.offset.y) << "," << num(s.d1sq) << "," << num(s.d2sq)
       << "," << num(s.sum()) << "\n";
  os << "# d = " << num(report.d) << " at offset " << format_vec(report.argmax_offset) << "\n";
  write_output(out, os.str());
  return 0;
}

int cmd_render(const std::string& path, const std::string& what, const std::string& out,
               const std::string& dump_path, const std::string& field_name, double h,
               std::optional<double> delta, const std::string& offset_str) {
  std::string svg;
  if (what == "pattern") {
    svg = render_pattern_svg(load_pattern(path));
  } else if (what == "mesh") {
    if (!dump_path.empty()) {
      svg = render_mesh_svg(load_mesh_dump(dump_path).mesh);
    } else {
      TorusPattern pattern = load_pattern(path);
      Vec2 offset = parse_offset(offset_str);
      double geom_h = delta ? std::min(h, *delta / 2.0) : h;
      svg = render_mesh_svg(build_mesh(unfold(pattern, offset, geom_h), h, delta));
    }
  } else {
    if (dump_path.empty())
      throw UsageError("render --what field needs --dump <file> from a prior solve --dump-fields");
    MeshDump dump = load_mesh_dump(dump_path);
    const std::vector<double>* values = nullptr;
    for (const auto& f : dump.fields)
      if (f.first == field_name) values = &f.second;
    if (!values) throw UsageError("dump has no field named \"" + field_name + "\"");
    svg = render_field_svg(dump.mesh, *values);
  }
  write_output(out, svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"road-pattern diffusion toolkit: effective tensors on the periodic unit cell"};
  app.require_subcommand(1);
  // --h is a numeric flag below, so help must not claim the short -h.
  app.set_help_flag("--help", "print help and exit");

  std::string path, out, dump_path, offset_str = "0,0", format = "text";
  std::string deltas_str, as_str, mode, what, field_name = "w1";
  double a = 1.0, h = 0.02;
  double delta_value = 0.0;
  int grid_n = 16;
  unsigned seed = 0;

  auto* validate = app.add_subcommand("validate", "check junction regularity");
  validate->add_option("pattern", path, "pattern JSON file")->required();

  auto* balance = app.add_subcommand("balance", "check the tangent balance condition");
  balance->add_option("pattern", path, "pattern JSON file")->required();
  balance->add_option("--format", format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));

  auto* solve = app.add_subcommand("solve", "solve one cell problem and print the tensor");
  solve->add_option("pattern", path, "pattern JSON file")->required();
  solve->add_option("--a", a, "interface conductivity a")->required();
  solve->add_option("--h", h, "target mesh size");
  auto* delta_opt = solve->add_option("--delta", delta_value, "road width (finite-width model)");
  solve->add_option("--offset", offset_str, "cell translation \"x,y\"");
  solve->add_option("--out", out, "output file (default stdout)");
  solve->add_option("--dump-fields", dump_path, "write mesh + corrector fields to this file");
  solve->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  auto* sweep = app.add_subcommand("sweep", "delta-, small-a- or large-a-sweeps");
  sweep->add_option("pattern", path, "pattern JSON file")->required();
  sweep->add_option("--mode", mode, "delta, small-a or large-a")
      ->required()
      ->check(CLI::IsMember({"delta", "small-a", "large-a"}));
  sweep->add_option("--a", a, "interface conductivity (delta mode)");
  sweep->add_option("--deltas", deltas_str, "decreasing widths, e.g. 0.04,0.02,0.01");
  sweep->add_option("--as", as_str, "list of a values, e.g. 0.0125,0.025,0.05,0.1");
  sweep->add_option("--h", h, "target mesh size");
  sweep->add_option("--grid", grid_n, "offset grid for d (large-a mode)");
  sweep->add_option("--out", out, "output file (default stdout)");

  auto* computed = app.add_subcommand("compute-d", "graph distance d over cell translations");
  computed->add_option("pattern", path, "pattern JSON file")->required();
  computed->add_option("--grid", grid_n, "offset grid resolution");
  computed->add_option("--h", h, "graph discretization step");
  computed->add_option("--out", out, "output file (default stdout)");

  auto* render = app.add_subcommand("render", "write an SVG of a pattern, mesh or field");
  render->add_option("pattern", path, "pattern JSON file")->required();
  render->add_option("--what", what, "pattern, mesh or field")
      ->required()
      ->check(CLI::IsMember({"pattern", "mesh", "field"}));
  render->add_option("--out", out, "output SVG file (default stdout)");
  render->add_option("--dump", dump_path, "mesh dump from solve --dump-fields");
  render->add_option("--field", field_name, "field name inside the dump");
  render->add_option("--h", h, "target mesh size (mesh without --dump)");
  auto* render_delta = render->add_option("--delta", delta_value, "road width");
  render->add_option("--offset", offset_str, "cell translation \"x,y\"");

  app.add_option("--seed", seed, "seed for randomized auxiliary runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(path);
    if (balance->parsed()) return cmd_balance(path, format);
    if (solve->parsed()) {
      std::optional<double> delta;
      if (delta_opt->count()) delta = delta_value;
      return cmd_solve(path, a, h, delta, offset_str, out, dump_path, format);
    }
    if (sweep->parsed()) {
      TorusPattern pattern = load_pattern(path);
      if (mode == "delta") {
        if (deltas_str.empty()) throw UsageError("sweep --mode delta needs --deltas");
        return cmd_sweep_delta(pattern, a, parse_list(deltas_str, "--deltas"), h, out);
      }
      if (as_str.empty()) throw UsageError("sweep --mode " + mode + " needs --as");
      auto a_values = parse_list(as_str, "--as");
      if (mode == "small-a") return cmd_sweep_small_a(pattern, a_values, h, out);
      return cmd_sweep_large_a(pattern, a_values, h, grid_n, out);
    }
    if (computed->parsed()) return cmd_compute_d(path, grid_n, h, out);
    if (render->parsed()) {
      std::optional<double> delta;
      if (render_delta->count()) delta = delta_value;
      return cmd_render(path, what, out, dump_path, field_name, h, delta, offset_str);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
