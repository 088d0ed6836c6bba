// Command-line front end. Talks to the library only through lipfit.h.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lipfit/lipfit.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNotConverged = 2;

struct GridFree {
  void operator()(lipfit_grid* g) const { lipfit_grid_free(g); }
};
struct FieldFree {
  void operator()(lipfit_field* f) const { lipfit_field_free(f); }
};
using GridHandle = std::unique_ptr<lipfit_grid, GridFree>;
using FieldHandle = std::unique_ptr<lipfit_field, FieldFree>;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LibraryError : std::runtime_error {
  lipfit_status status;
  LibraryError(lipfit_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

// Throws on every status except MaxIterExceeded, which callers turn into
// exit code 2 after writing their artifacts.
bool check(lipfit_status s) {
  if (s == LIPFIT_OK) return true;
  if (s == LIPFIT_MAX_ITER_EXCEEDED) return false;
  std::string msg = lipfit_last_error();
  if (msg.empty()) msg = lipfit_status_name(s);
  throw LibraryError(s, msg);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lipfit_string_free(s);
  return out;
}

std::vector<double> values_of(const lipfit_field* f) {
  std::vector<double> v(lipfit_field_size(f));
  check(lipfit_field_values(f, v.data(), v.size()));
  return v;
}

GridHandle grid_of(const lipfit_field* f) {
  lipfit_grid* g = nullptr;
  check(lipfit_field_grid(f, &g));
  return GridHandle(g);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

struct Options {
  // datum
  std::string kase;
  std::string input;
  double k = 1.0;
  double r0 = 0.4;
  // grid
  int n = 0;
  std::string extent;
  std::string mask;
  int stencil = 8;
  // solver
  double tol_feas = 0.0;
  double tol_inc = 0.0;
  long max_iter = -1;
  double tau = 0.0;
  double slack = 0.0;
  std::string method = "auto";
  bool dirichlet = false;
  std::string ps = "4,8,16,32,64";
  double p = 0.0;
  double tol = 0.0;
  int rexp = 2;
  double penalty = 1.0;
  std::string candidate;
  // output
  std::string out = ".";
  std::string format;
  std::string command_line;
};

void add_datum_flags(CLI::App* app, Options& o) {
  app->add_option("--case", o.kase, "builtin datum: 1, 2, 3 or radial")
      ->check(CLI::IsMember({"1", "2", "3", "radial", "case1", "case2", "case3"}));
  app->add_option("--input", o.input, "datum file (.csv for 1D, .json)");
  app->add_option("--k", o.k, "plateau height for case 1 and radial")->capture_default_str();
  app->add_option("--r0", o.r0, "plateau radius for case 1 and radial")->capture_default_str();
  app->add_option("--n", o.n, "nodes per axis (default 401 in 1D, 81 in 2D)");
  app->add_option("--extent", o.extent, "lo,hi or xlo,xhi,ylo,yhi (default -1,1)");
  app->add_option("--mask", o.mask, "line, full, disk or lshape")
      ->check(CLI::IsMember({"line", "full", "disk", "lshape"}));
  app->add_option("--stencil", o.stencil, "2D stencil")->check(CLI::IsMember({8, 16}))->capture_default_str();
}

void add_output_flags(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "output directory")->capture_default_str();
  app->add_option("--format", o.format, "field format (default csv in 1D, json in 2D)")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_projection_flags(CLI::App* app, Options& o) {
  app->add_option("--tol-feas", o.tol_feas, "edge feasibility tolerance (default 1e-8 * longest edge)");
  app->add_option("--tol-inc", o.tol_inc, "sweep increment tolerance (default 1e-9 * max(1, |f|_2))");
  app->add_option("--max-iter", o.max_iter, "iteration cap");
  app->add_option("--method", o.method, "auto (exact in 1D), dp or dykstra")
      ->check(CLI::IsMember({"auto", "dp", "dykstra"}))
      ->capture_default_str();
}

class Runner {
 public:
  explicit Runner(Options& o) : o_(o) {}

  int project() {
    auto f = datum();
    Solved s = solve(f.get());
    json extra = {{"certificate", s.certificate}};
    const std::string prov = provenance(f.get(), s.iterations, s.converged);
    write_field(s.u.get(), "u", prov);
    write_field(f.get(), "f", prov);
    if (s.datum) write_field(s.datum.get(), "datum", prov);
    json cert = s.certificate;
    cert["provenance"] = json::parse(prov);
    write_json("certificate.json", cert);
    return s.converged ? kExitOk : kExitNotConverged;
  }

  int plap_sweep() {
    auto f = datum();
    std::vector<double> ps = o_.p > 0 ? std::vector<double>{o_.p} : parse_list(o_.ps);
    if (ps.empty()) throw UsageError("--ps is empty");
    Solved ref = solve(f.get());
    if (!ref.converged) throw LibraryError(LIPFIT_MAX_ITER_EXCEEDED, "reference projection did not converge");
    lipfit_plap_options po{o_.tol, o_.max_iter};
    json prov = base_provenance(f.get());
    prov["tolerances"]["plap_tol"] = o_.tol > 0 ? json(o_.tol) : json("default");
    prov["ps"] = ps;
    prov["reference_iterations"] = ref.iterations;
    char* csv = nullptr;
    const bool converged = check(lipfit_p_sweep(f.get(), ps.data(), ps.size(), ref.u.get(), &po,
                                                 prov.dump().c_str(), &csv));
    write_text("sweep.csv", take(csv));
    return converged ? kExitOk : kExitNotConverged;
  }

  int envelope() {
    auto f = datum();
    lipfit_field* up = nullptr;
    lipfit_field* lo = nullptr;
    check(lipfit_upper_envelope(f.get(), &up));
    FieldHandle upper(up);
    check(lipfit_lower_envelope(f.get(), &lo));
    FieldHandle lower(lo);
    const std::string prov = provenance(f.get(), 0, true);
    write_field(upper.get(), "upper", prov);
    write_field(lower.get(), "lower", prov);
    write_field(f.get(), "f", prov);
    return kExitOk;
  }

  int verify() {
    auto f = datum();
    FieldHandle u;
    long iterations = 0;
    bool converged = true;
    if (!o_.candidate.empty()) {
      lipfit_field* raw = nullptr;
      check(lipfit_field_load(o_.candidate.c_str(), &raw));
      u.reset(raw);
    } else {
      Solved s = solve(f.get());
      u = std::move(s.u);
      iterations = s.iterations;
      converged = s.converged;
    }
    write_verification(u.get(), f.get(), provenance(f.get(), iterations, converged), json());
    return converged ? kExitOk : kExitNotConverged;
  }

  int sbv1d() {
    if (o_.kase.empty() && o_.input.empty()) o_.kase = "1";
    auto f = datum();
    lipfit_field* v = nullptr;
    char* out = nullptr;
    check(lipfit_sbv1d(f.get(), o_.rexp, o_.penalty, &v, &out));
    FieldHandle vh(v);
    json jumps = json::parse(take(out));
    json prov = base_provenance(f.get());
    prov["rexp"] = o_.rexp;
    prov["penalty"] = o_.penalty;
    const std::string p = prov.dump();
    jumps["provenance"] = prov;
    write_json("jumps.json", jumps);
    write_field(vh.get(), "v", p);
    return kExitOk;
  }

  int examples() {
    if (o_.kase.empty()) throw UsageError("examples needs --case");
    if (!o_.input.empty()) throw UsageError("examples uses builtin data only");
    auto f = datum();
    Solved s = solve(f.get());
    const std::string prov = provenance(f.get(), s.iterations, s.converged);
    write_field(s.u.get(), "u", prov);
    write_field(f.get(), "f", prov);
    write_verification(s.u.get(), f.get(), prov, golden(s.u.get()));
    return s.converged ? kExitOk : kExitNotConverged;
  }

 private:
  struct Solved {
    FieldHandle u;
    FieldHandle datum;
    json certificate;
    long iterations = 0;
    bool converged = true;
  };

  std::string case_name() const {
    std::string c = o_.kase;
    if (c.rfind("case", 0) == 0) c = c.substr(4);
    return c;
  }

  FieldHandle datum() {
    if (!o_.kase.empty() && !o_.input.empty()) throw UsageError("--case and --input are exclusive");
    if (o_.kase.empty() && o_.input.empty()) throw UsageError("a datum is required: --case or --input");
    lipfit_field* raw = nullptr;
    if (!o_.input.empty()) {
      check(lipfit_field_load(o_.input.c_str(), &raw));
    } else {
      GridHandle g = make_grid();
      const std::string c = case_name();
      const std::string name = c == "radial" ? "radial" : "case" + c;
      check(lipfit_field_builtin(g.get(), name.c_str(), o_.k, o_.r0, &raw));
    }
    FieldHandle f(raw);
    GridHandle g = grid_of(f.get());
    dim_ = lipfit_grid_dim(g.get());
    if (dim_ == 2 && o_.format == "csv") throw UsageError("2D fields are written as json");
    return f;
  }

  GridHandle make_grid() {
    std::string mask = o_.mask;
    if (mask.empty()) mask = case_name() == "radial" ? "disk" : "line";
    lipfit_grid* raw = nullptr;
    if (mask == "line") {
      if (case_name() == "radial") throw UsageError("the radial datum needs a 2D mask");
      std::vector<double> e = o_.extent.empty() ? std::vector<double>{-1, 1} : parse_list(o_.extent);
      if (e.size() != 2) throw UsageError("--extent takes lo,hi in 1D");
      check(lipfit_grid_line(e[0], e[1], o_.n > 0 ? o_.n : 401, &raw));
      return GridHandle(raw);
    }
    std::vector<double> e = o_.extent.empty() ? std::vector<double>{-1, 1, -1, 1} : parse_list(o_.extent);
    if (e.size() == 2) e = {e[0], e[1], e[0], e[1]};
    if (e.size() != 4) throw UsageError("--extent takes lo,hi or xlo,xhi,ylo,yhi in 2D");
    const int n = o_.n > 0 ? o_.n : 81;
    lipfit_mask kind = mask == "disk" ? LIPFIT_MASK_DISK : mask == "lshape" ? LIPFIT_MASK_LSHAPE : LIPFIT_MASK_FULL;
    const double cx = 0.5 * (e[0] + e[1]);
    const double cy = 0.5 * (e[2] + e[3]);
    const double radius = 0.5 * std::min(e[1] - e[0], e[3] - e[2]);
    check(lipfit_grid_plane(e[0], e[1], e[2], e[3], n, n, kind, cx, cy, radius, o_.stencil, &raw));
    return GridHandle(raw);
  }

  Solved solve(const lipfit_field* f) {
    Solved s;
    std::string method = o_.method;
    if (method == "auto") method = dim_ == 1 && !o_.dirichlet ? "dp" : "dykstra";
    if (method == "dp" && dim_ != 1) throw UsageError("--method dp needs a 1D datum");
    if (method == "dp" && o_.dirichlet) throw UsageError("--dirichlet needs --method dykstra");
    lipfit_field* u = nullptr;
    char* cert = nullptr;
    if (method == "dp") {
      check(lipfit_project_1d(f, 1.0, &u));
      s.u.reset(u);
      check(lipfit_kkt_residual(u, f, o_.tol_feas, &cert));
      s.certificate = json::parse(take(cert));
      s.certificate["method"] = "dp";
    } else {
      lipfit_project_options po{o_.tol_feas, o_.tol_inc, o_.max_iter};
      if (o_.dirichlet) {
        lipfit_field* d = nullptr;
        s.converged = check(lipfit_project_dirichlet(f, &po, &u, &d, &cert));
        s.datum.reset(d);
      } else {
        s.converged = check(lipfit_project_graph(f, &po, &u, &cert));
      }
      s.u.reset(u);
      s.certificate = json::parse(take(cert));
      s.certificate["method"] = o_.dirichlet ? "dykstra-dirichlet" : "dykstra";
    }
    s.iterations = s.certificate.value("iters", 0L);
    return s;
  }

  json base_provenance(const lipfit_field* f) const {
    GridHandle g = grid_of(f);
    char* desc = nullptr;
    check(lipfit_grid_describe(g.get(), &desc));
    auto tol = [](double v) { return v > 0 ? json(v) : json("default"); };
    json prov = {{"command", o_.command_line},
                 {"grid", take(desc)},
                 {"library", lipfit_version()},
                 {"tolerances",
                  {{"tol_feas", tol(o_.tol_feas)},
                   {"tol_inc", tol(o_.tol_inc)},
                   {"max_iter", o_.max_iter >= 0 ? json(o_.max_iter) : json("default")},
                   {"tau", tol(o_.tau)}}}};
    if (!o_.input.empty()) prov["input"] = o_.input;
    return prov;
  }

  std::string provenance(const lipfit_field* f, long iterations, bool converged) const {
    json prov = base_provenance(f);
    prov["iterations"] = iterations;
    prov["converged"] = converged;
    return prov.dump();
  }

  void write_verification(const lipfit_field* u, const lipfit_field* f, const std::string& prov, const json& extra) {
    char* regions = nullptr;
    char* residuals = nullptr;
    check(lipfit_verify(u, f, o_.tau, o_.slack, &regions, &residuals));
    json r = json::parse(take(regions));
    json res = json::parse(take(residuals));
    r["provenance"] = json::parse(prov);
    res["provenance"] = json::parse(prov);
    if (!extra.is_null()) res["golden"] = extra;
    write_json("regions.json", r);
    write_json("residuals.json", res);
  }

  // Closed forms for the one-dimensional worked examples.
  json golden(const lipfit_field* u) const {
    const std::string c = case_name();
    if (c == "radial") return json();
    GridHandle g = grid_of(u);
    const std::size_t n = lipfit_grid_node_count(g.get());
    std::vector<double> x(n);
    check(lipfit_grid_coords(g.get(), x.data(), nullptr));
    const std::vector<double> v = values_of(u);
    const double h = lipfit_grid_spacing(g.get(), 0);
    json out = {{"h", h}};
    if (c == "1" || c == "2") {
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ax = std::abs(x[i]);
        const double want = c == "2" ? ax + 0.5 : std::min(std::max(o_.r0 + 0.5 * o_.k - ax, 0.0), o_.k);
        err = std::max(err, std::abs(v[i] - want));
      }
      out["formula"] = c == "2" ? "|x| + 1/2" : "min{(r + k/2 - |x|)+, k}";
      out["linf_error"] = err;
      return out;
    }
    // case 3: value at the origin and the first node right of it where u meets f
    std::size_t mid = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(x[i]) < std::abs(x[mid])) mid = i;
    double kink = x[n - 1];
    for (std::size_t i = mid; i < n; ++i)
      if (std::abs(v[i] - std::sqrt(std::abs(x[i]))) <= h) {
        kink = x[i];
        break;
      }
    out["u0"] = v[mid];
    out["u0_expected"] = 2.0 / 9.0;
    out["kink"] = kink;
    out["kink_expected"] = 4.0 / 9.0;
    return out;
  }

  std::string field_path(const std::string& stem) const {
    const std::string fmt = o_.format.empty() ? (dim_ == 2 ? "json" : "csv") : o_.format;
    return (fs::path(o_.out) / (stem + "." + fmt)).string();
  }

  void write_field(const lipfit_field* f, const std::string& stem, const std::string& prov) {
    const std::string path = field_path(stem);
    const lipfit_format fmt = path.size() > 5 && path.substr(path.size() - 5) == ".json" ? LIPFIT_JSON : LIPFIT_CSV;
    check(lipfit_field_save(f, path.c_str(), fmt, prov.c_str(), nullptr));
  }

  void write_json(const std::string& name, const json& doc) { write_text(name, doc.dump(2) + "\n"); }

  void write_text(const std::string& name, const std::string& text) {
    const fs::path path = fs::path(o_.out) / name;
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw LibraryError(LIPFIT_IO, "cannot write " + path.string());
  }

  Options& o_;
  int dim_ = 1;
};

// argv joined by spaces, without the --out value: artifacts written to
// different directories carry the same header.
std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz projections, p-Laplacian limits and free-discontinuity fits on grids"};
  app.require_subcommand(1);
  Options o;

  auto* project = app.add_subcommand("project", "project a datum onto the 1-Lipschitz class");
  add_datum_flags(project, o);
  add_projection_flags(project, o);
  project->add_flag("--dirichlet", o.dirichlet, "zero boundary trace variant");
  add_output_flags(project, o);

  auto* sweep = app.add_subcommand("plap-sweep", "finite-p minimisers against the projection");
  add_datum_flags(sweep, o);
  add_projection_flags(sweep, o);
  sweep->add_option("--ps", o.ps, "comma-separated exponents")->capture_default_str();
  sweep->add_option("--p", o.p, "single exponent (overrides --ps)");
  sweep->add_option("--tol", o.tol, "gradient tolerance for each p (default 1e-8 * (1 + |f|_2))");
  add_output_flags(sweep, o);

  auto* envelope = app.add_subcommand("envelope", "upper and lower 1-Lipschitz envelopes");
  add_datum_flags(envelope, o);
  add_output_flags(envelope, o);

  auto* verify = app.add_subcommand("verify", "region, residual and representation checks");
  add_datum_flags(verify, o);
  add_projection_flags(verify, o);
  verify->add_option("--u", o.candidate, "candidate field (default: project the datum)");
  verify->add_option("--tau", o.tau, "contact threshold (default max(1e-6, h))");
  verify->add_option("--slack", o.slack, "boundary inequality slack (default 3h)");
  add_output_flags(verify, o);

  auto* sbv = app.add_subcommand("sbv1d", "1D fit with jumps");
  add_datum_flags(sbv, o);
  sbv->add_option("--rexp", o.rexp, "fidelity exponent")->check(CLI::IsMember({1, 2}))->capture_default_str();
  sbv->add_option("--penalty", o.penalty, "cost per jump")->check(CLI::PositiveNumber)->capture_default_str();
  add_output_flags(sbv, o);

  auto* examples = app.add_subcommand("examples", "worked examples with closed-form comparison");
  add_datum_flags(examples, o);
  add_projection_flags(examples, o);
  examples->add_option("--tau", o.tau, "contact threshold (default max(1e-6, h))");
  examples->add_option("--slack", o.slack, "boundary inequality slack (default 3h)");
  add_output_flags(examples, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kExitFailure;
  }

  o.command_line = command_line(argc, argv);
  Runner run(o);
  try {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw LibraryError(LIPFIT_IO, "cannot create " + o.out + ": " + ec.message());
    int code = kExitOk;
    if (project->parsed()) code = run.project();
    else if (sweep->parsed()) code = run.plap_sweep();
    else if (envelope->parsed()) code = run.envelope();
    else if (verify->parsed()) code = run.verify();
    else if (sbv->parsed()) code = run.sbv1d();
    else if (examples->parsed()) code = run.examples();
    if (code == kExitNotConverged) std::cerr << "warning: solver did not converge; artifacts written and flagged\n";
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n";
    for (auto* sub : app.get_subcommands())
      if (sub->parsed()) std::cerr << sub->help();
    return kExitFailure;
  } catch (const LibraryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.status == LIPFIT_MAX_ITER_EXCEEDED ? kExitNotConverged : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
