#include "lipfit/lipfit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "lipfit/datasets.hpp"
#include "lipfit/envelope.hpp"
#include "lipfit/error.hpp"
#include "lipfit/field_io.hpp"
#include "lipfit/lip1d.hpp"
#include "lipfit/metric.hpp"
#include "lipfit/plap.hpp"
#include "lipfit/projector.hpp"
#include "lipfit/sbv1d.hpp"
#include "lipfit/viscosity.hpp"

struct lipfit_grid {
  lipfit::GridPtr ptr;
};

struct lipfit_field {
  lipfit::ScalarField value;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

template <class Body>
lipfit_status guarded(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const lipfit::Error& e) {
    last_error = e.what();
    return static_cast<lipfit_status>(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("Parse: ") + e.what();
    return LIPFIT_PARSE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LIPFIT_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return LIPFIT_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) lipfit::fail(lipfit::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lipfit_field* wrap(lipfit::ScalarField f) { return new lipfit_field{std::move(f)}; }

lipfit::ProjectOptions project_options(const lipfit_project_options* o) {
  lipfit::ProjectOptions out;
  if (o) {
    if (o->tol_feas > 0) out.tol_feas = o->tol_feas;
    if (o->tol_inc > 0) out.tol_inc = o->tol_inc;
    if (o->max_iter >= 0) out.max_iter = o->max_iter;
  }
  return out;
}

lipfit::MinimizeOptions plap_options(const lipfit_plap_options* o) {
  lipfit::MinimizeOptions out;
  if (o) {
    if (o->tol > 0) out.tol = o->tol;
    if (o->max_iter >= 0) out.max_iter = o->max_iter;
  }
  return out;
}

lipfit::Stencil stencil_of(int s) {
  if (s == 0 || s == 8) return lipfit::Stencil::Eight;
  if (s == 16) return lipfit::Stencil::Sixteen;
  lipfit::fail(lipfit::ErrorCode::InvalidArgument, "stencil must be 8 or 16");
}

}  // namespace

extern "C" {

const char* lipfit_version(void) { return "0.1.0"; }

const char* lipfit_status_name(lipfit_status status) {
  if (status == LIPFIT_OK) return "Ok";
  if (status == LIPFIT_INTERNAL) return "Internal";
  if (status >= LIPFIT_INVALID_ARGUMENT && status <= LIPFIT_PARSE)
    return lipfit::to_string(static_cast<lipfit::ErrorCode>(status));
  return "Unknown";
}

const char* lipfit_last_error(void) { return last_error.c_str(); }

void lipfit_string_free(char* s) { std::free(s); }

lipfit_status lipfit_grid_line(double lo, double hi, int n, lipfit_grid** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lipfit_grid{lipfit::Grid::line(lo, hi, n)};
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_grid_plane(double xlo, double xhi, double ylo, double yhi, int nx, int ny, lipfit_mask mask,
                                double cx, double cy, double radius, int stencil, lipfit_grid** out) {
  return guarded([&] {
    require(out, "out");
    lipfit::MaskSpec spec;
    switch (mask) {
      case LIPFIT_MASK_FULL: spec = lipfit::MaskSpec::full(); break;
      case LIPFIT_MASK_DISK: spec = lipfit::MaskSpec::disk({cx, cy}, radius); break;
      case LIPFIT_MASK_LSHAPE: spec = lipfit::MaskSpec::lshape(); break;
      default: lipfit::fail(lipfit::ErrorCode::InvalidArgument, "unknown mask");
    }
    *out = new lipfit_grid{lipfit::Grid::plane({xlo, xhi}, {ylo, yhi}, nx, ny, spec, stencil_of(stencil))};
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_grid_bitmap(double xlo, double xhi, double ylo, double yhi, int nx, int ny,
                                 const unsigned char* bitmap, int stencil, lipfit_grid** out) {
  return guarded([&] {
    require(out, "out");
    require(bitmap, "bitmap");
    if (nx <= 0 || ny <= 0) lipfit::fail(lipfit::ErrorCode::InvalidArgument, "bad lattice size");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bitmap[i] ? 1 : 0;
    *out = new lipfit_grid{lipfit::Grid::plane({xlo, xhi}, {ylo, yhi}, nx, ny,
                                               lipfit::MaskSpec::from_bitmap(std::move(bits)), stencil_of(stencil))};
    return LIPFIT_OK;
  });
}

void lipfit_grid_free(lipfit_grid* grid) { delete grid; }

int lipfit_grid_dim(const lipfit_grid* grid) { return grid ? grid->ptr->dim() : 0; }

size_t lipfit_grid_node_count(const lipfit_grid* grid) { return grid ? grid->ptr->node_count() : 0; }

size_t lipfit_grid_edge_count(const lipfit_grid* grid) { return grid ? grid->ptr->edges().size() : 0; }

double lipfit_grid_spacing(const lipfit_grid* grid, int axis) {
  if (!grid || axis < 0 || axis >= grid->ptr->dim()) return 0.0;
  return grid->ptr->spacing(axis);
}

lipfit_status lipfit_grid_coords(const lipfit_grid* grid, double* x, double* y) {
  return guarded([&] {
    require(grid, "grid");
    require(x, "x");
    for (lipfit::NodeId v = 0; v < grid->ptr->node_count(); ++v) {
      const auto p = grid->ptr->coord(v);
      x[v] = p.x;
      if (y) y[v] = p.y;
    }
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_grid_describe(const lipfit_grid* grid, char** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    *out = copy_string(grid->ptr->describe());
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_create(const lipfit_grid* grid, const double* values, size_t n, lipfit_field** out) {
  return guarded([&] {
    require(grid, "grid");
    require(values, "values");
    require(out, "out");
    *out = wrap(lipfit::ScalarField(grid->ptr, std::vector<double>(values, values + n)));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_builtin(const lipfit_grid* grid, const char* name, double k, double r,
                                   lipfit_field** out) {
  return guarded([&] {
    require(grid, "grid");
    require(name, "name");
    require(out, "out");
    namespace ds = lipfit::datasets;
    const std::string which = name;
    ds::Rule rule;
    if (which == "case1")
      rule = ds::plateau(k, r);
    else if (which == "case2")
      rule = ds::double_slope();
    else if (which == "case3")
      rule = ds::square_root();
    else if (which == "radial")
      rule = ds::radial_plateau(k, r);
    else if (which == "zero")
      rule = [](lipfit::Point) { return 0.0; };
    else
      lipfit::fail(lipfit::ErrorCode::InvalidArgument, "unknown builtin datum '" + which + "'");
    *out = wrap(lipfit::ScalarField::sample(grid->ptr, rule));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_load(const char* path, lipfit_field** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(lipfit::load_field(path));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_save(const lipfit_field* field, const char* path, lipfit_format format,
                                const char* provenance, const char* extra_json) {
  return guarded([&] {
    require(field, "field");
    require(path, "path");
    const json extra = extra_json ? json::parse(extra_json) : json::object();
    lipfit::save_field(path, field->value, format == LIPFIT_JSON ? lipfit::FieldFormat::Json : lipfit::FieldFormat::Csv,
                       provenance ? provenance : "", extra);
    return LIPFIT_OK;
  });
}

void lipfit_field_free(lipfit_field* field) { delete field; }

size_t lipfit_field_size(const lipfit_field* field) { return field ? field->value.size() : 0; }

lipfit_status lipfit_field_values(const lipfit_field* field, double* out, size_t n) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    if (n != field->value.size()) lipfit::fail(lipfit::ErrorCode::InvalidArgument, "buffer size mismatch");
    std::copy(field->value.values().begin(), field->value.values().end(), out);
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_grid(const lipfit_field* field, lipfit_grid** out) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    *out = new lipfit_grid{field->value.grid_ptr()};
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_field_stats(const lipfit_field* field, char** out) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    const auto& f = field->value;
    const json j = {{"l1", f.l1_norm()},     {"l2", f.l2_norm()},          {"linf", f.linf_norm()},
                    {"mean", f.mean()},      {"integral", f.integral()}};
    *out = copy_string(j.dump());
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_geodesic_distance(const lipfit_grid* grid, const size_t* sources, size_t count,
                                       lipfit_field** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    if (count > 0) require(sources, "sources");
    std::vector<lipfit::NodeId> ids;
    for (size_t i = 0; i < count; ++i) {
      if (sources[i] >= grid->ptr->node_count())
        lipfit::fail(lipfit::ErrorCode::UnmaskedSource, "source " + std::to_string(sources[i]) + " out of range");
      ids.push_back(static_cast<lipfit::NodeId>(sources[i]));
    }
    *out = wrap(lipfit::geodesic_distance(grid->ptr, ids).distance);
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_boundary_distance(const lipfit_grid* grid, lipfit_field** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    *out = wrap(lipfit::boundary_distance(grid->ptr));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_project_1d(const lipfit_field* f, double lipschitz, lipfit_field** u) {
  return guarded([&] {
    require(f, "f");
    require(u, "u");
    *u = wrap(lipfit::project_lip_1d(f->value, lipschitz));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_project_graph(const lipfit_field* f, const lipfit_project_options* options, lipfit_field** u,
                                   char** certificate) {
  return guarded([&] {
    require(f, "f");
    require(u, "u");
    auto p = lipfit::project_lip_graph(f->value, project_options(options));
    if (certificate) *certificate = copy_string(lipfit::to_json(p.certificate).dump());
    const bool converged = p.certificate.converged;
    *u = wrap(std::move(p.u));
    if (!converged) {
      last_error = "MaxIterExceeded: projection did not reach tolerance";
      return LIPFIT_MAX_ITER_EXCEEDED;
    }
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_project_dirichlet(const lipfit_field* f, const lipfit_project_options* options,
                                       lipfit_field** u, lipfit_field** datum, char** report) {
  return guarded([&] {
    require(f, "f");
    require(u, "u");
    auto p = lipfit::project_lip_dirichlet(f->value, project_options(options));
    if (report) {
      json j = lipfit::to_json(p.certificate);
      j["boundary_trace"] = p.boundary_trace;
      *report = copy_string(j.dump());
    }
    const bool converged = p.certificate.converged;
    if (datum) *datum = wrap(std::move(p.datum));
    *u = wrap(std::move(p.u));
    if (!converged) {
      last_error = "MaxIterExceeded: projection did not reach tolerance";
      return LIPFIT_MAX_ITER_EXCEEDED;
    }
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_kkt_residual(const lipfit_field* u, const lipfit_field* f, double tol_feas, char** certificate) {
  return guarded([&] {
    require(u, "u");
    require(f, "f");
    require(certificate, "certificate");
    auto c = lipfit::kkt_residual(u->value, f->value, tol_feas > 0 ? tol_feas : 1e-8);
    *certificate = copy_string(lipfit::to_json(c).dump());
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_segment_cost(const lipfit_field* f, size_t i, size_t j, int r, double* out) {
  return guarded([&] {
    require(f, "f");
    require(out, "out");
    *out = lipfit::segment_cost(f->value, i, j, r);
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_energy_p(const lipfit_field* v, const lipfit_field* f, double p, double* out) {
  return guarded([&] {
    require(v, "v");
    require(f, "f");
    require(out, "out");
    *out = lipfit::energy_p(v->value, f->value, p);
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_minimize_p(const lipfit_field* f, double p, const lipfit_plap_options* options,
                                const lipfit_field* warm_start, lipfit_field** u, char** report) {
  return guarded([&] {
    require(f, "f");
    require(u, "u");
    auto m = lipfit::minimize_p(f->value, p, plap_options(options), warm_start ? &warm_start->value : nullptr);
    if (report) {
      const json j = {{"p", p},
                      {"iterations", m.iterations},
                      {"energy", m.energy},
                      {"grad_norm", m.grad_norm},
                      {"converged", m.converged}};
      *report = copy_string(j.dump());
    }
    const bool converged = m.converged;
    *u = wrap(std::move(m.u));
    if (!converged) {
      last_error = "MaxIterExceeded: p-minimisation did not reach tolerance";
      return LIPFIT_MAX_ITER_EXCEEDED;
    }
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_p_sweep(const lipfit_field* f, const double* ps, size_t count, const lipfit_field* reference,
                             const lipfit_plap_options* options, const char* provenance, char** csv) {
  return guarded([&] {
    require(f, "f");
    require(ps, "ps");
    require(reference, "reference");
    require(csv, "csv");
    const auto report = lipfit::p_sweep(f->value, std::vector<double>(ps, ps + count), reference->value,
                                        plap_options(options));
    std::ostringstream os;
    lipfit::write_csv(os, report, provenance ? provenance : "");
    *csv = copy_string(os.str());
    if (!report.converged()) {
      last_error = "MaxIterExceeded: some p did not reach tolerance";
      return LIPFIT_MAX_ITER_EXCEEDED;
    }
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_upper_envelope(const lipfit_field* f, lipfit_field** out) {
  return guarded([&] {
    require(f, "f");
    require(out, "out");
    *out = wrap(lipfit::upper_envelope(f->value));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_lower_envelope(const lipfit_field* f, lipfit_field** out) {
  return guarded([&] {
    require(f, "f");
    require(out, "out");
    *out = wrap(lipfit::lower_envelope(f->value));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_cone_check(const lipfit_field* u, const lipfit_field* f, int sign, double tau, double tol_feas,
                                char** out) {
  return guarded([&] {
    require(u, "u");
    require(f, "f");
    require(out, "out");
    const auto c = lipfit::cone_representation_error(u->value, f->value, sign, tau, tol_feas > 0 ? tol_feas : 1e-8);
    const json j = {{"max_error", c.max_error}, {"region_size", c.region_size}, {"boundary_size", c.boundary_size}};
    *out = copy_string(j.dump());
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_verify(const lipfit_field* u, const lipfit_field* f, double tau, double slack, char** regions,
                            char** residuals) {
  return guarded([&] {
    require(u, "u");
    require(f, "f");
    const auto& uv = u->value;
    const lipfit::Grid& g = uv.grid();
    const double t = tau > 0 ? tau : lipfit::default_tau(g);
    const auto report = lipfit::regions(uv, f->value, t);
    if (regions) *regions = copy_string(lipfit::to_json(report, g).dump());
    if (!residuals) return LIPFIT_OK;

    const auto eik = lipfit::eikonal_residual(uv, report);
    const auto comb = lipfit::combined_residual(uv, report);
    double excess = 0.0;
    for (lipfit::NodeId v = 0; v < uv.size(); ++v)
      if (comb.counted[v]) excess = std::max(excess, comb.value[v] - eik.value[v]);
    const auto bc = lipfit::boundary_condition_check(uv, report, slack);
    const auto slopes = lipfit::double_inequality_check(uv, 1e-6);
    json cone = json::object();
    const double feas = std::max(0.0, lipfit::max_edge_violation(uv));
    for (int sign : {1, -1}) {
      const auto c = lipfit::cone_representation_error(uv, f->value, sign, t, std::max(1e-8, feas));
      cone[sign > 0 ? "plus" : "minus"] = {
          {"max_error", c.max_error}, {"region_size", c.region_size}, {"boundary_size", c.boundary_size}};
    }
    const json j = {{"h", g.max_spacing()},
                    {"tau", t},
                    {"eikonal", {{"plus", lipfit::to_json(eik.plus)}, {"minus", lipfit::to_json(eik.minus)}}},
                    {"combined", {{"plus", lipfit::to_json(comb.plus)}, {"minus", lipfit::to_json(comb.minus)}}},
                    {"combined_minus_eikonal", excess},
                    {"boundary", lipfit::to_json(bc, g)},
                    {"slopes", {{"max_slope", slopes.max_slope}, {"pass", slopes.pass}}},
                    {"cone", cone}};
    *residuals = copy_string(j.dump());
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_sbv1d(const lipfit_field* f, int r, double penalty, lipfit_field** v, char** out) {
  return guarded([&] {
    require(f, "f");
    auto s = lipfit::minimize_sbv_1d(f->value, r, penalty);
    if (out) *out = copy_string(lipfit::to_json(s).dump());
    if (v) *v = wrap(std::move(s.v));
    return LIPFIT_OK;
  });
}

lipfit_status lipfit_radial_comparison(double k, double r, double radius, int n, char** out) {
  return guarded([&] {
    require(out, "out");
    const auto c = lipfit::radial_jump_comparison(k, r, radius, n);
    const json j = {{"k", k},
                    {"r", r},
                    {"R", radius},
                    {"jump_energy", c.jump_energy},
                    {"continuous_energy", c.continuous_energy},
                    {"jump_preferred", c.jump_preferred()}};
    *out = copy_string(j.dump());
    return LIPFIT_OK;
  });
}

}  // extern "C"
