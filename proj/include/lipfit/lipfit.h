#ifndef LIPFIT_H
#define LIPFIT_H

#include <stddef.h>

#if defined(_WIN32)
#define LIPFIT_API __declspec(dllexport)
#else
#define LIPFIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values match the library's error codes. Functions returning
   LIPFIT_MAX_ITER_EXCEEDED still fill their outputs (last iterate). */
typedef enum lipfit_status {
  LIPFIT_OK = 0,
  LIPFIT_INVALID_ARGUMENT = 1,
  LIPFIT_DEGENERATE_EXTENT = 2,
  LIPFIT_DISCONNECTED_DOMAIN = 3,
  LIPFIT_NON_FINITE_SAMPLE = 4,
  LIPFIT_GRID_MISMATCH = 5,
  LIPFIT_EMPTY_SOURCE_SET = 6,
  LIPFIT_UNMASKED_SOURCE = 7,
  LIPFIT_INDEX_OUT_OF_RANGE = 8,
  LIPFIT_UNSUPPORTED_EXPONENT = 9,
  LIPFIT_NON_CONVEX_VALUE_FUNCTION = 10,
  LIPFIT_INFEASIBLE_INPUT = 11,
  LIPFIT_INFEASIBLE_SEGMENT = 12,
  LIPFIT_NON_FINITE_ENERGY = 13,
  LIPFIT_LINE_SEARCH_STALLED = 14,
  LIPFIT_MAX_ITER_EXCEEDED = 15,
  LIPFIT_IO = 16,
  LIPFIT_PARSE = 17,
  LIPFIT_INTERNAL = 99
} lipfit_status;

typedef struct lipfit_grid lipfit_grid;
typedef struct lipfit_field lipfit_field;

typedef enum lipfit_mask { LIPFIT_MASK_FULL = 0, LIPFIT_MASK_DISK = 1, LIPFIT_MASK_LSHAPE = 2 } lipfit_mask;
typedef enum lipfit_format { LIPFIT_CSV = 0, LIPFIT_JSON = 1 } lipfit_format;

typedef struct lipfit_project_options {
  double tol_feas; /* <= 0: default */
  double tol_inc;  /* <= 0: default */
  long max_iter;   /* < 0: default */
} lipfit_project_options;

typedef struct lipfit_plap_options {
  double tol;    /* <= 0: default */
  long max_iter; /* < 0: default */
} lipfit_plap_options;

LIPFIT_API const char* lipfit_version(void);
LIPFIT_API const char* lipfit_status_name(lipfit_status status);
/* Message of the last failure on the calling thread; "" after success. */
LIPFIT_API const char* lipfit_last_error(void);
/* Frees strings returned through char** outputs. */
LIPFIT_API void lipfit_string_free(char* s);

/* grids */
LIPFIT_API lipfit_status lipfit_grid_line(double lo, double hi, int n, lipfit_grid** out);
LIPFIT_API lipfit_status lipfit_grid_plane(double xlo, double xhi, double ylo, double yhi, int nx, int ny,
                                           lipfit_mask mask, double cx, double cy, double radius, int stencil,
                                           lipfit_grid** out);
/* bitmap: row-major nx*ny, nonzero = inside */
LIPFIT_API lipfit_status lipfit_grid_bitmap(double xlo, double xhi, double ylo, double yhi, int nx, int ny,
                                            const unsigned char* bitmap, int stencil, lipfit_grid** out);
LIPFIT_API void lipfit_grid_free(lipfit_grid* grid);
LIPFIT_API int lipfit_grid_dim(const lipfit_grid* grid);
LIPFIT_API size_t lipfit_grid_node_count(const lipfit_grid* grid);
LIPFIT_API size_t lipfit_grid_edge_count(const lipfit_grid* grid);
LIPFIT_API double lipfit_grid_spacing(const lipfit_grid* grid, int axis);
/* x and y receive node_count coordinates each; y may be NULL. */
LIPFIT_API lipfit_status lipfit_grid_coords(const lipfit_grid* grid, double* x, double* y);
LIPFIT_API lipfit_status lipfit_grid_describe(const lipfit_grid* grid, char** out);

/* fields */
LIPFIT_API lipfit_status lipfit_field_create(const lipfit_grid* grid, const double* values, size_t n,
                                             lipfit_field** out);
/* name: "case1" (k chi(-r,r)), "case2" (2|x|), "case3" (sqrt|x|),
   "radial" (k on the disk of radius r), "zero". */
LIPFIT_API lipfit_status lipfit_field_builtin(const lipfit_grid* grid, const char* name, double k, double r,
                                              lipfit_field** out);
LIPFIT_API lipfit_status lipfit_field_load(const char* path, lipfit_field** out);
/* provenance: JSON text or NULL; extra_json: object merged into JSON output or NULL */
LIPFIT_API lipfit_status lipfit_field_save(const lipfit_field* field, const char* path, lipfit_format format,
                                           const char* provenance, const char* extra_json);
LIPFIT_API void lipfit_field_free(lipfit_field* field);
LIPFIT_API size_t lipfit_field_size(const lipfit_field* field);
LIPFIT_API lipfit_status lipfit_field_values(const lipfit_field* field, double* out, size_t n);
LIPFIT_API lipfit_status lipfit_field_grid(const lipfit_field* field, lipfit_grid** out);
/* {"l1","l2","linf","mean","integral"} */
LIPFIT_API lipfit_status lipfit_field_stats(const lipfit_field* field, char** json);

/* metric */
LIPFIT_API lipfit_status lipfit_geodesic_distance(const lipfit_grid* grid, const size_t* sources, size_t count,
                                                  lipfit_field** out);
LIPFIT_API lipfit_status lipfit_boundary_distance(const lipfit_grid* grid, lipfit_field** out);

/* projections; certificate JSON {iters, feas, inc, kkt, slack, converged} */
LIPFIT_API lipfit_status lipfit_project_1d(const lipfit_field* f, double lipschitz, lipfit_field** u);
LIPFIT_API lipfit_status lipfit_project_graph(const lipfit_field* f, const lipfit_project_options* options,
                                              lipfit_field** u, char** certificate);
LIPFIT_API lipfit_status lipfit_project_dirichlet(const lipfit_field* f, const lipfit_project_options* options,
                                                  lipfit_field** u, lipfit_field** datum, char** report);
LIPFIT_API lipfit_status lipfit_kkt_residual(const lipfit_field* u, const lipfit_field* f, double tol_feas,
                                             char** certificate);
LIPFIT_API lipfit_status lipfit_segment_cost(const lipfit_field* f, size_t i, size_t j, int r, double* out);

/* finite p */
LIPFIT_API lipfit_status lipfit_energy_p(const lipfit_field* v, const lipfit_field* f, double p, double* out);
LIPFIT_API lipfit_status lipfit_minimize_p(const lipfit_field* f, double p, const lipfit_plap_options* options,
                                           const lipfit_field* warm_start, lipfit_field** u, char** report);
/* csv: one row per p; provenance may be NULL */
LIPFIT_API lipfit_status lipfit_p_sweep(const lipfit_field* f, const double* ps, size_t count,
                                        const lipfit_field* reference, const lipfit_plap_options* options,
                                        const char* provenance, char** csv);

/* envelopes and verification */
LIPFIT_API lipfit_status lipfit_upper_envelope(const lipfit_field* f, lipfit_field** out);
LIPFIT_API lipfit_status lipfit_lower_envelope(const lipfit_field* f, lipfit_field** out);
/* {"max_error","region_size","boundary_size"} */
LIPFIT_API lipfit_status lipfit_cone_check(const lipfit_field* u, const lipfit_field* f, int sign, double tau,
                                           double tol_feas, char** json);
/* tau <= 0 or slack <= 0 select defaults. Writes the region report and the
   residual tables (eikonal, combined, boundary, slope) as JSON. */
LIPFIT_API lipfit_status lipfit_verify(const lipfit_field* u, const lipfit_field* f, double tau, double slack,
                                       char** regions, char** residuals);

/* free discontinuity */
LIPFIT_API lipfit_status lipfit_sbv1d(const lipfit_field* f, int r, double penalty, lipfit_field** v,
                                      char** json);
LIPFIT_API lipfit_status lipfit_radial_comparison(double k, double r, double radius, int n, char** json);

#ifdef __cplusplus
}
#endif

#endif
