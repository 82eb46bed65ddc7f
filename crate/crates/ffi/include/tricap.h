#ifndef TRICAP_H
#define TRICAP_H

/* Generated by cbindgen from the tricap-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TricapStatus {
  TRICAP_STATUS_OK = 0,
  TRICAP_STATUS_NULL_POINTER = 1,
  TRICAP_STATUS_INVALID_ARGUMENT = 2,
  TRICAP_STATUS_SPREADING = 3,
  TRICAP_STATUS_SOLVER_DIVERGED = 4,
  TRICAP_STATUS_NON_FINITE = 5,
  TRICAP_STATUS_TOO_FEW_POINTS = 6,
  TRICAP_STATUS_OUTSIDE_DOMAIN = 7,
  TRICAP_STATUS_IO = 8,
  TRICAP_STATUS_PARSE = 9,
  TRICAP_STATUS_BUFFER_TOO_SMALL = 10,
  TRICAP_STATUS_PANIC = 11,
  TRICAP_STATUS_NO_JUNCTION = 12,
} TricapStatus;

// Parsed experiment configuration.
typedef struct TricapConfig TricapConfig;

// Cahn–Hilliard relaxation of three phases on a rectangle without
// surfactant or flow.
typedef struct TricapPhaseField TricapPhaseField;

// Sampled profile `q(s)`.
typedef struct TricapProfile TricapProfile;

// Parameters of the one-dimensional junction problem: two segments
// `(-L, 0)`, `(0, L)` with capacities `1 / beta` and mobilities `m`, a
// linear ramp of the boundary value at `s = -L` from `ramp_t0` to
// `ramp_t1`, and a no-flux end at `s = L`.
typedef struct TricapJunctionParams {
  double half_length;
  double beta_left;
  double beta_right;
  double m_left;
  double m_right;
  size_t n;
  double dt;
  double ramp_t0;
  double ramp_t1;
  double q_bdry;
} TricapJunctionParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf`.
//
// # Safety
// `buf` must be valid for `len` bytes or null; `needed` null or writable.
enum TricapStatus tricap_last_error(char *buf, size_t len, size_t *needed);

// Equilibrium angles of phases 1, 2, 3 for tensions (1,2), (1,3), (2,3).
//
// # Safety
// `out` must point to three writable doubles.
enum TricapStatus tricap_young_angles(double sigma12, double sigma13, double sigma23, double *out);

// Fills `out` with the hexagon setting.
//
// # Safety
// `out` must be writable.
enum TricapStatus tricap_junction_default(struct TricapJunctionParams *out);

// Solves the junction problem up to `t_end`.
//
// # Safety
// `params` must be readable and `out` writable.
enum TricapStatus tricap_junction_solve(const struct TricapJunctionParams *params,
                                        double t_end,
                                        struct TricapProfile **out);

// Number of samples of a profile.
//
// # Safety
// `profile` must be a live handle and `len` writable.
enum TricapStatus tricap_profile_len(const struct TricapProfile *profile, size_t *len);

// Copies coordinates and values into arrays of `len` doubles each;
// either array may be null.
//
// # Safety
// `profile` must be live; non-null arrays must hold `len` doubles.
enum TricapStatus tricap_profile_copy(const struct TricapProfile *profile,
                                      double *s,
                                      double *q,
                                      size_t len);

// # Safety
// `profile` must come from [`tricap_junction_solve`] or be null.
void tricap_profile_free(struct TricapProfile *profile);

// Parses a configuration in the `key = value` format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum TricapStatus tricap_config_parse(const char *text, struct TricapConfig **out);

// Writes the resolved configuration, defaults included.
//
// # Safety
// See [`tricap_last_error`] for the buffer contract.
enum TricapStatus tricap_config_manifest(const struct TricapConfig *config,
                                         char *buf,
                                         size_t len,
                                         size_t *needed);

// Runs the configured experiment, writing artifacts to `output_dir`.
// Zero `max_steps` or `snapshot_every` means unlimited / none.
//
// # Safety
// `config` must be live and `output_dir` a NUL-terminated path.
enum TricapStatus tricap_run(const struct TricapConfig *config,
                             const char *output_dir,
                             size_t max_steps,
                             size_t snapshot_every);

// # Safety
// `config` must come from [`tricap_config_parse`] or be null.
void tricap_config_free(struct TricapConfig *config);

// Lens of phase 3 with radius `radius` centred at the origin of the box
// `[x0, x1] x [y0, y1]`, phase 1 above and phase 2 below. `tensions` holds
// (1,2), (1,3), (2,3); the grid spacing is `epsilon / 4`.
//
// # Safety
// `tensions` must hold three doubles and `out` be writable.
enum TricapStatus tricap_phase_field_new_lens(double x0,
                                              double x1,
                                              double y0,
                                              double y1,
                                              double radius,
                                              double epsilon,
                                              const double *tensions,
                                              struct TricapPhaseField **out);

// Advances `steps` time steps.
//
// # Safety
// `pf` must be a live handle.
enum TricapStatus tricap_phase_field_step(struct TricapPhaseField *pf, size_t steps);

// Grid size and current time.
//
// # Safety
// `pf` must be live; out-pointers may be null.
enum TricapStatus tricap_phase_field_info(const struct TricapPhaseField *pf,
                                          size_t *nx,
                                          size_t *ny,
                                          double *time);

// Copies phase `phase` (1, 2 or 3) in row-major order (x fastest).
//
// # Safety
// `pf` must be live and `out` hold `len` doubles.
enum TricapStatus tricap_phase_field_copy(const struct TricapPhaseField *pf,
                                          uint32_t phase,
                                          double *out,
                                          size_t len);

// Ginzburg–Landau energy of the current state.
//
// # Safety
// `pf` must be live and `energy` writable.
enum TricapStatus tricap_phase_field_energy(const struct TricapPhaseField *pf, double *energy);

// Junction angles by anchored and unanchored regression and the junction
// position, searching from `(hint_x, hint_y)`.
//
// # Safety
// `pf` must be live; `anchored`, `unanchored` hold three and `junction`
// two doubles (each may be null).
enum TricapStatus tricap_phase_field_angles(const struct TricapPhaseField *pf,
                                            double hint_x,
                                            double hint_y,
                                            double *anchored,
                                            double *unanchored,
                                            double *junction);

// # Safety
// `pf` must come from [`tricap_phase_field_new_lens`] or be null.
void tricap_phase_field_free(struct TricapPhaseField *pf);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRICAP_H */
