#ifndef FASHION_ABM_H
#define FASHION_ABM_H

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

// Result codes. Zero is success.
typedef enum FabmStatus {
  FABM_STATUS_OK = 0,
  FABM_STATUS_NULL_POINTER = 1,
  FABM_STATUS_INVALID_ARGUMENT = 2,
  FABM_STATUS_OUT_OF_RANGE = 3,
  FABM_STATUS_CONFIG = 4,
  FABM_STATUS_PARSE = 5,
  FABM_STATUS_IO = 6,
  FABM_STATUS_CSV = 7,
  FABM_STATUS_PANIC = 99,
} FabmStatus;

// Values accepted by `fabm_simulation_mean`.
typedef enum FabmTracked {
  FABM_TRACKED_ENV = 0,
  FABM_TRACKED_WCA = 1,
  FABM_TRACKED_KNOW = 2,
  FABM_TRACKED_TRUST = 3,
  FABM_TRACKED_PURCHASE_PROB = 4,
  FABM_TRACKED_GOV_SUSCEPTIBILITY = 5,
} FabmTracked;

// Opaque simulation handle.
typedef struct FabmSimulation FabmSimulation;

// One peer as seen by `fabm_peer_update`.
typedef struct FabmPeerTerm {
  double opinion;
  double behavior;
  double s_pp;
} FabmPeerTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on this thread.
const char *fabm_last_error(void);

// Library version as a static string.
const char *fabm_version(void);

// Purchase probability for nine attributes (sex, age, env, exp, wca,
// know, trust, access, freq) under the survey coefficients.
//
// # Safety
// `attributes` must point to 9 readable doubles.
enum FabmStatus fabm_purchase_probability(const double *attributes, double *out);

// Peer-pressure update of one opinion. `tau < 0` means non-polarized.
//
// # Safety
// `peers` must point to `count` readable terms (it may be null if `count` is 0).
enum FabmStatus fabm_peer_update(double self_opinion,
                                 double s_pp_self,
                                 const struct FabmPeerTerm *peers,
                                 size_t count,
                                 double tau,
                                 double *out);

// Capped social-media feedback for one opinion.
//
// # Safety
// `out` must be writable.
enum FabmStatus fabm_sm_feedback(double opinion, double s_sm, double beta, double *out);

// Damped move from `prior` toward `promoted`.
//
// # Safety
// `out` must be writable.
enum FabmStatus fabm_blend(double prior,
                           double promoted,
                           double susceptibility,
                           double gamma,
                           double *out);

// Opinion promoted by a campaign of stance `zeta`.
//
// # Safety
// `out` must be writable.
enum FabmStatus fabm_gov_feedback(double mean_opinion, double zeta, double *out);

// One tick of campaign fatigue.
//
// # Safety
// `out` must be writable.
enum FabmStatus fabm_fatigue_step(double s_gov, uint64_t tick, double fatigue_rate, double *out);

// Number of built-in presets.
size_t fabm_preset_count(void);

// Static name of preset `index`, or null when out of range.
const char *fabm_preset_name(size_t index);

// Number of grid cells in a preset.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum FabmStatus fabm_preset_cell_count(const char *name, size_t *out);

// Creates a simulation for one cell of a preset with the given seed.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum FabmStatus fabm_simulation_from_preset(const char *name,
                                            size_t cell,
                                            uint64_t seed,
                                            struct FabmSimulation **out);

// Creates a simulation for one cell of a config given as text. Relative
// population CSV paths resolve against the working directory.
//
// # Safety
// `config` must be a NUL-terminated string; `out` must be writable.
enum FabmStatus fabm_simulation_from_config(const char *config,
                                            size_t cell,
                                            struct FabmSimulation **out);

// Advances one tick. `advanced` (may be null) is set to false once the
// run has already reached its last tick.
//
// # Safety
// `sim` must be a live handle.
enum FabmStatus fabm_simulation_step(struct FabmSimulation *sim, bool *advanced);

// Runs all remaining ticks.
//
// # Safety
// `sim` must be a live handle.
enum FabmStatus fabm_simulation_run(struct FabmSimulation *sim);

// Ticks completed so far.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
enum FabmStatus fabm_simulation_tick(const struct FabmSimulation *sim, uint64_t *out);

// Number of agents.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
enum FabmStatus fabm_simulation_agent_count(const struct FabmSimulation *sim, size_t *out);

// Current population mean of `what`, a `FabmTracked` value.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
enum FabmStatus fabm_simulation_mean(const struct FabmSimulation *sim, uint32_t what, double *out);

// Writes the scenario's configured outputs for the state so far into
// `dir`, creating it if needed.
//
// # Safety
// `sim` must be a live handle; `dir` must be a NUL-terminated string.
enum FabmStatus fabm_simulation_write_outputs(const struct FabmSimulation *sim, const char *dir);

// Releases a handle. Null is ignored.
//
// # Safety
// `sim` must be null or a handle not yet freed.
void fabm_simulation_free(struct FabmSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FASHION_ABM_H */
