#ifndef PYRORISK_H
#define PYRORISK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PyroStatus {
  PYRO_STATUS_OK = 0,
  PYRO_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside its documented domain.
   */
  PYRO_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The weight stream is malformed; see [`pyro_last_cnnw_code`].
   */
  PYRO_STATUS_BAD_WEIGHTS = 3,
  /**
   * Input or output buffer length does not match the network.
   */
  PYRO_STATUS_SHAPE_MISMATCH = 4,
  /**
   * Output buffer too small for the error message.
   */
  PYRO_STATUS_BUFFER_TOO_SMALL = 5,
  PYRO_STATUS_INTERNAL = 99,
} PyroStatus;

/**
 * Opaque compiled network.
 */
typedef struct PyroNetwork PyroNetwork;

typedef struct PyroFwiState {
  double ffmc;
  double dmc;
  double dc;
} PyroFwiState;

typedef struct PyroWeather {
  int32_t year;
  uint32_t month;
  uint32_t day;
  double temp_c;
  double rh_pct;
  double wind_kmh;
  double rain_mm;
} PyroWeather;

typedef struct PyroFwiReport {
  double ffmc;
  double dmc;
  double dc;
  double isi;
  double bui;
  double fwi;
} PyroFwiReport;

typedef struct PyroFusionConfig {
  double thresholds[5];
  double gamma;
  double tau;
} PyroFusionConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message (NUL-terminated) into `buf`. Writes the
 * required size, terminator included, to `needed` when it is non-null.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null with `len == 0`.
 */
enum PyroStatus pyro_last_error(char *buf, size_t len, size_t *needed);

/**
 * CNNW error code (1 to 7) behind the last [`PyroStatus::BadWeights`], or 0.
 */
uint32_t pyro_last_cnnw_code(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pyro_version(void);

/**
 * Parses CNNW bytes and compiles the network for `height × width ×
 * channels` inputs.
 *
 * # Safety
 * `bytes` must be valid for `len` bytes; `out` must be a valid pointer.
 */
enum PyroStatus pyro_network_load(const uint8_t *bytes,
                                  size_t len,
                                  uint32_t height,
                                  uint32_t width,
                                  uint32_t channels,
                                  struct PyroNetwork **out);

/**
 * # Safety
 * `net` must come from [`pyro_network_load`] and not be used afterwards.
 */
void pyro_network_free(struct PyroNetwork *net);

/**
 * # Safety
 * `net` must be a live handle; the out pointers must be valid.
 */
enum PyroStatus pyro_network_info(const struct PyroNetwork *net,
                                  uint32_t *num_classes,
                                  uint64_t *total_params,
                                  uint64_t *trainable_params);

/**
 * Runs one input (row, col, channel order, values in `[0, 1]`) and writes
 * the class probabilities and the burn probability.
 *
 * # Safety
 * `input` must hold `input_len` floats and `probs` `probs_len` floats;
 * `p_burn` may be null.
 */
enum PyroStatus pyro_network_forward(const struct PyroNetwork *net,
                                     const float *input,
                                     size_t input_len,
                                     float *probs,
                                     size_t probs_len,
                                     double *p_burn);

/**
 * Start-up moisture codes (85, 6, 15).
 */
struct PyroFwiState pyro_fwi_default_state(void);

/**
 * Advances the moisture codes by one day at `latitude`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum PyroStatus pyro_fwi_step(const struct PyroFwiState *state,
                              const struct PyroWeather *weather,
                              double latitude,
                              struct PyroFwiReport *out);

struct PyroFusionConfig pyro_fusion_default(void);

/**
 * Base danger class 0 to 5 for an FWI value.
 *
 * # Safety
 * `cfg` and `level` must be valid pointers.
 */
enum PyroStatus pyro_fwi_to_danger(double fwi, const struct PyroFusionConfig *cfg, uint8_t *level);

/**
 * `round(base · (1 − p_burn)^γ)` when `p_burn ≥ τ`, else `base`.
 *
 * # Safety
 * `cfg` and `level` must be valid pointers.
 */
enum PyroStatus pyro_fuse_binary(uint8_t base,
                                 double p_burn,
                                 const struct PyroFusionConfig *cfg,
                                 uint8_t *level);

/**
 * `round(base · (1 − severity/5))`.
 *
 * # Safety
 * `level` must be a valid pointer.
 */
enum PyroStatus pyro_fuse_severity(uint8_t base, uint8_t severity, uint8_t *level);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PYRORISK_H */
