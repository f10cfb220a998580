#ifndef MQTE_H
#define MQTE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define MQTE_OK 0

#define MQTE_ERR 1

#define MQTE_ERR_BUDGET 2

/**
 * Eigendecomposition handle.
 */
typedef struct MqteEigensystem MqteEigensystem;

/**
 * Spin Hamiltonian handle.
 */
typedef struct MqteHamiltonian MqteHamiltonian;

/**
 * One measured time series handle.
 */
typedef struct MqteSignal MqteSignal;

/**
 * Cosine-transform spectrum handle.
 */
typedef struct MqteSpectrum MqteSpectrum;

/**
 * One detected spectral line. `significance` is NaN when the detection
 * ran with sigma = 0 (exact-signal mode).
 */
typedef struct MqtePeak {
  uintptr_t bin;
  double gap;
  double amplitude;
  double magnitude;
  double significance;
  double sigma_used;
} MqtePeak;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mqte_version(void);

/**
 * Message of the most recent failure on this thread. Valid until the
 * next failing call from the same thread.
 */
const char *mqte_last_error(void);

/**
 * Nearest-neighbor Heisenberg chain with a uniform transverse field.
 */
int32_t mqte_heisenberg_1d(uintptr_t sites, double j, double h, struct MqteHamiltonian **out);

/**
 * Heisenberg model on a rows x cols grid.
 */
int32_t mqte_heisenberg_2d(uintptr_t rows,
                           uintptr_t cols,
                           double j,
                           double h,
                           struct MqteHamiltonian **out);

void mqte_hamiltonian_free(struct MqteHamiltonian *h);

uintptr_t mqte_hamiltonian_qubits(const struct MqteHamiltonian *h);

/**
 * Full eigendecomposition; rejects systems above the dense cap.
 */
int32_t mqte_diagonalize(const struct MqteHamiltonian *h, struct MqteEigensystem **out);

void mqte_eigensystem_free(struct MqteEigensystem *eig);

uintptr_t mqte_eigensystem_dim(const struct MqteEigensystem *eig);

/**
 * Copy the ascending eigenvalues into `out[0..len]`; `len` must equal
 * the dimension.
 */
int32_t mqte_eigensystem_energies(const struct MqteEigensystem *eig, double *out, uintptr_t len);

/**
 * Measurement-probability series p(n) for n = 0..=n_points under exact
 * evolution, started from `reference` and monitored at `config`.
 * `shots` = 0 gives exact probabilities, otherwise sampled estimates
 * seeded by `seed`.
 */
int32_t mqte_exact_signal(const struct MqteEigensystem *eig,
                          const char *reference,
                          const char *config,
                          uintptr_t n_points,
                          double delta,
                          uint64_t shots,
                          uint64_t seed,
                          struct MqteSignal **out);

void mqte_signal_free(struct MqteSignal *signal);

/**
 * Number of stored points, n_points + 1.
 */
uintptr_t mqte_signal_len(const struct MqteSignal *signal);

/**
 * Copy the series values into `out[0..len]`; `len` must match.
 */
int32_t mqte_signal_values(const struct MqteSignal *signal, double *out, uintptr_t len);

/**
 * Real-even cosine transform of a signal.
 */
int32_t mqte_signal_spectrum(const struct MqteSignal *signal, struct MqteSpectrum **out);

void mqte_spectrum_free(struct MqteSpectrum *spectrum);

/**
 * Number of frequency bins, n_points + 1.
 */
uintptr_t mqte_spectrum_len(const struct MqteSpectrum *spectrum);

/**
 * Copy the raw cosine coefficients F(k) into `out[0..len]`.
 */
int32_t mqte_spectrum_coeffs(const struct MqteSpectrum *spectrum, double *out, uintptr_t len);

/**
 * Energy gap represented by bin k; NaN for a NULL handle.
 */
double mqte_spectrum_gap_at(const struct MqteSpectrum *spectrum, uintptr_t bin);

/**
 * Shot-noise standard deviation bound for a spectrum of N + 1 points
 * estimated from M shots each; 0 when M = 0.
 */
double mqte_noise_sigma_bound(uintptr_t n_points, uint64_t shots);

/**
 * Threshold peak detection. Writes up to `cap` peaks into `out` in
 * descending magnitude order and stores the total found in `found`;
 * when the total exceeds `cap` only the strongest `cap` are written.
 */
int32_t mqte_detect_peaks(const struct MqteSpectrum *spectrum,
                          double sigma,
                          double multiplier,
                          struct MqtePeak *out,
                          uintptr_t cap,
                          uintptr_t *found);

/**
 * Probability that a depth-`noise_events` run sees no noise event,
 * (1 - gamma)^noise_events. Returns NaN on invalid gamma.
 */
double mqte_survival_probability(double gamma, uint64_t noise_events);

/**
 * Shots needed for one expected noise-free run at the given depth.
 */
int32_t mqte_required_shot_budget(double gamma, uint64_t noise_events, uint64_t *out);

/**
 * Largest event depth at which `budget` shots still expect one clean run.
 */
int32_t mqte_max_tolerable_depth(double gamma, uint64_t budget, uint64_t *out);

/**
 * Parse a TOML experiment config and run it end to end, writing all
 * artifacts under `out_dir` (NULL keeps the config's own output key).
 * On success stores the manifest path in `manifest_path_out` as a
 * heap string; release it with `mqte_string_free`.
 */
int32_t mqte_run_experiment_toml(const char *toml_text,
                                 const char *out_dir,
                                 char **manifest_path_out);

/**
 * Release a string returned by this library.
 */
void mqte_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MQTE_H */
